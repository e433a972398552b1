use crate::config::RunConfig;
use crate::Failed;
use anyhow::{bail, Result};
use randeuler::distribution::{density_grid, probability_with_estimate};
use randeuler::expansion::coefficient_envelope;
use randeuler::montecarlo::{
    check_gate, empirical_probability, mean_stderr, sample_log_l_with_tol, variance,
};
use randeuler::zeta::{ZetaRunConfig, ZetaSampleRun};
use randeuler::{
    b_table, gaussian_leading, probability, CoeffTable, LFunctionSpec, PrimeTail, Rectangle,
};
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Opens `--out`, or stdout.
fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::BufWriter::new(std::io::stdout().lock())),
    })
}

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn quote(s: &str) -> String {
    format!("\"{s}\"")
}

/// Loads `--table` or builds a fresh table from the resolved settings, and
/// records the table's settings in `cfg`.
pub fn table(cfg: &mut RunConfig, path: Option<&Path>) -> Result<CoeffTable> {
    let t = match path {
        Some(p) => CoeffTable::load(p)?,
        None => {
            let spec = LFunctionSpec::from_selector(&cfg.spec)?;
            b_table(&spec, cfg.theta, cfg.log_t, &cfg.expansion)?
        }
    };
    cfg.adopt(&t);
    Ok(t)
}

fn rects_or(cfg: &RunConfig, j: usize, default: Vec<Rectangle>) -> Result<Vec<Rectangle>> {
    let rects = cfg.rectangles()?;
    let rects = if rects.is_empty() { default } else { rects };
    for r in &rects {
        if r.j() != j {
            bail!(randeuler::Error::ShapeMismatch(format!(
                "rectangle {} has J = {}, the table has J = {j}",
                r.label(),
                r.j()
            )));
        }
    }
    Ok(rects)
}

pub fn coeffs(cfg: &mut RunConfig, report: Option<&Path>) -> Result<()> {
    let t = table(cfg, None)?;
    let mut w = sink(&cfg.out)?;
    w.write_all(t.to_json()?.as_bytes())?;
    w.write_all(b"\n")?;
    w.flush()?;
    let envelope = match coefficient_envelope(&t) {
        Ok(e) => json!({
            "fit_c": e.fit_c,
            "fit_r": e.fit_r,
            "ls_c": e.ls_c,
            "ls_max_ratio": e.ls_max_ratio,
            "max_violation": e.max_violation,
        }),
        Err(e) => json!({ "unavailable": e.to_string() }),
    };
    let summary = json!({
        "config": cfg,
        "entries": t.entries.len(),
        "psi": t.psi,
        "sigma_t": t.sigma_t,
        "max_imag_residue": t.max_imag_residue,
        "hermiticity_residual": t.hermiticity_residual,
        "envelope": envelope,
    });
    let text = serde_json::to_string_pretty(&summary)?;
    match report {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => eprintln!("{text}"),
    }
    Ok(())
}

pub fn prob(cfg: &mut RunConfig, table_path: Option<&Path>) -> Result<()> {
    let t = table(cfg, table_path)?;
    let rects = rects_or(cfg, t.j, vec![Rectangle::centered(t.j, 0.5)])?;
    let mut w = sink(&cfg.out)?;
    writeln!(w, "# config: {}", cfg.to_json())?;
    writeln!(w, "rectangle,expansion,gaussian_leading,tail_bound")?;
    for r in &rects {
        let (p, est) = probability_with_estimate(&t, r)?;
        writeln!(
            w,
            "{},{},{},{}",
            quote(&r.label()),
            f(p),
            f(gaussian_leading(r)),
            f(est)
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn density(
    cfg: &mut RunConfig,
    table_path: Option<&Path>,
    component: usize,
    u: Option<(f64, f64)>,
    v: Option<(f64, f64)>,
    (nu, nv): (usize, usize),
) -> Result<()> {
    let t = table(cfg, table_path)?;
    if component >= t.j {
        bail!(randeuler::Error::IndexOutOfRange {
            index: component,
            limit: t.j
        });
    }
    let r = 3.0 * t.psi[component].sqrt();
    let grid = density_grid(
        &t,
        component,
        u.unwrap_or((-r, r)),
        v.unwrap_or((-r, r)),
        nu,
        nv,
    )?;
    let mut w = sink(&cfg.out)?;
    writeln!(w, "# config: {}", cfg.to_json())?;
    writeln!(w, "u,v,density")?;
    for (a, b, d) in grid {
        writeln!(w, "{},{},{}", f(a), f(b), f(d))?;
    }
    w.flush()?;
    Ok(())
}

pub fn mc(cfg: &mut RunConfig) -> Result<()> {
    let spec = LFunctionSpec::from_selector(&cfg.spec)?;
    let sigma = randeuler::lfunction::sigma_t(cfg.theta, cfg.log_t)?;
    cfg.p_mc = Some(cfg.p_mc());
    let batch =
        sample_log_l_with_tol(&spec, sigma, cfg.p_mc(), cfg.n, cfg.seed, cfg.expansion.tol)?;
    match &cfg.out {
        Some(p) if p.extension().is_some_and(|e| e == "bin") => batch.save(p)?,
        out => {
            let mut w = sink(out)?;
            writeln!(w, "# config: {}", cfg.to_json())?;
            batch.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    let columns: Vec<_> = (0..2 * batch.j)
        .map(|c| {
            let xs = batch.column(c);
            let (m, se) = mean_stderr(&xs);
            json!({ "mean": m, "stderr": se, "variance": variance(&xs) })
        })
        .collect();
    let summary = json!({
        "config": cfg,
        "sigma": sigma,
        "truncation_sd": batch.truncation_sd,
        "columns": columns,
    });
    eprintln!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

pub fn compare(cfg: &mut RunConfig, table_path: Option<&Path>, gate_fraction: f64) -> Result<()> {
    let t = table(cfg, table_path)?;
    let spec = LFunctionSpec::from_selector(&t.spec)?;
    let rects = rects_or(
        cfg,
        t.j,
        vec![Rectangle::centered(t.j, 0.5), Rectangle::centered(t.j, 1.0)],
    )?;
    let batch = sample_log_l_with_tol(&spec, t.sigma_t, cfg.p_mc(), cfg.n, cfg.seed, t.config.tol)?;
    // Only a like-for-like truncation may skip the gate.
    if cfg.p_mc() != t.config.p_max || t.config.prime_tail == PrimeTail::Complete {
        check_gate(&batch.truncation_sd, &t.psi, gate_fraction)?;
    }
    let mut w = sink(&cfg.out)?;
    writeln!(w, "# config: {}", cfg.to_json())?;
    writeln!(w, "rectangle,expansion,mc,stderr,abs_diff,verdict")?;
    let mut failures = 0;
    for r in &rects {
        let e = probability(&t, r)?;
        let (m, se) = empirical_probability(&batch, r, &t.psi)?;
        let diff = (e - m).abs();
        let pass = diff <= (4.0 * se).max(0.02);
        if !pass {
            failures += 1;
        }
        let verdict = if pass { "PASS" } else { "FAIL" };
        writeln!(
            w,
            "{},{},{},{},{},{verdict}",
            quote(&r.label()),
            f(e),
            f(m),
            f(se),
            f(diff)
        )?;
    }
    w.flush()?;
    if failures > 0 {
        bail!(Failed(format!(
            "{failures} of {} rectangles disagree with Monte Carlo",
            rects.len()
        )));
    }
    Ok(())
}

pub fn zeta(cfg: &RunConfig, t: f64) -> Result<()> {
    let run = ZetaSampleRun::generate(ZetaRunConfig::new(t, cfg.theta, cfg.n, cfg.seed))?;
    run.check_exclusions()?;
    let mut w = sink(&cfg.out)?;
    writeln!(w, "# config: {}", json!({ "run": cfg, "T": t }))?;
    run.write_csv(&mut w)?;
    w.flush()?;
    let re: Vec<f64> = run
        .samples
        .iter()
        .filter(|s| !s.excluded)
        .map(|s| s.log_abs)
        .collect();
    let im: Vec<f64> = run
        .samples
        .iter()
        .filter(|s| !s.excluded)
        .map(|s| s.arg)
        .collect();
    let (mean, se) = mean_stderr(&re);
    let summary = json!({
        "config": cfg,
        "T": t,
        "log_t": run.log_t,
        "sigma": run.sigma,
        "psi": run.psi,
        "kept": re.len(),
        "excluded": run.excluded,
        "ks_leading": run.ks_leading(),
        "mean_log_abs": mean,
        "stderr_log_abs": se,
        "variance_log_abs": variance(&re),
        "variance_arg": variance(&im),
        "psi_half": run.psi / 2.0,
    });
    eprintln!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

/// Quick end-to-end checks at small sizes. Prints one line per check.
pub fn selftest(cfg: &RunConfig) -> Result<()> {
    let mut cfg = cfg.clone();
    cfg.expansion.p_max = cfg.expansion.p_max.min(20_000);
    cfg.p_mc = None;
    let t = table(&mut cfg, None)?;
    let mut checks: Vec<(&str, bool, String)> = Vec::new();

    let zero = vec![0; t.j];
    checks.push((
        "constant term",
        t.get(&zero, &zero) == 1.0,
        format!("{}", t.get(&zero, &zero)),
    ));
    checks.push((
        "reality",
        t.max_imag_residue < 1e-12,
        format!("{:e}", t.max_imag_residue),
    ));
    let full = probability(&t, &Rectangle::full(t.j))?;
    checks.push(("full space", full == 1.0, format!("{full}")));

    let central = Rectangle::centered(t.j, 0.5);
    let p = probability(&t, &central)?;
    let mut left = central.clone();
    let mut right = central.clone();
    left.b[0] = 0.0;
    right.a[0] = 0.0;
    let halves = probability(&t, &left)? + probability(&t, &right)?;
    checks.push((
        "additivity",
        (p - halves).abs() < 1e-13,
        format!("{p} vs {halves}"),
    ));

    let spec = LFunctionSpec::from_selector(&t.spec)?;
    let batch = sample_log_l_with_tol(
        &spec,
        t.sigma_t,
        cfg.p_mc(),
        cfg.n.min(20_000),
        cfg.seed,
        t.config.tol,
    )?;
    let (m, se) = empirical_probability(&batch, &central, &t.psi)?;
    let tol = (4.0 * se).max(0.02);
    checks.push((
        "Monte Carlo",
        (p - m).abs() <= tol,
        format!("{p} vs {m} ± {se}"),
    ));

    let mut failed = 0;
    for (name, ok, detail) in &checks {
        println!("{} {name}: {detail}", if *ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    if failed > 0 {
        bail!(Failed(format!("{failed} self-test checks failed")));
    }
    Ok(())
}
