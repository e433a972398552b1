//! L-function families described by their local roots.
//!
//! A family `{L_1, …, L_J}` is given through the Euler-product roots
//! `α_{j,i}(p)`, from which `β_j(p^k) = (1/k) Σ_i α_{j,i}(p)^k`. The three
//! built-in members (ζ and the non-principal characters mod 3 and mod 4) are
//! degree one with `η = 0` and `ξ = 1`. Further members come from a callback
//! or from a small key-value text file, see [`LFunction::parse`].

use crate::error::{Error, Result};
use crate::primes::primes_up_to;
use crate::sum::NeumaierSum;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

/// Largest supported number of simultaneous L-functions.
pub const MAX_J: usize = 4;

/// Largest supported Euler-product degree.
pub const MAX_DEGREE: usize = 8;

type RootFn = Arc<dyn Fn(u64) -> Vec<Complex64> + Send + Sync>;

/// Where the local roots `α_i(p)` come from.
#[derive(Clone)]
pub enum RootSource {
    /// `α(p) = 1`.
    Zeta,
    /// `α(p) = χ(p mod q)` with `values[r] = χ(r)`.
    Dirichlet {
        modulus: u64,
        values: Vec<Complex64>,
    },
    /// Explicit roots for listed primes, `default` for the rest.
    Table {
        roots: BTreeMap<u64, Vec<Complex64>>,
        default: Vec<Complex64>,
    },
    /// Arbitrary user function of `p`.
    Callback(RootFn),
}

impl fmt::Debug for RootSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootSource::Zeta => f.write_str("Zeta"),
            RootSource::Dirichlet { modulus, .. } => write!(f, "Dirichlet(mod {modulus})"),
            RootSource::Table { roots, .. } => write!(f, "Table({} primes)", roots.len()),
            RootSource::Callback(_) => f.write_str("Callback"),
        }
    }
}

/// One member of the family.
#[derive(Debug, Clone)]
pub struct LFunction {
    pub label: String,
    pub degree: usize,
    pub eta: f64,
    pub xi: f64,
    pub source: RootSource,
}

impl LFunction {
    pub fn zeta() -> Self {
        Self {
            label: "zeta".into(),
            degree: 1,
            eta: 0.0,
            xi: 1.0,
            source: RootSource::Zeta,
        }
    }

    /// A Dirichlet character from its values on `0..q`.
    pub fn dirichlet(label: &str, values: Vec<Complex64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::invalid("a character needs modulus at least 2"));
        }
        if values[0] != Complex64::new(0.0, 0.0) {
            return Err(Error::invalid("a character vanishes at 0 mod q"));
        }
        if values.iter().any(|v| v.norm() > 1.0 + 1e-12) {
            return Err(Error::invalid(
                "character values must lie in the closed unit disc",
            ));
        }
        Ok(Self {
            label: label.into(),
            degree: 1,
            eta: 0.0,
            xi: 1.0,
            source: RootSource::Dirichlet {
                modulus: values.len() as u64,
                values,
            },
        })
    }

    /// The non-principal character mod 3.
    pub fn chi3() -> Self {
        let v = [0.0, 1.0, -1.0].map(|x| Complex64::new(x, 0.0)).to_vec();
        Self::dirichlet("chi3", v).expect("valid character")
    }

    /// The non-principal character mod 4.
    pub fn chi4() -> Self {
        let v = [0.0, 1.0, 0.0, -1.0]
            .map(|x| Complex64::new(x, 0.0))
            .to_vec();
        Self::dirichlet("chi4", v).expect("valid character")
    }

    pub fn from_callback(
        label: &str,
        degree: usize,
        eta: f64,
        xi: f64,
        f: impl Fn(u64) -> Vec<Complex64> + Send + Sync + 'static,
    ) -> Result<Self> {
        let l = Self {
            label: label.into(),
            degree,
            eta,
            xi,
            source: RootSource::Callback(Arc::new(f)),
        };
        l.validate()?;
        Ok(l)
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "zeta" => Some(Self::zeta()),
            "chi3" => Some(Self::chi3()),
            "chi4" => Some(Self::chi4()),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.degree == 0 || self.degree > MAX_DEGREE {
            return Err(Error::invalid(format!(
                "degree must be in 1..={MAX_DEGREE}, got {}",
                self.degree
            )));
        }
        if !(0.0..0.5).contains(&self.eta) {
            return Err(Error::invalid(format!(
                "eta must lie in [0, 1/2), got {}",
                self.eta
            )));
        }
        if !(self.xi > 0.0 && self.xi.is_finite()) {
            return Err(Error::invalid(format!(
                "xi must be positive, got {}",
                self.xi
            )));
        }
        Ok(())
    }

    /// The roots `α_1(p), …, α_d(p)`, zero-padded to `degree`.
    pub fn roots(&self, p: u64) -> Vec<Complex64> {
        let mut r = match &self.source {
            RootSource::Zeta => vec![Complex64::new(1.0, 0.0)],
            RootSource::Dirichlet { modulus, values } => vec![values[(p % modulus) as usize]],
            RootSource::Table { roots, default } => {
                roots.get(&p).cloned().unwrap_or_else(|| default.clone())
            }
            RootSource::Callback(f) => f(p),
        };
        r.resize(self.degree, Complex64::new(0.0, 0.0));
        r
    }

    /// Parses the key-value spec format.
    ///
    /// ```text
    /// # comment
    /// name = chi5
    /// d = 1
    /// eta = 0
    /// xi = 1
    /// character = 0, 1, 0:1, 0:-1, -1      # chi(0), ..., chi(q-1)
    /// ```
    ///
    /// Instead of `character`, roots may be given per prime as
    /// `root.<p> = re:im, re:im, ...` together with `default_root = ...`
    /// for unlisted primes. Complex numbers are written `re` or `re:im`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut fields: BTreeMap<String, (usize, String)> = BTreeMap::new();
        let mut table: BTreeMap<u64, Vec<Complex64>> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if let Some(p) = key.strip_prefix("root.") {
                let p: u64 = p.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad prime in `{key}`"),
                })?;
                table.insert(p, parse_complex_list(&value, line_no)?);
            } else if fields.insert(key.clone(), (line_no, value)).is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }

        let take = |k: &str| fields.get(k).cloned();
        let num = |k: &str, default: f64| -> Result<f64> {
            match take(k) {
                None => Ok(default),
                Some((line, v)) => v.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("`{k}` is not a number: `{v}`"),
                }),
            }
        };
        for (k, (line, _)) in &fields {
            if !matches!(
                k.as_str(),
                "name" | "d" | "eta" | "xi" | "character" | "modulus" | "default_root"
            ) {
                return Err(Error::Parse {
                    line: *line,
                    message: format!("unknown key `{k}`"),
                });
            }
        }

        let label = take("name")
            .map(|(_, v)| v)
            .unwrap_or_else(|| "custom".into());
        let eta = num("eta", 0.0)?;
        let xi = num("xi", 1.0)?;

        let source = if let Some((line, v)) = take("character") {
            if !table.is_empty() || fields.contains_key("default_root") {
                return Err(Error::Parse {
                    line,
                    message: "`character` cannot be combined with root tables".into(),
                });
            }
            let values = parse_complex_list(&v, line)?;
            if let Some((mline, m)) = take("modulus") {
                if m.parse::<usize>().ok() != Some(values.len()) {
                    return Err(Error::Parse {
                        line: mline,
                        message: format!(
                            "modulus {m} does not match {} character values",
                            values.len()
                        ),
                    });
                }
            }
            Self::dirichlet(&label, values)?.source
        } else if !table.is_empty() || fields.contains_key("default_root") {
            let default = match take("default_root") {
                Some((line, v)) => parse_complex_list(&v, line)?,
                None => vec![Complex64::new(0.0, 0.0)],
            };
            RootSource::Table {
                roots: table,
                default,
            }
        } else if label == "zeta" {
            RootSource::Zeta
        } else {
            return Err(Error::Parse {
                line: 0,
                message: "spec needs `character`, `root.<p>` entries or `default_root`".into(),
            });
        };

        let inferred = match &source {
            RootSource::Table { roots, default } => roots
                .values()
                .map(Vec::len)
                .chain(std::iter::once(default.len()))
                .max()
                .unwrap_or(1),
            _ => 1,
        };
        let degree = match take("d") {
            Some((line, v)) => v.parse().map_err(|_| Error::Parse {
                line,
                message: format!("`d` is not an integer: `{v}`"),
            })?,
            None => inferred,
        };
        if degree < inferred {
            return Err(Error::invalid(format!(
                "d = {degree} but some prime lists {inferred} roots"
            )));
        }
        let l = Self {
            label,
            degree,
            eta,
            xi,
            source,
        };
        l.validate()?;
        Ok(l)
    }
}

fn parse_complex(s: &str, line: usize) -> Result<Complex64> {
    let bad = || Error::Parse {
        line,
        message: format!("bad complex number `{s}`"),
    };
    let s = s.trim();
    match s.split_once(':') {
        Some((re, im)) => Ok(Complex64::new(
            re.trim().parse().map_err(|_| bad())?,
            im.trim().parse().map_err(|_| bad())?,
        )),
        None => Ok(Complex64::new(s.parse().map_err(|_| bad())?, 0.0)),
    }
}

fn parse_complex_list(s: &str, line: usize) -> Result<Vec<Complex64>> {
    s.split(',').map(|x| parse_complex(x, line)).collect()
}

/// The family `{L_1, …, L_J}`.
#[derive(Debug, Clone)]
pub struct LFunctionSpec {
    members: Vec<LFunction>,
}

impl LFunctionSpec {
    pub fn new(members: Vec<LFunction>) -> Result<Self> {
        if members.is_empty() || members.len() > MAX_J {
            return Err(Error::invalid(format!(
                "need between 1 and {MAX_J} L-functions, got {}",
                members.len()
            )));
        }
        for m in &members {
            m.validate()?;
        }
        Ok(Self { members })
    }

    pub fn zeta() -> Self {
        Self::new(vec![LFunction::zeta()]).expect("valid")
    }

    /// The J = 2 pair of characters mod 3 and mod 4.
    pub fn chi3_chi4() -> Self {
        Self::new(vec![LFunction::chi3(), LFunction::chi4()]).expect("valid")
    }

    /// Resolves `zeta`, a comma-separated list such as `chi3,chi4`, or spec
    /// file paths (which may be mixed with built-in names).
    pub fn from_selector(selector: &str) -> Result<Self> {
        let mut members = Vec::new();
        for part in selector.split(',').map(str::trim) {
            if let Some(l) = LFunction::builtin(part) {
                members.push(l);
            } else if Path::new(part).is_file() {
                members.push(LFunction::parse(&std::fs::read_to_string(part)?)?);
            } else {
                return Err(Error::invalid(format!(
                    "`{part}` is neither a built-in spec (zeta, chi3, chi4) nor a readable file"
                )));
            }
        }
        Self::new(members)
    }

    pub fn j(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[LFunction] {
        &self.members
    }

    pub fn member(&self, j: usize) -> Result<&LFunction> {
        self.members.get(j).ok_or(Error::IndexOutOfRange {
            index: j,
            limit: self.members.len(),
        })
    }

    /// Common Euler-product degree `d` (maximum over members).
    pub fn degree(&self) -> usize {
        self.members.iter().map(|m| m.degree).max().unwrap_or(1)
    }

    /// Common growth exponent `η` (maximum over members).
    pub fn eta(&self) -> f64 {
        self.members.iter().map(|m| m.eta).fold(0.0, f64::max)
    }

    pub fn xi(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.xi).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.members.iter().map(|m| m.label.clone()).collect()
    }

    /// Display label such as `chi3,chi4`.
    pub fn label(&self) -> String {
        self.labels().join(",")
    }

    /// `α_{j,i}(p)` for all `i`.
    pub fn alpha(&self, j: usize, p: u64) -> Result<Vec<Complex64>> {
        Ok(self.member(j)?.roots(p))
    }

    /// Largest `|α_{j,i}(p)| / p^η` over the given primes.
    pub fn max_root_ratio(&self, primes: &[u64]) -> f64 {
        let eta = self.eta();
        let mut worst: f64 = 0.0;
        for m in &self.members {
            for &p in primes {
                let bound = (p as f64).powf(eta);
                for a in m.roots(p) {
                    worst = worst.max(a.norm() / bound);
                }
            }
        }
        worst
    }
}

/// `β(p^k) = (1/k) Σ_i α_i^k` from precomputed roots.
pub fn beta_from_roots(roots: &[Complex64], k: u32) -> Complex64 {
    let s: Complex64 = roots.iter().map(|a| a.powu(k)).sum();
    s / k as f64
}

/// `β_{L_j}(p^k)`.
pub fn beta(spec: &LFunctionSpec, j: usize, p: u64, k: u32) -> Result<Complex64> {
    if k == 0 {
        return Err(Error::invalid("beta needs k >= 1"));
    }
    Ok(beta_from_roots(&spec.alpha(j, p)?, k))
}

/// `σ_T = 1/2 + (log T)^{-θ}`.
pub fn sigma_t(theta: f64, log_t: f64) -> Result<f64> {
    check_theta(theta)?;
    if !(log_t > 1.0 && log_t.is_finite()) {
        return Err(Error::invalid(format!("log T must exceed 1, got {log_t}")));
    }
    Ok(0.5 + log_t.powf(-theta))
}

/// `ψ_{j,T} = ξ_j θ log log T` for every member.
pub fn psi_jt(spec: &LFunctionSpec, theta: f64, log_t: f64) -> Result<Vec<f64>> {
    check_theta(theta)?;
    if !(log_t > std::f64::consts::E && log_t.is_finite()) {
        return Err(Error::invalid(format!("log T must exceed e, got {log_t}")));
    }
    let ll = log_t.ln();
    Ok(spec.xi().iter().map(|xi| xi * theta * ll).collect())
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 0.5 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "theta must lie in (0, 1/2), got {theta}"
        )))
    }
}

/// `θ`, `log T` and the derived `σ_T`, `ψ_{j,T}`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScaleParams {
    pub theta: f64,
    pub log_t: f64,
    pub sigma_t: f64,
    pub psi: Vec<f64>,
}

impl ScaleParams {
    pub fn new(spec: &LFunctionSpec, theta: f64, log_t: f64) -> Result<Self> {
        Ok(Self {
            theta,
            log_t,
            sigma_t: sigma_t(theta, log_t)?,
            psi: psi_jt(spec, theta, log_t)?,
        })
    }

    /// `θ log log T`, the common value of `ψ_{j,T}/ξ_j`.
    pub fn theta_loglog(&self) -> f64 {
        self.theta * self.log_t.ln()
    }
}

/// A truncated prime sum together with a bound on what was dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailedSum {
    pub value: f64,
    pub tail_bound: f64,
}

/// `Σ_{p ≤ P} Σ_{m ≤ M} |β_j(p^m)|² p^{-2mσ}` for every member, each with a
/// bound on the omitted `p > P` and `m > M` parts.
///
/// The `p > P` bound runs the integral test over all integers `n > P` using
/// `|β(p^m)| ≤ (d/m) p^{mη}`; it is rigorous but loose near `σ = 1/2`.
pub fn psi_exact(
    spec: &LFunctionSpec,
    sigma: f64,
    p_max: u64,
    m_max: u32,
) -> Result<Vec<TailedSum>> {
    let eta = spec.eta();
    if !(sigma > 0.5 + eta) {
        return Err(Error::Convergence {
            sigma,
            floor: 0.5 + eta,
            what: "the variance sum".into(),
        });
    }
    if p_max < 2 || m_max == 0 {
        return Err(Error::invalid("psi_exact needs P >= 2 and M >= 1"));
    }
    let primes = primes_up_to(p_max);
    let d = spec.degree() as f64;
    let s = sigma - eta;

    let mut out = Vec::with_capacity(spec.j());
    for member in spec.members() {
        let mut acc = NeumaierSum::new();
        let mut m_tail = NeumaierSum::new();
        for &p in &primes {
            let roots = member.roots(p);
            let pf = p as f64;
            let w = pf.powf(-2.0 * sigma);
            let mut wm = 1.0;
            for m in 1..=m_max {
                wm *= w;
                acc.add(beta_from_roots(&roots, m).norm_sqr() * wm);
            }
            let mm = (m_max + 1) as f64;
            let q = pf.powf(-2.0 * s);
            m_tail.add((d / mm).powi(2) * q.powf(mm) / (1.0 - q));
        }
        let mut p_tail = 0.0;
        let pf = p_max as f64;
        let mut m = 1.0;
        loop {
            let e = 2.0 * m * s;
            let term = (d / m).powi(2) * pf.powf(1.0 - e) / (e - 1.0);
            p_tail += term;
            if term < 1e-18 * p_tail || m > 200.0 {
                break;
            }
            m += 1.0;
        }
        out.push(TailedSum {
            value: acc.value(),
            tail_bound: p_tail + m_tail.value(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn scale_examples() {
        assert_relative_eq!(
            sigma_t(0.4, 1e4).unwrap(),
            0.525_118_864_315_095_8,
            max_relative = 1e-15
        );
        assert_eq!(sigma_t(0.25, 16.0).unwrap(), 1.0);
        assert!(sigma_t(0.5, 100.0).is_err());
        assert!(sigma_t(0.0, 100.0).is_err());
        let psi = psi_jt(&LFunctionSpec::zeta(), 0.4, 1e4).unwrap();
        assert_relative_eq!(psi[0], 3.684_136_148_790_474, max_relative = 1e-14);
        assert!(psi_jt(&LFunctionSpec::zeta(), 0.4, 2.0).is_err());
    }

    #[test]
    fn beta_examples() {
        let z = LFunctionSpec::zeta();
        for k in 1..6 {
            assert_eq!(
                beta(&z, 0, 7, k).unwrap(),
                Complex64::new(1.0 / k as f64, 0.0)
            );
        }
        let c = LFunctionSpec::chi3_chi4();
        assert_eq!(beta(&c, 1, 3, 1).unwrap().re, -1.0);
        assert_eq!(beta(&c, 0, 3, 1).unwrap().re, 0.0);
        assert_eq!(beta(&c, 0, 5, 1).unwrap().re, -1.0);
        assert!(beta(&c, 2, 5, 1).is_err());
    }

    #[test]
    fn parse_character_file() {
        let l = LFunction::parse(
            "# quartic character mod 5\nname = chi5\nd = 1\ncharacter = 0, 1, 0:1, 0:-1, -1\n",
        )
        .unwrap();
        assert_eq!(l.label, "chi5");
        assert_eq!(l.roots(7)[0], Complex64::new(0.0, 1.0));
        assert_eq!(l.roots(5)[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn parse_root_table() {
        let l =
            LFunction::parse("name = t\nd = 2\nroot.2 = 1, -1\ndefault_root = 0.5:0.5, 0.5:-0.5\n")
                .unwrap();
        assert_eq!(l.degree, 2);
        assert_eq!(
            l.roots(2),
            vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]
        );
        assert_eq!(l.roots(3)[1], Complex64::new(0.5, -0.5));
    }

    #[test]
    fn parse_errors_carry_lines() {
        match LFunction::parse("name = x\nbogus\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(LFunction::parse("name = x\nfoo = 1\ncharacter = 0, 1\n").is_err());
        assert!(LFunction::parse("character = 1, 1\n").is_err());
        assert!(LFunction::parse("character = 0, 1, -1\nmodulus = 4\n").is_err());
        assert!(LFunction::parse("eta = 0.7\ncharacter = 0, 1, -1\n").is_err());
    }

    #[test]
    fn selector() {
        assert_eq!(LFunctionSpec::from_selector("zeta").unwrap().j(), 1);
        let s = LFunctionSpec::from_selector("chi3, chi4").unwrap();
        assert_eq!(s.label(), "chi3,chi4");
        assert!(LFunctionSpec::from_selector("nope").is_err());
        assert!(LFunctionSpec::from_selector("zeta,zeta,zeta,zeta,zeta").is_err());
    }

    #[test]
    fn psi_exact_small() {
        let v = psi_exact(&LFunctionSpec::zeta(), 2.0, 3, 2).unwrap()[0];
        let expect = 2f64.powi(-4) + 3f64.powi(-4) + 0.25 * (2f64.powi(-8) + 3f64.powi(-8));
        assert_relative_eq!(v.value, expect, max_relative = 1e-15);
        assert!(v.tail_bound > 0.0);
        assert!(psi_exact(&LFunctionSpec::zeta(), 0.5, 100, 3).is_err());
    }
}
