//! Browser front end: build a coefficient table once, then query rectangle
//! probabilities and density slices from it.
//!
//! [`Model`] holds the logic and is plain Rust; [`WebModel`] wraps it for
//! JavaScript and turns errors into exceptions.

use randeuler::distribution::{density_grid, probability_with_estimate};
use randeuler::{b_table, gaussian_leading, CoeffTable, ExpansionConfig, LFunctionSpec, Rectangle};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest prime cutoff accepted from the page, to keep builds interactive.
pub const MAX_P: u64 = 200_000;
/// Largest grid side accepted for density slices.
pub const MAX_GRID: usize = 201;

pub struct Model {
    table: CoeffTable,
}

impl Model {
    pub fn build(
        spec: &str,
        theta: f64,
        log_t: f64,
        cutoff: usize,
        p_max: u64,
    ) -> Result<Self, String> {
        if p_max > MAX_P {
            return Err(format!("P_max is limited to {MAX_P} here, got {p_max}"));
        }
        let spec = LFunctionSpec::from_selector(spec).map_err(|e| e.to_string())?;
        let config = ExpansionConfig {
            cutoff,
            p_max,
            ..Default::default()
        };
        let table = b_table(&spec, theta, log_t, &config).map_err(|e| e.to_string())?;
        Ok(Self { table })
    }

    pub fn table(&self) -> &CoeffTable {
        &self.table
    }

    /// Scale parameters and the coefficients up to `max_degree`.
    pub fn summary_json(&self, max_degree: usize) -> String {
        let t = &self.table;
        let entries: Vec<_> = t
            .entries
            .iter()
            .filter(|e| e.degree() <= max_degree)
            .map(|e| json!({ "k": e.k, "l": e.l, "degree": e.degree(), "b": e.value }))
            .collect();
        json!({
            "spec": t.spec,
            "j": t.j,
            "sigma_t": t.sigma_t,
            "psi": t.psi,
            "cutoff": t.config.cutoff,
            "entries_total": t.entries.len(),
            "entries": entries,
        })
        .to_string()
    }

    /// Expansion and leading-Gaussian probability of a rectangle given as
    /// `a,b,c,d` per component in normalized units.
    pub fn probability_json(&self, rect: &str) -> Result<String, String> {
        let r = Rectangle::parse(rect).map_err(|e| e.to_string())?;
        let (p, tail) = probability_with_estimate(&self.table, &r).map_err(|e| e.to_string())?;
        Ok(json!({
            "rectangle": r.label(),
            "expansion": p,
            "gaussian": gaussian_leading(&r),
            "tail_estimate": tail,
        })
        .to_string())
    }

    /// Density of one component on an `n × n` grid over `±half_width`
    /// normalized units, as `{u, v, values}` with `values` row-major in `u`.
    pub fn density_json(
        &self,
        component: usize,
        half_width: f64,
        n: usize,
    ) -> Result<String, String> {
        if !(2..=MAX_GRID).contains(&n) {
            return Err(format!("grid side must be in 2..={MAX_GRID}, got {n}"));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(format!("half width must be positive, got {half_width}"));
        }
        let psi = *self
            .table
            .psi
            .get(component)
            .ok_or_else(|| format!("component {component} out of range"))?;
        let s = (std::f64::consts::PI * psi).sqrt();
        let r = half_width * s;
        let grid = density_grid(&self.table, component, (-r, r), (-r, r), n, n)
            .map_err(|e| e.to_string())?;
        let axis: Vec<f64> = (0..n)
            .map(|i| -half_width + 2.0 * half_width * i as f64 / (n - 1) as f64)
            .collect();
        // Per unit area in normalized coordinates.
        let values: Vec<f64> = grid.iter().map(|g| g.2 * s * s).collect();
        Ok(json!({ "u": axis, "v": axis, "values": values }).to_string())
    }
}

#[wasm_bindgen]
pub struct WebModel(Model);

#[wasm_bindgen]
impl WebModel {
    #[wasm_bindgen(constructor)]
    pub fn new(
        spec: &str,
        theta: f64,
        log_t: f64,
        cutoff: usize,
        p_max: u32,
    ) -> Result<WebModel, JsError> {
        Model::build(spec, theta, log_t, cutoff, p_max as u64)
            .map(WebModel)
            .map_err(|e| JsError::new(&e))
    }

    pub fn summary(&self, max_degree: usize) -> String {
        self.0.summary_json(max_degree)
    }

    pub fn probability(&self, rect: &str) -> Result<String, JsError> {
        self.0.probability_json(rect).map_err(|e| JsError::new(&e))
    }

    pub fn density(&self, component: usize, half_width: f64, n: usize) -> Result<String, JsError> {
        self.0
            .density_json(component, half_width, n)
            .map_err(|e| JsError::new(&e))
    }
}
