//! JSON model-file schema and its conversion to core types.
//!
//! Matrices are nested arrays in row-major order. The jump law is given
//! either through rational-transform coefficients `{p, a, b}` or as an
//! explicit triple `{alpha, T, t}`; exactly one of the two forms must be
//! present.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use scalefn_core::{
    companion_from_rational, standardize, LevyModel, Matrix, MeRep, RationalLst, SimConfig,
    DEFAULT_MAX_ITER, DEFAULT_TERMS, DEFAULT_TOL,
};

use crate::Failure;

/// Relative tolerance `verify` holds the inversion oracle to by default.
pub const DEFAULT_VERIFY_RTOL: f64 = 1e-6;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub d: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub q: f64,
    pub jump: JumpSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub oracle: OracleSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpSpec {
    pub p: Option<usize>,
    pub a: Option<Vec<f64>>,
    pub b: Option<Vec<f64>>,
    pub alpha: Option<Vec<f64>>,
    #[serde(rename = "T")]
    pub t_matrix: Option<Vec<Vec<f64>>>,
    pub t: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSpec {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSpec {
    /// Series length for the transform-inversion oracle.
    pub terms: usize,
    /// Relative tolerance `verify` holds the inversion comparison to.
    pub rtol: f64,
    /// Monte Carlo settings; their presence makes `verify` simulate too.
    pub mc: Option<McSpec>,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self {
            terms: DEFAULT_TERMS,
            rtol: DEFAULT_VERIFY_RTOL,
            mc: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSpec {
    pub seed: u64,
    pub paths: usize,
    pub max_stages: usize,
    pub stream_id: u64,
    /// Worker threads; 0 means one per available core.
    pub threads: usize,
}

impl Default for McSpec {
    fn default() -> Self {
        Self {
            seed: 1,
            paths: 100_000,
            max_stages: 1_000_000,
            stream_id: 0,
            threads: 0,
        }
    }
}

pub fn read(path: &Path) -> Result<ModelFile, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(4, format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::new(4, format!("{}: {e}", path.display())))
}

impl ModelFile {
    pub fn build_model(&self) -> Result<LevyModel, Failure> {
        if self.sigma == 0.0 && self.d <= 0.0 {
            return Err(Failure::new(1, "bounded-variation requires positive drift"));
        }
        if !(self.q >= 0.0) {
            return Err(Failure::new(
                1,
                format!("killing rate must be nonnegative, got {}", self.q),
            ));
        }
        let jump = self.jump.build()?;
        Ok(LevyModel::new(self.d, self.sigma, self.lambda, jump)?)
    }

    pub fn grid_points(&self) -> Result<Vec<f64>, Failure> {
        let g = &self.grid;
        if g.n_points < 1 {
            return Err(Failure::new(1, "grid needs at least one point"));
        }
        if !g.x_min.is_finite() || !g.x_max.is_finite() {
            return Err(Failure::new(1, "grid bounds must be finite"));
        }
        if g.x_min < 0.0 {
            return Err(Failure::new(1, "grid starts below zero"));
        }
        if g.x_max < g.x_min {
            return Err(Failure::new(1, "grid bounds are reversed"));
        }
        if g.n_points == 1 {
            return Ok(vec![g.x_min]);
        }
        let step = (g.x_max - g.x_min) / (g.n_points - 1) as f64;
        Ok((0..g.n_points).map(|i| g.x_min + step * i as f64).collect())
    }
}

impl JumpSpec {
    pub fn build(&self) -> Result<MeRep, Failure> {
        let rational = self.p.is_some() || self.a.is_some() || self.b.is_some();
        let explicit = self.alpha.is_some() || self.t_matrix.is_some() || self.t.is_some();
        match (rational, explicit) {
            (true, true) => Err(Failure::new(
                1,
                "jump mixes the rational and explicit forms; give exactly one",
            )),
            (false, false) => Err(Failure::new(
                1,
                "jump needs rational {p, a, b} or explicit {alpha, T, t} fields",
            )),
            (true, false) => self.build_rational(),
            (false, true) => self.build_explicit(),
        }
    }

    fn build_rational(&self) -> Result<MeRep, Failure> {
        let p = self
            .p
            .ok_or_else(|| Failure::new(1, "rational jump is missing the order p"))?;
        let a = self
            .a
            .clone()
            .ok_or_else(|| Failure::new(1, "rational jump is missing the denominator a"))?;
        let b = self
            .b
            .clone()
            .ok_or_else(|| Failure::new(1, "rational jump is missing the numerator b"))?;
        if p != a.len() {
            return Err(Failure::new(
                1,
                format!("declared order {p} but a has {} coefficients", a.len()),
            ));
        }
        let lst = RationalLst::new(a, b)?;
        Ok(standardize(&companion_from_rational(&lst))?)
    }

    fn build_explicit(&self) -> Result<MeRep, Failure> {
        let alpha = self
            .alpha
            .clone()
            .ok_or_else(|| Failure::new(1, "explicit jump is missing alpha"))?;
        let rows = self
            .t_matrix
            .clone()
            .ok_or_else(|| Failure::new(1, "explicit jump is missing T"))?;
        let t = self
            .t
            .clone()
            .ok_or_else(|| Failure::new(1, "explicit jump is missing t"))?;
        let t_mat = Matrix::from_rows(&rows)?;
        Ok(MeRep::new(Matrix::row(&alpha), t_mat, Matrix::col(&t))?)
    }
}

/// Resolves Monte Carlo settings against flag overrides and the
/// `SCALEFN_THREADS` cap.
pub fn sim_config(spec: &McSpec, seed: Option<u64>, paths: Option<usize>) -> SimConfig {
    let mut threads = if spec.threads == 0 {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    } else {
        spec.threads
    };
    if let Ok(raw) = std::env::var("SCALEFN_THREADS") {
        if let Ok(cap) = raw.trim().parse::<usize>() {
            threads = threads.min(cap.max(1));
        }
    }
    SimConfig {
        seed: seed.unwrap_or(spec.seed),
        n_paths: paths.unwrap_or(spec.paths),
        max_stages: spec.max_stages,
        stream_id: spec.stream_id,
        threads,
    }
}
