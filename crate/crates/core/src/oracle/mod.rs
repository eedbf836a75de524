//! Independent verification machinery: numerical transform inversion,
//! orbit-process algebra, and exact stage-wise Monte Carlo.
//!
//! Everything here recomputes quantities the solvers produce in closed
//! form, by different means, so the two sides can be compared in tests
//! and by the `verify` command.

mod invert;
mod mc;
mod orbit;

pub use invert::{laplace_invert_scale, DEFAULT_TERMS};
pub use mc::{mc_hitting_probability, mc_orbit_psi, mc_orbit_record, SUBSTREAMS};
pub use orbit::{
    bv_embedding, downward_record_expectation, downward_record_from_plus, orbit_evolve,
    orbit_jump, riccati_residual, solve_psi_orbit, uv_embedding, OrbitModel, OrbitPsi,
};

/// Controls for a Monte Carlo run.
///
/// Results are a pure function of (seed, stream_id, n_paths) and the model:
/// paths are keyed by global index into a fixed set of substreams, so the
/// thread count never changes the output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    /// Master seed.
    pub seed: u64,
    /// Number of simulated paths.
    pub n_paths: usize,
    /// Per-path stage budget; paths that exhaust it count as truncated.
    pub max_stages: usize,
    /// Distinguishes independent runs under one seed.
    pub stream_id: u64,
    /// Worker threads; clamped to the substream count.
    pub threads: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            n_paths: 100_000,
            max_stages: 1_000_000,
            stream_id: 0,
            threads: 1,
        }
    }
}

/// A Monte Carlo estimate with its sampling error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// Sample mean.
    pub mean: f64,
    /// Sample standard deviation divided by sqrt(n).
    pub stderr: f64,
    /// Number of paths.
    pub n: usize,
    /// Paths that hit the stage budget before resolving; each contributes
    /// zero to the mean, so the bias is at most truncated / n.
    pub truncated: usize,
}
