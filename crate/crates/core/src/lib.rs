//! Scale functions of spectrally negative Levy processes whose jumps have
//! matrix-exponential distributions.
//!
//! The q-scale function W is the increasing function supported on
//! [0, infinity) whose Laplace transform is 1/(psi(theta) - q) to the
//! right of the largest root of psi = q, where psi is the process's
//! Laplace exponent. For matrix-exponential jumps W admits the closed
//! form (e^{phi x} - L e^{G x} R) / psi'(phi), and this crate computes
//! the ingredients by fixed-point iteration:
//!
//! - [`medist`] turns a rational transform into a standardized
//!   matrix-exponential triple and evaluates / samples the jump law;
//! - [`levy`] assembles the Laplace exponent and finds its largest root;
//! - [`solver`] runs the fixed points and evaluates W, its derivative,
//!   its integral, and the point-hitting probability;
//! - [`oracle`] independently checks everything by numerical transform
//!   inversion, orbit-process algebra, and exact stage-wise Monte Carlo;
//! - [`linalg`] is the small dense kernel (LU, matrix exponential,
//!   spectral abscissa) everything else leans on.
//!
//! # Example
//!
//! ```
//! use scalefn_core::{
//!     companion_from_rational, phi_q, scale_function, solve, standardize, LevyModel,
//!     RationalLst, DEFAULT_MAX_ITER, DEFAULT_TOL,
//! };
//!
//! // Unit-drift compound Poisson with rate-2 exponential jumps at
//! // intensity 1: the classic ruin model with W(x) = 2 - e^{-x}.
//! let lst = RationalLst::new(vec![2.0], vec![2.0]).unwrap();
//! let jump = standardize(&companion_from_rational(&lst)).unwrap();
//! let model = LevyModel::new(1.0, 0.0, 1.0, jump).unwrap();
//!
//! let root = phi_q(&model, 0.0).unwrap();
//! let sol = solve(&model, 0.0, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
//! let w = scale_function(&sol, &root, 1.0).unwrap();
//! assert!((w - (2.0 - (-1.0f64).exp())).abs() < 1e-10);
//! ```

pub mod error;
pub mod levy;
pub mod linalg;
pub mod medist;
pub mod oracle;
pub mod quad;
pub mod solver;

pub use error::{Error, Result};
pub use levy::{laplace_exponent, laplace_exponent_deriv, phi_q, LevyModel, RootData};
pub use linalg::{mat_exp, solve_linear, spectral_abscissa, LuFactors, Matrix};
pub use medist::{
    companion_from_rational, me_density, me_lst, me_sample, me_survival, standardize, validate,
    CompanionRep, MeDiagnostics, MeRep, MeSampler, RationalLst,
};
pub use oracle::{
    bv_embedding, downward_record_expectation, downward_record_from_plus, laplace_invert_scale,
    mc_hitting_probability, mc_orbit_psi, mc_orbit_record, orbit_evolve, orbit_jump,
    riccati_residual, solve_psi_orbit, uv_embedding, McEstimate, OrbitModel, OrbitPsi, SimConfig,
    DEFAULT_TERMS,
};
pub use solver::{
    hitting_probability, scale_derivative, scale_function, scale_integral, solve, solve_psi_bv,
    solve_psi_uv, BvSolution, ScaleIntegral, Solution, UvSolution, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
