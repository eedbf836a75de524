//! Spectrally negative Levy model with matrix-exponential downward jumps:
//! linear drift, optional Brownian part, compound Poisson jumps. Provides
//! the Laplace exponent, its derivative, and the largest root psi = q.

use crate::error::{Error, Result};
use crate::linalg::{solve_linear, LuFactors};
use crate::medist::{me_lst_complex, MeRep};
use num_complex::Complex64;

/// Relative tolerance met by the root returned from [`phi_q`].
pub const ROOT_TOL: f64 = 1e-12;

/// Slope threshold below which the root is reported as degenerate.
const DEGENERATE_SLOPE: f64 = 1e-12;

/// Model parameters: drift d, diffusion sigma >= 0, jump rate lambda > 0,
/// and the jump-size distribution.
#[derive(Debug, Clone)]
pub struct LevyModel {
    drift: f64,
    sigma: f64,
    rate: f64,
    jump: MeRep,
}

impl LevyModel {
    pub fn new(drift: f64, sigma: f64, rate: f64, jump: MeRep) -> Result<Self> {
        if !drift.is_finite() || !sigma.is_finite() || !rate.is_finite() {
            return Err(Error::InvalidModel("parameters must be finite".into()));
        }
        if sigma < 0.0 {
            return Err(Error::InvalidModel(format!("sigma must be nonnegative, got {sigma}")));
        }
        if rate <= 0.0 {
            return Err(Error::InvalidModel(format!("lambda must be positive, got {rate}")));
        }
        if sigma == 0.0 && drift <= 0.0 {
            return Err(Error::InvalidModel(
                "bounded-variation requires positive drift".into(),
            ));
        }
        Ok(Self {
            drift,
            sigma,
            rate,
            jump,
        })
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn jump(&self) -> &MeRep {
        &self.jump
    }

    /// True when there is no Brownian part, so paths have bounded variation.
    pub fn is_bounded_variation(&self) -> bool {
        self.sigma == 0.0
    }
}

/// Resolvent transform alpha (theta I - T)^{-1} t without a sign
/// restriction on theta; callers stay right of the spectrum of T.
fn jump_lst_at(jump: &MeRep, theta: f64) -> Result<f64> {
    let p = jump.order();
    let mut shifted = jump.t_mat().scale(-1.0);
    for i in 0..p {
        shifted[(i, i)] += theta;
    }
    let sol = solve_linear(&shifted, jump.t_vec())?;
    Ok(jump.alpha().matmul(&sol).scalar())
}

/// Laplace exponent psi(theta) for theta >= 0.
pub fn laplace_exponent(m: &LevyModel, theta: f64) -> Result<f64> {
    if theta < 0.0 {
        return Err(Error::Domain(format!(
            "Laplace exponent argument must be nonnegative, got {theta}"
        )));
    }
    laplace_exponent_at(m, theta)
}

/// Laplace exponent without the domain restriction; valid for any theta to
/// the right of the spectrum of T. Used by Monte Carlo escape bounds.
pub(crate) fn laplace_exponent_at(m: &LevyModel, theta: f64) -> Result<f64> {
    let lst = jump_lst_at(&m.jump, theta)?;
    Ok(m.drift * theta + 0.5 * m.sigma * m.sigma * theta * theta + m.rate * (lst - 1.0))
}

/// Derivative psi'(theta) = d + sigma^2 theta - lambda alpha (theta I - T)^{-2} t.
pub fn laplace_exponent_deriv(m: &LevyModel, theta: f64) -> Result<f64> {
    if theta < 0.0 {
        return Err(Error::Domain(format!(
            "Laplace exponent argument must be nonnegative, got {theta}"
        )));
    }
    let jump = &m.jump;
    let p = jump.order();
    let mut shifted = jump.t_mat().scale(-1.0);
    for i in 0..p {
        shifted[(i, i)] += theta;
    }
    let lu = LuFactors::factor(&shifted)?;
    let once = lu.solve(jump.t_vec())?;
    let twice = lu.solve(&once)?;
    let resolvent_sq = jump.alpha().matmul(&twice).scalar();
    Ok(m.drift + m.sigma * m.sigma * theta - m.rate * resolvent_sq)
}

/// Laplace exponent at a complex point, used by the inversion oracle.
pub fn laplace_exponent_complex(m: &LevyModel, theta: Complex64) -> Result<Complex64> {
    let lst = me_lst_complex(&m.jump, theta)?;
    Ok(m.drift * theta + 0.5 * m.sigma * m.sigma * theta * theta
        + m.rate * (lst - Complex64::new(1.0, 0.0)))
}

/// The largest root of psi(theta) = q together with the slope there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootData {
    /// Killing rate the root was computed for.
    pub q: f64,
    /// Largest solution of psi(theta) = q.
    pub root: f64,
    /// psi'(root), always positive.
    pub slope: f64,
}

/// Finds the largest root of psi(theta) = q by doubling an upper bracket,
/// bisecting from the right, then polishing with safeguarded Newton.
pub fn phi_q(m: &LevyModel, q: f64) -> Result<RootData> {
    if !(q >= 0.0) {
        return Err(Error::Domain(format!("killing rate must be nonnegative, got {q}")));
    }
    // With no killing the root sits at the origin exactly when the process
    // drifts upward or is critical; deciding this from the slope avoids a
    // search through the rounding noise of psi near zero.
    if q == 0.0 {
        let slope = laplace_exponent_deriv(m, 0.0)?;
        if slope >= -DEGENERATE_SLOPE {
            if slope <= DEGENERATE_SLOPE {
                return Err(Error::DegenerateRoot { root: 0.0, slope });
            }
            return Ok(RootData { q, root: 0.0, slope });
        }
    }

    let target = |theta: f64| -> Result<f64> { Ok(laplace_exponent_at(m, theta)? - q) };

    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while target(hi)? <= 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::Numerical("no upper bracket for the root".into()));
        }
    }
    // psi is convex with psi(0) = 0 <= q, so psi - q changes sign exactly
    // once on [lo, hi] and bisection from the right isolates the largest
    // root.
    for _ in 0..128 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if target(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut root = 0.5 * (lo + hi);
    for _ in 0..60 {
        let value = target(root)?;
        if value > 0.0 {
            hi = root;
        } else {
            lo = root;
        }
        let slope = laplace_exponent_deriv(m, root.max(0.0))?;
        let step = if slope > 0.0 { value / slope } else { f64::NAN };
        let next = root - step;
        let next = if next.is_finite() && next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        if (next - root).abs() < 1e-15 * (1.0 + root.abs()) {
            root = next;
            break;
        }
        root = next;
    }
    let value = target(root)?;
    if value.abs() > ROOT_TOL * q.max(1.0) {
        return Err(Error::NonConvergence {
            what: "root search for the Laplace exponent",
            iterations: 128,
            residual: value.abs(),
        });
    }
    let slope = laplace_exponent_deriv(m, root)?;
    if slope <= DEGENERATE_SLOPE {
        return Err(Error::DegenerateRoot { root, slope });
    }
    Ok(RootData { q, root, slope })
}
