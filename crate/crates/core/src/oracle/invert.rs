//! Bromwich inversion of the scale transform by Euler summation.
//!
//! The scale function W grows like e^{phi x}, so the bounded shift
//! g(y) = e^{-phi y} W(y), whose transform is s -> 1/(psi(s + phi) - q),
//! is inverted instead and the growth restored afterwards. The contour
//! integral is discretized with the trapezoidal rule on the vertical line
//! Re s = A/(2x) and the alternating tail is accelerated by binomial
//! averaging of consecutive partial sums.

use crate::error::{Error, Result};
use crate::levy::{laplace_exponent_complex, phi_q, LevyModel};
use num_complex::Complex64;

/// Default number of trapezoidal terms before averaging.
pub const DEFAULT_TERMS: usize = 50;

/// Partial sums blended by the binomial average.
const AVERAGING_ORDER: usize = 12;

/// Contour parameter; the discretization error is of order e^{-A}.
const CONTOUR_A: f64 = 18.4;

/// Shift applied when the contour runs too close to a singularity.
const CONTOUR_BUMP: f64 = 2.4;

const MAX_BUMPS: usize = 5;

/// Denominators smaller than this flag a near-singularity on the contour.
const SINGULARITY_TOL: f64 = 1e-13;

/// Evaluates the q-scale function at x > 0 by numerical inversion.
pub fn laplace_invert_scale(m: &LevyModel, q: f64, x: f64, terms: usize) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("inversion needs x > 0, got {x}")));
    }
    if terms == 0 {
        return Err(Error::Domain("inversion needs at least one term".into()));
    }
    let root = phi_q(m, q)?;

    'contour: for bump in 0..=MAX_BUMPS {
        let a = CONTOUR_A + bump as f64 * CONTOUR_BUMP;
        let re = a / (2.0 * x);

        let den0 = laplace_exponent_complex(m, Complex64::new(root.root + re, 0.0))? - q;
        if den0.norm() < SINGULARITY_TOL {
            continue 'contour;
        }
        let mut sum = 0.5 * (1.0 / den0).re;

        let total = terms + AVERAGING_ORDER;
        let mut partial = Vec::with_capacity(AVERAGING_ORDER + 1);
        for k in 1..=total {
            let theta = Complex64::new(root.root + re, k as f64 * std::f64::consts::PI / x);
            let den = laplace_exponent_complex(m, theta)? - q;
            if den.norm() < SINGULARITY_TOL {
                continue 'contour;
            }
            let term = (1.0 / den).re;
            sum += if k % 2 == 0 { term } else { -term };
            if k >= terms {
                partial.push(sum);
            }
        }

        // Binomial average sum_j C(m, j) 2^{-m} s_{terms + j}.
        let mut averaged = 0.0;
        let mut weight = 1.0;
        for (j, s) in partial.iter().enumerate() {
            averaged += weight * s;
            weight *= (AVERAGING_ORDER - j) as f64 / (j + 1) as f64;
        }
        averaged /= (1u64 << AVERAGING_ORDER) as f64;

        let shifted = (0.5 * a).exp() / x * averaged;
        return Ok((root.root * x).exp() * shifted);
    }
    Err(Error::Numerical(
        "inversion contour could not avoid a transform singularity".into(),
    ))
}
