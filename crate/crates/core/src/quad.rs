//! Small adaptive Simpson integrator for fallback paths where a closed
//! form is unavailable.

use crate::error::{Error, Result};

const MAX_DEPTH: usize = 48;

/// Fixed panels seeded before any refinement, so a feature narrower than
/// the whole interval cannot slip between the first three samples.
const INITIAL_PANELS: usize = 8;

/// Integrates f over [a, b] to roughly the requested absolute tolerance.
///
/// The integrand may fail; errors propagate. Subintervals are refined
/// until the classical |S2 - S1| <= 15 tol criterion holds or the depth
/// budget runs out.
pub fn adaptive_simpson<F>(f: &mut F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("integration limits ({a}, {b}) must be finite")));
    }
    if a == b {
        return Ok(0.0);
    }
    let panel_tol = tol / INITIAL_PANELS as f64;
    let step = (b - a) / INITIAL_PANELS as f64;
    let mut total = 0.0;
    for i in 0..INITIAL_PANELS {
        let lo = a + step * i as f64;
        let hi = if i + 1 == INITIAL_PANELS { b } else { lo + step };
        let flo = f(lo)?;
        let fhi = f(hi)?;
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
        total += refine(f, lo, hi, flo, fm, fhi, whole, panel_tol, MAX_DEPTH)?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mid = 0.5 * (a + b);
    let lm = 0.5 * (a + mid);
    let rm = 0.5 * (mid + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || depth == 0 {
        // Richardson correction of the composite rule.
        return Ok(left + right + delta / 15.0);
    }
    let half = 0.5 * tol;
    Ok(refine(f, a, mid, fa, flm, fm, left, half, depth - 1)?
        + refine(f, mid, b, fm, frm, fb, right, half, depth - 1)?)
}
