//! Matrix-exponential jump distributions: rational Laplace transforms,
//! companion-form realizations, the standardized triple (alpha, T, t),
//! and inverse-transform sampling.
//!
//! A distribution on (0, infinity) enters either as a rational
//! Laplace-Stieltjes transform
//!
//! ```text
//! L(theta) = (b1 + b2 theta + ... + bp theta^{p-1})
//!            / (theta^p + a1 theta^{p-1} + ... + ap)
//! ```
//!
//! or directly as a triple with density alpha exp(T x) t. The companion
//! realization of a rational transform is standardized by a similarity
//! transform so that alpha sums to one and t = -T 1, which makes the
//! closing vector a genuine exit-rate column in the phase-type case.

use crate::error::{Error, Result};
use crate::linalg::{mat_exp, solve_linear, spectral_abscissa, LuFactors, Matrix};
use num_complex::Complex64;

/// Tolerance for the structural equalities alpha 1 = 1 and t = -T 1.
pub const ME_STRUCTURE_TOL: f64 = 1e-12;

/// Lowest admissible resultant magnitude between numerator and denominator
/// after coefficient normalization.
const RESULTANT_TOL: f64 = 1e-10;

/// Most negative density value tolerated on the validation grid.
pub const DENSITY_FLOOR: f64 = -1e-9;

/// Rational Laplace-Stieltjes transform of a distribution on (0, infinity).
///
/// `a[k]` multiplies `theta^(p-1-k)` in the monic denominator and `b[k]`
/// multiplies `theta^k` in the numerator, so `a[p-1]` and `b[0]` are the
/// constant terms.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalLst {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl RationalLst {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let p = a.len();
        if p == 0 {
            return Err(Error::InvalidTransform("denominator degree must be positive".into()));
        }
        if b.len() != p {
            return Err(Error::InvalidTransform(format!(
                "numerator needs exactly {p} coefficients, got {}",
                b.len()
            )));
        }
        if !a.iter().chain(b.iter()).all(|v| v.is_finite()) {
            return Err(Error::InvalidTransform("coefficients must be finite".into()));
        }
        let ap = a[p - 1];
        if ap == 0.0 {
            return Err(Error::InvalidTransform(
                "constant denominator coefficient must be nonzero".into(),
            ));
        }
        let scale = ap.abs().max(1.0);
        if (b[0] - ap).abs() > ME_STRUCTURE_TOL * scale {
            return Err(Error::InvalidTransform(format!(
                "constant terms must agree so the transform is 1 at zero: b1 = {}, ap = {ap}",
                b[0]
            )));
        }
        let lst = Self { a, b };
        let resultant = lst.normalized_resultant()?;
        if resultant.abs() <= RESULTANT_TOL {
            return Err(Error::InvalidTransform(format!(
                "numerator and denominator share a factor (normalized resultant {resultant:e})"
            )));
        }
        Ok(lst)
    }

    /// Denominator degree p.
    pub fn order(&self) -> usize {
        self.a.len()
    }

    /// Denominator coefficients a1..ap (descending powers, monic implied).
    pub fn denominator(&self) -> &[f64] {
        &self.a
    }

    /// Numerator coefficients b1..bp (ascending powers).
    pub fn numerator(&self) -> &[f64] {
        &self.b
    }

    /// Evaluates the transform at a real point off the denominator roots.
    pub fn eval(&self, theta: f64) -> f64 {
        let num = self
            .b
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * theta + c);
        let mut den = 1.0;
        for &c in &self.a {
            den = den * theta + c;
        }
        num / den
    }

    /// Evaluates the transform at a complex point.
    pub fn eval_complex(&self, theta: Complex64) -> Complex64 {
        let num = self
            .b
            .iter()
            .rev()
            .fold(Complex64::ZERO, |acc, &c| acc * theta + c);
        let mut den = Complex64::new(1.0, 0.0);
        for &c in &self.a {
            den = den * theta + c;
        }
        num / den
    }

    /// Resultant of numerator and denominator after scaling each polynomial
    /// by its largest absolute coefficient.
    fn normalized_resultant(&self) -> Result<f64> {
        let p = self.order();
        // Descending-power coefficient lists.
        let mut den = Vec::with_capacity(p + 1);
        den.push(1.0);
        den.extend_from_slice(&self.a);
        let num_degree = (0..p).rev().find(|&k| self.b[k] != 0.0).unwrap_or(0);
        let num: Vec<f64> = (0..=num_degree).rev().map(|k| self.b[k]).collect();

        let den_scale = den.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let num_scale = num.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let den: Vec<f64> = den.iter().map(|v| v / den_scale).collect();
        let num: Vec<f64> = num.iter().map(|v| v / num_scale).collect();

        if num_degree == 0 {
            // A nonzero constant shares no roots with anything.
            return Ok(1.0);
        }
        let m = p;
        let n = num_degree;
        let size = m + n;
        let mut sylvester = Matrix::zeros(size, size);
        for row in 0..n {
            for (k, &c) in den.iter().enumerate() {
                sylvester[(row, row + k)] = c;
            }
        }
        for row in 0..m {
            for (k, &c) in num.iter().enumerate() {
                sylvester[(n + row, row + k)] = c;
            }
        }
        sylvester.determinant()
    }
}

/// Companion-form realization (beta, S, s) of a rational transform.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionRep {
    beta: Matrix,
    companion: Matrix,
    closing: Matrix,
}

impl CompanionRep {
    /// Row vector beta of numerator coefficients.
    pub fn beta(&self) -> &Matrix {
        &self.beta
    }

    /// Companion matrix S of the denominator.
    pub fn companion(&self) -> &Matrix {
        &self.companion
    }

    /// Closing column s = (0, ..., 0, 1)'.
    pub fn closing(&self) -> &Matrix {
        &self.closing
    }

    /// Constant denominator coefficient recovered from the companion matrix.
    fn constant_coefficient(&self) -> f64 {
        let p = self.companion.rows();
        -self.companion[(p - 1, 0)]
    }
}

/// Builds the companion realization of a rational transform: superdiagonal
/// ones, last row of negated denominator coefficients, closing vector e_p.
pub fn companion_from_rational(lst: &RationalLst) -> CompanionRep {
    let p = lst.order();
    let mut companion = Matrix::zeros(p, p);
    for i in 0..p - 1 {
        companion[(i, i + 1)] = 1.0;
    }
    for j in 0..p {
        companion[(p - 1, j)] = -lst.denominator()[p - 1 - j];
    }
    let beta = Matrix::row(lst.numerator());
    let mut closing = Matrix::zeros(p, 1);
    closing[(p - 1, 0)] = 1.0;
    CompanionRep {
        beta,
        companion,
        closing,
    }
}

/// Standardized matrix-exponential triple (alpha, T, t) with alpha 1 = 1
/// and t = -T 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MeRep {
    alpha: Matrix,
    t_mat: Matrix,
    t_vec: Matrix,
    abscissa: f64,
}

impl MeRep {
    /// Validates and wraps a triple given directly.
    pub fn new(alpha: Matrix, t_mat: Matrix, t_vec: Matrix) -> Result<Self> {
        let p = t_mat.rows();
        if !t_mat.is_square() {
            return Err(Error::Dimension("T must be square".into()));
        }
        if alpha.rows() != 1 || alpha.cols() != p {
            return Err(Error::Dimension(format!(
                "alpha must be 1x{p}, got {}x{}",
                alpha.rows(),
                alpha.cols()
            )));
        }
        if t_vec.rows() != p || t_vec.cols() != 1 {
            return Err(Error::Dimension(format!(
                "t must be {p}x1, got {}x{}",
                t_vec.rows(),
                t_vec.cols()
            )));
        }
        let ones = Matrix::ones_col(p);
        let alpha_sum: f64 = alpha.data().iter().sum();
        if (alpha_sum - 1.0).abs() > ME_STRUCTURE_TOL {
            return Err(Error::InvalidModel(format!(
                "initial vector must sum to one, got {alpha_sum}"
            )));
        }
        let closing_gap = t_vec.add(&t_mat.matmul(&ones)).inf_norm();
        if closing_gap > ME_STRUCTURE_TOL {
            return Err(Error::InvalidModel(format!(
                "closing vector must equal -T 1 (gap {closing_gap:e})"
            )));
        }
        let abscissa = spectral_abscissa(&t_mat)?;
        if abscissa >= 0.0 {
            return Err(Error::InvalidModel(format!(
                "T must be stable, spectral abscissa is {abscissa}"
            )));
        }
        Ok(Self {
            alpha,
            t_mat,
            t_vec,
            abscissa,
        })
    }

    pub fn alpha(&self) -> &Matrix {
        &self.alpha
    }

    pub fn t_mat(&self) -> &Matrix {
        &self.t_mat
    }

    pub fn t_vec(&self) -> &Matrix {
        &self.t_vec
    }

    pub fn order(&self) -> usize {
        self.t_mat.rows()
    }

    /// Spectral abscissa of T, always negative.
    pub fn abscissa(&self) -> f64 {
        self.abscissa
    }

    /// Mean of the distribution, alpha (-T)^{-1} 1.
    pub fn mean(&self) -> Result<f64> {
        let ones = Matrix::ones_col(self.order());
        let sol = solve_linear(&self.t_mat.scale(-1.0), &ones)?;
        Ok(self.alpha.matmul(&sol).scalar())
    }

    /// Row alpha exp(T x); density and survival both read off it.
    fn weight_row(&self, x: f64) -> Result<Matrix> {
        Ok(self.alpha.matmul(&mat_exp(&self.t_mat.scale(x))?))
    }
}

/// Standardizes a companion realization via the similarity transform whose
/// first row is (1/ap, 0, ..., 0) and whose remaining rows put -1 on the
/// subdiagonal and 1 on the diagonal.
pub fn standardize(rep: &CompanionRep) -> Result<MeRep> {
    let p = rep.companion().rows();
    let ap = rep.constant_coefficient();
    if ap == 0.0 {
        return Err(Error::InvalidTransform(
            "constant denominator coefficient must be nonzero".into(),
        ));
    }
    let mut m = Matrix::zeros(p, p);
    m[(0, 0)] = 1.0 / ap;
    for i in 1..p {
        m[(i, i - 1)] = -1.0;
        m[(i, i)] = 1.0;
    }
    let alpha = rep.beta().matmul(&m);
    let lu = LuFactors::factor(&m)?;
    let t_mat = lu.solve(&rep.companion().matmul(&m))?;
    let t_vec = lu.solve(rep.closing())?;
    MeRep::new(alpha, t_mat, t_vec)
}

/// Density alpha exp(T x) t at x >= 0.
pub fn me_density(rep: &MeRep, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("density argument must be nonnegative, got {x}")));
    }
    Ok(rep.weight_row(x)?.matmul(rep.t_vec()).scalar())
}

/// Survival probability alpha exp(T x) 1 at x >= 0.
pub fn me_survival(rep: &MeRep, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("survival argument must be nonnegative, got {x}")));
    }
    let ones = Matrix::ones_col(rep.order());
    Ok(rep.weight_row(x)?.matmul(&ones).scalar())
}

/// Transform value alpha (theta I - T)^{-1} t for real theta >= 0.
pub fn me_lst(rep: &MeRep, theta: f64) -> Result<f64> {
    if theta < 0.0 {
        return Err(Error::Domain(format!(
            "transform argument must be nonnegative, got {theta}"
        )));
    }
    let p = rep.order();
    let mut shifted = rep.t_mat().scale(-1.0);
    for i in 0..p {
        shifted[(i, i)] += theta;
    }
    let sol = solve_linear(&shifted, rep.t_vec())?;
    Ok(rep.alpha().matmul(&sol).scalar())
}

/// Transform value at a complex point, used by the inversion oracle. The
/// complex solve is embedded as a doubled real system.
pub fn me_lst_complex(rep: &MeRep, theta: Complex64) -> Result<Complex64> {
    let p = rep.order();
    let mut system = Matrix::zeros(2 * p, 2 * p);
    for i in 0..p {
        for j in 0..p {
            let re = -rep.t_mat()[(i, j)];
            system[(i, j)] = re;
            system[(p + i, p + j)] = re;
        }
        system[(i, i)] += theta.re;
        system[(p + i, p + i)] += theta.re;
        system[(i, p + i)] = -theta.im;
        system[(p + i, i)] = theta.im;
    }
    let mut rhs = Matrix::zeros(2 * p, 1);
    for i in 0..p {
        rhs[(i, 0)] = rep.t_vec()[(i, 0)];
    }
    let sol = solve_linear(&system, &rhs)?;
    let mut re = 0.0;
    let mut im = 0.0;
    for j in 0..p {
        re += rep.alpha()[(0, j)] * sol[(j, 0)];
        im += rep.alpha()[(0, j)] * sol[(p + j, 0)];
    }
    Ok(Complex64::new(re, im))
}

/// Validation summary over a density grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MeDiagnostics {
    /// |alpha 1 - 1|.
    pub alpha_sum_error: f64,
    /// Max-norm of t + T 1.
    pub closing_error: f64,
    /// Spectral abscissa of T.
    pub abscissa: f64,
    /// Smallest density value seen on the grid.
    pub min_density: f64,
    /// Mass accumulated by the grid end, 1 - survival(x_max).
    pub mass: f64,
    /// Grid end point.
    pub x_max: f64,
    /// Number of grid points.
    pub grid_points: usize,
}

impl MeDiagnostics {
    /// True when the representation looks like a genuine distribution.
    pub fn passes(&self) -> bool {
        self.alpha_sum_error <= ME_STRUCTURE_TOL
            && self.closing_error <= ME_STRUCTURE_TOL
            && self.abscissa < 0.0
            && self.min_density >= DENSITY_FLOOR
            && (1.0 - self.mass).abs() <= 1e-8
    }
}

/// Default number of validation grid points.
pub const VALIDATE_GRID_POINTS: usize = 2048;

/// Scans the density on `[0, 40 / |abscissa|]` and reports diagnostics.
pub fn validate(rep: &MeRep) -> Result<MeDiagnostics> {
    validate_on_grid(rep, VALIDATE_GRID_POINTS, 40.0 / rep.abscissa().abs())
}

/// Scans the density on a caller-chosen uniform grid.
pub fn validate_on_grid(rep: &MeRep, grid_points: usize, x_max: f64) -> Result<MeDiagnostics> {
    if grid_points < 2 || !(x_max > 0.0) {
        return Err(Error::Domain("validation grid needs x_max > 0 and at least 2 points".into()));
    }
    let p = rep.order();
    let ones = Matrix::ones_col(p);
    let h = x_max / (grid_points - 1) as f64;
    let step = mat_exp(&rep.t_mat().scale(h))?;
    let mut weight = rep.alpha().clone();
    let mut min_density = f64::INFINITY;
    for k in 0..grid_points {
        if k > 0 {
            weight = weight.matmul(&step);
        }
        let density = weight.matmul(rep.t_vec()).scalar();
        if density < min_density {
            min_density = density;
        }
    }
    let survival_end = weight.matmul(&ones).scalar();
    let alpha_sum: f64 = rep.alpha().data().iter().sum();
    let closing_error = rep
        .t_vec()
        .add(&rep.t_mat().matmul(&ones))
        .inf_norm();
    Ok(MeDiagnostics {
        alpha_sum_error: (alpha_sum - 1.0).abs(),
        closing_error,
        abscissa: rep.abscissa(),
        min_density,
        mass: 1.0 - survival_end,
        x_max,
        grid_points,
    })
}

/// Inversion target |survival(x) - u| for sampling.
const SAMPLE_TOL: f64 = 1e-10;

/// Iteration cap for the safeguarded Newton search inside sampling.
const SAMPLE_MAX_ITER: usize = 200;

/// Draws the quantile of `u` in (0, 1): the x with survival(x) = u, found by
/// bracketing and safeguarded Newton on the survival function.
pub fn me_sample(rep: &MeRep, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("sampling needs u in (0,1), got {u}")));
    }
    let eval = |x: f64| -> Result<(f64, f64)> {
        let w = rep.weight_row(x)?;
        let ones = Matrix::ones_col(rep.order());
        Ok((w.matmul(&ones).scalar(), w.matmul(rep.t_vec()).scalar()))
    };
    let mut lo = 0.0;
    let mut hi = 1.0 / rep.abscissa().abs();
    let mut evals = 0usize;
    loop {
        let (s, _) = eval(hi)?;
        evals += 1;
        if s < u {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if evals > SAMPLE_MAX_ITER {
            return Err(Error::NonConvergence {
                what: "quantile bracketing",
                iterations: evals,
                residual: s - u,
            });
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in evals..SAMPLE_MAX_ITER {
        let (s, f) = eval(x)?;
        let gap = s - u;
        if gap.abs() <= SAMPLE_TOL {
            return Ok(x);
        }
        if gap > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        // Newton step on survival; fall back to bisection when it leaves
        // the bracket or the density is too flat.
        let newton = x + gap / f;
        x = if f > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NonConvergence {
        what: "quantile search",
        iterations: SAMPLE_MAX_ITER,
        residual: f64::NAN,
    })
}

/// Bulk sampler: a dense survival/density table with cubic Hermite
/// interpolation, verified against the exact survival at construction.
/// Draws cost a table lookup plus a scalar root solve; values far in the
/// tail fall back to the exact search.
#[derive(Debug, Clone)]
pub struct MeSampler {
    rep: MeRep,
    step: f64,
    survival: Vec<f64>,
    density: Vec<f64>,
}

impl MeSampler {
    pub fn new(rep: &MeRep) -> Result<Self> {
        let mut step = 0.01 / rep.t_mat().inf_norm().max(rep.abscissa().abs());
        for _ in 0..6 {
            let sampler = Self::build(rep, step)?;
            if sampler.verify()? {
                return Ok(sampler);
            }
            step *= 0.5;
        }
        Err(Error::Numerical(
            "sampler table failed interpolation verification".into(),
        ))
    }

    fn build(rep: &MeRep, step: f64) -> Result<Self> {
        let tail_cut = 1e-13;
        let x_cap = 120.0 / rep.abscissa().abs();
        let p = rep.order();
        let ones = Matrix::ones_col(p);
        let advance = mat_exp(&rep.t_mat().scale(step))?;
        let mut weight = rep.alpha().clone();
        let mut survival = Vec::with_capacity(4096);
        let mut density = Vec::with_capacity(4096);
        loop {
            let s = weight.matmul(&ones).scalar();
            let f = weight.matmul(rep.t_vec()).scalar();
            survival.push(s);
            density.push(f);
            let x = (survival.len() - 1) as f64 * step;
            if (s <= tail_cut && survival.len() > 1) || x > x_cap {
                break;
            }
            weight = weight.matmul(&advance);
        }
        Ok(Self {
            rep: rep.clone(),
            step,
            survival,
            density,
        })
    }

    /// Compares the interpolant to the exact survival at cell midpoints
    /// spread over the table.
    fn verify(&self) -> Result<bool> {
        let cells = self.survival.len() - 1;
        let probes = 48.min(cells);
        for k in 0..probes {
            let cell = (k * cells) / probes;
            let x = (cell as f64 + 0.5) * self.step;
            let exact = me_survival(&self.rep, x)?;
            let interpolated = self.interpolate(cell, 0.5);
            if (interpolated - exact).abs() > 2e-11 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Hermite cubic on cell `i` at local coordinate s in [0, 1].
    fn interpolate(&self, i: usize, s: f64) -> f64 {
        let (s0, s1) = (self.survival[i], self.survival[i + 1]);
        let (d0, d1) = (-self.density[i] * self.step, -self.density[i + 1] * self.step);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * s0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * s1
            + (s3 - s2) * d1
    }

    fn interpolate_slope(&self, i: usize, s: f64) -> f64 {
        let (s0, s1) = (self.survival[i], self.survival[i + 1]);
        let (d0, d1) = (-self.density[i] * self.step, -self.density[i + 1] * self.step);
        let s2 = s * s;
        (6.0 * s2 - 6.0 * s) * s0
            + (3.0 * s2 - 4.0 * s + 1.0) * d0
            + (-6.0 * s2 + 6.0 * s) * s1
            + (3.0 * s2 - 2.0 * s) * d1
    }

    /// Quantile of `u` in (0, 1).
    pub fn sample(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("sampling needs u in (0,1), got {u}")));
        }
        if u < *self.survival.last().expect("table nonempty") {
            return me_sample(&self.rep, u);
        }
        // Survival values decrease along the table: binary search the cell.
        let mut lo = 0usize;
        let mut hi = self.survival.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.survival[mid] >= u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let cell = lo;
        let span = self.survival[cell] - self.survival[cell + 1];
        let mut s = if span > 0.0 {
            ((self.survival[cell] - u) / span).clamp(0.0, 1.0)
        } else {
            0.5
        };
        let mut bracket = (0.0f64, 1.0f64);
        for _ in 0..64 {
            let gap = self.interpolate(cell, s) - u;
            if gap.abs() <= SAMPLE_TOL * 0.5 {
                break;
            }
            if gap > 0.0 {
                bracket.0 = s;
            } else {
                bracket.1 = s;
            }
            let slope = self.interpolate_slope(cell, s);
            let newton = if slope < 0.0 { s - gap / slope } else { f64::NAN };
            s = if newton.is_finite() && newton > bracket.0 && newton < bracket.1 {
                newton
            } else {
                0.5 * (bracket.0 + bracket.1)
            };
        }
        Ok((cell as f64 + s) * self.step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn erlang21() -> RationalLst {
        RationalLst::new(vec![2.0, 1.0], vec![1.0, 0.0]).unwrap()
    }

    fn erlang21_me() -> MeRep {
        standardize(&companion_from_rational(&erlang21())).unwrap()
    }

    /// Order-3 transform of the density proportional to
    /// exp(-x) (1 - cos(2 pi x)), which is matrix-exponential but not
    /// phase-type.
    fn oscillating_me3() -> MeRep {
        let w = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
        let lst = RationalLst::new(vec![3.0, 3.0 + w, 1.0 + w], vec![1.0 + w, 0.0, 0.0]).unwrap();
        standardize(&companion_from_rational(&lst)).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
        assert!((a - b).abs() <= tol, "{what}: {a} vs {b}");
    }

    #[test]
    fn rejects_zero_constant_coefficient() {
        match RationalLst::new(vec![2.0, 0.0], vec![0.0, 1.0]) {
            Err(Error::InvalidTransform(_)) => {}
            other => panic!("expected invalid transform, got {other:?}"),
        }
    }

    #[test]
    fn rejects_mismatched_constant_terms() {
        match RationalLst::new(vec![2.0], vec![1.0]) {
            Err(Error::InvalidTransform(_)) => {}
            other => panic!("expected invalid transform, got {other:?}"),
        }
    }

    #[test]
    fn rejects_common_factor() {
        // (2 + 2 theta) / (theta + 1)(theta + 2) cancels to 2 / (theta + 2).
        match RationalLst::new(vec![3.0, 2.0], vec![2.0, 2.0]) {
            Err(Error::InvalidTransform(msg)) => {
                assert!(msg.contains("resultant"), "unexpected message {msg}");
            }
            other => panic!("expected invalid transform, got {other:?}"),
        }
    }

    #[test]
    fn companion_of_exponential_rate_two() {
        let lst = RationalLst::new(vec![2.0], vec![2.0]).unwrap();
        let rep = companion_from_rational(&lst);
        assert_eq!(rep.beta().data(), &[2.0]);
        assert_eq!(rep.companion().data(), &[-2.0]);
        assert_eq!(rep.closing().data(), &[1.0]);
        let me = standardize(&rep).unwrap();
        assert_eq!(me.alpha().data(), &[1.0]);
        assert_eq!(me.t_mat().data(), &[-2.0]);
        assert_eq!(me.t_vec().data(), &[2.0]);
    }

    #[test]
    fn companion_of_erlang_two_one() {
        let rep = companion_from_rational(&erlang21());
        assert_eq!(rep.beta().data(), &[1.0, 0.0]);
        assert_eq!(rep.companion().data(), &[0.0, 1.0, -1.0, -2.0]);
        assert_eq!(rep.closing().data(), &[0.0, 1.0]);
    }

    #[test]
    fn standardized_erlang_matches_bidiagonal_form() {
        let me = erlang21_me();
        for (got, want) in me.alpha().data().iter().zip(&[1.0, 0.0]) {
            assert_close(*got, *want, 1e-14, "alpha");
        }
        for (got, want) in me.t_mat().data().iter().zip(&[-1.0, 1.0, 0.0, -1.0]) {
            assert_close(*got, *want, 1e-14, "T");
        }
        for (got, want) in me.t_vec().data().iter().zip(&[0.0, 1.0]) {
            assert_close(*got, *want, 1e-14, "t");
        }
    }

    #[test]
    fn companion_characteristic_polynomial_matches_denominator() {
        // Faddeev-LeVerrier on S recovers the monic denominator.
        let lst = RationalLst::new(vec![3.0, 3.0 + 39.0, 1.0 + 39.0], vec![40.0, 0.0, 0.0]).unwrap();
        let rep = companion_from_rational(&lst);
        let s = rep.companion();
        let p = s.rows();
        let mut m = Matrix::identity(p);
        let mut coeffs = vec![1.0];
        for k in 1..=p {
            let am = s.matmul(&m);
            let trace: f64 = (0..p).map(|i| am[(i, i)]).sum();
            let c = -trace / k as f64;
            coeffs.push(c);
            m = am;
            for i in 0..p {
                m[(i, i)] += c;
            }
        }
        for (k, want) in lst.denominator().iter().enumerate() {
            let rel = (coeffs[k + 1] - want).abs() / want.abs().max(1.0);
            assert!(rel <= 1e-10, "coefficient {k}: {} vs {want}", coeffs[k + 1]);
        }
    }

    #[test]
    fn erlang_density_and_survival_match_closed_forms() {
        let me = erlang21_me();
        for &x in &[0.0, 0.3, 1.0, 2.5, 7.0] {
            let density = me_density(&me, x).unwrap();
            let survival = me_survival(&me, x).unwrap();
            assert_close(density, x * (-x).exp(), 1e-13, "density");
            assert_close(survival, (1.0 + x) * (-x).exp(), 1e-13, "survival");
        }
    }

    #[test]
    fn transform_round_trip_rational_vs_resolvent() {
        let lst = erlang21();
        let me = erlang21_me();
        for &theta in &[0.0, 0.17, 1.0, 4.0, 25.0] {
            let direct = lst.eval(theta);
            let resolvent = me_lst(&me, theta).unwrap();
            let rel = (direct - resolvent).abs() / direct.abs().max(1e-300);
            assert!(rel <= 1e-12, "theta {theta}: {direct} vs {resolvent}");
        }
    }

    #[test]
    fn complex_transform_agrees_with_rational_evaluation() {
        let lst = erlang21();
        let me = erlang21_me();
        for &(re, im) in &[(0.5, 1.0), (2.0, -3.0), (0.1, 40.0)] {
            let theta = Complex64::new(re, im);
            let direct = lst.eval_complex(theta);
            let resolvent = me_lst_complex(&me, theta).unwrap();
            assert!(
                (direct - resolvent).norm() <= 1e-12 * direct.norm().max(1.0),
                "theta {theta}: {direct} vs {resolvent}"
            );
        }
    }

    #[test]
    fn validate_accepts_erlang_and_oscillating_me() {
        for me in [erlang21_me(), oscillating_me3()] {
            let diag = validate(&me).unwrap();
            assert!(diag.passes(), "diagnostics {diag:?}");
        }
    }

    #[test]
    fn oscillating_me_density_touches_zero_at_integers() {
        let me = oscillating_me3();
        let w = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
        let scale = (1.0 + w) / w;
        for &x in &[0.25_f64, 0.5, 1.0, 1.75, 3.0] {
            let want = scale * (-x).exp() * (1.0 - (2.0 * std::f64::consts::PI * x).cos());
            assert_close(me_density(&me, x).unwrap(), want, 1e-10, "oscillating density");
        }
        assert!(me_density(&me, 1.0).unwrap().abs() <= 1e-10);
        assert!(me_density(&me, 2.0).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn direct_triple_must_be_standardized() {
        // alpha does not sum to one.
        let bad = MeRep::new(
            Matrix::row(&[0.5, 0.2]),
            Matrix::new(2, 2, vec![-1.0, 1.0, 0.0, -1.0]).unwrap(),
            Matrix::col(&[0.0, 1.0]),
        );
        assert!(matches!(bad, Err(Error::InvalidModel(_))));
        // Closing vector inconsistent with -T 1.
        let bad = MeRep::new(
            Matrix::row(&[1.0, 0.0]),
            Matrix::new(2, 2, vec![-1.0, 1.0, 0.0, -1.0]).unwrap(),
            Matrix::col(&[0.5, 1.0]),
        );
        assert!(matches!(bad, Err(Error::InvalidModel(_))));
        // Unstable T.
        let bad = MeRep::new(
            Matrix::row(&[1.0]),
            Matrix::new(1, 1, vec![1.0]).unwrap(),
            Matrix::col(&[-1.0]),
        );
        assert!(matches!(bad, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn sampling_inverts_the_survival_function() {
        let me = erlang21_me();
        for &u in &[0.999, 0.75, 0.5, 0.2, 1e-3, 1e-8] {
            let x = me_sample(&me, u).unwrap();
            let survival = me_survival(&me, x).unwrap();
            assert!(
                (survival - u).abs() <= 1e-10,
                "u {u}: survival({x}) = {survival}"
            );
        }
    }

    #[test]
    fn sampler_table_agrees_with_exact_search() {
        for me in [erlang21_me(), oscillating_me3()] {
            let sampler = MeSampler::new(&me).unwrap();
            for &u in &[0.9999, 0.9, 0.5, 0.1, 1e-4, 1e-12, 1e-15] {
                let x = sampler.sample(u).unwrap();
                let survival = me_survival(&me, x).unwrap();
                assert!(
                    (survival - u).abs() <= 1e-10,
                    "u {u}: survival({x}) = {survival}"
                );
            }
        }
    }

    #[test]
    fn sampler_empirical_mean_matches_true_mean() {
        use rand::{Rng, SeedableRng};
        let me = erlang21_me();
        let sampler = MeSampler::new(&me).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 200_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let u: f64 = rng.random();
            sum += sampler.sample(1.0 - u).unwrap();
        }
        let mean = sum / n as f64;
        // True mean 2, standard deviation sqrt(2).
        let stderr = (2.0f64 / n as f64).sqrt();
        assert!(
            (mean - 2.0).abs() <= 4.0 * stderr,
            "empirical mean {mean} vs 2 (stderr {stderr})"
        );
    }
}
