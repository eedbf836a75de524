//! Fixed-point solvers for the Wiener-Hopf data of the scale function and
//! evaluators built on top of them.
//!
//! With jumps represented by the triple (alpha, T, t), the scale function
//! W of the model killed at rate q takes the closed form
//!
//! ```text
//! W(x) = (exp(phi x) - L exp(G x) R) / psi'(phi),
//! ```
//!
//! where phi is the largest root of psi = q. Without a Brownian part the
//! pair (L, R) is (Psi, nu) with Psi the unique minimal solution of a
//! quadratic matrix equation found by a monotone-in-the-phase-type-case
//! fixed point; with a Brownian part the data comes from a scalar/vector
//! recursion in (a, b) derived from the two-sided Wiener-Hopf factors.

use crate::error::{Error, Result};
use crate::levy::{phi_q, LevyModel, RootData};
use crate::linalg::{mat_exp, LuFactors, Matrix};
use crate::quad::adaptive_simpson;

/// Default max-norm change between successive iterates for convergence.
pub const DEFAULT_TOL: f64 = 1e-14;

/// Default iteration budget for the fixed points.
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Converged data for a model without a Brownian part.
#[derive(Debug, Clone)]
pub struct BvSolution {
    /// Row vector solving Psi ((lambda+q) I - d T - d t Psi) = lambda alpha.
    pub psi: Matrix,
    /// Generator of the downward ladder phase, T + t Psi.
    pub g: Matrix,
    /// Column (phi I - T)^{-1} t.
    pub nu: Matrix,
    /// Iterations spent.
    pub iterations: usize,
    /// Max-norm residual of the quadratic equation at the returned Psi.
    pub residual: f64,
}

/// Converged data for a model with a Brownian part.
#[derive(Debug, Clone)]
pub struct UvSolution {
    /// Scalar unknown of the limiting system.
    pub a: f64,
    /// Row-vector unknown of the limiting system.
    pub b: Matrix,
    /// Upward Wiener-Hopf rate.
    pub omega: f64,
    /// Downward Wiener-Hopf rate.
    pub eta: f64,
    /// First-passage matrix (omega - a, b) / omega.
    pub psi: Matrix,
    /// Ladder generator [[-a, b], [t, T]].
    pub g: Matrix,
    /// Column (phi I - T)^{-1} t.
    pub nu: Matrix,
    /// Column (1; nu).
    pub v: Matrix,
    /// Iterations spent.
    pub iterations: usize,
    /// Absolute residual of the scalar limiting equation.
    pub residual_scalar: f64,
    /// Max-norm residual of the vector limiting equation.
    pub residual_vector: f64,
}

/// Either solver output, dispatched on the presence of a Brownian part.
#[derive(Debug, Clone)]
pub enum Solution {
    Bv(BvSolution),
    Uv(UvSolution),
}

impl Solution {
    /// Ladder generator G.
    pub fn g(&self) -> &Matrix {
        match self {
            Solution::Bv(s) => &s.g,
            Solution::Uv(s) => &s.g,
        }
    }

    /// Left evaluation row: Psi without a Brownian part, e_1' with one.
    fn eval_row(&self) -> Matrix {
        match self {
            Solution::Bv(s) => s.psi.clone(),
            Solution::Uv(s) => {
                let mut e1 = Matrix::zeros(1, s.g.rows());
                e1[(0, 0)] = 1.0;
                e1
            }
        }
    }

    /// Right evaluation column: nu without a Brownian part, (1; nu) with one.
    fn eval_col(&self) -> &Matrix {
        match self {
            Solution::Bv(s) => &s.nu,
            Solution::Uv(s) => &s.v,
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            Solution::Bv(s) => s.iterations,
            Solution::Uv(s) => s.iterations,
        }
    }
}

/// Precomputed pieces of the bounded-variation fixed-point step.
struct BvStep {
    factor: LuFactors,
    driving: Matrix,
    t_vec: Matrix,
}

impl BvStep {
    fn new(m: &LevyModel, q: f64) -> Result<Self> {
        let jump = m.jump();
        let p = jump.order();
        let ratio = (m.rate() + q) / m.drift();
        let mut system = jump.t_mat().scale(-1.0);
        for i in 0..p {
            system[(i, i)] += ratio;
        }
        // Row iterates solve against the transpose once per step.
        let factor = LuFactors::factor(&system.transpose())?;
        Ok(Self {
            factor,
            driving: jump.alpha().scale(m.rate() / m.drift()),
            t_vec: jump.t_vec().clone(),
        })
    }

    fn apply(&self, psi: &Matrix) -> Result<Matrix> {
        let weight = psi.matmul(&self.t_vec).scalar();
        let rhs = self.driving.add(&psi.scale(weight));
        Ok(self.factor.solve(&rhs.transpose())?.transpose())
    }
}

/// Solves the bounded-variation fixed point from Psi = 0.
pub fn solve_psi_bv(m: &LevyModel, q: f64, tol: f64, max_iter: usize) -> Result<BvSolution> {
    if !m.is_bounded_variation() {
        return Err(Error::InvalidModel(
            "bounded-variation solver requires sigma = 0".into(),
        ));
    }
    if !(q >= 0.0) {
        return Err(Error::Domain(format!("killing rate must be nonnegative, got {q}")));
    }
    let jump = m.jump();
    let p = jump.order();
    let step = BvStep::new(m, q)?;
    let mut psi = Matrix::zeros(1, p);
    let mut delta = f64::INFINITY;
    let mut iterations = 0;
    for n in 1..=max_iter {
        let next = step.apply(&psi)?;
        delta = next.sub(&psi).inf_norm();
        psi = next;
        iterations = n;
        if delta < tol {
            break;
        }
    }
    if delta >= tol {
        return Err(Error::NonConvergence {
            what: "bounded-variation fixed point",
            iterations,
            residual: delta,
        });
    }

    let g = jump.t_mat().add(&jump.t_vec().matmul(&psi));
    let root = phi_q(m, q)?;
    let nu = resolvent_column(jump.t_mat(), jump.t_vec(), root.root)?;
    let residual = bv_residual(m, q, &psi);
    Ok(BvSolution {
        psi,
        g,
        nu,
        iterations,
        residual,
    })
}

/// Max-norm of Psi ((lambda+q) I - d T - d t Psi) - lambda alpha.
fn bv_residual(m: &LevyModel, q: f64, psi: &Matrix) -> f64 {
    let jump = m.jump();
    let p = jump.order();
    let mut inner = jump
        .t_mat()
        .scale(-m.drift())
        .sub(&jump.t_vec().matmul(psi).scale(m.drift()));
    for i in 0..p {
        inner[(i, i)] += m.rate() + q;
    }
    psi.matmul(&inner)
        .sub(&jump.alpha().scale(m.rate()))
        .inf_norm()
}

/// Solves the recursion in (a, b) for a model with a Brownian part.
pub fn solve_psi_uv(m: &LevyModel, q: f64, tol: f64, max_iter: usize) -> Result<UvSolution> {
    if m.is_bounded_variation() {
        return Err(Error::InvalidModel(
            "unbounded-variation solver requires sigma > 0".into(),
        ));
    }
    if !(q >= 0.0) {
        return Err(Error::Domain(format!("killing rate must be nonnegative, got {q}")));
    }
    let jump = m.jump();
    let p = jump.order();
    let sigma2 = m.sigma() * m.sigma();
    let disc = (m.drift() * m.drift() + 2.0 * sigma2 * (m.rate() + q)).sqrt();
    let omega = (disc + m.drift()) / sigma2;
    let eta = (disc - m.drift()) / sigma2;

    let mut system = jump.t_mat().scale(-1.0);
    for i in 0..p {
        system[(i, i)] += eta;
    }
    let factor = LuFactors::factor(&system.transpose())?;
    let driving = jump.alpha().scale(2.0 * m.rate() / sigma2);

    let mut a = omega;
    let mut b = Matrix::zeros(1, p);
    let mut delta = f64::INFINITY;
    let mut iterations = 0;
    for n in 1..=max_iter {
        let rhs = driving.add(&b.scale(omega - a));
        let b_next = factor.solve(&rhs.transpose())?.transpose();
        let gap = omega - a;
        let a_next = omega
            - sigma2 / (2.0 * disc)
                * (gap * gap + b_next.matmul(jump.t_vec()).scalar());
        delta = (a_next - a).abs().max(b_next.sub(&b).inf_norm());
        a = a_next;
        b = b_next;
        iterations = n;
        if delta < tol {
            break;
        }
    }
    if delta >= tol {
        return Err(Error::NonConvergence {
            what: "unbounded-variation fixed point",
            iterations,
            residual: delta,
        });
    }

    let mut psi = Matrix::zeros(1, p + 1);
    psi[(0, 0)] = (omega - a) / omega;
    for j in 0..p {
        psi[(0, j + 1)] = b[(0, j)] / omega;
    }
    let mut g = Matrix::zeros(p + 1, p + 1);
    g[(0, 0)] = -a;
    for j in 0..p {
        g[(0, j + 1)] = b[(0, j)];
    }
    for i in 0..p {
        g[(i + 1, 0)] = jump.t_vec()[(i, 0)];
        for j in 0..p {
            g[(i + 1, j + 1)] = jump.t_mat()[(i, j)];
        }
    }
    let root = phi_q(m, q)?;
    let nu = resolvent_column(jump.t_mat(), jump.t_vec(), root.root)?;
    let mut v = Matrix::zeros(p + 1, 1);
    v[(0, 0)] = 1.0;
    for i in 0..p {
        v[(i + 1, 0)] = nu[(i, 0)];
    }

    let bt = b.matmul(jump.t_vec()).scalar();
    let residual_scalar =
        (sigma2 * a * a - 2.0 * m.drift() * a - 2.0 * (m.rate() + q) + sigma2 * bt).abs();
    let mut vector_system = jump.t_mat().scale(-1.0);
    for i in 0..p {
        vector_system[(i, i)] += a - 2.0 * m.drift() / sigma2;
    }
    let residual_vector = b
        .scale(sigma2)
        .matmul(&vector_system)
        .sub(&jump.alpha().scale(2.0 * m.rate()))
        .inf_norm();

    Ok(UvSolution {
        a,
        b,
        omega,
        eta,
        psi,
        g,
        nu,
        v,
        iterations,
        residual_scalar,
        residual_vector,
    })
}

/// Dispatches on the presence of a Brownian part.
pub fn solve(m: &LevyModel, q: f64, tol: f64, max_iter: usize) -> Result<Solution> {
    if m.is_bounded_variation() {
        Ok(Solution::Bv(solve_psi_bv(m, q, tol, max_iter)?))
    } else {
        Ok(Solution::Uv(solve_psi_uv(m, q, tol, max_iter)?))
    }
}

/// Column (phi I - T)^{-1} t.
fn resolvent_column(t_mat: &Matrix, t_vec: &Matrix, phi: f64) -> Result<Matrix> {
    let p = t_mat.rows();
    let mut shifted = t_mat.scale(-1.0);
    for i in 0..p {
        shifted[(i, i)] += phi;
    }
    LuFactors::factor(&shifted)?.solve(t_vec)
}

/// Scale function value; zero left of the origin.
pub fn scale_function(sol: &Solution, root: &RootData, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Ok(0.0);
    }
    let ladder = sol
        .eval_row()
        .matmul(&mat_exp(&sol.g().scale(x))?)
        .matmul(sol.eval_col())
        .scalar();
    Ok(((root.root * x).exp() - ladder) / root.slope)
}

/// Right derivative of the scale function at x >= 0.
pub fn scale_derivative(sol: &Solution, root: &RootData, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!(
            "scale derivative needs x >= 0, got {x}"
        )));
    }
    let ladder = sol
        .eval_row()
        .matmul(sol.g())
        .matmul(&mat_exp(&sol.g().scale(x))?)
        .matmul(sol.eval_col())
        .scalar();
    Ok((root.root * (root.root * x).exp() - ladder) / root.slope)
}

/// Integral of the scale function over [0, x] and how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleIntegral {
    pub value: f64,
    /// True when G was singular and adaptive quadrature was used instead
    /// of the closed form.
    pub used_quadrature: bool,
}

/// Integral of the scale function over [0, x].
pub fn scale_integral(sol: &Solution, root: &RootData, x: f64) -> Result<ScaleIntegral> {
    if x < 0.0 {
        return Err(Error::Domain(format!("scale integral needs x >= 0, got {x}")));
    }
    // exp-part: (e^{phi x} - 1)/phi, continuous limit x at phi = 0.
    let exp_part = if root.root > 0.0 {
        (root.root * x).exp_m1() / root.root
    } else {
        x
    };
    // Without killing, a downward-drifting process passes every level, the
    // ladder generator has a vanishing row sum, and the closed form below
    // divides by a singular G. The converged G only carries rounding dust
    // in that row, so detect the case structurally rather than by pivot.
    let ladder_singular = root.q == 0.0 && root.root > 0.0;
    let factor = if ladder_singular {
        None
    } else {
        match LuFactors::factor(sol.g()) {
            Ok(f) => Some(f),
            Err(Error::Singular(_)) => None,
            Err(e) => return Err(e),
        }
    };
    match factor {
        Some(factor) => {
            let p = sol.g().rows();
            let shifted = mat_exp(&sol.g().scale(x))?.sub(&Matrix::identity(p));
            let inner = factor.solve(&shifted.matmul(sol.eval_col()))?;
            let ladder = sol.eval_row().matmul(&inner).scalar();
            Ok(ScaleIntegral {
                value: (exp_part - ladder) / root.slope,
                used_quadrature: false,
            })
        }
        None => {
            let mut f = |u: f64| scale_function(sol, root, u);
            let value = adaptive_simpson(&mut f, 0.0, x, 1e-10)?;
            Ok(ScaleIntegral {
                value,
                used_quadrature: true,
            })
        }
    }
}

/// Probability of hitting the point -x before the killing clock rings.
pub fn hitting_probability(sol: &Solution, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!(
            "hitting probability needs x >= 0, got {x}"
        )));
    }
    Ok(sol
        .eval_row()
        .matmul(&mat_exp(&sol.g().scale(x))?)
        .matmul(sol.eval_col())
        .scalar())
}
