//! Orbit-process algebra: the deterministic flow and jump map on
//! normalized row vectors, the fixed point of the associated Riccati
//! equation, and the downward record propagator.
//!
//! An orbit model is a two-region fluid structure: the level rises at
//! unit rate while the orbit sits in the plus region and falls at unit
//! rate in the minus region. C blocks govern the flow within a region,
//! D blocks the jumps across regions, and any normalization deficit
//! -(C 1 + D 1) acts as a termination intensity.

use crate::error::{Error, Result};
use crate::levy::LevyModel;
use crate::linalg::{mat_exp, LuFactors, Matrix};

/// Row-sum slack allowed when validating termination intensities.
const DEFICIT_TOL: f64 = 1e-12;

/// Smallest flow normalizer treated as nondegenerate.
const FLOW_FLOOR: f64 = 1e-300;

/// Smallest jump normalizer treated as well defined.
const JUMP_TOL: f64 = 1e-13;

/// Slack for validating that an orbit row sums to one.
const ROW_SUM_TOL: f64 = 1e-8;

/// Block description of a two-region orbit process.
#[derive(Debug, Clone)]
pub struct OrbitModel {
    c_plus: Matrix,
    c_minus: Matrix,
    d_pm: Matrix,
    d_mp: Matrix,
    initial_plus: Matrix,
}

impl OrbitModel {
    /// Validates block shapes, termination intensities, and the initial row.
    pub fn new(
        c_plus: Matrix,
        c_minus: Matrix,
        d_pm: Matrix,
        d_mp: Matrix,
        initial_plus: Matrix,
    ) -> Result<Self> {
        if !c_plus.is_square() || !c_minus.is_square() {
            return Err(Error::Dimension("C blocks must be square".into()));
        }
        let np = c_plus.rows();
        let nm = c_minus.rows();
        if d_pm.rows() != np || d_pm.cols() != nm {
            return Err(Error::Dimension(format!(
                "D+- must be {np}x{nm}, got {}x{}",
                d_pm.rows(),
                d_pm.cols()
            )));
        }
        if d_mp.rows() != nm || d_mp.cols() != np {
            return Err(Error::Dimension(format!(
                "D-+ must be {nm}x{np}, got {}x{}",
                d_mp.rows(),
                d_mp.cols()
            )));
        }
        if initial_plus.rows() != 1 || initial_plus.cols() != np {
            return Err(Error::Dimension(format!(
                "initial orbit must be 1x{np}, got {}x{}",
                initial_plus.rows(),
                initial_plus.cols()
            )));
        }
        let sum: f64 = initial_plus.data().iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::InvalidModel(format!(
                "initial orbit must sum to one, got {sum}"
            )));
        }
        check_deficits(&c_plus, &d_pm, "plus")?;
        check_deficits(&c_minus, &d_mp, "minus")?;
        Ok(Self {
            c_plus,
            c_minus,
            d_pm,
            d_mp,
            initial_plus,
        })
    }

    pub fn n_plus(&self) -> usize {
        self.c_plus.rows()
    }

    pub fn n_minus(&self) -> usize {
        self.c_minus.rows()
    }

    pub fn c_plus(&self) -> &Matrix {
        &self.c_plus
    }

    pub fn c_minus(&self) -> &Matrix {
        &self.c_minus
    }

    pub fn d_pm(&self) -> &Matrix {
        &self.d_pm
    }

    pub fn d_mp(&self) -> &Matrix {
        &self.d_mp
    }

    pub fn initial_plus(&self) -> &Matrix {
        &self.initial_plus
    }
}

/// Termination intensities -(C 1 + D 1) must be nonnegative.
fn check_deficits(c: &Matrix, d: &Matrix, region: &str) -> Result<()> {
    for i in 0..c.rows() {
        let mut out = 0.0;
        for j in 0..c.cols() {
            out += c[(i, j)];
        }
        for j in 0..d.cols() {
            out += d[(i, j)];
        }
        if out > DEFICIT_TOL {
            return Err(Error::InvalidModel(format!(
                "{region} row {i} has negative termination intensity {}",
                -out
            )));
        }
    }
    Ok(())
}

/// Flows an orbit row for time r under the region matrix C and renormalizes.
pub fn orbit_evolve(a: &Matrix, c: &Matrix, r: f64) -> Result<Matrix> {
    check_orbit_row(a, c.rows())?;
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("flow time must be nonnegative, got {r}")));
    }
    let moved = a.matmul(&mat_exp(&c.scale(r))?);
    let denom: f64 = moved.data().iter().sum();
    if !(denom > FLOW_FLOOR) {
        return Err(Error::OrbitDegeneracy(format!(
            "orbit normalizer {denom} after flowing for {r}"
        )));
    }
    Ok(moved.scale(1.0 / denom))
}

/// Applies the jump map a -> aD / (aD 1).
pub fn orbit_jump(a: &Matrix, d: &Matrix) -> Result<Matrix> {
    check_orbit_row(a, d.rows())?;
    let moved = a.matmul(d);
    let denom: f64 = moved.data().iter().sum();
    if denom.abs() < JUMP_TOL {
        return Err(Error::UndefinedJump(format!(
            "jump normalizer {denom} is too close to zero"
        )));
    }
    Ok(moved.scale(1.0 / denom))
}

fn check_orbit_row(a: &Matrix, n: usize) -> Result<()> {
    if a.rows() != 1 || a.cols() != n {
        return Err(Error::Dimension(format!(
            "orbit row must be 1x{n}, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let sum: f64 = a.data().iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOL {
        return Err(Error::Domain(format!("orbit row must sum to one, got {sum}")));
    }
    Ok(())
}

/// Converged first-return data of the orbit fixed point.
#[derive(Debug, Clone)]
pub struct OrbitPsi {
    /// Expected orbit value at the first downcrossing of the starting level.
    pub psi: Matrix,
    pub iterations: usize,
    /// Max-norm residual of the Riccati equation at the returned matrix.
    pub residual: f64,
}

/// Iterates C+ Psi_{n+1} + Psi_{n+1} C- = -D+- - Psi_n D-+ Psi_n from zero.
///
/// Each step is a Sylvester solve with fixed coefficients, done through
/// the Kronecker form (I (x) C+) + (C-' (x) I) factored once.
pub fn solve_psi_orbit(om: &OrbitModel, tol: f64, max_iter: usize) -> Result<OrbitPsi> {
    let np = om.n_plus();
    let nm = om.n_minus();
    let system = kron(&Matrix::identity(nm), &om.c_plus).add(&kron(
        &om.c_minus.transpose(),
        &Matrix::identity(np),
    ));
    let factor = LuFactors::factor(&system)?;

    let mut psi = Matrix::zeros(np, nm);
    let mut delta = f64::INFINITY;
    let mut iterations = 0;
    for n in 1..=max_iter {
        let rhs = om
            .d_pm
            .scale(-1.0)
            .sub(&psi.matmul(&om.d_mp).matmul(&psi));
        let next = unstack_columns(&factor.solve(&stack_columns(&rhs))?, np, nm);
        delta = next.sub(&psi).inf_norm();
        psi = next;
        iterations = n;
        if delta < tol {
            break;
        }
    }
    if delta >= tol {
        return Err(Error::NonConvergence {
            what: "orbit fixed point",
            iterations,
            residual: delta,
        });
    }
    let residual = riccati_residual(om, &psi);
    Ok(OrbitPsi {
        psi,
        iterations,
        residual,
    })
}

/// Max-norm of C+ Psi + Psi C- + D+- + Psi D-+ Psi.
pub fn riccati_residual(om: &OrbitModel, psi: &Matrix) -> f64 {
    om.c_plus
        .matmul(psi)
        .add(&psi.matmul(&om.c_minus))
        .add(&om.d_pm)
        .add(&psi.matmul(&om.d_mp).matmul(psi))
        .inf_norm()
}

/// Expected orbit row at the first passage of level -x, starting from the
/// minus-region row beta at level 0.
pub fn downward_record_expectation(
    beta: &Matrix,
    om: &OrbitModel,
    psi: &Matrix,
    x: f64,
) -> Result<Matrix> {
    let nm = om.n_minus();
    if beta.rows() != 1 || beta.cols() != nm {
        return Err(Error::Dimension(format!(
            "record start must be 1x{nm}, got {}x{}",
            beta.rows(),
            beta.cols()
        )));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("record level must be nonnegative, got {x}")));
    }
    let generator = om.c_minus.add(&om.d_mp.matmul(psi));
    Ok(beta.matmul(&mat_exp(&generator.scale(x))?))
}

/// Record expectation for a plus-region start: the first downcrossing of
/// the starting level passes through a Psi, which then propagates down.
pub fn downward_record_from_plus(
    a_plus: &Matrix,
    om: &OrbitModel,
    psi: &Matrix,
    x: f64,
) -> Result<Matrix> {
    let np = om.n_plus();
    if a_plus.rows() != 1 || a_plus.cols() != np {
        return Err(Error::Dimension(format!(
            "plus start must be 1x{np}, got {}x{}",
            a_plus.rows(),
            a_plus.cols()
        )));
    }
    downward_record_expectation(&a_plus.matmul(psi), om, psi, x)
}

/// Orbit blocks of a drift-and-jumps model killed at rate q: the plus
/// region is the single rising phase, the minus region carries the jumps.
pub fn bv_embedding(m: &LevyModel, q: f64) -> Result<OrbitModel> {
    if !m.is_bounded_variation() {
        return Err(Error::InvalidModel(
            "this embedding needs sigma = 0".into(),
        ));
    }
    if !(q >= 0.0) {
        return Err(Error::Domain(format!("killing rate must be nonnegative, got {q}")));
    }
    let jump = m.jump();
    let c_plus = Matrix::row(&[-(m.rate() + q) / m.drift()]);
    let d_pm = jump.alpha().scale(m.rate() / m.drift());
    OrbitModel::new(
        c_plus,
        jump.t_mat().clone(),
        d_pm,
        jump.t_vec().clone(),
        Matrix::row(&[1.0]),
    )
}

/// Orbit blocks of a model with a Brownian part: the plus region is the
/// exponential rise from the running minimum, the minus region chains the
/// exponential drop with the jump phases.
pub fn uv_embedding(m: &LevyModel, q: f64) -> Result<OrbitModel> {
    if m.is_bounded_variation() {
        return Err(Error::InvalidModel("this embedding needs sigma > 0".into()));
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

    let c_plus = Matrix::row(&[-eta]);
    let mut d_pm = Matrix::zeros(1, p + 1);
    let jump_weight = eta * m.rate() / (m.rate() + q);
    for j in 0..p {
        d_pm[(0, j + 1)] = jump_weight * jump.alpha()[(0, j)];
    }
    let mut c_minus = Matrix::zeros(p + 1, p + 1);
    c_minus[(0, 0)] = -omega;
    for i in 0..p {
        c_minus[(i + 1, 0)] = jump.t_vec()[(i, 0)];
        for j in 0..p {
            c_minus[(i + 1, j + 1)] = jump.t_mat()[(i, j)];
        }
    }
    let mut d_mp = Matrix::zeros(p + 1, 1);
    d_mp[(0, 0)] = omega;
    OrbitModel::new(c_plus, c_minus, d_pm, d_mp, Matrix::row(&[1.0]))
}

/// Kronecker product, row-major blocks of a scaled by entries of a.
fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let scale = a[(ia, ja)];
            if scale == 0.0 {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out[(ia * b.rows() + ib, ja * b.cols() + jb)] = scale * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Stacks the columns of x into one column vector.
fn stack_columns(x: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(x.rows() * x.cols(), 1);
    for j in 0..x.cols() {
        for i in 0..x.rows() {
            out[(j * x.rows() + i, 0)] = x[(i, j)];
        }
    }
    out
}

/// Inverse of `stack_columns` for a rows x cols target.
fn unstack_columns(v: &Matrix, rows: usize, cols: usize) -> Matrix {
    let mut out = Matrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            out[(i, j)] = v[(j * rows + i, 0)];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medist::{companion_from_rational, standardize, MeRep, RationalLst};

    fn exp_bv_model() -> LevyModel {
        let lst = RationalLst::new(vec![2.0], vec![2.0]).unwrap();
        let jump = standardize(&companion_from_rational(&lst)).unwrap();
        LevyModel::new(1.0, 0.0, 1.0, jump).unwrap()
    }

    fn hyperexp_ph() -> MeRep {
        // Explicit phase-type form of 0.4 Exp(1) + 0.6 Exp(3); the
        // standardized form of the same law has a negative alpha entry,
        // so Markovian readings must start from this triple.
        MeRep::new(
            Matrix::row(&[0.4, 0.6]),
            Matrix::from_rows(&[vec![-1.0, 0.0], vec![0.0, -3.0]]).unwrap(),
            Matrix::col(&[1.0, 3.0]),
        )
        .unwrap()
    }

    #[test]
    fn evolve_at_zero_time_is_the_identity() {
        let a = Matrix::row(&[0.3, 0.7]);
        let c = Matrix::from_rows(&[vec![-2.0, 1.0], vec![0.5, -1.0]]).unwrap();
        let out = orbit_evolve(&a, &c, 0.0).unwrap();
        assert_eq!(out.data(), a.data());
    }

    #[test]
    fn evolve_renormalizes_and_satisfies_the_semigroup_law() {
        let a = Matrix::row(&[0.2, 0.8]);
        let c = Matrix::from_rows(&[vec![-3.0, 2.0], vec![1.0, -1.5]]).unwrap();
        let direct = orbit_evolve(&a, &c, 0.9).unwrap();
        let sum: f64 = direct.data().iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12, "normalization {sum}");
        let stepped = orbit_evolve(&orbit_evolve(&a, &c, 0.4).unwrap(), &c, 0.5).unwrap();
        for j in 0..2 {
            assert!(
                (direct[(0, j)] - stepped[(0, j)]).abs() <= 1e-10,
                "coordinate {j}: {} vs {}",
                direct[(0, j)],
                stepped[(0, j)]
            );
        }
    }

    #[test]
    fn evolve_reports_degeneracy_when_the_normalizer_crosses_zero() {
        // a e^{Cr} 1 = 2 e^{-10 r} - 1 changes sign at r = ln(2)/10.
        let a = Matrix::row(&[2.0, -1.0]);
        let c = Matrix::from_rows(&[vec![-10.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(orbit_evolve(&a, &c, 0.01).is_ok());
        match orbit_evolve(&a, &c, 1.0) {
            Err(Error::OrbitDegeneracy(_)) => {}
            other => panic!("expected degeneracy, got {other:?}"),
        }
    }

    #[test]
    fn renewal_jump_collapses_every_orbit_to_alpha() {
        let jump = hyperexp_ph();
        let d = jump.t_vec().matmul(jump.alpha());
        for row in [
            Matrix::row(&[1.0, 0.0]),
            Matrix::row(&[0.5, 0.5]),
            Matrix::row(&[-0.25, 1.25]),
        ] {
            let out = orbit_jump(&row, &d).unwrap();
            assert!((out[(0, 0)] - 0.4).abs() <= 1e-14);
            assert!((out[(0, 1)] - 0.6).abs() <= 1e-14);
        }
    }

    #[test]
    fn jump_with_vanishing_normalizer_is_undefined() {
        let a = Matrix::row(&[0.5, 0.5]);
        let d = Matrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        match orbit_jump(&a, &d) {
            Err(Error::UndefinedJump(_)) => {}
            other => panic!("expected undefined jump, got {other:?}"),
        }
    }

    #[test]
    fn negative_termination_intensity_is_rejected() {
        let err = OrbitModel::new(
            Matrix::row(&[-1.0]),
            Matrix::row(&[-2.0]),
            Matrix::row(&[2.0]),
            Matrix::row(&[2.0]),
            Matrix::row(&[1.0]),
        );
        match err {
            Err(Error::InvalidModel(msg)) => assert!(msg.contains("termination")),
            other => panic!("expected invalid model, got {other:?}"),
        }
    }

    #[test]
    fn scalar_embedding_reproduces_the_ruin_fixed_point() {
        let om = bv_embedding(&exp_bv_model(), 0.0).unwrap();
        let sol = solve_psi_orbit(&om, 1e-14, 100_000).unwrap();
        assert!((sol.psi[(0, 0)] - 0.5).abs() <= 1e-12, "psi {}", sol.psi[(0, 0)]);
        assert!(sol.residual <= 1e-12, "residual {}", sol.residual);
    }

    #[test]
    fn record_at_zero_level_is_the_starting_row() {
        let jump = hyperexp_ph();
        let m = LevyModel::new(0.5, 1.0, 1.0, jump).unwrap();
        let om = uv_embedding(&m, 0.2).unwrap();
        let sol = solve_psi_orbit(&om, 1e-14, 100_000).unwrap();
        let beta = Matrix::row(&[1.0, 0.0, 0.0]);
        let back = downward_record_expectation(&beta, &om, &sol.psi, 0.0).unwrap();
        for j in 0..3 {
            assert!((back[(0, j)] - beta[(0, j)]).abs() <= 1e-14);
        }
    }

    #[test]
    fn scalar_record_matches_the_closed_form_hitting_value() {
        let om = bv_embedding(&exp_bv_model(), 0.0).unwrap();
        let sol = solve_psi_orbit(&om, 1e-14, 100_000).unwrap();
        let rec = downward_record_from_plus(om.initial_plus(), &om, &sol.psi, 1.0).unwrap();
        let total: f64 = rec.data().iter().sum();
        let exact = 0.5 * (-1.0_f64).exp();
        assert!((total - exact).abs() <= 1e-12, "{total} vs {exact}");
    }

    #[test]
    fn sylvester_iteration_residual_vanishes_on_a_two_phase_model() {
        let jump = hyperexp_ph();
        let m = LevyModel::new(2.0, 0.0, 1.0, jump).unwrap();
        let om = bv_embedding(&m, 0.3).unwrap();
        let sol = solve_psi_orbit(&om, 1e-14, 100_000).unwrap();
        assert!(sol.residual <= 1e-12, "residual {}", sol.residual);
        // Probabilistic reading: substochastic row.
        let sum: f64 = sol.psi.data().iter().sum();
        assert!(sol.psi.data().iter().all(|&v| v >= 0.0));
        assert!(sum < 1.0, "killed return must be strictly deficient, got {sum}");
    }
}
