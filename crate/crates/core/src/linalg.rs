//! Dense real matrix kernel: arithmetic, linear solves, matrix exponential
//! and spectral abscissa for the small systems used elsewhere in the crate.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;
use std::ops::{Index, IndexMut};

/// Relative pivot threshold below which a linear solve is rejected.
const PIVOT_RTOL: f64 = 1e-14;

/// Dense real matrix, row-major storage, entries always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major entries, rejecting NaN and infinities.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    /// Internal constructor for results of arithmetic already known finite.
    fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_raw(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// 1 x n row vector.
    pub fn row(entries: &[f64]) -> Self {
        Self::from_raw(1, entries.len(), entries.to_vec())
    }

    /// n x 1 column vector.
    pub fn col(entries: &[f64]) -> Self {
        Self::from_raw(entries.len(), 1, entries.to_vec())
    }

    /// n x 1 column of ones.
    pub fn ones_col(n: usize) -> Self {
        Self::from_raw(n, 1, vec![1.0; n])
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Dimension("no rows given".into()));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// The single entry of a 1 x 1 matrix.
    pub fn scalar(&self) -> f64 {
        assert!(
            self.rows == 1 && self.cols == 1,
            "scalar() requires a 1x1 matrix, got {}x{}",
            self.rows,
            self.cols
        );
        self.data[0]
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add: shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Matrix::from_raw(self.rows, self.cols, data)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sub: shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Matrix::from_raw(self.rows, self.cols, data)
    }

    pub fn scale(&self, factor: f64) -> Matrix {
        let data = self.data.iter().map(|a| a * factor).collect();
        Matrix::from_raw(self.rows, self.cols, data)
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul: {}x{} times {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.data[i * self.cols + k];
                if aik == 0.0 {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += aik * s;
                }
            }
        }
        out
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .map(|v| v.abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Determinant via elimination; near-singular inputs yield a tiny value
    /// rather than an error.
    pub fn determinant(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant requires a square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for k in 0..n {
            let mut piv = k;
            for i in k + 1..n {
                if a[i * n + k].abs() > a[piv * n + k].abs() {
                    piv = i;
                }
            }
            if a[piv * n + k] == 0.0 {
                return Ok(0.0);
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            det *= a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / a[k * n + k];
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        Ok(det)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Partial-pivot LU factorization reusable across many right-hand sides.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: Vec<f64>,
    perm: Vec<usize>,
    n: usize,
}

impl LuFactors {
    /// Factors `a`, rejecting pivots below `PIVOT_RTOL` times its largest
    /// absolute entry.
    pub fn factor(a: &Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "linear solve requires a square matrix, got {}x{}",
                a.rows, a.cols
            )));
        }
        let n = a.rows;
        let threshold = PIVOT_RTOL * a.max_abs();
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut piv = k;
            let mut piv_val = lu[k * n + k].abs();
            for i in k + 1..n {
                let v = lu[i * n + k].abs();
                if v > piv_val {
                    piv = i;
                    piv_val = v;
                }
            }
            if !(piv_val > threshold) {
                return Err(Error::Singular(format!(
                    "pivot {piv_val:e} at column {k} below threshold {threshold:e}"
                )));
            }
            if piv != k {
                perm.swap(k, piv);
                for j in 0..n {
                    lu.swap(k * n + j, piv * n + j);
                }
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                for j in k + 1..n {
                    lu[i * n + j] -= f * lu[k * n + j];
                }
            }
        }
        Ok(Self { lu, perm, n })
    }

    /// Solves A X = B column by column.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        let n = self.n;
        if b.rows != n {
            return Err(Error::Dimension(format!(
                "right-hand side has {} rows, expected {n}",
                b.rows
            )));
        }
        let mut x = Matrix::zeros(n, b.cols);
        let mut col = vec![0.0; n];
        for j in 0..b.cols {
            for i in 0..n {
                col[i] = b[(self.perm[i], j)];
            }
            for i in 1..n {
                let mut s = col[i];
                for k in 0..i {
                    s -= self.lu[i * n + k] * col[k];
                }
                col[i] = s;
            }
            for i in (0..n).rev() {
                let mut s = col[i];
                for k in i + 1..n {
                    s -= self.lu[i * n + k] * col[k];
                }
                col[i] = s / self.lu[i * n + i];
            }
            for i in 0..n {
                x[(i, j)] = col[i];
            }
        }
        Ok(x)
    }
}

/// Solves A X = B with partial pivoting.
pub fn solve_linear(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    LuFactors::factor(a)?.solve(b)
}

/// Degree-13 Pade coefficients for the matrix exponential.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the degree-13 approximant is used unscaled.
const PADE13_THETA: f64 = 5.371920351148152;

/// Matrix exponential via scaling and squaring with a degree-13 Pade
/// approximant.
pub fn mat_exp(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "matrix exponential requires a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let norm = a.one_norm();
    let squarings = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(0.5_f64.powi(squarings as i32));

    let ident = Matrix::identity(n);
    let a2 = scaled.matmul(&scaled);
    let a4 = a2.matmul(&a2);
    let a6 = a2.matmul(&a4);

    let u_inner = a6
        .scale(PADE13[13])
        .add(&a4.scale(PADE13[11]))
        .add(&a2.scale(PADE13[9]));
    let u_poly = a6
        .matmul(&u_inner)
        .add(&a6.scale(PADE13[7]))
        .add(&a4.scale(PADE13[5]))
        .add(&a2.scale(PADE13[3]))
        .add(&ident.scale(PADE13[1]));
    let u = scaled.matmul(&u_poly);

    let v_inner = a6
        .scale(PADE13[12])
        .add(&a4.scale(PADE13[10]))
        .add(&a2.scale(PADE13[8]));
    let v = a6
        .matmul(&v_inner)
        .add(&a6.scale(PADE13[6]))
        .add(&a4.scale(PADE13[4]))
        .add(&a2.scale(PADE13[2]))
        .add(&ident.scale(PADE13[0]));

    let mut result = solve_linear(&v.sub(&u), &v.add(&u))?;
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    Ok(result)
}

/// Iteration budget for the eigenvalue root finder.
const ROOT_FINDER_ITERS: usize = 200;

/// Largest real part among the eigenvalues.
///
/// The matrix is scaled to unit max entry, its characteristic polynomial
/// is extracted by the trace recursion, and the roots are located by a
/// simultaneous Durand-Kerner iteration. Accurate for the small,
/// moderately conditioned matrices this crate constructs; not a
/// general-purpose dense eigensolver.
pub fn spectral_abscissa(a: &Matrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "spectral abscissa requires a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    if n == 1 {
        return Ok(a[(0, 0)]);
    }
    let scale = a.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let coeffs = char_poly(&a.scale(1.0 / scale));
    let roots = poly_roots(&coeffs)?;
    Ok(scale * roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
}

/// Coefficients [c_1, ..., c_n] of the monic characteristic polynomial
/// lambda^n + c_1 lambda^{n-1} + ... + c_n, by the Faddeev-LeVerrier
/// trace recursion.
fn char_poly(a: &Matrix) -> Vec<f64> {
    let n = a.rows();
    let mut coeffs = Vec::with_capacity(n);
    let mut m = Matrix::identity(n);
    for k in 1..=n {
        m = a.matmul(&m);
        let mut trace = 0.0;
        for i in 0..n {
            trace += m[(i, i)];
        }
        let c = -trace / k as f64;
        coeffs.push(c);
        for i in 0..n {
            m[(i, i)] += c;
        }
    }
    coeffs
}

/// All roots of the monic polynomial with the given coefficients, found
/// simultaneously; multiple roots converge only linearly and are accepted
/// through the residual fallback.
fn poly_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len();
    let eval = |z: Complex64| -> Complex64 {
        let mut p = Complex64::new(1.0, 0.0);
        for &c in coeffs {
            p = p * z + c;
        }
        p
    };
    // Cauchy-style bound on root magnitudes; start just inside it, at
    // angles offset from the axes so symmetric spectra cannot trap the
    // iteration on a symmetry line.
    let radius = 1.0 + coeffs.iter().fold(0.0_f64, |acc, c| acc.max(c.abs()));
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(0.9 * radius, angle)
        })
        .collect();
    for _ in 0..ROOT_FINDER_ITERS {
        let mut moved = 0.0_f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                // Collided iterates: nudge apart, finish the pass, retry.
                roots[i] += Complex64::new(1e-8 * radius, 1e-8 * radius);
                moved = f64::INFINITY;
                continue;
            }
            let delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            moved = moved.max(delta.norm());
        }
        if moved <= 1e-13 * radius {
            return Ok(roots);
        }
    }
    let worst = roots.iter().map(|&z| eval(z).norm()).fold(0.0_f64, f64::max);
    if worst <= 1e-6 {
        return Ok(roots);
    }
    Err(Error::Numerical(format!(
        "eigenvalue iteration stalled with residual {worst}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
        assert!((a - b).abs() <= tol, "{what}: {a} vs {b}");
    }

    fn assert_matrix_close(a: &Matrix, b: &Matrix, tol: f64, what: &str) {
        assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()), "{what}: shape");
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                assert!(
                    (a[(i, j)] - b[(i, j)]).abs() <= tol,
                    "{what}: entry ({i},{j}): {} vs {}",
                    a[(i, j)],
                    b[(i, j)]
                );
            }
        }
    }

    #[test]
    fn construction_rejects_non_finite_entries() {
        assert!(Matrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(Matrix::new(1, 2, vec![1.0, f64::INFINITY]).is_err());
        assert!(Matrix::new(2, 2, vec![1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = Matrix::zeros(3, 3);
        let e = mat_exp(&z).unwrap();
        assert_matrix_close(&e, &Matrix::identity(3), 1e-15, "exp(0)");
    }

    #[test]
    fn exp_of_scalar_matches_libm() {
        let a = Matrix::new(1, 1, vec![-2.0]).unwrap();
        let e = mat_exp(&a).unwrap();
        assert_close(e[(0, 0)], (-2.0f64).exp(), 1e-15, "exp(-2)");
    }

    #[test]
    fn exp_of_jordan_block_has_polynomial_factor() {
        // exp([[-1,1],[0,-1]] x) = e^{-x} [[1,x],[0,1]]
        let x = 0.7;
        let a = Matrix::new(2, 2, vec![-x, x, 0.0, -x]).unwrap();
        let e = mat_exp(&a).unwrap();
        let f = (-x).exp();
        let expected = Matrix::new(2, 2, vec![f, x * f, 0.0, f]).unwrap();
        assert_matrix_close(&e, &expected, 1e-14, "exp(jordan)");
    }

    #[test]
    fn exp_handles_large_norm_through_scaling() {
        // Diagonalizable with known answer: A = [[0, a],[-a, 0]] rotates.
        let a = 30.0;
        let m = Matrix::new(2, 2, vec![0.0, a, -a, 0.0]).unwrap();
        let e = mat_exp(&m).unwrap();
        let expected =
            Matrix::new(2, 2, vec![a.cos(), a.sin(), -a.sin(), a.cos()]).unwrap();
        assert_matrix_close(&e, &expected, 1e-12, "exp(rotation)");
    }

    #[test]
    fn exp_semigroup_property() {
        let a = Matrix::new(3, 3, vec![-1.0, 0.3, 0.1, 0.2, -0.8, 0.4, 0.0, 0.5, -1.2]).unwrap();
        let s = 0.6;
        let t = 1.1;
        let whole = mat_exp(&a.scale(s + t)).unwrap();
        let split = mat_exp(&a.scale(s)).unwrap().matmul(&mat_exp(&a.scale(t)).unwrap());
        assert_matrix_close(&whole, &split, 1e-10, "semigroup");
    }

    #[test]
    fn exp_commutes_with_transpose() {
        let a = Matrix::new(2, 2, vec![-1.0, 2.0, 0.5, -3.0]).unwrap();
        let lhs = mat_exp(&a.transpose()).unwrap();
        let rhs = mat_exp(&a).unwrap().transpose();
        assert_matrix_close(&lhs, &rhs, 1e-12, "transpose");
    }

    #[test]
    fn solve_matches_hand_elimination() {
        // -x1 + x2 = 0 and -x2 = 1 give x = (-1, -1).
        let a = Matrix::new(2, 2, vec![-1.0, 1.0, 0.0, -1.0]).unwrap();
        let b = Matrix::col(&[0.0, 1.0]);
        let x = solve_linear(&a, &b).unwrap();
        let expected = Matrix::col(&[-1.0, -1.0]);
        assert_matrix_close(&x, &expected, 1e-15, "solve");
        let residual = a.matmul(&x).sub(&b).inf_norm();
        assert!(residual <= 1e-12 * b.inf_norm().max(1.0), "residual {residual}");
    }

    #[test]
    fn solve_reports_singularity() {
        let a = Matrix::new(2, 2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        let b = Matrix::col(&[1.0, 2.0]);
        match solve_linear(&a, &b) {
            Err(Error::Singular(_)) => {}
            other => panic!("expected singularity error, got {other:?}"),
        }
    }

    #[test]
    fn solve_handles_permutation_needing_pivoting() {
        let a = Matrix::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let b = Matrix::col(&[3.0, 7.0]);
        let x = solve_linear(&a, &b).unwrap();
        assert_matrix_close(&x, &Matrix::col(&[7.0, 3.0]), 1e-15, "pivot swap");
    }

    #[test]
    fn solve_multiple_right_hand_sides() {
        let a = Matrix::new(2, 2, vec![2.0, 1.0, 1.0, 3.0]).unwrap();
        let b = Matrix::new(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let x = solve_linear(&a, &b).unwrap();
        let residual = a.matmul(&x).sub(&b).inf_norm();
        assert!(residual <= 1e-14, "residual {residual}");
    }

    #[test]
    fn abscissa_of_triangular_matrix_is_max_diagonal() {
        let a = Matrix::new(3, 3, vec![-3.0, 1.0, 4.0, 0.0, -0.5, 2.0, 0.0, 0.0, -7.0]).unwrap();
        assert_close(spectral_abscissa(&a).unwrap(), -0.5, 1e-9, "triangular");
    }

    #[test]
    fn abscissa_of_rotation_block_is_real_part() {
        // Eigenvalues -1 +/- 2i.
        let a = Matrix::new(2, 2, vec![-1.0, 2.0, -2.0, -1.0]).unwrap();
        assert_close(spectral_abscissa(&a).unwrap(), -1.0, 1e-9, "complex pair");
    }

    #[test]
    fn abscissa_of_companion_with_known_roots() {
        // (x+1)(x+2)(x+3): roots -1, -2, -3.
        let a = Matrix::new(
            3,
            3,
            vec![0.0, 1.0, 0.0, 0.0, 0.0, 1.0, -6.0, -11.0, -6.0],
        )
        .unwrap();
        assert_close(spectral_abscissa(&a).unwrap(), -1.0, 1e-9, "companion");
    }

    #[test]
    fn abscissa_of_defective_matrix() {
        let a = Matrix::new(2, 2, vec![-1.0, 1.0, 0.0, -1.0]).unwrap();
        assert_close(spectral_abscissa(&a).unwrap(), -1.0, 1e-7, "jordan");
    }

    #[test]
    fn abscissa_mixes_real_and_complex_eigenvalues() {
        // Block diagonal: eigenvalues {-5, -0.25 +/- i, 1.5}.
        let a = Matrix::from_rows(&[
            vec![-5.0, 0.0, 0.0, 0.0],
            vec![0.0, -0.25, 1.0, 0.0],
            vec![0.0, -1.0, -0.25, 0.0],
            vec![0.0, 0.0, 0.0, 1.5],
        ])
        .unwrap();
        assert_close(spectral_abscissa(&a).unwrap(), 1.5, 1e-9, "mixed spectrum");
    }

    #[test]
    fn abscissa_survives_similarity_scrambling() {
        // P D P^{-1} with D = diag(-1, -2, -4), P well conditioned.
        let p = Matrix::new(3, 3, vec![1.0, 0.4, 0.0, 0.2, 1.0, 0.3, 0.0, 0.5, 1.0]).unwrap();
        let d = Matrix::new(3, 3, vec![-1.0, 0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, -4.0]).unwrap();
        let p_inv = solve_linear(&p, &Matrix::identity(3)).unwrap();
        let a = p.matmul(&d).matmul(&p_inv);
        assert_close(spectral_abscissa(&a).unwrap(), -1.0, 1e-9, "similarity");
    }
}
