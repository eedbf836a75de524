//! Model fixtures shared by the integration suites.
#![allow(dead_code)]

use scalefn_core::{
    companion_from_rational, standardize, LevyModel, Matrix, MeRep, RationalLst,
};

fn from_rational(d: f64, sigma: f64, lambda: f64, a: Vec<f64>, b: Vec<f64>) -> LevyModel {
    let lst = RationalLst::new(a, b).unwrap();
    let jump = standardize(&companion_from_rational(&lst)).unwrap();
    LevyModel::new(d, sigma, lambda, jump).unwrap()
}

/// Unit-drift compound Poisson, Exp(2) jumps, no killing:
/// W(x) = 2 - e^{-x} in closed form.
pub fn classic() -> (LevyModel, f64) {
    (from_rational(1.0, 0.0, 1.0, vec![2.0], vec![2.0]), 0.0)
}

/// Bounded-variation model with Erlang(2,1) jumps and killing 0.3.
/// Note the net drift vanishes, so its q = 0 root is degenerate.
pub fn erlang() -> (LevyModel, f64) {
    (from_rational(2.0, 0.0, 1.0, vec![2.0, 1.0], vec![1.0, 0.0]), 0.3)
}

/// Brownian part plus hyperexponential jumps 0.4 Exp(1) + 0.6 Exp(3),
/// entered through the rational transform (2.2 s + 3)/(s^2 + 4 s + 3).
pub fn hyperexp() -> (LevyModel, f64) {
    (from_rational(0.5, 1.0, 1.0, vec![4.0, 3.0], vec![3.0, 2.2]), 0.2)
}

/// Brownian model whose jump density e^{-x}(1 - cos 2 pi x) is
/// matrix-exponential of order 3 but not phase-type.
pub fn oscillating() -> (LevyModel, f64) {
    let w = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
    (
        from_rational(
            0.0,
            1.0,
            1.0,
            vec![3.0, 3.0 + w, 1.0 + w],
            vec![1.0 + w, 0.0, 0.0],
        ),
        0.5,
    )
}

/// Every fixture with its killing rate.
pub fn all() -> Vec<(&'static str, LevyModel, f64)> {
    let (m1, q1) = classic();
    let (m2, q2) = erlang();
    let (m3, q3) = hyperexp();
    let (m4, q4) = oscillating();
    vec![
        ("classic", m1, q1),
        ("erlang", m2, q2),
        ("hyperexp", m3, q3),
        ("oscillating", m4, q4),
    ]
}

/// The hyperexponential law again, but as an explicitly Markovian triple;
/// the standardized form mixes signs, which the fluid simulator rejects.
pub fn hyperexp_ph() -> MeRep {
    MeRep::new(
        Matrix::row(&[0.4, 0.6]),
        Matrix::from_rows(&[vec![-1.0, 0.0], vec![0.0, -3.0]]).unwrap(),
        Matrix::col(&[1.0, 3.0]),
    )
    .unwrap()
}
