//! Shared model fixtures for the benchmark suite.

use scalefn_core::{companion_from_rational, standardize, LevyModel, RationalLst};

fn from_rational(d: f64, sigma: f64, lambda: f64, a: Vec<f64>, b: Vec<f64>) -> LevyModel {
    let lst = RationalLst::new(a, b).unwrap();
    let jump = standardize(&companion_from_rational(&lst)).unwrap();
    LevyModel::new(d, sigma, lambda, jump).unwrap()
}

/// Unit-drift compound Poisson with Exp(2) jumps; W is known in closed form.
pub fn classic_model() -> LevyModel {
    from_rational(1.0, 0.0, 1.0, vec![2.0], vec![2.0])
}

/// Bounded-variation model with Erlang(2,1) jumps.
pub fn erlang_model() -> LevyModel {
    from_rational(2.0, 0.0, 1.0, vec![2.0, 1.0], vec![1.0, 0.0])
}

/// Brownian-plus-drift model with hyperexponential jumps.
pub fn hyperexp_model() -> LevyModel {
    from_rational(0.5, 1.0, 1.0, vec![4.0, 3.0], vec![3.0, 2.2])
}

/// Brownian model whose jump density e^{-x}(1 - cos 2 pi x) is
/// matrix-exponential but not phase-type.
pub fn oscillating_model() -> LevyModel {
    let w = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
    from_rational(
        0.0,
        1.0,
        1.0,
        vec![3.0, 3.0 + w, 1.0 + w],
        vec![1.0 + w, 0.0, 0.0],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(classic_model().jump().order(), 1);
        assert_eq!(erlang_model().jump().order(), 2);
        assert_eq!(hyperexp_model().jump().order(), 2);
        assert_eq!(oscillating_model().jump().order(), 3);
    }
}
