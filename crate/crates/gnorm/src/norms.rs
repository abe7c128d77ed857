//! Vector ℓ_r norms and the Log convention.

use crate::exponents::Exponent;
use crate::profile::VarianceProfile;

/// Kahan-compensated sum; keeps vector norms deterministic to ~1e-16
/// regardless of summation length.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for x in values {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// x^e for x ≥ 0, with the small integer and root exponents that dominate
/// norm computations (q, p* ∈ {2, 3, 4} and their reciprocals) dispatched to
/// multiply/sqrt/cbrt instead of `powf`. `cbrt` is also more accurate than
/// `powf(·, 1/3)` since 1/3 is not representable.
#[inline]
pub(crate) fn pow_nonneg(x: f64, e: f64) -> f64 {
    if e == 2.0 {
        x * x
    } else if e == 1.0 {
        x
    } else if e == 3.0 {
        x * x * x
    } else if e == 4.0 {
        let s = x * x;
        s * s
    } else if e == 0.5 {
        x.sqrt()
    } else if e == 1.0 / 3.0 {
        x.cbrt()
    } else if e == 0.25 {
        x.sqrt().sqrt()
    } else {
        x.powf(e)
    }
}

/// ℓ_r norm of `v`. The exponent type already enforces r ≥ 1; r = ∞ is the
/// max modulus. Internally rescales by the max modulus so large r never
/// overflows and powers stay in [0,1].
pub fn lp_norm(v: &[f64], r: Exponent) -> f64 {
    let m = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if m == 0.0 {
        return 0.0;
    }
    match r {
        Exponent::Infinity => m,
        Exponent::Finite(1.0) => compensated_sum(v.iter().map(|x| x.abs())),
        Exponent::Finite(2.0) => {
            let s = compensated_sum(v.iter().map(|x| {
                let u = x / m;
                u * u
            }));
            m * s.sqrt()
        }
        Exponent::Finite(p) => {
            let s = compensated_sum(v.iter().map(|x| pow_nonneg(x.abs() / m, p)));
            m * pow_nonneg(s, 1.0 / p)
        }
    }
}

/// Truncated logarithm: Log 0 = 1 and Log k = max(1, ln k).
pub fn log_bar(k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        (k as f64).ln().max(1.0)
    }
}

/// max_i ‖(a_ij)_j‖_r over rows.
pub fn max_row_lp(a: &VarianceProfile, r: Exponent) -> f64 {
    (0..a.rows()).map(|i| lp_norm(a.row(i), r)).fold(0.0, f64::max)
}

/// max_j ‖(a_ij)_i‖_r over columns.
pub fn max_col_lp(a: &VarianceProfile, r: Exponent) -> f64 {
    let mut col = vec![0.0; a.rows()];
    let mut best = 0.0f64;
    for j in 0..a.cols() {
        for (i, c) in col.iter_mut().enumerate() {
            *c = a.entry(i, j);
        }
        best = best.max(lp_norm(&col, r));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::Exponent;
    use proptest::prelude::*;

    fn fin(r: f64) -> Exponent {
        Exponent::new(r).unwrap()
    }

    #[test]
    fn small_norm_values() {
        assert!((lp_norm(&[3.0, 4.0], fin(2.0)) - 5.0).abs() < 1e-15);
        assert!((lp_norm(&[1.0, -2.0], fin(1.0)) - 3.0).abs() < 1e-15);
        assert_eq!(lp_norm(&[5.0, -7.0, 2.0], Exponent::Infinity), 7.0);
        assert_eq!(lp_norm(&[], fin(2.0)), 0.0);
        assert_eq!(lp_norm(&[0.0, 0.0], fin(1.5)), 0.0);
    }

    #[test]
    fn log_bar_convention() {
        assert_eq!(log_bar(0), 1.0);
        assert_eq!(log_bar(1), 1.0);
        assert_eq!(log_bar(2), 1.0); // ln 2 < 1
        assert!((log_bar(8) - (8.0f64).ln()).abs() < 1e-15);
        assert!((log_bar(8) - 2.0794).abs() < 1e-4);
    }

    #[test]
    fn row_col_maxima() {
        let a = VarianceProfile::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert!((max_row_lp(&a, fin(2.0)) - 5.0).abs() < 1e-15);
        assert!((max_col_lp(&a, fin(2.0)) - 20.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn no_overflow_for_large_exponents() {
        let v = [1e200, 5e199];
        let n = lp_norm(&v, fin(30.0));
        assert!(n.is_finite() && n >= 1e200);
    }

    proptest! {
        #[test]
        fn monotone_in_exponent(
            v in proptest::collection::vec(-10.0f64..10.0, 1..12),
            r1 in 1.0f64..20.0,
            r2 in 1.0f64..20.0,
        ) {
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            let nl = lp_norm(&v, fin(lo));
            let nh = lp_norm(&v, fin(hi));
            // p ≤ p' ⇒ ‖v‖_p ≥ ‖v‖_p'
            prop_assert!(nl >= nh - 1e-12 * nl.max(1.0));
            let ninf = lp_norm(&v, Exponent::Infinity);
            prop_assert!(nh >= ninf - 1e-12 * nh.max(1.0));
        }

        #[test]
        fn homogeneous_and_triangle(
            v in proptest::collection::vec(-10.0f64..10.0, 1..10),
            w in proptest::collection::vec(-10.0f64..10.0, 1..10),
            c in -5.0f64..5.0,
            r in 1.0f64..8.0,
        ) {
            let r = fin(r);
            let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
            prop_assert!((lp_norm(&scaled, r) - c.abs() * lp_norm(&v, r)).abs() <= 1e-10 * (1.0 + lp_norm(&v, r)));

            let k = v.len().min(w.len());
            let sum: Vec<f64> = v[..k].iter().zip(&w[..k]).map(|(a, b)| a + b).collect();
            prop_assert!(lp_norm(&sum, r) <= lp_norm(&v[..k], r) + lp_norm(&w[..k], r) + 1e-10);
        }

        #[test]
        fn log_bar_nondecreasing(k in 0usize..10_000) {
            prop_assert!(log_bar(k) <= log_bar(k + 1) + 1e-15);
            prop_assert!(log_bar(k) >= 1.0);
        }

        #[test]
        fn pow_nonneg_matches_powf(
            x in 0.0f64..100.0,
            e in prop_oneof![
                Just(0.25), Just(1.0 / 3.0), Just(0.5), Just(1.0),
                Just(2.0), Just(3.0), Just(4.0), 0.1f64..6.0,
            ],
        ) {
            let got = pow_nonneg(x, e);
            let want = x.powf(e);
            prop_assert!(
                (got - want).abs() <= 4.0 * f64::EPSILON * want.abs(),
                "x={x} e={e}: {got} vs {want}"
            );
        }
    }
}
