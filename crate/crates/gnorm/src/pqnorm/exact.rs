//! Exact closed forms and the cheap Hölder upper bound.

use crate::error::{Error, Result};
use crate::estimate::NormEstimate;
use crate::exponents::{Exponent, ExponentPair};
use crate::norms::{lp_norm, max_col_lp, max_row_lp};
use crate::profile::VarianceProfile;

/// ‖A‖_{1→q} = max_j ‖(a_ij)_i‖_q (the unit ℓ1 ball is the convex hull of ±e_j).
pub fn norm_1_to_q(a: &VarianceProfile, q: Exponent) -> NormEstimate {
    NormEstimate::exact(max_col_lp(a, q), "exact_1_to_q")
}

/// ‖A‖_{p→∞} = max_i ‖(a_ij)_j‖_{p*} (each output coordinate is ⟨row_i, t⟩).
pub fn norm_p_to_inf(a: &VarianceProfile, p: Exponent) -> NormEstimate {
    NormEstimate::exact(max_row_lp(a, p.conjugate()), "exact_p_to_inf")
}

/// min( n^{1/p*}·‖A‖_{1→q}, m^{1/q}·‖A‖_{p→∞} ): factor the unit ball through
/// ℓ1 (‖t‖_1 ≤ n^{1/p*}‖t‖_p) or the output through ℓ∞ (‖y‖_q ≤ m^{1/q}‖y‖_∞).
pub fn cheap_norm_upper(a: &VarianceProfile, pq: &ExponentPair) -> NormEstimate {
    let via_l1 = (a.cols() as f64).powf(pq.p_star().recip()) * max_col_lp(a, pq.q());
    let via_linf = (a.rows() as f64).powf(pq.q().recip()) * max_row_lp(a, pq.p_star());
    NormEstimate::upper_bound(via_l1.min(via_linf), "cheap_holder")
        .with_diag("via_l1", via_l1)
        .with_diag("via_linf", via_linf)
}

/// Spectral norm by power iteration on the smaller Gram operator.
///
/// Returns the interval [σ̂(1−tol), σ̂(1+tol)] (upper end additionally clamped
/// by the Frobenius norm). Convergence is declared when the Rayleigh quotient
/// stalls relative to tol on three consecutive iterations; failure to converge
/// within the iteration cap is a numeric error.
pub fn norm_2_to_2(a: &VarianceProfile, tol: f64) -> Result<NormEstimate> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    if a.is_zero() {
        return Ok(NormEstimate::exact(0.0, "power_iteration"));
    }

    // Work on B = AAᵀ (dim m) or B = AᵀA (dim n), whichever is smaller,
    // applying A and Aᵀ separately instead of forming B.
    let transpose_side = a.rows() > a.cols();
    let dim = a.rows().min(a.cols());

    let mut v: Vec<f64> = (0..dim).map(|i| 1.0 + 1e-3 * (i % 17) as f64).collect();
    normalize_l2(&mut v);
    let mut half = Vec::new();
    let mut bv = Vec::new();

    let frobenius = lp_norm(a.data(), Exponent::Finite(2.0));
    let cap = 20_000usize;
    let mut lambda_prev = 0.0f64;
    let mut stalled = 0u32;

    for iter in 1..=cap {
        if transpose_side {
            a.mat_vec(&v, &mut half); // A v (wide side)
            a.mat_tvec(&half, &mut bv); // Aᵀ(Av)
        } else {
            a.mat_tvec(&v, &mut half);
            a.mat_vec(&half, &mut bv);
        }
        // v is unit, so the Rayleigh quotient is ⟨v, Bv⟩ = ‖(AᵀorA)v‖².
        let lambda: f64 = v.iter().zip(&bv).map(|(x, y)| x * y).sum();
        if lambda <= 0.0 {
            // Start vector (numerically) in the kernel: re-seed deterministically.
            let mut rng = crate::rng::KeyedRng::from_parts(&[0x9070, iter as u64, dim as u64]);
            v = (0..dim).map(|_| rng.next_standard_normal()).collect();
            normalize_l2(&mut v);
            continue;
        }
        if lambda - lambda_prev <= 0.5 * tol * lambda {
            stalled += 1;
            if stalled >= 3 {
                let sigma = lambda.sqrt();
                return Ok(NormEstimate::interval(
                    sigma * (1.0 - tol),
                    (sigma * (1.0 + tol)).min(frobenius.max(sigma)),
                    "power_iteration",
                )
                .with_diag("iterations", iter)
                .with_diag("sigma", sigma));
            }
        } else {
            stalled = 0;
        }
        lambda_prev = lambda;
        let norm = lp_norm(&bv, Exponent::Finite(2.0));
        if norm == 0.0 {
            // B v vanished exactly; σ restricted to this start is 0, restart.
            let mut rng = crate::rng::KeyedRng::from_parts(&[0x9071, iter as u64, dim as u64]);
            v = (0..dim).map(|_| rng.next_standard_normal()).collect();
            normalize_l2(&mut v);
            continue;
        }
        std::mem::swap(&mut v, &mut bv);
        for x in &mut v {
            *x /= norm;
        }
    }
    Err(Error::Numeric(format!(
        "power iteration did not converge within {cap} iterations (tol {tol})"
    )))
}

fn normalize_l2(v: &mut [f64]) {
    let n = lp_norm(v, Exponent::Finite(2.0));
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pq(p: f64, q: f64) -> ExponentPair {
        ExponentPair::from_f64(p, q).unwrap()
    }

    #[test]
    fn one_to_q_is_max_column_norm() {
        let a = VarianceProfile::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let e = norm_1_to_q(&a, Exponent::new(3.0).unwrap());
        assert!((e.value - 2.0).abs() < 1e-15);
        assert_eq!(e.lower, e.upper);

        let ones = VarianceProfile::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let e = norm_1_to_q(&ones, Exponent::new(2.0).unwrap());
        assert!((e.value - 2.0f64.sqrt()).abs() < 1e-15);

        let z = VarianceProfile::zeros(2, 3).unwrap();
        assert_eq!(norm_1_to_q(&z, Exponent::new(2.0).unwrap()).value, 0.0);
    }

    #[test]
    fn p_to_inf_is_max_row_conjugate_norm() {
        let a = VarianceProfile::from_rows(&[vec![3.0, 4.0]]).unwrap();
        let e = norm_p_to_inf(&a, Exponent::new(2.0).unwrap());
        assert!((e.value - 5.0).abs() < 1e-15);

        let id = VarianceProfile::from_fn(3, 3, |i, j| if i == j { 1.0 } else { 0.0 }).unwrap();
        let e = norm_p_to_inf(&id, Exponent::new(1.0).unwrap());
        assert!((e.value - 1.0).abs() < 1e-15);

        let z = VarianceProfile::zeros(3, 2).unwrap();
        assert_eq!(norm_p_to_inf(&z, Exponent::new(1.5).unwrap()).value, 0.0);
    }

    #[test]
    fn cheap_upper_examples() {
        // all-ones m×n: rank one, the bound is tight.
        let a = VarianceProfile::from_fn(3, 4, |_, _| 1.0).unwrap();
        let pair = pq(1.5, 3.0);
        let e = cheap_norm_upper(&a, &pair);
        let exact = 4.0f64.powf(1.0 / 3.0) * 3.0f64.powf(1.0 / 3.0); // n^{1/p*}·m^{1/q}
        assert!((e.value - exact).abs() < 1e-12);

        let id = VarianceProfile::from_fn(4, 4, |i, j| if i == j { 1.0 } else { 0.0 }).unwrap();
        let e = cheap_norm_upper(&id, &pq(2.0, 2.0));
        assert!((e.value - 2.0).abs() < 1e-15); // √n on both branches

        let z = VarianceProfile::zeros(2, 2).unwrap();
        assert_eq!(cheap_norm_upper(&z, &pq(2.0, 2.0)).value, 0.0);
    }

    #[test]
    fn power_iteration_on_small_spectra() {
        let tol = 1e-9;
        let id = VarianceProfile::from_fn(3, 3, |i, j| if i == j { 1.0 } else { 0.0 }).unwrap();
        let e = norm_2_to_2(&id, tol).unwrap();
        assert!(e.lower <= 1.0 && 1.0 <= e.upper);
        assert!(e.upper - e.lower <= 2.0 * tol * e.value + 1e-15);

        let d = VarianceProfile::from_rows(&[vec![1.0, 0.0], vec![0.0, 3.0]]).unwrap();
        let e = norm_2_to_2(&d, tol).unwrap();
        assert!((e.value - 3.0).abs() < 1e-6);

        let perm = VarianceProfile::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = norm_2_to_2(&perm, tol).unwrap();
        assert!((e.value - 1.0).abs() < 1e-6);

        // rectangular: σ(uvᵀ) = ‖u‖₂‖v‖₂
        let rank1 = VarianceProfile::from_fn(2, 5, |i, j| ((i + 1) * (j + 1)) as f64).unwrap();
        let e = norm_2_to_2(&rank1, tol).unwrap();
        let exact = (1.0f64 + 4.0).sqrt() * (1.0f64 + 4.0 + 9.0 + 16.0 + 25.0).sqrt();
        assert!((e.value - exact).abs() < 1e-6 * exact);

        assert!(norm_2_to_2(&id, 0.0).is_err());
        assert_eq!(norm_2_to_2(&VarianceProfile::zeros(2, 2).unwrap(), tol).unwrap().value, 0.0);
    }
}
