//! Alternating duality ascent: a certified lower bound on the bilinear sup
//! sup{ Σ a_ij s_i t_j : s ∈ B_{q*}, t ∈ B_p }.

use crate::error::{Error, Result};
use crate::estimate::NormEstimate;
use crate::exponents::{Exponent, ExponentPair};
use crate::norms::{lp_norm, pow_nonneg};
use crate::profile::VarianceProfile;
use crate::rng::KeyedRng;

/// Configuration for [`alternating_norm_lower`].
///
/// Out-of-range values are clamped when the ascent runs (restarts to ≥ 1,
/// rel_tolerance to > 0) so the routine itself never fails.
#[derive(Clone, Debug)]
pub struct AscentConfig {
    /// Number of random starting vectors.
    pub restarts: usize,
    /// Cap on full alternation sweeps per start.
    pub max_iterations: usize,
    /// Stop once a sweep improves the value by less than this relative amount.
    pub rel_tolerance: f64,
    /// Seed for the random starts (keyed stream; identical seed ⇒ identical result).
    pub seed: u64,
    /// Also start from the 256 largest-norm basis vectors on each side, which
    /// guarantees the output is at least max(max_j ‖col_j‖_q, max_i ‖row_i‖_{p*}).
    pub include_basis_starts: bool,
}

impl Default for AscentConfig {
    fn default() -> Self {
        AscentConfig {
            restarts: 32,
            max_iterations: 500,
            rel_tolerance: 1e-10,
            seed: 0,
            include_basis_starts: true,
        }
    }
}

impl AscentConfig {
    pub fn with_seed(seed: u64) -> Self {
        AscentConfig { seed, ..Default::default() }
    }
}

/// Cap on basis starts per side.
const BASIS_START_CAP: usize = 256;

/// Dual-norming vector: s with ‖s‖_{r*} = 1 and ⟨s, y⟩ = ‖y‖_r.
///
/// r = ∞ picks sign(y_k)·e_k at the first argmax of |y| (lowest index on
/// ties); r = 1 returns the sign vector; otherwise
/// s_i = sign(y_i)·(|y_i|/‖y‖_r)^{r−1}.
pub fn dual_norming_vector(y: &[f64], r: Exponent) -> Result<Vec<f64>> {
    let mut s = Vec::new();
    dual_norming_into(y, r, &mut s)?;
    Ok(s)
}

/// [`dual_norming_vector`] writing into a caller-owned buffer, so the ascent
/// inner loop allocates nothing per sweep.
fn dual_norming_into(y: &[f64], r: Exponent, out: &mut Vec<f64>) -> Result<()> {
    if y.iter().all(|&x| x == 0.0) {
        return Err(Error::Degenerate("cannot dual-norm the zero vector".into()));
    }
    out.clear();
    match r {
        Exponent::Infinity => {
            let mut k = 0;
            for (i, v) in y.iter().enumerate() {
                if v.abs() > y[k].abs() {
                    k = i;
                }
            }
            out.resize(y.len(), 0.0);
            out[k] = y[k].signum();
        }
        Exponent::Finite(1.0) => {
            out.extend(y.iter().map(|&v| if v == 0.0 { 0.0 } else { v.signum() }));
        }
        Exponent::Finite(2.0) => {
            // (|v|/‖y‖₂)¹·sign(v) = v/‖y‖₂
            let inv = 1.0 / lp_norm(y, Exponent::Finite(2.0));
            out.extend(y.iter().map(|&v| v * inv));
        }
        Exponent::Finite(r) => {
            let norm = lp_norm(y, Exponent::Finite(r));
            out.extend(y.iter().map(|&v| {
                if v == 0.0 {
                    0.0
                } else {
                    v.signum() * pow_nonneg(v.abs() / norm, r - 1.0)
                }
            }));
        }
    }
    Ok(())
}

enum Start {
    /// t = ±e_j or a random point of B_p.
    Primal(Vec<f64>),
    /// s = e_i; the sweep enters at the x = Aᵀs half-step.
    DualBasis(usize),
}

/// Best bilinear value found by alternating s ← dual(At, q), t ← dual(Aᵀs, p*)
/// over basis and random starts. The value is nondecreasing along each sweep,
/// so the result is a certified lower bound on ‖A‖_{p→q}.
pub fn alternating_norm_lower(
    a: &VarianceProfile,
    pq: &ExponentPair,
    cfg: &AscentConfig,
) -> NormEstimate {
    let label = "alternating_ascent";
    if a.is_zero() {
        return NormEstimate::lower_bound(0.0, label)
            .with_diag("restarts", 0)
            .with_diag("iterations", 0)
            .with_diag("seed", cfg.seed);
    }

    let restarts = cfg.restarts.max(1);
    let rel_tol = if cfg.rel_tolerance > 0.0 { cfg.rel_tolerance } else { 1e-10 };
    let max_iterations = cfg.max_iterations.max(1);
    let (m, n) = (a.rows(), a.cols());
    let q = pq.q();
    let p_star = pq.p_star();

    let mut starts: Vec<Start> = Vec::new();
    if cfg.include_basis_starts {
        // Columns by descending q-norm (ties: lowest index), capped.
        let mut cols: Vec<(f64, usize)> = (0..n)
            .map(|j| {
                let col: Vec<f64> = a.col_iter(j).collect();
                (lp_norm(&col, q), j)
            })
            .collect();
        cols.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then(x.1.cmp(&y.1)));
        for &(norm, j) in cols.iter().take(BASIS_START_CAP) {
            if norm == 0.0 {
                break;
            }
            let mut t = vec![0.0; n];
            t[j] = 1.0;
            starts.push(Start::Primal(t));
        }
        let mut rows: Vec<(f64, usize)> = (0..m).map(|i| (lp_norm(a.row(i), p_star), i)).collect();
        rows.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then(x.1.cmp(&y.1)));
        for &(norm, i) in rows.iter().take(BASIS_START_CAP) {
            if norm == 0.0 {
                break;
            }
            starts.push(Start::DualBasis(i));
        }
    }
    for ridx in 0..restarts {
        let mut rng = KeyedRng::from_parts(&[cfg.seed, ridx as u64, 0xA5C3]);
        let mut t: Vec<f64> = (0..n).map(|_| rng.next_standard_normal()).collect();
        let norm = lp_norm(&t, pq.p());
        if norm < 1e-300 {
            t = vec![1.0; n];
            let ones = lp_norm(&t, pq.p());
            for x in &mut t {
                *x /= ones;
            }
        } else {
            for x in &mut t {
                *x /= norm;
            }
        }
        starts.push(Start::Primal(t));
    }

    let total_starts = starts.len();
    let mut best = 0.0f64;
    let mut total_iterations: usize = 0;
    let mut y = Vec::new();
    let mut x = Vec::new();
    let mut s = Vec::new();

    for start in starts {
        let mut t: Vec<f64>;
        let mut value = 0.0f64;
        match start {
            Start::Primal(t0) => t = t0,
            Start::DualBasis(i) => {
                // x = Aᵀe_i is row i; value after this half-step is ‖row_i‖_{p*}.
                let row = a.row(i).to_vec();
                value = lp_norm(&row, p_star);
                match dual_norming_vector(&row, p_star) {
                    Ok(t0) => t = t0,
                    Err(_) => continue, // zero row, filtered above
                }
                best = best.max(value);
            }
        }
        for _sweep in 0..max_iterations {
            total_iterations += 1;
            a.mat_vec(&t, &mut y);
            let v_q = lp_norm(&y, q);
            if v_q == 0.0 {
                break; // t in the kernel; this start is exhausted
            }
            if dual_norming_into(&y, q, &mut s).is_err() {
                break;
            }
            a.mat_tvec(&s, &mut x);
            let v_pstar = lp_norm(&x, p_star);
            // v_pstar = ‖Aᵀs‖_{p*} ≥ ⟨s, At⟩ = ‖At‖_q = v_q > 0.
            best = best.max(v_pstar);
            let improved = v_pstar - value;
            value = v_pstar;
            if improved <= rel_tol * value.max(1e-300) {
                break;
            }
            if dual_norming_into(&x, p_star, &mut t).is_err() {
                break;
            }
        }
    }

    NormEstimate::lower_bound(best, label)
        .with_diag("restarts", total_starts)
        .with_diag("iterations", total_iterations)
        .with_diag("seed", cfg.seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{max_col_lp, max_row_lp};
    use proptest::prelude::*;

    fn pq(p: f64, q: f64) -> ExponentPair {
        ExponentPair::from_f64(p, q).unwrap()
    }

    fn fin(r: f64) -> Exponent {
        Exponent::new(r).unwrap()
    }

    #[test]
    fn dual_norming_examples() {
        let s = dual_norming_vector(&[3.0, 4.0], fin(2.0)).unwrap();
        assert!((s[0] - 0.6).abs() < 1e-15 && (s[1] - 0.8).abs() < 1e-15);

        let s = dual_norming_vector(&[1.0, -5.0], Exponent::Infinity).unwrap();
        assert_eq!(s, vec![0.0, -1.0]);

        // ties at r=∞ resolve to the lowest index
        let s = dual_norming_vector(&[-2.0, 2.0], Exponent::Infinity).unwrap();
        assert_eq!(s, vec![-1.0, 0.0]);

        let y = [2.0, 2.0];
        let s = dual_norming_vector(&y, fin(3.0)).unwrap();
        let pairing: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        assert!((pairing - 2.0 * 2.0f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert!((lp_norm(&s, fin(1.5)) - 1.0).abs() < 1e-12);

        assert!(dual_norming_vector(&[0.0, 0.0], fin(2.0)).is_err());
    }

    #[test]
    fn rank_one_all_ones_is_found_exactly() {
        let a = VarianceProfile::from_fn(2, 3, |_, _| 1.0).unwrap();
        let cfg = AscentConfig::default();
        let e = alternating_norm_lower(&a, &pq(1.5, 3.0), &cfg);
        let exact = 6.0f64.powf(1.0 / 3.0); // ‖1_2‖_3 · ‖1_3‖_3
        assert!((e.value - exact).abs() < 1e-9, "got {}", e.value);
    }

    #[test]
    fn identity_has_norm_one_across_the_regime() {
        let id = VarianceProfile::from_fn(3, 3, |i, j| if i == j { 1.0 } else { 0.0 }).unwrap();
        for (p, q) in [(1.0, 2.0), (1.5, 3.0), (2.0, 2.0), (2.0, 8.0)] {
            let e = alternating_norm_lower(&id, &pq(p, q), &AscentConfig::default());
            assert!((e.value - 1.0).abs() < 1e-10, "p={p} q={q} got {}", e.value);
        }
        let e = alternating_norm_lower(
            &id,
            &ExponentPair::new(fin(1.5), Exponent::Infinity).unwrap(),
            &AscentConfig::default(),
        );
        assert!((e.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn zero_matrix_short_circuits() {
        let z = VarianceProfile::zeros(3, 3).unwrap();
        let e = alternating_norm_lower(&z, &pq(1.5, 3.0), &AscentConfig::default());
        assert_eq!(e.value, 0.0);
        assert_eq!(e.diag_f64("iterations"), Some(0.0));
    }

    #[test]
    fn deterministic_given_seed() {
        let a = VarianceProfile::from_fn(4, 4, |i, j| ((i * 31 + j * 17) % 13) as f64 - 6.0).unwrap();
        let cfg = AscentConfig::with_seed(7);
        let e1 = alternating_norm_lower(&a, &pq(1.5, 3.0), &cfg);
        let e2 = alternating_norm_lower(&a, &pq(1.5, 3.0), &cfg);
        assert_eq!(e1.value.to_bits(), e2.value.to_bits());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn dual_norming_identity(
            y in proptest::collection::vec(-10.0f64..10.0, 1..8),
            r in prop_oneof![Just(1.0), 1.0f64..6.0, Just(f64::INFINITY)],
        ) {
            prop_assume!(y.iter().any(|&v| v != 0.0));
            let r = Exponent::new(r).unwrap();
            let s = dual_norming_vector(&y, r).unwrap();
            let pairing: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
            prop_assert!((pairing - lp_norm(&y, r)).abs() <= 1e-9 * (1.0 + lp_norm(&y, r)));
            prop_assert!(lp_norm(&s, r.conjugate()) <= 1.0 + 1e-9);
        }

        #[test]
        fn basis_start_floor_holds(
            data in proptest::collection::vec(-5.0f64..5.0, 9),
            p in 1.0f64..2.0,
            q in 2.0f64..6.0,
        ) {
            let a = VarianceProfile::new(3, 3, data).unwrap();
            let pair = pq(p, q);
            let e = alternating_norm_lower(&a, &pair, &AscentConfig::default());
            let floor = max_col_lp(&a, pair.q())
                .max(max_row_lp(&a, pair.p_star()))
                .max(a.max_abs());
            prop_assert!(e.value >= floor - 1e-12 * floor.max(1.0));
        }
    }
}
