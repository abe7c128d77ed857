//! Monte Carlo estimators for E‖X∘A‖_{p→q}, E max|a_ij·X_ij|, ρ-th moments,
//! and tail frequencies, plus the comparability report pitting the empirical
//! quantities against the deterministic envelope.
//!
//! Determinism: sample i draws from the substream `spec.for_sample(i)`, the
//! per-sample values are collected in index order, and every reduction runs
//! sequentially over that order — so results are bit-identical regardless of
//! worker count.

use rayon::prelude::*;
use serde::Serialize;

use crate::ensembles::{sample_matrix, EnsembleKind, EnsembleSpec};
use crate::envelope::{self, EnvelopeReport};
use crate::error::{Error, Result};
use crate::exponents::ExponentPair;
use crate::norms::{max_col_lp, max_row_lp};
use crate::pqnorm::{alternating_norm_lower, AscentConfig};
use crate::profile::VarianceProfile;

/// Caveat attached to every norm-based statistic: the alternating method
/// certifies lower bounds only.
pub const MC_CAVEAT: &str = "norm values are certified lower bounds unless interval-converged";

/// The ascent configuration Monte Carlo loops default to: 8 random restarts
/// (plus basis starts) trades a little sharpness for sampling throughput.
pub fn default_mc_ascent(seed: u64) -> AscentConfig {
    AscentConfig {
        restarts: 8,
        seed,
        ..AscentConfig::default()
    }
}

/// Aggregate of one Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleStats {
    pub n_samples: usize,
    pub mean: f64,
    /// Sample standard deviation / √n.
    pub stderr: f64,
    /// (ρ, (mean of valueᵖ)^{1/ρ}) pairs, when requested.
    pub moments: Vec<(f64, f64)>,
    /// (threshold, empirical frequency of value ≥ threshold) pairs.
    pub tail_freqs: Vec<(f64, f64)>,
    pub seed: u64,
    pub norm_method: String,
    pub caveat: String,
}

fn validate_sample_count(n: usize) -> Result<()> {
    if n >= 2 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "Monte Carlo needs at least 2 samples, got {n}"
        )))
    }
}

/// Index-ordered parallel map; errors short-circuit.
fn collect_samples<T: Send>(
    n: usize,
    f: impl Fn(u64) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    (0..n as u64).into_par_iter().map(f).collect()
}

/// Sequential mean and standard error in sample-index order.
fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn norm_values(
    a: &VarianceProfile,
    pq: &ExponentPair,
    spec: &EnsembleSpec,
    n: usize,
    cfg: &AscentConfig,
) -> Result<Vec<f64>> {
    collect_samples(n, |i| {
        let x = sample_matrix(a, &spec.for_sample(i))?;
        Ok(alternating_norm_lower(&x, pq, cfg).value)
    })
}

/// Mean of per-sample alternating-ascent norm values (each a certified lower
/// bound of the sampled norm, and at least the largest marginal norm of the
/// sample thanks to the basis starts).
pub fn estimate_expected_norm(
    a: &VarianceProfile,
    pq: &ExponentPair,
    spec: &EnsembleSpec,
    n: usize,
    cfg: &AscentConfig,
) -> Result<SampleStats> {
    validate_sample_count(n)?;
    let values = norm_values(a, pq, spec, n, cfg)?;
    let (mean, stderr) = mean_stderr(&values);
    Ok(SampleStats {
        n_samples: n,
        mean,
        stderr,
        moments: Vec::new(),
        tail_freqs: Vec::new(),
        seed: spec.seed,
        norm_method: format!("alternating_ascent(restarts={})", cfg.restarts),
        caveat: MC_CAVEAT.to_string(),
    })
}

/// Mean of per-sample entry maxima max_ij |a_ij·X_ij|.
pub fn estimate_expected_max(
    a: &VarianceProfile,
    spec: &EnsembleSpec,
    n: usize,
) -> Result<SampleStats> {
    validate_sample_count(n)?;
    let values = collect_samples(n, |i| {
        Ok(sample_matrix(a, &spec.for_sample(i))?.max_abs())
    })?;
    let (mean, stderr) = mean_stderr(&values);
    Ok(SampleStats {
        n_samples: n,
        mean,
        stderr,
        moments: Vec::new(),
        tail_freqs: Vec::new(),
        seed: spec.seed,
        norm_method: "entry_max".to_string(),
        caveat: "per-sample maxima are exact".to_string(),
    })
}

fn validate_moment_order(rho: f64) -> Result<()> {
    if rho.is_finite() && rho >= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "moment order rho must be a finite real >= 1, got {rho}"
        )))
    }
}

/// Empirical (E‖X∘A‖^ρ)^{1/ρ} using the default Monte Carlo ascent seeded by
/// the ensemble seed. At ρ = 1 this equals [`estimate_expected_norm`]'s mean
/// (same spec and [`default_mc_ascent`]) bit for bit.
pub fn estimate_moment(
    a: &VarianceProfile,
    pq: &ExponentPair,
    spec: &EnsembleSpec,
    rho: f64,
    n: usize,
) -> Result<f64> {
    validate_sample_count(n)?;
    validate_moment_order(rho)?;
    let values = norm_values(a, pq, spec, n, &default_mc_ascent(spec.seed))?;
    if rho == 1.0 {
        return Ok(values.iter().sum::<f64>() / n as f64);
    }
    Ok((values.iter().map(|v| v.powf(rho)).sum::<f64>() / n as f64).powf(1.0 / rho))
}

/// Empirical frequency of ‖X∘A‖ ≥ threshold over n samples.
pub fn tail_frequency(
    a: &VarianceProfile,
    pq: &ExponentPair,
    spec: &EnsembleSpec,
    threshold: f64,
    n: usize,
) -> Result<f64> {
    validate_sample_count(n)?;
    if !threshold.is_finite() {
        return Err(Error::Domain(format!(
            "tail threshold must be finite, got {threshold}"
        )));
    }
    let values = norm_values(a, pq, spec, n, &default_mc_ascent(spec.seed))?;
    Ok(values.iter().filter(|v| **v >= threshold).count() as f64 / n as f64)
}

/// Empirical means against the deterministic envelope, with the two
/// comparability ratios.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparabilityReport {
    pub n_samples: usize,
    /// Ê‖X∘A‖_{p→q} (mean of certified per-sample lower bounds).
    pub norm_estimate: f64,
    pub norm_stderr: f64,
    /// Ê max_ij |a_ij·X_ij|.
    pub max_estimate: f64,
    /// Ê max_i ‖(a_ij·X_ij)_j‖_{p*}.
    pub row_max_estimate: f64,
    /// Ê max_j ‖(a_ij·X_ij)_i‖_q.
    pub col_max_estimate: f64,
    pub envelope: EnvelopeReport,
    /// Deletion functional entering the weighted sum: the Weibull-weighted
    /// variant for Weibull ensembles, the entry-deletion functional otherwise
    /// (for mixtures this is a documented proxy).
    pub tail_functional: f64,
    pub tail_functional_kind: String,
    /// √(p*)·D1 + √q·D2 + tail functional (infinite weights dropped).
    pub sum_weighted_used: f64,
    /// max(row_max_estimate, col_max_estimate, max_estimate); each is a
    /// per-sample lower bound of the norm.
    pub lower_floor: f64,
    /// norm_estimate / lower_floor; ≥ 1 up to floating-point roundoff since
    /// the inequality holds per sample.
    pub lower_ratio: f64,
    /// norm_estimate / sum_weighted_used.
    pub upper_ratio: f64,
    /// True for the zero profile; all estimates vanish and the ratios are
    /// reported as the vacuous value 1.
    pub degenerate: bool,
    pub seed: u64,
    pub norm_method: String,
    pub caveat: String,
}

/// Runs `n` samples and assembles the comparability report. Bernoulli
/// ensembles are rejected: their expected norm obeys a different functional,
/// so the envelope comparison would be misleading.
pub fn comparability_report(
    a: &VarianceProfile,
    pq: &ExponentPair,
    spec: &EnsembleSpec,
    n: usize,
    cfg: &AscentConfig,
) -> Result<ComparabilityReport> {
    validate_sample_count(n)?;
    if matches!(spec.kind, EnsembleKind::Bernoulli) {
        return Err(Error::Config(
            "comparability envelopes cover gaussian, weibull, and mixture ensembles; \
             Bernoulli entries obey a different functional"
                .into(),
        ));
    }

    struct PerSample {
        norm: f64,
        max: f64,
        row: f64,
        col: f64,
    }
    let samples = collect_samples(n, |i| {
        let x = sample_matrix(a, &spec.for_sample(i))?;
        let norm = alternating_norm_lower(&x, pq, cfg).value;
        let row = max_row_lp(&x, pq.p_star());
        let col = max_col_lp(&x, pq.q());
        let max = x.max_abs();
        debug_assert!(norm >= row * (1.0 - 1e-12) && norm >= col * (1.0 - 1e-12));
        Ok(PerSample { norm, max, row, col })
    })?;

    let pull = |f: fn(&PerSample) -> f64| -> Vec<f64> { samples.iter().map(f).collect() };
    let (norm_estimate, norm_stderr) = mean_stderr(&pull(|s| s.norm));
    let (max_estimate, _) = mean_stderr(&pull(|s| s.max));
    let (row_max_estimate, _) = mean_stderr(&pull(|s| s.row));
    let (col_max_estimate, _) = mean_stderr(&pull(|s| s.col));

    let report = envelope::envelope_report(a, pq);
    let (tail_functional, tail_functional_kind) = match spec.kind {
        EnsembleKind::Weibull { r } => (
            envelope::d_infinity_weibull(a, r)?,
            format!("entry_deletion_weibull(r={r})"),
        ),
        _ => (report.d_inf, "entry_deletion".to_string()),
    };
    let (sum_weighted_used, _) =
        envelope::weighted_sum(pq, report.d1, report.d2, tail_functional);

    let degenerate = sum_weighted_used == 0.0;
    let lower_floor = max_estimate.max(row_max_estimate).max(col_max_estimate);
    let (lower_ratio, upper_ratio) = if degenerate || lower_floor == 0.0 {
        (1.0, 1.0)
    } else {
        (
            norm_estimate / lower_floor,
            norm_estimate / sum_weighted_used,
        )
    };

    Ok(ComparabilityReport {
        n_samples: n,
        norm_estimate,
        norm_stderr,
        max_estimate,
        row_max_estimate,
        col_max_estimate,
        envelope: report,
        tail_functional,
        tail_functional_kind,
        sum_weighted_used,
        lower_floor,
        lower_ratio,
        upper_ratio,
        degenerate,
        seed: spec.seed,
        norm_method: format!("alternating_ascent(restarts={})", cfg.restarts),
        caveat: MC_CAVEAT.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::RadialDistribution;
    use crate::pqnorm::norm_2_to_2;
    use approx::assert_relative_eq;

    fn pair(p: f64, q: f64) -> ExponentPair {
        ExponentPair::from_f64(p, q).unwrap()
    }

    fn gaussian(seed: u64) -> EnsembleSpec {
        EnsembleSpec::new(EnsembleKind::Gaussian, seed, 0).unwrap()
    }

    fn ones(m: usize, n: usize) -> VarianceProfile {
        VarianceProfile::from_fn(m, n, |_, _| 1.0).unwrap()
    }

    #[test]
    fn one_by_one_gaussian_matches_absolute_moment() {
        let a = ones(1, 1);
        let spec = gaussian(3);
        let stats =
            estimate_expected_norm(&a, &pair(2.0, 2.0), &spec, 4000, &default_mc_ascent(3))
                .unwrap();
        let expect = (2.0 / std::f64::consts::PI).sqrt();
        assert!(
            (stats.mean - expect).abs() <= 3.0 * stats.stderr,
            "mean {} vs {expect} (3se = {})",
            stats.mean,
            3.0 * stats.stderr
        );
        assert_eq!(stats.n_samples, 4000);
        assert_eq!(stats.caveat, MC_CAVEAT);
    }

    #[test]
    fn zero_profile_estimates_are_exactly_zero() {
        let z = VarianceProfile::zeros(2, 3).unwrap();
        let pq = pair(2.0, 2.0);
        let spec = gaussian(1);
        let stats = estimate_expected_norm(&z, &pq, &spec, 16, &default_mc_ascent(1)).unwrap();
        assert_eq!((stats.mean, stats.stderr), (0.0, 0.0));
        let stats = estimate_expected_max(&z, &spec, 16).unwrap();
        assert_eq!((stats.mean, stats.stderr), (0.0, 0.0));
        let rep = comparability_report(&z, &pq, &spec, 16, &default_mc_ascent(1)).unwrap();
        assert!(rep.degenerate);
        assert_eq!(rep.norm_estimate, 0.0);
        assert_eq!(rep.max_estimate, 0.0);
        assert_eq!((rep.lower_ratio, rep.upper_ratio), (1.0, 1.0));
    }

    #[test]
    fn results_are_bit_identical_across_worker_counts() {
        let a = VarianceProfile::from_fn(3, 3, |i, j| 1.0 / (1 + i + j) as f64).unwrap();
        let pq = pair(1.5, 3.0);
        let spec = gaussian(7);
        let run = || {
            estimate_expected_norm(&a, &pq, &spec, 64, &default_mc_ascent(7)).unwrap()
        };
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run);
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(run);
        assert_eq!(single.mean.to_bits(), multi.mean.to_bits());
        assert_eq!(single.stderr.to_bits(), multi.stderr.to_bits());
    }

    #[test]
    fn per_sample_norm_dominates_marginals_and_max() {
        let a = VarianceProfile::from_fn(4, 5, |i, j| ((i * 5 + j) % 3) as f64 / 2.0 + 0.25)
            .unwrap();
        let pq = pair(1.5, 2.5);
        let spec = gaussian(11);
        let cfg = default_mc_ascent(11);
        for i in 0..50u64 {
            let x = sample_matrix(&a, &spec.for_sample(i)).unwrap();
            let v = alternating_norm_lower(&x, &pq, &cfg).value;
            let row = max_row_lp(&x, pq.p_star());
            let col = max_col_lp(&x, pq.q());
            let max = x.max_abs();
            for (name, bound) in [("row", row), ("col", col), ("max", max)] {
                assert!(
                    v >= bound * (1.0 - 1e-12),
                    "sample {i}: norm {v} < {name} bound {bound}"
                );
            }
        }
    }

    #[test]
    fn sampled_two_by_two_values_match_spectral_oracle() {
        // p = q = 2 admits an independent certified oracle per sample
        let a = ones(2, 2);
        let pq = pair(2.0, 2.0);
        let spec = gaussian(13);
        let cfg = default_mc_ascent(13);
        for i in 0..30u64 {
            let x = sample_matrix(&a, &spec.for_sample(i)).unwrap();
            let ascent = alternating_norm_lower(&x, &pq, &cfg).value;
            let oracle = norm_2_to_2(&x, 1e-12).unwrap().value;
            assert_relative_eq!(ascent, oracle, max_relative = 1e-6);
        }
    }

    #[test]
    fn moment_estimates_are_monotone_in_rho_and_match_mean_at_one() {
        let a = ones(2, 2);
        let pq = pair(2.0, 2.0);
        let spec = gaussian(17);
        let m1 = estimate_moment(&a, &pq, &spec, 1.0, 300).unwrap();
        let m2 = estimate_moment(&a, &pq, &spec, 2.0, 300).unwrap();
        let m4 = estimate_moment(&a, &pq, &spec, 4.0, 300).unwrap();
        assert!(m1 <= m2 && m2 <= m4, "m1={m1}, m2={m2}, m4={m4}");

        let stats =
            estimate_expected_norm(&a, &pq, &spec, 300, &default_mc_ascent(spec.seed)).unwrap();
        assert_eq!(m1.to_bits(), stats.mean.to_bits());
    }

    #[test]
    fn tail_frequency_at_zero_threshold_is_one() {
        let a = ones(2, 2);
        let freq = tail_frequency(&a, &pair(2.0, 2.0), &gaussian(19), 0.0, 100).unwrap();
        assert_eq!(freq, 1.0);
        let freq = tail_frequency(&a, &pair(2.0, 2.0), &gaussian(19), 1e9, 100).unwrap();
        assert_eq!(freq, 0.0);
    }

    #[test]
    fn comparability_on_all_ones_4x4() {
        let a = ones(4, 4);
        let pq = pair(2.0, 2.0);
        let rep =
            comparability_report(&a, &pq, &gaussian(23), 200, &default_mc_ascent(23)).unwrap();
        assert!(!rep.degenerate);
        // per-sample domination makes this ≥ 1 up to MC noise at worst
        assert!(
            rep.lower_ratio >= 1.0 - 1e-9,
            "lower_ratio {}",
            rep.lower_ratio
        );
        assert!(
            rep.upper_ratio > 0.0 && rep.upper_ratio <= 10.0,
            "upper_ratio {}",
            rep.upper_ratio
        );
        assert_eq!(rep.tail_functional_kind, "entry_deletion");
        assert_relative_eq!(
            rep.sum_weighted_used,
            rep.envelope.sum_weighted,
            max_relative = 1e-15
        );
    }

    #[test]
    fn comparability_weibull_uses_weibull_functional() {
        let a = ones(3, 3);
        let pq = pair(2.0, 2.0);
        let spec = EnsembleSpec::new(EnsembleKind::Weibull { r: 1.0 }, 29, 0).unwrap();
        let rep = comparability_report(&a, &pq, &spec, 100, &default_mc_ascent(29)).unwrap();
        assert_eq!(rep.tail_functional_kind, "entry_deletion_weibull(r=1)");
        assert_relative_eq!(
            rep.tail_functional,
            envelope::d_infinity_weibull(&a, 1.0).unwrap(),
            max_relative = 1e-15
        );
        assert!(rep.lower_ratio >= 1.0 - 1e-9);
    }

    #[test]
    fn comparability_mixture_runs_with_gaussian_proxy() {
        let a = ones(3, 3);
        let spec = EnsembleSpec::new(
            EnsembleKind::Mixture {
                radial: RadialDistribution::TwoPoint { low: 0.5, high: 1.5 },
            },
            31,
            0,
        )
        .unwrap();
        let rep =
            comparability_report(&a, &pair(2.0, 2.0), &spec, 100, &default_mc_ascent(31))
                .unwrap();
        assert_eq!(rep.tail_functional_kind, "entry_deletion");
        assert!(rep.norm_estimate > 0.0);
    }

    #[test]
    fn comparability_rejects_bernoulli() {
        let a = ones(2, 2);
        let spec = EnsembleSpec::new(EnsembleKind::Bernoulli, 1, 0).unwrap();
        assert!(matches!(
            comparability_report(&a, &pair(2.0, 2.0), &spec, 10, &default_mc_ascent(1)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn expected_max_on_16x16_brackets_d_infinity() {
        let a = ones(16, 16);
        let stats = estimate_expected_max(&a, &gaussian(37), 300).unwrap();
        // E max of 256 |gaussians| sits inside [1, √(2·ln 256)]
        assert!(stats.mean >= 1.0 && stats.mean <= (2.0 * 256f64.ln()).sqrt());
        let ratio = stats.mean / envelope::d_infinity(&a);
        assert!(
            (0.2..=5.0).contains(&ratio),
            "E-max / d_infinity ratio {ratio}"
        );
    }

    #[test]
    fn sample_count_validation() {
        let a = ones(2, 2);
        assert!(matches!(
            estimate_expected_norm(&a, &pair(2.0, 2.0), &gaussian(0), 1, &default_mc_ascent(0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            estimate_moment(&a, &pair(2.0, 2.0), &gaussian(0), 0.5, 10),
            Err(Error::Domain(_))
        ));
    }
}
