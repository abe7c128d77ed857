//! Block-diagonal composition and the max-over-blocks norm identity.
//!
//! For p ≤ q (automatic in the p ∈ [1,2], q ∈ [2,∞] regime) the norm of a
//! block-diagonal matrix equals the maximum of the block norms, so the
//! certified interval of the composition and the entrywise max of the block
//! intervals must overlap; on exact routes (p = 1 or q = ∞) they coincide.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::Certificate;
use crate::exponents::ExponentPair;
use crate::pqnorm::{certified_norm_interval, AscentConfig, DyadicNetConfig};
use crate::profile::VarianceProfile;

/// Direct sum of profiles along the diagonal; off-block entries are zero.
pub fn block_diag_compose(blocks: &[VarianceProfile]) -> Result<VarianceProfile> {
    if blocks.is_empty() {
        return Err(Error::Domain(
            "block-diagonal composition needs at least one block".into(),
        ));
    }
    let rows: usize = blocks.iter().map(VarianceProfile::rows).sum();
    let cols: usize = blocks.iter().map(VarianceProfile::cols).sum();
    let mut data = vec![0.0; rows * cols];
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                data[(r0 + i) * cols + (c0 + j)] = b.entry(i, j);
            }
        }
        r0 += b.rows();
        c0 += b.cols();
    }
    VarianceProfile::new(rows, cols, data)
}

/// Certified intervals for a block-diagonal norm computed two ways.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockDiagCheck {
    /// Certified interval of the composed matrix.
    pub composed_lower: f64,
    pub composed_upper: f64,
    /// Certified interval per block, in input order.
    pub block_intervals: Vec<(f64, f64)>,
    /// Entrywise max of the block intervals — a certified interval for the
    /// max block norm.
    pub max_block_lower: f64,
    pub max_block_upper: f64,
    /// Whether the two intervals overlap (within multiplicative `tol`).
    pub consistent: bool,
    /// True when every interval came from an exact closed form, in which
    /// case `consistent` is an equality check.
    pub all_exact: bool,
}

/// Computes ‖diag(blocks)‖ two ways — once on the composed matrix, once as
/// the max over per-block intervals — and checks that the certified
/// intervals overlap within multiplicative tolerance `tol`.
pub fn block_diag_norm_check(
    blocks: &[VarianceProfile],
    pq: &ExponentPair,
    tol: f64,
) -> Result<BlockDiagCheck> {
    if !tol.is_finite() || tol < 0.0 {
        return Err(Error::Domain(format!(
            "tolerance must be finite and nonnegative, got {tol}"
        )));
    }
    let composed = block_diag_compose(blocks)?;
    let ascent = AscentConfig::default();
    let net = DyadicNetConfig::default();
    let whole = certified_norm_interval(&composed, pq, &ascent, &net)?;

    let mut block_intervals = Vec::with_capacity(blocks.len());
    let mut all_exact = whole.certificate == Certificate::Exact;
    let (mut max_lower, mut max_upper) = (0.0f64, 0.0f64);
    for b in blocks {
        let est = certified_norm_interval(b, pq, &ascent, &net)?;
        all_exact &= est.certificate == Certificate::Exact;
        max_lower = max_lower.max(est.lower);
        max_upper = max_upper.max(est.upper);
        block_intervals.push((est.lower, est.upper));
    }

    // Both intervals contain the same true norm, so they must intersect;
    // `tol` only absorbs floating-point noise on the interval ends.
    let consistent =
        whole.lower <= max_upper * (1.0 + tol) + tol && max_lower <= whole.upper * (1.0 + tol) + tol;
    Ok(BlockDiagCheck {
        composed_lower: whole.lower,
        composed_upper: whole.upper,
        block_intervals,
        max_block_lower: max_lower,
        max_block_upper: max_upper,
        consistent,
        all_exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pq(p: f64, q: f64) -> ExponentPair {
        ExponentPair::from_f64(p, q).unwrap()
    }

    fn seeded(m: usize, n: usize, seed: u64) -> VarianceProfile {
        VarianceProfile::from_fn(m, n, |i, j| {
            let h = seed
                .wrapping_mul(0x9E3779B97F4A7C15)
                .wrapping_add((i * 131 + j * 37) as u64)
                .wrapping_mul(0xBF58476D1CE4E5B9);
            ((h >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0
        })
        .unwrap()
    }

    #[test]
    fn compose_places_blocks_on_diagonal() {
        let blocks = [
            VarianceProfile::new(1, 1, vec![2.0]).unwrap(),
            VarianceProfile::new(1, 2, vec![3.0, 4.0]).unwrap(),
        ];
        let c = block_diag_compose(&blocks).unwrap();
        assert_eq!((c.rows(), c.cols()), (2, 3));
        assert_eq!(c.data(), &[2.0, 0.0, 0.0, 0.0, 3.0, 4.0]);
    }

    #[test]
    fn empty_block_list_is_rejected() {
        assert!(matches!(block_diag_compose(&[]), Err(Error::Domain(_))));
        assert!(matches!(
            block_diag_norm_check(&[], &pq(1.0, 3.0), 1e-12),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn bad_tolerance_is_rejected() {
        let b = [VarianceProfile::new(1, 1, vec![2.0]).unwrap()];
        assert!(matches!(
            block_diag_norm_check(&b, &pq(1.0, 3.0), -1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            block_diag_norm_check(&b, &pq(1.0, 3.0), f64::NAN),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn scalar_blocks_norm_is_the_larger_scalar() {
        let blocks = [
            VarianceProfile::new(1, 1, vec![2.0]).unwrap(),
            VarianceProfile::new(1, 1, vec![3.0]).unwrap(),
        ];
        // exact route: p = 1
        let check = block_diag_norm_check(&blocks, &pq(1.0, 2.0), 1e-12).unwrap();
        assert!(check.all_exact);
        assert!(check.consistent);
        assert!((check.composed_lower - 3.0).abs() <= 1e-12);
        assert!((check.max_block_upper - 3.0).abs() <= 1e-12);

        // interval route: p = q = 2 on a diagonal matrix still brackets 3
        let check = block_diag_norm_check(&blocks, &pq(2.0, 2.0), 1e-9).unwrap();
        assert!(check.consistent);
        assert!(check.composed_lower <= 3.0 + 1e-9 && 3.0 <= check.composed_upper + 1e-9);
        assert!(check.max_block_lower <= 3.0 + 1e-9 && 3.0 <= check.max_block_upper + 1e-9);
    }

    #[test]
    fn exact_route_gives_equality_on_seeded_blocks() {
        let blocks = [seeded(2, 2, 3), seeded(2, 2, 11)];
        let check = block_diag_norm_check(&blocks, &pq(1.0, 3.0), 1e-12).unwrap();
        assert!(check.all_exact);
        assert!(check.consistent);
        // degenerate intervals: composed value equals max block value
        assert_eq!(check.composed_lower, check.composed_upper);
        assert_eq!(check.max_block_lower, check.max_block_upper);
        let scale = check.composed_upper.max(1.0);
        assert!(
            (check.composed_upper - check.max_block_upper).abs() <= 1e-12 * scale,
            "composed {} vs max-block {}",
            check.composed_upper,
            check.max_block_upper
        );
    }

    #[test]
    fn interval_route_overlaps_on_seeded_blocks() {
        let blocks = [seeded(3, 2, 7), seeded(2, 3, 8), seeded(2, 2, 9)];
        for (p, q) in [(1.5, 3.0), (2.0, 2.0), (1.2, 5.0)] {
            let check = block_diag_norm_check(&blocks, &pq(p, q), 1e-9).unwrap();
            assert!(!check.all_exact);
            assert!(check.consistent, "p={p}, q={q}: {check:?}");
            assert_eq!(check.block_intervals.len(), 3);
            // the max-block lower bound is itself a valid lower bound for
            // the composition (blocks embed isometrically for p ≤ q)
            assert!(check.max_block_lower <= check.composed_upper * (1.0 + 1e-9));
        }
    }

    #[test]
    fn q_infinity_exact_route_agrees() {
        let blocks = [seeded(2, 2, 21), seeded(3, 3, 22)];
        let pair = ExponentPair::from_f64(1.5, f64::INFINITY).unwrap();
        let check = block_diag_norm_check(&blocks, &pair, 1e-12).unwrap();
        assert!(check.all_exact);
        assert!(check.consistent);
        assert!((check.composed_upper - check.max_block_upper).abs() <= 1e-12 * check.composed_upper.max(1.0));
    }
}
