//! Deterministic envelope functionals for a variance profile: the marginal
//! norms D₁ and D₂, the entry-deletion functional D∞ (with its Weibull
//! variant), the row/column-deletion functional D′∞, weighted combinations
//! with their applicable constant order, moment and tail formulas, the
//! general-entries upper bounds, and a truncation-based boundedness
//! diagnostic.

mod rowcol;

pub use rowcol::{d_infinity_rowcol_exact, d_infinity_rowcol_greedy};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{Exponent, ExponentPair};
use crate::norms::{log_bar, max_col_lp, max_row_lp};
use crate::profile::VarianceProfile;

/// Default node budget for the exact row/column-deletion search. Reports fall
/// back to the greedy upper certificate when a profile blows through it.
pub const DEFAULT_ROWCOL_BUDGET: u64 = 20_000_000;

/// Largest min(m, n) for which [`envelope_report`] attempts the exact
/// row/column-deletion search. The branch-and-bound is exponential in the
/// deletion count (which ranges up to the min side) and its per-node cost
/// grows with the entry count, so beyond desk scale even a generous node
/// budget buys minutes of search before the inevitable greedy fallback;
/// gating on size keeps report assembly time predictable.
pub const ROWCOL_EXACT_MAX_SIDE: usize = 16;

/// Node budget for the exact attempt inside [`envelope_report`]. Sized for
/// instances within [`ROWCOL_EXACT_MAX_SIDE`], where nodes are cheap.
pub const ENVELOPE_ROWCOL_BUDGET: u64 = 5_000_000;

/// Growth factor separating "bounded-looking" from "diverging" in the
/// truncation diagnostic. Purely heuristic: finite truncations prove nothing
/// about the limit operator.
pub const TREND_GROWTH_FACTOR: f64 = 1.1;

/// D₁ = max_i ‖(a_ij)_j‖_{p*} and D₂ = max_j ‖(a_ij)_i‖_q.
pub fn marginal_norms(a: &VarianceProfile, pq: &ExponentPair) -> (f64, f64) {
    (max_row_lp(a, pq.p_star()), max_col_lp(a, pq.q()))
}

fn d_infinity_with_weight(a: &VarianceProfile, weight: impl Fn(usize) -> f64) -> f64 {
    // With x₍₁₎ ≥ x₍₂₎ ≥ … the sorted |entries|, the minimum over deleted
    // entry sets of size k leaves the (k+1)-th largest value, so the
    // functional is max_k w(k)·x₍k+1₎; zero order statistics contribute
    // nothing, so the scan stops at the nonzero count.
    let mut best = 0.0f64;
    for (k, &x) in a.sorted_abs().iter().enumerate() {
        if x == 0.0 {
            break;
        }
        best = best.max(weight(k) * x);
    }
    best
}

/// Entry-deletion functional D∞ = max_{k≥0} √(Log k)·x₍k+1₎ over the sorted
/// absolute entries x₍₁₎ ≥ x₍₂₎ ≥ ….
pub fn d_infinity(a: &VarianceProfile) -> f64 {
    d_infinity_with_weight(a, |k| log_bar(k).sqrt())
}

fn validate_weibull_shape(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 && r <= 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "Weibull shape r must lie in (0, 2], got {r}"
        )))
    }
}

/// Weibull-weight variant of [`d_infinity`]: max_{k≥0} Log^{1/r}(k)·x₍k+1₎
/// for shape r ∈ (0, 2]. At r = 2 it coincides with [`d_infinity`] exactly.
pub fn d_infinity_weibull(a: &VarianceProfile, r: f64) -> Result<f64> {
    validate_weibull_shape(r)?;
    if r == 2.0 {
        return Ok(d_infinity(a));
    }
    Ok(d_infinity_with_weight(a, |k| log_bar(k).powf(1.0 / r)))
}

/// How the reported row/column-deletion value was certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowColCertificate {
    /// Exhaustive threshold search finished within budget: the value is exact.
    Exact,
    /// Budget exceeded; the value is the greedy certificate, an upper bound.
    GreedyUpper,
}

/// Which power of p* ∨ q governs the comparability constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantBranch {
    /// Applies when 1/p + 1/q* < 3/2.
    ThirteenHalves,
    /// Applies when 1/p + 1/q* ≥ 3/2.
    FiveHalves,
}

impl ConstantBranch {
    /// The exponent this branch puts on p* ∨ q.
    pub fn exponent(self) -> f64 {
        match self {
            ConstantBranch::ThirteenHalves => 6.5,
            ConstantBranch::FiveHalves => 2.5,
        }
    }
}

/// Selects the constant branch from the exponent pair: the sharper 5/2 power
/// applies once 1/p + 1/q* ≥ 3/2, otherwise the generic 13/2 power.
pub fn constant_branch(pq: &ExponentPair) -> ConstantBranch {
    if pq.p().recip() + pq.q_star().recip() < 1.5 {
        ConstantBranch::ThirteenHalves
    } else {
        ConstantBranch::FiveHalves
    }
}

/// The deterministic envelope of a profile at a given exponent pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    /// Largest row ℓ_{p*} norm.
    pub d1: f64,
    /// Largest column ℓ_q norm.
    pub d2: f64,
    /// Entry-deletion functional.
    pub d_inf: f64,
    /// Row/column-deletion functional (exact or greedy upper bound, per the
    /// certificate).
    pub d_inf_rowcol: f64,
    pub rowcol_certificate: RowColCertificate,
    /// d1 + d2 + d_inf.
    pub sum_plain: f64,
    /// √(p*)·d1 + √q·d2 + d_inf, with infinite-weight terms dropped (listed
    /// in `weighted_terms_dropped`; each dropped marginal is ≤ d_inf, so the
    /// sum still dominates every term that makes sense).
    pub sum_weighted: f64,
    pub weighted_terms_dropped: Vec<String>,
    pub constant_branch: ConstantBranch,
    /// (p* ∨ q) raised to the branch exponent; `None` when p* ∨ q = ∞.
    pub upper_constant_order: Option<f64>,
}

/// √(p*)·d1 + √q·d2 + tail, dropping (and naming) terms whose weight would
/// be infinite. A dropped marginal is redundant: with p* = ∞ the row norms
/// are entry maxima, so d1 ≤ tail functional, and symmetrically for q = ∞.
pub(crate) fn weighted_sum(pq: &ExponentPair, d1: f64, d2: f64, tail: f64) -> (f64, Vec<String>) {
    let mut dropped = Vec::new();
    let mut sum = tail;
    match pq.p_star() {
        Exponent::Finite(ps) => sum += ps.sqrt() * d1,
        Exponent::Infinity => dropped.push("sqrt_pstar_d1".to_string()),
    }
    match pq.q() {
        Exponent::Finite(q) => sum += q.sqrt() * d2,
        Exponent::Infinity => dropped.push("sqrt_q_d2".to_string()),
    }
    (sum, dropped)
}

/// Assembles the full envelope report. The row/column-deletion value is
/// exact when the profile is within [`ROWCOL_EXACT_MAX_SIDE`] and the search
/// finishes within [`ENVELOPE_ROWCOL_BUDGET`] nodes; otherwise it is the
/// greedy upper certificate (use [`rowcol_comparison_check`] to force the
/// exact search at any size).
pub fn envelope_report(a: &VarianceProfile, pq: &ExponentPair) -> EnvelopeReport {
    let (d1, d2) = marginal_norms(a, pq);
    let d_inf = d_infinity(a);
    let exact_attempt = if a.rows().min(a.cols()) <= ROWCOL_EXACT_MAX_SIDE {
        d_infinity_rowcol_exact(a, ENVELOPE_ROWCOL_BUDGET).ok()
    } else {
        None
    };
    let (d_inf_rowcol, rowcol_certificate) = match exact_attempt {
        Some(v) => (v, RowColCertificate::Exact),
        None => (d_infinity_rowcol_greedy(a), RowColCertificate::GreedyUpper),
    };
    let branch = constant_branch(pq);
    let upper_constant_order = match pq.pstar_max_q() {
        Exponent::Finite(v) => Some(v.powf(branch.exponent())),
        Exponent::Infinity => None,
    };
    let (sum_weighted, weighted_terms_dropped) = weighted_sum(pq, d1, d2, d_inf);
    EnvelopeReport {
        d1,
        d2,
        d_inf,
        d_inf_rowcol,
        rowcol_certificate,
        sum_plain: d1 + d2 + d_inf,
        sum_weighted,
        weighted_terms_dropped,
        constant_branch: branch,
        upper_constant_order,
    }
}

/// Comparison of the weighted envelope sums built from the entry-deletion
/// and the row/column-deletion functionals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowColComparison {
    pub d_inf: f64,
    pub d_inf_rowcol: f64,
    /// √(p*)·d1 + √q·d2 + D∞ (infinite weights dropped).
    pub sum_with_entry: f64,
    /// √(p*)·d1 + √q·d2 + D′∞ (same weights).
    pub sum_with_rowcol: f64,
    /// sum_with_entry / sum_with_rowcol; always ≥ 1 because covering the k
    /// largest entries with their row and column projections shows
    /// D′∞ ≤ D∞ termwise. Set to 1 for the zero profile.
    pub ratio: f64,
    /// True when both sums vanish (zero profile); the ratio is then vacuous.
    pub degenerate: bool,
}

/// Computes both weighted sums and their ratio, using the exact
/// row/column-deletion value (a budget overrun propagates as a resource
/// error rather than silently degrading to the greedy certificate).
pub fn rowcol_comparison_check(a: &VarianceProfile, pq: &ExponentPair) -> Result<RowColComparison> {
    let (d1, d2) = marginal_norms(a, pq);
    let d_inf = d_infinity(a);
    let d_inf_rowcol = d_infinity_rowcol_exact(a, DEFAULT_ROWCOL_BUDGET)?;
    let (sum_with_entry, _) = weighted_sum(pq, d1, d2, d_inf);
    let (sum_with_rowcol, _) = weighted_sum(pq, d1, d2, d_inf_rowcol);
    let degenerate = sum_with_rowcol == 0.0;
    let ratio = if degenerate {
        1.0
    } else {
        sum_with_entry / sum_with_rowcol
    };
    debug_assert!(ratio >= 1.0, "entry-deletion sum must dominate");
    Ok(RowColComparison {
        d_inf,
        d_inf_rowcol,
        sum_with_entry,
        sum_with_rowcol,
        ratio,
        degenerate,
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

fn validate_tail_offset(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "tail offset t must be a finite real >= 0, got {t}"
        )))
    }
}

/// ρ-th moment envelope for Gaussian entries:
/// D₁ + D₂ + D∞ + √ρ·max|a_ij|, for ρ ≥ 1.
pub fn gaussian_moment_envelope(a: &VarianceProfile, pq: &ExponentPair, rho: f64) -> Result<f64> {
    validate_moment_order(rho)?;
    let (d1, d2) = marginal_norms(a, pq);
    Ok(d1 + d2 + d_infinity(a) + rho.sqrt() * a.max_abs())
}

/// Concentration tail factor exp(−t²/(2·max a_ij²)) for deviation t ≥ 0
/// above the expected norm. The zero profile has no tail to bound.
pub fn gaussian_tail_bound(a: &VarianceProfile, t: f64) -> Result<f64> {
    let max = a.max_abs();
    if max == 0.0 {
        return Err(Error::Degenerate(
            "tail bound is undefined for the zero profile".into(),
        ));
    }
    validate_tail_offset(t)?;
    Ok((-t * t / (2.0 * max * max)).exp())
}

/// ρ-th moment envelope for symmetric Weibull entries of shape r:
/// D₁ + D₂ + D∞^{(r)} + ρ^{1/r}·max|a_ij|.
pub fn weibull_moment_envelope(
    a: &VarianceProfile,
    pq: &ExponentPair,
    rho: f64,
    r: f64,
) -> Result<f64> {
    validate_moment_order(rho)?;
    let tail = d_infinity_weibull(a, r)?;
    let (d1, d2) = marginal_norms(a, pq);
    Ok(d1 + d2 + tail + rho.powf(1.0 / r) * a.max_abs())
}

/// Weibull tail factor exp(−t^r/(c2·max|a_ij|^r)). No canonical value of the
/// shape-dependent constant exists, so `c2` must be supplied explicitly;
/// omitting it is a configuration error rather than a silent default.
pub fn weibull_tail_bound(a: &VarianceProfile, t: f64, r: f64, c2: Option<f64>) -> Result<f64> {
    validate_weibull_shape(r)?;
    let c2 = c2.ok_or_else(|| {
        Error::Config("Weibull tail bound requires an explicit c2 constant".into())
    })?;
    if !(c2.is_finite() && c2 > 0.0) {
        return Err(Error::Config(format!(
            "Weibull tail constant c2 must be a finite real > 0, got {c2}"
        )));
    }
    let max = a.max_abs();
    if max == 0.0 {
        return Err(Error::Degenerate(
            "tail bound is undefined for the zero profile".into(),
        ));
    }
    validate_tail_offset(t)?;
    Ok((-t.powf(r) / (c2 * max.powf(r))).exp())
}

/// A moment/tail evaluation request: moment order ρ ≥ 1 and tail offset
/// t ≥ 0, optionally for symmetric Weibull entries of shape `r` with tail
/// constant `c2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentTailQuery {
    pub rho: f64,
    pub t: f64,
    pub r: Option<f64>,
    pub c2: Option<f64>,
}

impl MomentTailQuery {
    /// Validates ρ ≥ 1, t ≥ 0, r ∈ (0, 2] when present, c2 > 0 when present,
    /// and that c2 is only given together with r.
    pub fn new(rho: f64, t: f64, r: Option<f64>, c2: Option<f64>) -> Result<Self> {
        validate_moment_order(rho)?;
        validate_tail_offset(t)?;
        if let Some(r) = r {
            validate_weibull_shape(r)?;
        }
        if let Some(c2) = c2 {
            if r.is_none() {
                return Err(Error::Config(
                    "tail constant c2 only applies to Weibull queries (set r)".into(),
                ));
            }
            if !(c2.is_finite() && c2 > 0.0) {
                return Err(Error::Config(format!(
                    "Weibull tail constant c2 must be a finite real > 0, got {c2}"
                )));
            }
        }
        Ok(MomentTailQuery { rho, t, r, c2 })
    }
}

/// Evaluated moment envelope and tail factor for one query.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentTailReport {
    /// "gaussian" or "weibull".
    pub distribution: String,
    /// Weibull shape when applicable.
    pub r: Option<f64>,
    pub moment: f64,
    pub tail: f64,
}

/// Dispatches a [`MomentTailQuery`] to the Gaussian or Weibull formulas.
pub fn moment_tail_report(
    a: &VarianceProfile,
    pq: &ExponentPair,
    query: &MomentTailQuery,
) -> Result<MomentTailReport> {
    match query.r {
        None => Ok(MomentTailReport {
            distribution: "gaussian".into(),
            r: None,
            moment: gaussian_moment_envelope(a, pq, query.rho)?,
            tail: gaussian_tail_bound(a, query.t)?,
        }),
        Some(r) => Ok(MomentTailReport {
            distribution: "weibull".into(),
            r: Some(r),
            moment: weibull_moment_envelope(a, pq, query.rho, r)?,
            tail: weibull_tail_bound(a, query.t, r, query.c2)?,
        }),
    }
}

/// Per-entry absolute moments E|X_ij|^{p*}, E|X_ij|^q, E|X_ij|^{2p*},
/// E|X_ij|^{2q} of an independent centered matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    rows: usize,
    cols: usize,
    m_pstar: Vec<f64>,
    m_q: Vec<f64>,
    m_2pstar: Vec<f64>,
    m_2q: Vec<f64>,
}

impl MomentTable {
    /// Validates dimensions, lengths, and that every moment is a finite
    /// nonnegative real.
    pub fn new(
        rows: usize,
        cols: usize,
        m_pstar: Vec<f64>,
        m_q: Vec<f64>,
        m_2pstar: Vec<f64>,
        m_2q: Vec<f64>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Domain(format!(
                "moment table dimensions must be positive, got {rows}x{cols}"
            )));
        }
        let expect = rows * cols;
        for (name, grid) in [
            ("E|X|^p*", &m_pstar),
            ("E|X|^q", &m_q),
            ("E|X|^2p*", &m_2pstar),
            ("E|X|^2q", &m_2q),
        ] {
            if grid.len() != expect {
                return Err(Error::Domain(format!(
                    "moment grid {name} has {} entries, expected {expect}",
                    grid.len()
                )));
            }
            if let Some(bad) = grid.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::Domain(format!(
                    "moment grid {name} contains an invalid moment {bad} (must be finite and >= 0)"
                )));
            }
        }
        Ok(MomentTable {
            rows,
            cols,
            m_pstar,
            m_q,
            m_2pstar,
            m_2q,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }
}

/// The two four-term upper bounds for independent centered entries. Both
/// share the marginal moment terms; they differ in how the doubled-exponent
/// moments are aggregated. No numeric constant is attached: the comparability
/// constant is unspecified, and the values are the bracketed expressions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralEntriesBounds {
    /// Sharper variant: doubled moments grouped per row/column before the
    /// outer power mean.
    pub grouped: f64,
    /// Simpler variant: doubled moments summed flat over all entries.
    pub flat: f64,
    /// The multiplicative constant of both bounds, reported symbolically.
    pub constant: &'static str,
}

/// Evaluates both general-entries upper bounds. Requires finite p* and q
/// (that is, p > 1 and q < ∞).
pub fn general_entries_upper(
    table: &MomentTable,
    pq: &ExponentPair,
) -> Result<GeneralEntriesBounds> {
    let (ps, qv) = match (pq.p_star(), pq.q()) {
        (Exponent::Finite(ps), Exponent::Finite(q)) => (ps, q),
        _ => {
            return Err(Error::Domain(
                "general-entries bounds require finite p* and q (p > 1, q < inf)".into(),
            ))
        }
    };
    let (m, n) = (table.rows, table.cols);
    let row_sum = |grid: &[f64], i: usize| -> f64 { (0..n).map(|j| grid[i * n + j]).sum() };
    let col_sum = |grid: &[f64], j: usize| -> f64 { (0..m).map(|i| grid[i * n + j]).sum() };

    let term1 = (0..m)
        .map(|i| row_sum(&table.m_pstar, i).powf(1.0 / ps))
        .fold(0.0, f64::max);
    let term2 = (0..n)
        .map(|j| col_sum(&table.m_q, j).powf(1.0 / qv))
        .fold(0.0, f64::max);

    let s = ps.max(qv);
    let grouped3 = (0..m)
        .map(|i| row_sum(&table.m_2pstar, i).powf(s / ps))
        .sum::<f64>()
        .powf(1.0 / (2.0 * s));
    let grouped4 = (0..n)
        .map(|j| col_sum(&table.m_2q, j).powf(s / qv))
        .sum::<f64>()
        .powf(1.0 / (2.0 * s));
    let flat3 = table.m_2pstar.iter().sum::<f64>().powf(1.0 / (2.0 * ps));
    let flat4 = table.m_2q.iter().sum::<f64>().powf(1.0 / (2.0 * qv));

    Ok(GeneralEntriesBounds {
        grouped: term1 + term2 + grouped3 + grouped4,
        flat: term1 + term2 + flat3 + flat4,
        constant: "unspecified",
    })
}

/// Heuristic verdict of the truncation diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendVerdict {
    BoundedLooking,
    Diverging,
}

/// Envelope quantities along a family of square truncations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundednessReport {
    pub sizes: Vec<usize>,
    pub d1_sequence: Vec<f64>,
    pub d2_sequence: Vec<f64>,
    pub d_inf_sequence: Vec<f64>,
    /// d1 + d2 + d_inf per truncation; drives the verdict.
    pub sum_sequence: Vec<f64>,
    pub verdict: TrendVerdict,
    /// Always true: the verdict extrapolates from finitely many truncations
    /// and carries no claim about the limit operator.
    pub heuristic: bool,
}

/// Evaluates D₁, D₂ and D∞ on the N×N truncations of an infinite matrix
/// given by `generator` (called with 1-based indices i, j ≥ 1) and reports a
/// growth-trend verdict: diverging when the envelope sum grows by more than
/// [`TREND_GROWTH_FACTOR`] from the middle truncation to the last one.
pub fn boundedness_diagnostic(
    pq: &ExponentPair,
    generator: impl Fn(usize, usize) -> f64,
    sizes: &[usize],
) -> Result<BoundednessReport> {
    if sizes.is_empty() {
        return Err(Error::Domain("truncation size list must be nonempty".into()));
    }
    if sizes[0] == 0 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(
            "truncation sizes must be positive and strictly increasing".into(),
        ));
    }
    let mut d1_sequence = Vec::with_capacity(sizes.len());
    let mut d2_sequence = Vec::with_capacity(sizes.len());
    let mut d_inf_sequence = Vec::with_capacity(sizes.len());
    let mut sum_sequence = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let a = VarianceProfile::from_fn(n, n, |i, j| generator(i + 1, j + 1))?;
        let (d1, d2) = marginal_norms(&a, pq);
        let d_inf = d_infinity(&a);
        d1_sequence.push(d1);
        d2_sequence.push(d2);
        d_inf_sequence.push(d_inf);
        sum_sequence.push(d1 + d2 + d_inf);
    }
    let last = sum_sequence[sum_sequence.len() - 1];
    let mid = sum_sequence[(sum_sequence.len() - 1) / 2];
    let verdict = if mid == 0.0 {
        if last == 0.0 {
            TrendVerdict::BoundedLooking
        } else {
            TrendVerdict::Diverging
        }
    } else if last / mid > TREND_GROWTH_FACTOR {
        TrendVerdict::Diverging
    } else {
        TrendVerdict::BoundedLooking
    };
    Ok(BoundednessReport {
        sizes: sizes.to_vec(),
        d1_sequence,
        d2_sequence,
        d_inf_sequence,
        sum_sequence,
        verdict,
        heuristic: true,
    })
}
