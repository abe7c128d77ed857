//! ℓp→ℓq operator norms: exact closed forms, a duality-ascent lower bound, a
//! dyadic-net certified upper bound, and their combination into a certified
//! interval.

mod ascent;
mod exact;
mod net;

pub use ascent::{alternating_norm_lower, dual_norming_vector, AscentConfig};
pub use exact::{cheap_norm_upper, norm_1_to_q, norm_2_to_2, norm_p_to_inf};
pub use net::{auto_k0, dyadic_net_upper, DyadicNetConfig};

use crate::error::{Error, Result};
use crate::estimate::NormEstimate;
use crate::exponents::ExponentPair;
use crate::profile::VarianceProfile;

/// Certified interval [L, U] ∋ ‖A‖_{p→q}.
///
/// p = 1 and q = ∞ route to the exact closed forms (degenerate interval).
/// Otherwise L = max(alternating ascent, raw net maximum) — both certified
/// lower bounds — and U = min(4·net max, cheap Hölder bound). Structurally
/// U/L ≤ 4. If the net exceeds its budget, the cheap bound alone serves as U
/// (diagnosed in `upper_source`); resource errors are only propagated if no
/// upper route is available, which cannot happen here.
pub fn certified_norm_interval(
    a: &VarianceProfile,
    pq: &ExponentPair,
    cfg_lower: &AscentConfig,
    cfg_upper: &DyadicNetConfig,
) -> Result<NormEstimate> {
    if a.is_zero() {
        return Ok(NormEstimate::exact(0.0, "certified_interval").with_diag("route", "zero"));
    }
    if !pq.p().is_infinite() && pq.p().as_f64() == 1.0 {
        let v = norm_1_to_q(a, pq.q()).value;
        return Ok(NormEstimate::exact(v, "certified_interval").with_diag("route", "exact_1_to_q"));
    }
    if pq.q().is_infinite() {
        let v = norm_p_to_inf(a, pq.p()).value;
        return Ok(NormEstimate::exact(v, "certified_interval").with_diag("route", "exact_p_to_inf"));
    }

    let lower_est = alternating_norm_lower(a, pq, cfg_lower);
    let cheap = cheap_norm_upper(a, pq);
    let net = match dyadic_net_upper(a, pq, cfg_upper) {
        Ok(est) => Some(est),
        Err(Error::Resource(_)) => None,
        Err(e) => return Err(e),
    };

    let net_max = net.as_ref().and_then(|e| e.diag_f64("net_max")).unwrap_or(0.0);
    let mut lower = lower_est.value.max(net_max);
    let (upper, upper_source) = match &net {
        Some(n) if n.value <= cheap.value => (n.value, "dyadic_net"),
        _ => (cheap.value, "cheap_holder"),
    };
    // L ≤ U holds mathematically; guard against last-ulp rounding on tight instances.
    if lower > upper {
        debug_assert!(lower <= upper * (1.0 + 1e-9), "interval inverted: [{lower}, {upper}]");
        lower = upper;
    }

    let lower_source = if net_max > lower_est.value { "net_max" } else { "alternating" };
    let mut est = NormEstimate::interval(lower, upper, "certified_interval")
        .with_diag("lower_source", lower_source)
        .with_diag("upper_source", upper_source)
        .with_diag("gap_ratio", if lower > 0.0 { upper / lower } else { f64::INFINITY })
        .with_diag("ascent_iterations", lower_est.diag_f64("iterations").unwrap_or(0.0))
        .with_diag("seed", cfg_lower.seed);
    if let Some(n) = net {
        est = est
            .with_diag("net_size", n.diag_f64("net_size").unwrap_or(0.0))
            .with_diag("net_max", net_max);
    } else {
        est = est.with_diag("net_skipped", "budget");
    }
    Ok(est)
}
