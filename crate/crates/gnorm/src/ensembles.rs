//! Seeded samplers for the random matrices X ∘ A: iid standard Gaussian,
//! symmetric Weibull of shape r (survival exactly e^{−t^r}), Gaussian
//! mixtures R·g, and symmetric Bernoulli entries.
//!
//! Every entry draws from its own keyed stream `(seed, stream, entry-index)`
//! with a fixed per-kind draw order, so generation is order- and
//! schedule-independent: identical specs yield bit-identical matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::VarianceProfile;
use crate::rng::KeyedRng;

/// Distribution of the nonnegative radial factor R in a mixture R·g.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case")]
pub enum RadialDistribution {
    /// R ≡ c.
    Constant { c: f64 },
    /// R ∈ {low, high} with probability 1/2 each.
    TwoPoint { low: f64, high: f64 },
    /// R = exp(mu + sigma·z) with z standard normal.
    Lognormal { mu: f64, sigma: f64 },
}

impl RadialDistribution {
    fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Error::Config(format!(
                "mixture radial factor must be nonnegative and finite, got {what} = {v}"
            ))
        };
        match *self {
            RadialDistribution::Constant { c } => {
                if !(c.is_finite() && c >= 0.0) {
                    return Err(bad("c", c));
                }
            }
            RadialDistribution::TwoPoint { low, high } => {
                if !(low.is_finite() && low >= 0.0) {
                    return Err(bad("low", low));
                }
                if !(high.is_finite() && high >= 0.0) {
                    return Err(bad("high", high));
                }
            }
            RadialDistribution::Lognormal { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(Error::Config(format!(
                        "lognormal location mu must be finite, got {mu}"
                    )));
                }
                if !(sigma.is_finite() && sigma >= 0.0) {
                    return Err(Error::Config(format!(
                        "lognormal scale sigma must be finite and nonnegative, got {sigma}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Draws R; the draw count per variant is fixed (0, 1, or 2 u64 draws).
    fn draw(&self, rng: &mut KeyedRng) -> f64 {
        match *self {
            RadialDistribution::Constant { c } => c,
            RadialDistribution::TwoPoint { low, high } => {
                if rng.next_u64() & 1 == 0 {
                    low
                } else {
                    high
                }
            }
            RadialDistribution::Lognormal { mu, sigma } => {
                (mu + sigma * rng.next_standard_normal()).exp()
            }
        }
    }
}

/// Entry distribution of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleKind {
    /// Standard normal entries.
    Gaussian,
    /// Symmetric Weibull of shape r ∈ (0, 2]: sign·E^{1/r} with E standard
    /// exponential, so P(|X| ≥ t) = e^{−t^r} exactly.
    Weibull { r: f64 },
    /// R·g with independent radial factor R and standard normal g.
    Mixture { radial: RadialDistribution },
    /// Uniform ±1 entries.
    Bernoulli,
}

/// A fully keyed sampling request: distribution, master seed, and substream.
///
/// JSON form is flat, e.g. `{"kind":"weibull","r":1.5,"seed":7,"stream":0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    #[serde(flatten)]
    pub kind: EnsembleKind,
    pub seed: u64,
    pub stream: u64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, seed: u64, stream: u64) -> Result<Self> {
        let spec = EnsembleSpec { kind, seed, stream };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the distribution parameters (Weibull shape range, radial
    /// nonnegativity).
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            EnsembleKind::Gaussian | EnsembleKind::Bernoulli => Ok(()),
            EnsembleKind::Weibull { r } => {
                if r.is_finite() && r > 0.0 && r <= 2.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!(
                        "Weibull ensemble shape r must lie in (0, 2], got {r}"
                    )))
                }
            }
            EnsembleKind::Mixture { radial } => radial.validate(),
        }
    }

    /// The ensemble for one Monte Carlo sample: same seed and distribution,
    /// with the substream re-keyed by the sample index.
    pub fn for_sample(&self, sample: u64) -> EnsembleSpec {
        // The tag separates per-sample streams from direct stream usage.
        const SAMPLE_TAG: u64 = 0x4D43_5341_4D50_4C45;
        EnsembleSpec {
            kind: self.kind,
            seed: self.seed,
            stream: crate::rng::fold_key(&[self.stream, SAMPLE_TAG, sample]),
        }
    }
}

fn draw_entry(kind: &EnsembleKind, rng: &mut KeyedRng) -> f64 {
    match *kind {
        EnsembleKind::Gaussian => rng.next_standard_normal(),
        EnsembleKind::Weibull { r } => {
            let sign = if rng.next_u64() & 1 == 0 { -1.0 } else { 1.0 };
            let exp = -rng.next_unit_open().ln();
            sign * exp.powf(1.0 / r)
        }
        EnsembleKind::Mixture { radial } => {
            // radial factor first, then the gaussian — frozen draw order
            let r = radial.draw(rng);
            r * rng.next_standard_normal()
        }
        EnsembleKind::Bernoulli => {
            if rng.next_u64() & 1 == 0 {
                -1.0
            } else {
                1.0
            }
        }
    }
}

/// Samples (a_ij·X_ij) with X_ij iid per `spec`. Each entry uses the keyed
/// stream `(seed, stream, row-major index)`, so output is bit-identical for
/// identical specs regardless of evaluation order.
pub fn sample_matrix(a: &VarianceProfile, spec: &EnsembleSpec) -> Result<VarianceProfile> {
    spec.validate()?;
    let cols = a.cols();
    VarianceProfile::from_fn(a.rows(), a.cols(), |i, j| {
        let idx = (i * cols + j) as u64;
        let mut rng = KeyedRng::from_parts(&[spec.seed, spec.stream, idx]);
        a.entry(i, j) * draw_entry(&spec.kind, &mut rng)
    })
}
