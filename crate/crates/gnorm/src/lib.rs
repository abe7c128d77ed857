//! gnorm — certified ℓp→ℓq operator norms of real matrices, the deterministic
//! envelope quantities D1 / D2 / D∞ / D′∞ that two-sidedly bound the expected
//! norm of structured random matrices, seeded Monte Carlo over
//! Gaussian/Weibull/mixture/Bernoulli ensembles, and structural diagnostics
//! (bipartite profile graph, block-diagonal identity, band decomposition).
//!
//! Scope: exponent pairs with p ∈ [1,2] and q ∈ [2,∞]. Exact closed forms are
//! used for p = 1, q = ∞, and the spectral case; the general case is bracketed
//! by an alternating-ascent lower bound and a dyadic-net / Hölder upper bound.

#![forbid(unsafe_code)]

pub mod ensembles;
pub mod envelope;
pub mod error;
pub mod estimate;
pub mod exponents;
pub mod montecarlo;
pub mod norms;
pub mod pqnorm;
pub mod profile;
pub mod structure;
mod rng;

pub use error::{Error, Result};
pub use estimate::{Certificate, NormEstimate};
pub use exponents::{conjugate_exponent, Exponent, ExponentPair};
pub use profile::VarianceProfile;
