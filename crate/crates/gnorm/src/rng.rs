//! Deterministic keyed random streams.
//!
//! Reproducibility contract (frozen — fixtures depend on it):
//! every stream is a SplitMix64 sequence whose initial state is derived by
//! folding the key parts `(seed, stream, entry-index, …)` through the
//! SplitMix64 finalizer. Streams keyed by distinct part tuples are
//! statistically independent for Monte Carlo purposes, and a stream's output
//! depends only on its key — never on scheduling or worker count.
//! Not cryptographic.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer (Steele, Lea, Flood 2014); bijective mixing.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds key parts into a stream state.
pub(crate) fn fold_key(parts: &[u64]) -> u64 {
    let mut h = 0u64;
    for &p in parts {
        h = mix64(h ^ mix64(p.wrapping_add(GOLDEN)));
    }
    h
}

/// A SplitMix64 stream positioned by a key.
#[derive(Clone, Debug)]
pub(crate) struct KeyedRng {
    state: u64,
}

impl KeyedRng {
    pub fn from_parts(parts: &[u64]) -> Self {
        KeyedRng { state: fold_key(parts) }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform on (0, 1]; the open lower end keeps `ln` finite.
    #[inline]
    pub fn next_unit_open(&mut self) -> f64 {
        // Top 53 bits give a uniform dyadic rational in [0, 1).
        let u = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        1.0 - u
    }

    /// Standard normal via Box–Muller (two u64 draws, cosine branch only so
    /// every normal consumes a fixed number of draws).
    #[inline]
    pub fn next_standard_normal(&mut self) -> f64 {
        let u1 = self.next_unit_open();
        let u2 = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
