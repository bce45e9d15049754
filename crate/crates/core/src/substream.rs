//! Seed-derived random substreams.
//!
//! Every random draw in this crate comes from a stream keyed by
//! `(seed, unit index, label)`. The key is hashed into a 256-bit ChaCha seed,
//! so redrawing one labeled noise never disturbs any other stream and results
//! do not depend on evaluation order or thread count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

/// RNG for the substream identified by `(seed, unit, label)`.
pub(crate) fn stream(seed: u64, unit: u64, label: &str) -> ChaCha12Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(unit.to_le_bytes());
    hasher.update(label.as_bytes());
    ChaCha12Rng::from_seed(hasher.finalize().into())
}

/// A `u64` seed derived from a master seed and a list of index parts.
///
/// Used to assign independent seeds to grid points and repetitions.
pub(crate) fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    for part in parts {
        hasher.update(part.to_le_bytes());
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible() {
        let a: f64 = stream(7, 3, "u0").gen();
        let b: f64 = stream(7, 3, "u0").gen();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn streams_differ_across_units_and_labels() {
        let base: f64 = stream(7, 3, "u0").gen();
        let other_unit: f64 = stream(7, 4, "u0").gen();
        let other_label: f64 = stream(7, 3, "u1").gen();
        assert_ne!(base.to_bits(), other_unit.to_bits());
        assert_ne!(base.to_bits(), other_label.to_bits());
    }

    #[test]
    fn derived_seeds_depend_on_every_part() {
        let s = derive_seed(1, &[2, 3]);
        assert_ne!(s, derive_seed(1, &[2, 4]));
        assert_ne!(s, derive_seed(1, &[3, 3]));
        assert_ne!(s, derive_seed(2, &[2, 3]));
        assert_eq!(s, derive_seed(1, &[2, 3]));
    }
}
