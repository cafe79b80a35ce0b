//! Seed derivation. Every random stream in a run is keyed by the root seed
//! plus a purpose tag and indices, so two policies run on the same seed see
//! identical requests and fading.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a derived stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Topology = 1,
    Workload = 2,
    Mobility = 3,
    ContentEsn = 4,
    MobilityEsn = 5,
    Request = 6,
    Fading = 7,
    RandomCache = 8,
    Sampling = 9,
    Input = 10,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(root: u64, purpose: Purpose, indices: &[u64]) -> u64 {
    let mut h = splitmix(root ^ (purpose as u64).wrapping_mul(GOLDEN));
    for &i in indices {
        h = splitmix(h ^ i);
    }
    h
}

pub fn stream(root: u64, purpose: Purpose, indices: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, purpose, indices))
}

/// Unit-mean exponential draw (Rayleigh power fading).
pub fn exponential<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    // random::<f64>() is in [0, 1); 1 - u is in (0, 1]
    let u: f64 = 1.0 - rng.random::<f64>();
    -libm::log(u)
}

/// Uniform value in `(0, 1]` hashed from the key, without a stream. Used
/// where the number of draws depends on the policy but the values must not.
pub fn hashed_unit(root: u64, purpose: Purpose, indices: &[u64]) -> f64 {
    let bits = derive_seed(root, purpose, indices) >> 11;
    (bits as f64 + 1.0) / (1u64 << 53) as f64
}

/// Unit-mean exponential draw keyed like [`hashed_unit`].
pub fn hashed_exponential(root: u64, purpose: Purpose, indices: &[u64]) -> f64 {
    -libm::log(hashed_unit(root, purpose, indices))
}

pub fn uniform<R: rand::Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = stream(7, Purpose::Fading, &[1, 2]).random();
        let b: u64 = stream(7, Purpose::Fading, &[1, 2]).random();
        let c: u64 = stream(7, Purpose::Fading, &[2, 1]).random();
        let d: u64 = stream(7, Purpose::Request, &[1, 2]).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn hashed_exponential_has_unit_mean() {
        let n = 200_000u64;
        let mean = (0..n).map(|i| hashed_exponential(3, Purpose::Fading, &[i])).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "{mean}");
        assert!(hashed_unit(3, Purpose::Fading, &[9]) > 0.0);
    }

    #[test]
    fn exponential_has_unit_mean() {
        let mut rng = stream(1, Purpose::Fading, &[]);
        let n = 200_000;
        let mean = (0..n).map(|_| exponential(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "{mean}");
    }
}
