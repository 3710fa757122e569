//! Seeded random streams and the handful of distributions the crate needs.
//!
//! Streams are addressed by a base seed plus a path of indices, e.g.
//! `(seed, [replicate])` or `(seed, [size, sim, role])`. Deriving a stream
//! never touches shared state, so work items can run on any thread in any
//! order and still see the same numbers.

use core::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Folds a path of indices into a child seed.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &i| splitmix64(acc ^ splitmix64(i.wrapping_add(0x5851_F42D_4C95_7F2D))))
}

/// Independent generator for `(seed, path)`.
pub fn stream(seed: u64, path: &[u64]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, path))
}

/// Uniform on `[0, 1)` with 53 random bits.
#[inline]
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Unit-rate exponential by inversion.
#[inline]
pub fn unit_exponential<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    // 1 - u lies in (0, 1], so the log is finite
    -libm::log(1.0 - uniform(rng))
}

/// Two independent standard normals (Box–Muller).
#[inline]
pub fn standard_normal_pair<R: RngCore + ?Sized>(rng: &mut R) -> (f64, f64) {
    let radius = libm::sqrt(-2.0 * libm::log(1.0 - uniform(rng)));
    let (s, c) = libm::sincos(2.0 * PI * uniform(rng));
    (radius * c, radius * s)
}

#[inline]
pub fn standard_normal<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    standard_normal_pair(rng).0
}

/// Uniform index in `0..n` without modulo bias (Lemire's method).
///
/// # Panics
/// If `n == 0`.
#[inline]
pub fn categorical<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> usize {
    assert!(n > 0, "categorical over an empty range");
    let n = n as u64;
    let mut m = u128::from(rng.next_u64()) * u128::from(n);
    if (m as u64) < n {
        let floor = n.wrapping_neg() % n;
        while (m as u64) < floor {
            m = u128::from(rng.next_u64()) * u128::from(n);
        }
    }
    (m >> 64) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = stream(7, &[1, 2]);
        let mut b = stream(7, &[1, 2]);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = stream(7, &[2, 1]);
        assert_ne!(stream(7, &[1, 2]).next_u64(), c.next_u64());
        assert_ne!(derive_seed(7, &[]), derive_seed(8, &[]));
        assert_ne!(derive_seed(7, &[0]), derive_seed(7, &[]));
    }

    #[test]
    fn normal_mean_within_clt_bound() {
        let mut rng = stream(11, &[]);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n / 2 {
            let (a, b) = standard_normal_pair(&mut rng);
            sum += a + b;
            sum_sq += a * a + b * b;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 3.0 / (n as f64).sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn exponential_mean_within_clt_bound() {
        let mut rng = stream(12, &[]);
        let n = 1_000_000;
        let mean = (0..n).map(|_| unit_exponential(&mut rng)).sum::<f64>() / n as f64;
        // sd of a unit exponential is 1
        assert!((mean - 1.0).abs() < 3.0 / (n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut rng = stream(3, &[]);
        for _ in 0..10_000 {
            let u = uniform(&mut rng);
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn categorical_covers_range_evenly() {
        let mut rng = stream(5, &[]);
        let mut counts = [0usize; 7];
        let n = 70_000;
        for _ in 0..n {
            counts[categorical(7, &mut rng)] += 1;
        }
        // binomial sd ≈ sqrt(n·p·(1-p)) ≈ 92
        for c in counts {
            assert!((c as f64 - 10_000.0).abs() < 4.0 * 92.0, "{counts:?}");
        }
        assert_eq!(categorical(1, &mut rng), 0);
    }
}
