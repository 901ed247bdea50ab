//! Deterministic per-trajectory random number streams.
//!
//! Each trajectory gets its own ChaCha stream addressed by a counter
//! (the trajectory index), so an ensemble is reproducible bit-for-bit
//! regardless of how trajectories are distributed over threads.

use crate::C64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
// f64 math methods for no_std builds; unused when std is linked in
// test builds, hence the allow.
#[allow(unused_imports)]
use num_traits::Float;

/// SplitMix64 step, used to expand a 64-bit seed into a ChaCha key.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// RNG for trajectory `index` of the run keyed by `master_seed` and a
/// small domain tag (e.g. one tag per representation).
pub fn trajectory_rng(master_seed: u64, domain: u64, index: u64) -> ChaCha12Rng {
    let mut state = master_seed ^ domain.wrapping_mul(0xA5A5A5A5A5A5A5A5);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha12Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// A pair of independent standard normals (Box-Muller).
pub fn normal_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    // gen::<f64>() is uniform on [0, 1); shift away from zero for the log.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let phi = core::f64::consts::TAU * u2;
    (r * phi.cos(), r * phi.sin())
}

/// Complex Gaussian `zeta` with `<zeta zeta*> = variance` and `<zeta^2> = 0`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let (x, y) = normal_pair(rng);
    let s = (0.5 * variance).sqrt();
    C64::new(s * x, s * y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let mut a = trajectory_rng(42, 0, 7);
        let mut b = trajectory_rng(42, 0, 7);
        let mut c = trajectory_rng(42, 0, 8);
        let mut d = trajectory_rng(42, 1, 7);
        let xa: u64 = a.gen();
        assert_eq!(xa, b.gen::<u64>());
        assert_ne!(xa, c.gen::<u64>());
        assert_ne!(xa, d.gen::<u64>());
    }

    #[test]
    fn normal_moments() {
        let mut rng = trajectory_rng(1, 0, 0);
        let n = 200_000;
        let (mut m1, mut m2, mut m4) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let (x, y) = normal_pair(&mut rng);
            for v in [x, y] {
                m1 += v;
                m2 += v * v;
                m4 += v * v * v * v;
            }
        }
        let count = (2 * n) as f64;
        assert!((m1 / count).abs() < 0.01);
        assert!((m2 / count - 1.0).abs() < 0.02);
        assert!((m4 / count - 3.0).abs() < 0.1);
    }

    #[test]
    fn complex_normal_covariance() {
        let mut rng = trajectory_rng(2, 0, 0);
        let n = 200_000;
        let dt = 0.37;
        let mut zz = crate::C64::new(0.0, 0.0);
        let mut zzc = 0.0;
        for _ in 0..n {
            let z = complex_normal(&mut rng, dt);
            zz += z * z;
            zzc += z.norm_sqr();
        }
        assert!((zzc / n as f64 - dt).abs() < 0.01);
        assert!((zz / n as f64).norm() < 0.01);
    }
}
