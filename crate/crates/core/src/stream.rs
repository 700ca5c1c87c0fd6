//! Deterministic counter-based random streams.
//!
//! Every `(seed, label, sample index)` triple owns an independent ChaCha
//! substream, so sampling loops can run in any order — or in parallel — and
//! still reproduce bit-identical draws.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A family of independent RNG substreams keyed by `(seed, label)`.
#[derive(Debug, Clone)]
pub struct Streams {
    key: [u8; 32],
}

impl Streams {
    pub fn new(seed: u64, label: &str) -> Self {
        // FNV-1a over the label, then splitmix expansion mixed with the seed.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in label.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
        let mut state = seed ^ h;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Streams { key }
    }

    /// The RNG for one sample index; independent of every other index.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        rng
    }
}

/// Uniform direction on the unit sphere of `R^{2n}`, viewed as a vector in `C^n`.
pub fn unit_direction<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    loop {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            })
            .collect();
        let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for c in &mut v {
                *c /= norm;
            }
            return v;
        }
    }
}

/// Uniform point of the open unit disc.
pub fn unit_disc<R: Rng>(rng: &mut R) -> Complex64 {
    let r = rng.random_range(0.0_f64..1.0).sqrt();
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    // Clamp away from the circle so strict-interior parameter ranges hold.
    Complex64::from_polar(r.min(1.0 - 1e-12), theta)
}
