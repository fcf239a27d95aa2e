//! Seeded random streams.
//!
//! Every random draw in the crate is addressed by `(seed, purpose, index)`:
//! the root seed picks a ChaCha key, the purpose tag perturbs it, and the
//! index selects an independent ChaCha stream. Sample `i` is therefore the
//! same no matter how many samples are drawn or how the work is split across
//! threads, which is what makes sampled suprema monotone in the budget.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::{cst, Scalar};
use crate::spaces::{PNormedSpace, Vector};

/// Purpose tags; distinct tags give unrelated streams for the same seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    UnitSphere = 0x5A17,
    DefectPair = 0xDEF3,
    Ascent = 0xA5C3,
    Group = 0x6A0B,
    Heuristic = 0x4E11,
    Modulus = 0x3D17,
    Verify = 0x7E12,
    Row = 0x20B5,
}

/// SplitMix64 finaliser, used to spread seeds and tags over the key space.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed, e.g. one per grid row.
#[inline]
pub fn derive_seed(seed: u64, purpose: Purpose, index: u64) -> u64 {
    mix64(mix64(seed ^ purpose as u64).wrapping_add(index))
}

/// Independent generator for draw number `index`.
pub fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed ^ (purpose as u64).rotate_left(17)));
    rng.set_stream(index);
    rng
}

pub fn gaussian<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    let z: f64 = rng.sample(StandardNormal);
    cst(z)
}

pub fn uniform<T: Scalar, R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> T {
    cst(rng.random_range(lo..hi))
}

/// Draws from the unit sphere of `space`: an isotropic Gaussian direction
/// normalised in the space's own quasinorm.
#[derive(Debug, Clone, Copy)]
pub struct UnitSphereSampler {
    pub seed: u64,
}

impl UnitSphereSampler {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn sample<T: Scalar>(&self, space: &PNormedSpace<T>, index: u64) -> Vector<T> {
        let mut rng = stream(self.seed, Purpose::UnitSphere, index);
        loop {
            let v = Vector::from_fn(space.dim(), |_| gaussian::<T, _>(&mut rng));
            let norm = space.norm(&v);
            if norm > T::zero() {
                return v.scaled(norm.recip());
            }
        }
    }
}
