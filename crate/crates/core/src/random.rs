//! Reproducible random test data: integer coefficients in `[-9, 9]`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elements::catalog::ShapeSpaceSpec;
use crate::elements::local::field_from_coords;
use crate::operators::PolyField;
use crate::polytensor::{int, Frame, Rational};

pub const DEFAULT_SEED: u64 = 20_240_917;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_ints(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| int(rng.gen_range(-9..=9))).collect()
}

/// A random member of a shape space on the given frame.
pub fn random_field(rng: &mut impl Rng, space: &ShapeSpaceSpec, frame: Arc<Frame>) -> PolyField {
    field_from_coords(space, &small_ints(rng, space.dim()), frame)
}
