//! Randomized primitives: random linear combinations of a system, random
//! affine hashing for isolation, and the seeded stream type that feeds them.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{Elem, Field};
use crate::mpoly::{PolySystem, Polynomial};

/// A reproducible source of randomness identified by `(seed, path)`.
///
/// Children are pure functions of the parent and an index, so a recursion
/// tree can hand out independent streams without any shared state, and the
/// draws do not depend on scheduling.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    seed: u64,
    path: Vec<u64>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> RngStream {
        RngStream { seed, path: Vec::new() }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    pub fn child(&self, index: u64) -> RngStream {
        let mut path = self.path.clone();
        path.push(index);
        RngStream { seed: self.seed, path }
    }

    /// A fresh generator for this stream; calling it twice yields the same draws.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        let mut h = splitmix64(self.seed);
        for &p in &self.path {
            h = splitmix64(h ^ splitmix64(p.wrapping_add(0x5851_f42d_4c95_7f2d)));
        }
        // Also fold in the depth so that [0] and [] differ even after mixing.
        h = splitmix64(h ^ self.path.len() as u64);
        for chunk in key.chunks_mut(8) {
            h = splitmix64(h);
            chunk.copy_from_slice(&h.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}

pub fn random_elem(field: &Field, rng: &mut impl Rng) -> Elem {
    Elem::from_raw(rng.gen_range(0..field.order()))
}

/// `μ` polynomials `Σ_j ρ_{ij} P_j` with i.i.d. uniform coefficients.
///
/// Every common root of the system is a root of each output; a point that is
/// not a common root is a root of all outputs with probability `q^{-μ}`.
pub fn razborov_smolensky(system: &PolySystem, mu: usize, stream: &RngStream) -> Vec<Polynomial> {
    let field = system.field();
    let mut rng = stream.rng();
    (0..mu)
        .map(|_| {
            let mut acc = Polynomial::zero(field, system.nvars());
            for p in system.polys() {
                let rho = random_elem(field, &mut rng);
                if !rho.is_zero() {
                    acc.add_scaled(p, rho);
                }
            }
            acc
        })
        .collect()
}

/// `ℓ` random affine forms `a·X + b`, with `ℓ` uniform in `0..=n` and `a`, `b`
/// uniform. Appending them to a system can only remove solutions; for a
/// satisfiable system the result has exactly one solution with probability
/// `Ω(1/n)`.
///
/// The forms carry a random constant term: purely linear forms all vanish at
/// the origin, which would make isolation impossible whenever 0 is a root.
pub fn valiant_vazirani(field: &Arc<Field>, n: usize, stream: &RngStream) -> Vec<Polynomial> {
    let mut rng = stream.rng();
    let count = rng.gen_range(0..=n);
    (0..count)
        .map(|_| {
            let mut terms: Vec<(Vec<u64>, Elem)> = Vec::with_capacity(n + 1);
            for i in 0..n {
                let mut m = vec![0u64; n];
                m[i] = 1;
                terms.push((m, random_elem(field, &mut rng)));
            }
            terms.push((vec![0; n], random_elem(field, &mut rng)));
            Polynomial::from_terms(field, n, terms).expect("affine form is well formed")
        })
        .collect()
}
