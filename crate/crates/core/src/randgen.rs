//! Seeded random polynomial and tensor generators for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactla::Rat;
use crate::polyring::{monomial_basis, PolyR};
use crate::polyspaces::SpaceClass;
use crate::tensorops::{PolyMat, PolyMatR};

pub struct PolyGen {
    rng: ChaCha8Rng,
}

impl PolyGen {
    pub fn new(seed: u64) -> Self {
        PolyGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn coeff(&mut self) -> Rat {
        Rat::new(
            self.rng.gen_range(-6i64..=6).into(),
            self.rng.gen_range(1i64..=4).into(),
        )
    }

    /// Dense-ish random polynomial of total degree <= deg.
    pub fn scalar(&mut self, arity: usize, deg: u32) -> PolyR {
        let mut p = PolyR::zero(arity, ());
        for m in monomial_basis(arity, deg) {
            if self.rng.gen_bool(0.6) {
                p = p.add(&PolyR::monomial(arity, m, self.coeff()));
            }
        }
        p
    }

    pub fn vector(&mut self, arity: usize, deg: u32) -> Vec<PolyR> {
        (0..arity).map(|_| self.scalar(arity, deg)).collect()
    }

    /// Random tensor of the given class with entries of degree <= deg.
    pub fn tensor(&mut self, arity: usize, class: SpaceClass, deg: u32) -> PolyMatR {
        let comps: Vec<PolyR> = (0..class.comp_count(arity))
            .map(|_| self.scalar(arity, deg))
            .collect();
        class.reconstruct(arity, arity, (), &comps)
    }

    pub fn gen_range(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..hi)
    }
}

/// Convenience: a random full matrix (class GenMat).
pub fn random_mat3(seed: u64, deg: u32) -> PolyMatR {
    let mut g = PolyGen::new(seed);
    let entries: Vec<PolyR> = (0..9).map(|_| g.scalar(3, deg)).collect();
    PolyMat::from_entries(3, 3, entries)
}
