//! Deterministic generators for random test data: J-compatible homomorphism
//! blocks, unimodular automorphisms, symplectic assemblies and isogenies.
//!
//! Everything is driven by an explicit seeded generator so suites are
//! reproducible across runs and platforms.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::matrix::{rat, RatMatrix};
use crate::mukai::{BlockIso, SymplecticMap};
use crate::torus::{ComplexTorus, TorusHom};

/// SplitMix64: tiny, seedable, stable across platforms.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }
}

/// Project an arbitrary rational matrix onto the space of homomorphisms
/// `source -> target`: `R - J_target * R * J_source` always intertwines the
/// complex structures.
pub fn hom_projection(r: &RatMatrix, source: &ComplexTorus, target: &ComplexTorus) -> RatMatrix {
    let jrj = target.j().mul(r).and_then(|m| m.mul(source.j())).expect("shapes agree");
    r.sub(&jrj).expect("same shape")
}

fn random_int_matrix(rows: usize, cols: usize, bound: i64, rng: &mut SplitMix64) -> RatMatrix {
    RatMatrix::from_fn(rows, cols, |_, _| rat(rng.range(-bound, bound)))
}

/// A random homomorphism `source -> target` with small integer entries.
pub fn random_hom(
    source: &ComplexTorus,
    target: &ComplexTorus,
    rng: &mut SplitMix64,
    bound: i64,
) -> TorusHom {
    let r = random_int_matrix(target.rank(), source.rank(), bound, rng);
    TorusHom::new(source.clone(), target.clone(), hom_projection(&r, source, target))
        .expect("projection intertwines the complex structures")
}

/// A random integral isogeny of `t` with `0 < |det| <= det_bound`.
pub fn random_isogeny(t: &ComplexTorus, rng: &mut SplitMix64, det_bound: i64) -> TorusHom {
    loop {
        let f = random_hom(t, t, rng, 1);
        let det = f.matrix().determinant().expect("square");
        let abs = det.numer().abs();
        if !det.is_zero() && abs <= BigInt::from(det_bound) {
            return f;
        }
    }
}

fn j0_block(kind: u64) -> RatMatrix {
    match kind {
        0 => RatMatrix::identity(2),
        1 => RatMatrix::identity(2).neg(),
        2 => crate::torus::j0(),
        _ => crate::torus::j0().neg(),
    }
}

fn is_j0_power(t: &ComplexTorus) -> bool {
    t.j() == &crate::torus::j0().diag_repeat(t.g())
}

/// A random unimodular automorphism matrix commuting with the complex
/// structure, for tori built from the standard square-lattice elliptic block.
/// Generated as a product of Gaussian-integer elementary operations.
pub fn random_commuting_unimodular(t: &ComplexTorus, rng: &mut SplitMix64, steps: usize) -> RatMatrix {
    assert!(is_j0_power(t), "sampler expects a square-lattice block torus");
    let g = t.g();
    let mut m = RatMatrix::identity(2 * g);
    for _ in 0..steps {
        let op = rng.below(3);
        let factor = match op {
            0 if g >= 2 => {
                // elementary: unit z in the (i, j) off-diagonal block
                let i = rng.below(g as u64) as usize;
                let mut j = rng.below(g as u64) as usize;
                if i == j {
                    j = (j + 1) % g;
                }
                let z = j0_block(rng.below(4));
                RatMatrix::from_fn(2 * g, 2 * g, |r, c| {
                    let (br, bc) = (r / 2, c / 2);
                    if r == c {
                        rat(1)
                    } else if br == i && bc == j {
                        z.at(r % 2, c % 2).clone()
                    } else {
                        rat(0)
                    }
                })
            }
            1 => {
                // unit in one diagonal block
                let i = rng.below(g as u64) as usize;
                let z = j0_block(1 + rng.below(3));
                RatMatrix::from_fn(2 * g, 2 * g, |r, c| {
                    let (br, bc) = (r / 2, c / 2);
                    if br == i && bc == i {
                        z.at(r % 2, c % 2).clone()
                    } else if r == c {
                        rat(1)
                    } else {
                        rat(0)
                    }
                })
            }
            _ if g >= 2 => {
                // swap two 2x2 blocks
                let i = rng.below(g as u64) as usize;
                let mut j = rng.below(g as u64) as usize;
                if i == j {
                    j = (j + 1) % g;
                }
                RatMatrix::from_fn(2 * g, 2 * g, |r, c| {
                    let (br, bc) = (r / 2, c / 2);
                    let target = if br == i { j } else if br == j { i } else { br };
                    if bc == target && (r % 2) == (c % 2) { rat(1) } else { rat(0) }
                })
            }
            _ => {
                let z = j0_block(1 + rng.below(3));
                RatMatrix::from_fn(2 * g, 2 * g, |r, c| {
                    if r / 2 == 0 && c / 2 == 0 {
                        z.at(r % 2, c % 2).clone()
                    } else if r == c {
                        rat(1)
                    } else {
                        rat(0)
                    }
                })
            }
        };
        m = m.mul(&factor).expect("square");
    }
    m
}

/// A random hom-antisymmetric block `t^ -> t` (the shape appearing in
/// unipotent symplectic factors): `R - R^T` for a random hom `R`.
pub fn random_antisymmetric_dual_to_primal(
    t: &ComplexTorus,
    rng: &mut SplitMix64,
    bound: i64,
) -> RatMatrix {
    let r = random_hom(&t.dual(), t, rng, bound);
    r.matrix().sub(&r.matrix().transpose()).expect("square")
}

/// A random hom-antisymmetric block `t -> t^`.
pub fn random_antisymmetric_primal_to_dual(
    t: &ComplexTorus,
    rng: &mut SplitMix64,
    bound: i64,
) -> RatMatrix {
    let r = random_hom(t, &t.dual(), rng, bound);
    r.matrix().sub(&r.matrix().transpose()).expect("square")
}

/// Options for [`random_symplectic`].
#[derive(Clone, Debug)]
pub struct SymplecticFactors {
    pub factors: usize,
    /// Every upper-unipotent block is multiplied by this integer.
    pub upper_scale: i64,
    pub entry_bound: i64,
}

impl Default for SymplecticFactors {
    fn default() -> Self {
        SymplecticFactors { factors: 5, upper_scale: 1, entry_bound: 2 }
    }
}

/// A random symplectic map `source -> target` (same lattice structure),
/// built as a product of diagonal, upper-unipotent and lower-unipotent
/// symplectic factors.
pub fn random_symplectic(
    source: &ComplexTorus,
    target: &ComplexTorus,
    rng: &mut SplitMix64,
    opts: &SymplecticFactors,
) -> SymplecticMap {
    assert!(source.same_structure(target), "sampler needs equal period data");
    let r = source.rank();
    let zero = RatMatrix::zeros(r, r);
    let id = RatMatrix::identity(r);
    let mut acc = SymplecticMap::identity(source);
    for _ in 0..opts.factors {
        let factor = match rng.below(3) {
            0 => {
                let u = random_commuting_unimodular(source, rng, 3);
                SymplecticMap::from_matrices(
                    source,
                    source,
                    u.clone(),
                    zero.clone(),
                    zero.clone(),
                    u.inverse().expect("unimodular").transpose(),
                )
            }
            1 => {
                let n = random_antisymmetric_dual_to_primal(source, rng, opts.entry_bound)
                    .scale(&rat(opts.upper_scale));
                SymplecticMap::from_matrices(source, source, id.clone(), n, zero.clone(), id.clone())
            }
            _ => {
                let p = random_antisymmetric_primal_to_dual(source, rng, opts.entry_bound);
                SymplecticMap::from_matrices(source, source, id.clone(), zero.clone(), p, id.clone())
            }
        }
        .expect("factor blocks are homs");
        acc = factor.compose(&acc).expect("endomorphisms compose");
        debug_assert!(acc.is_symplectic());
    }
    if source.same_structure(target) && source != target {
        let relabel = SymplecticMap::from_matrices(source, target, id.clone(), zero.clone(), zero, id)
            .expect("identity blocks");
        acc = relabel.compose(&acc).expect("composable");
    }
    acc
}

/// A random symplectic map whose `g2` block is forced `= 0 mod modulus`.
pub fn random_symplectic_with_g2_multiple(
    source: &ComplexTorus,
    target: &ComplexTorus,
    modulus: i64,
    rng: &mut SplitMix64,
    factors: usize,
) -> SymplecticMap {
    let opts = SymplecticFactors { factors, upper_scale: modulus, entry_bound: 1 };
    let g = random_symplectic(source, target, rng, &opts);
    debug_assert!(block_divisible(g.g2().matrix(), modulus));
    g
}

/// A random symplectic map whose `g2` block has an entry not divisible by
/// `n` (hence not by `n^2` either).
pub fn random_symplectic_violating_g2(
    source: &ComplexTorus,
    target: &ComplexTorus,
    n: i64,
    rng: &mut SplitMix64,
    factors: usize,
) -> SymplecticMap {
    let opts = SymplecticFactors { factors, upper_scale: 1, entry_bound: 2 };
    loop {
        let g = random_symplectic(source, target, rng, &opts);
        let m2 = g.g2().matrix();
        let has_coprime_entry = m2
            .entries()
            .iter()
            .any(|e| !(e.numer() % BigInt::from(n)).is_zero());
        if has_coprime_entry {
            return g;
        }
    }
}

/// Four random homomorphism blocks assembled without any symplectic
/// constraint; most samples are not symplectic.
pub fn random_block_tuple(
    source: &ComplexTorus,
    target: &ComplexTorus,
    rng: &mut SplitMix64,
    bound: i64,
) -> SymplecticMap {
    SymplecticMap::from_matrices(
        source,
        target,
        random_hom(source, target, rng, bound).matrix().clone(),
        random_hom(&source.dual(), target, rng, bound).matrix().clone(),
        random_hom(source, &target.dual(), rng, bound).matrix().clone(),
        random_hom(&source.dual(), &target.dual(), rng, bound).matrix().clone(),
    )
    .expect("projected blocks are homs")
}

/// A random integral Hodge isometry of the Mukai space of `t`.
pub fn random_hodge_isometry(t: &ComplexTorus, rng: &mut SplitMix64, factors: usize) -> BlockIso {
    let opts = SymplecticFactors { factors, ..SymplecticFactors::default() };
    random_symplectic(t, t, rng, &opts)
        .orlov_iso()
        .expect("assembly is symplectic")
}

pub(crate) fn block_divisible(m: &RatMatrix, modulus: i64) -> bool {
    let md = BigInt::from(modulus);
    m.entries().iter().all(|e| e.denom().is_one() && (e.numer() % &md).is_zero())
}
