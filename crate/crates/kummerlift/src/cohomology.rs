//! Exterior-algebra model of the full cohomology of a torus, induced
//! pullbacks, the signed duality map of each degree, and exact verification
//! of the commuting square `deg(q) . phi_A = qhat^* . phi_B . q^*`.
//!
//! Degree-`m` cohomology has the lexicographically ordered `m`-subsets of the
//! `2g` degree-one generators as basis. The cohomology of the dual torus is
//! modelled as the exterior algebra on the original lattice, which makes the
//! duality map of degree `m` a signed bijection of basis elements against the
//! fundamental class `e_1 ^ ... ^ e_2g`, with the per-degree sign
//! `(-1)^(m(m+1)/2)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::torus::{ComplexTorus, TorusHom};

/// Basis bookkeeping for the exterior algebra on `2g` generators.
#[derive(Clone, Debug)]
pub struct ExteriorAlgebra {
    base: ComplexTorus,
    subsets: Vec<Vec<Vec<usize>>>,
}

fn subsets_lex(n: usize, m: usize) -> Vec<Vec<usize>> {
    if m > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..m).collect();
    loop {
        out.push(current.clone());
        // advance to the next subset in lex order
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] != i + n - m {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        current[i] += 1;
        for j in i + 1..m {
            current[j] = current[j - 1] + 1;
        }
    }
}

impl ExteriorAlgebra {
    pub fn of(t: &ComplexTorus) -> Self {
        let n = t.rank();
        let subsets = (0..=n).map(|m| subsets_lex(n, m)).collect();
        ExteriorAlgebra { base: t.clone(), subsets }
    }

    pub fn base(&self) -> &ComplexTorus {
        &self.base
    }

    pub fn top_degree(&self) -> usize {
        self.base.rank()
    }

    pub fn rank(&self, m: usize) -> usize {
        self.subsets.get(m).map_or(0, |s| s.len())
    }

    pub fn total_rank(&self) -> usize {
        1usize << self.base.rank()
    }

    pub fn basis(&self, m: usize) -> &[Vec<usize>] {
        &self.subsets[m]
    }

    pub fn index_of(&self, m: usize, subset: &[usize]) -> Option<usize> {
        self.subsets[m].binary_search_by(|s| s.as_slice().cmp(subset)).ok()
    }

    /// Wedge of two basis elements: `None` when they share a generator,
    /// otherwise the merged subset with the shuffle sign.
    pub fn wedge_basis(&self, s: &[usize], t: &[usize]) -> Option<(i64, Vec<usize>)> {
        let mut merged = Vec::with_capacity(s.len() + t.len());
        let mut inversions = 0usize;
        for &b in t {
            if s.contains(&b) {
                return None;
            }
            inversions += s.iter().filter(|&&a| a > b).count();
        }
        merged.extend_from_slice(s);
        merged.extend_from_slice(t);
        merged.sort_unstable();
        let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
        Some((sign, merged))
    }

    /// Wedge of coordinate vectors in degrees `m1`, `m2`.
    pub fn wedge_vectors(
        &self,
        m1: usize,
        v1: &RatMatrix,
        m2: usize,
        v2: &RatMatrix,
    ) -> Result<RatMatrix> {
        let m = m1 + m2;
        if m > self.top_degree() {
            return Ok(RatMatrix::zeros(1, 1));
        }
        let mut out = vec![BigRational::zero(); self.rank(m)];
        for (i, s) in self.basis(m1).iter().enumerate() {
            let a = v1.at(i, 0);
            if a.is_zero() {
                continue;
            }
            for (j, t) in self.basis(m2).iter().enumerate() {
                let b = v2.at(j, 0);
                if b.is_zero() {
                    continue;
                }
                if let Some((sign, merged)) = self.wedge_basis(s, t) {
                    let k = self.index_of(m, &merged).expect("merged subset is a basis element");
                    out[k] += a * b * BigRational::from_integer(BigInt::from(sign));
                }
            }
        }
        RatMatrix::new(self.rank(m).max(1), 1, if out.is_empty() { vec![BigRational::zero()] } else { out })
    }
}

/// Sign of the permutation sorting `(I, complement(I))` into `0..2g`.
fn complement_sign(subset: &[usize], n: usize) -> i64 {
    let complement: Vec<usize> = (0..n).filter(|i| !subset.contains(i)).collect();
    let mut inversions = 0usize;
    for &a in subset {
        inversions += complement.iter().filter(|&&b| b < a).count();
    }
    if inversions.is_multiple_of(2) { 1 } else { -1 }
}

/// The per-degree duality sign `(-1)^(m(m+1)/2)`.
pub fn duality_sign(m: usize) -> i64 {
    if (m * (m + 1) / 2).is_multiple_of(2) { 1 } else { -1 }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeShift {
    /// Degree-preserving (pullbacks).
    Preserving,
    /// Degree `m` to degree `2g - m` (duality maps).
    Dualizing,
}

/// A map of graded cohomology rings, one rational block per degree.
#[derive(Clone, Debug)]
pub struct GradedMap {
    pub source: ExteriorAlgebra,
    pub target: ExteriorAlgebra,
    pub shift: DegreeShift,
    pub blocks: Vec<RatMatrix>,
}

impl GradedMap {
    pub fn target_degree(&self, m: usize) -> usize {
        match self.shift {
            DegreeShift::Preserving => m,
            DegreeShift::Dualizing => self.source.top_degree() - m,
        }
    }
}

fn compound(mat: &RatMatrix, k: usize) -> RatMatrix {
    let rows = subsets_lex(mat.rows(), k);
    let cols = subsets_lex(mat.cols(), k);
    if k == 0 {
        return RatMatrix::identity(1);
    }
    RatMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        minor(mat, &rows[i], &cols[j])
    })
}

fn minor(mat: &RatMatrix, rows: &[usize], cols: &[usize]) -> BigRational {
    let k = rows.len();
    let sub = RatMatrix::from_fn(k, k, |i, j| mat.at(rows[i], cols[j]).clone());
    sub.determinant().expect("square minor")
}

/// The multiplicative pullback of a torus homomorphism: degree-`m` block is
/// the `m`-th exterior power of the transposed first-homology matrix.
pub fn induced_pullback(f: &TorusHom) -> GradedMap {
    let source = ExteriorAlgebra::of(f.target());
    let target = ExteriorAlgebra::of(f.source());
    let mt = f.matrix().transpose();
    let top = source.top_degree();
    let blocks = (0..=top).map(|m| compound(&mt, m)).collect();
    GradedMap { source, target, shift: DegreeShift::Preserving, blocks }
}

/// The signed duality map of a torus: degree `m` to degree `2g - m` of the
/// dual algebra, pairing against the fundamental class, with the sign
/// `(-1)^(m(m+1)/2)` in each degree.
pub fn poincare_phi(t: &ComplexTorus) -> GradedMap {
    poincare_phi_with_flip(t, None)
}

/// Same as [`poincare_phi`] with one degree's sign negated; the mutated map
/// must break the commuting square, which pins the sign convention.
pub fn poincare_phi_with_flip(t: &ComplexTorus, flip_degree: Option<usize>) -> GradedMap {
    let source = ExteriorAlgebra::of(t);
    let target = ExteriorAlgebra::of(&t.dual());
    let n = t.rank();
    let mut blocks = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let cols = source.basis(m);
        let rows_rank = source.rank(n - m);
        let mut entries = vec![BigRational::zero(); rows_rank * cols.len()];
        for (j, subset) in cols.iter().enumerate() {
            let complement: Vec<usize> = (0..n).filter(|i| !subset.contains(i)).collect();
            let i = source.index_of(n - m, &complement).expect("complement is a basis element");
            let mut sign = duality_sign(m) * complement_sign(subset, n);
            if flip_degree == Some(m) {
                sign = -sign;
            }
            entries[i * cols.len() + j] = BigRational::from_integer(BigInt::from(sign));
        }
        blocks.push(RatMatrix::new(rows_rank, cols.len(), entries).expect("non-empty block"));
    }
    GradedMap { source, target, shift: DegreeShift::Dualizing, blocks }
}

/// Witness of a failed commuting-square check.
#[derive(Clone, Debug)]
pub struct PdWitness {
    pub degree: usize,
    pub row: usize,
    pub col: usize,
    pub lhs: BigRational,
    pub rhs: BigRational,
}

#[derive(Clone, Debug)]
pub struct PdVerdict {
    pub ok: bool,
    pub witness: Option<PdWitness>,
}

// integer workspace for the degree-block products
struct IntMat {
    rows: usize,
    cols: usize,
    e: Vec<BigInt>,
}

impl IntMat {
    fn from_rat(m: &RatMatrix) -> Option<IntMat> {
        Some(IntMat { rows: m.rows(), cols: m.cols(), e: m.to_bigint_entries()? })
    }

    fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.e[i * self.cols + j]
    }

    fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut e = vec![BigInt::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if !b.is_zero() {
                        e[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        IntMat { rows: self.rows, cols: other.cols, e }
    }
}

/// Exact verification of `deg(q) . phi_A = qhat^* . phi_B . q^*` for an
/// isogeny `q: B -> A`, degree by degree, with an optional sign flip in one
/// degree of the left-hand duality map (used by the mutation check).
pub fn check_pd_square_with_flip(q: &TorusHom, flip_degree: Option<usize>) -> Result<PdVerdict> {
    if !q.is_isogeny() {
        return Err(Error::NotIsogeny("the commuting square needs an isogeny".into()));
    }
    let deg = q.isogeny_degree()?;
    let n = q.target().rank();
    let source = ExteriorAlgebra::of(q.target());
    let qm = IntMat::from_rat(q.matrix()).ok_or(Error::NonIntegral)?;
    let qt = IntMat::from_rat(&q.matrix().transpose()).ok_or(Error::NonIntegral)?;

    for m in 0..=n {
        let k = n - m;
        // q^* in degree m and qhat^* in degree k, as integer compounds
        let qstar = int_compound(&qt, m);
        let qhat_star = int_compound(&qm, k);
        // phi_B . q^*: a signed row relabeling of q^*
        let cols_m = source.basis(m);
        let rows_rank = source.rank(k);
        let mut relabeled = IntMat {
            rows: rows_rank,
            cols: qstar.cols,
            e: vec![BigInt::zero(); rows_rank * qstar.cols],
        };
        // rows of phi_B . q^*: row K = sign(complement(K)) * eps_m * (row complement(K) of q^*)
        for (ri, row_subset) in source.basis(k).iter().enumerate() {
            let complement: Vec<usize> = (0..n).filter(|i| !row_subset.contains(i)).collect();
            let src_row = source.index_of(m, &complement).expect("basis");
            let sign = BigInt::from(duality_sign(m) * complement_sign(&complement, n));
            for c in 0..qstar.cols {
                relabeled.e[ri * qstar.cols + c] = &sign * qstar.at(src_row, c);
            }
        }
        let rhs = qhat_star.mul(&relabeled);
        // lhs: deg(q) * phi_A in degree m (signed bijection)
        for (j, subset) in cols_m.iter().enumerate() {
            let complement: Vec<usize> = (0..n).filter(|i| !subset.contains(i)).collect();
            let i = source.index_of(k, &complement).expect("basis");
            let mut sign = duality_sign(m) * complement_sign(subset, n);
            if flip_degree == Some(m) {
                sign = -sign;
            }
            for r in 0..rhs.rows {
                let expected = if r == i { &deg * BigInt::from(sign) } else { BigInt::zero() };
                if rhs.at(r, j) != &expected {
                    return Ok(PdVerdict {
                        ok: false,
                        witness: Some(PdWitness {
                            degree: m,
                            row: r,
                            col: j,
                            lhs: BigRational::from_integer(expected),
                            rhs: BigRational::from_integer(rhs.at(r, j).clone()),
                        }),
                    });
                }
            }
        }
    }
    Ok(PdVerdict { ok: true, witness: None })
}

pub fn check_pd_square(q: &TorusHom) -> Result<PdVerdict> {
    check_pd_square_with_flip(q, None)
}

fn int_compound(mat: &IntMat, k: usize) -> IntMat {
    let rows = subsets_lex(mat.rows, k);
    let cols = subsets_lex(mat.cols, k);
    if k == 0 {
        return IntMat { rows: 1, cols: 1, e: vec![BigInt::one()] };
    }
    let mut e = Vec::with_capacity(rows.len() * cols.len());
    for r in &rows {
        for c in &cols {
            e.push(int_minor(mat, r, c));
        }
    }
    IntMat { rows: rows.len(), cols: cols.len(), e }
}

/// Bareiss fraction-free determinant of the `rows x cols` submatrix.
fn int_minor(mat: &IntMat, rows: &[usize], cols: &[usize]) -> BigInt {
    let k = rows.len();
    let mut a: Vec<BigInt> = Vec::with_capacity(k * k);
    for &r in rows {
        for &c in cols {
            a.push(mat.at(r, c).clone());
        }
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for p in 0..k.saturating_sub(1) {
        if a[p * k + p].is_zero() {
            let swap = (p + 1..k).find(|&i| !a[i * k + p].is_zero());
            match swap {
                None => return BigInt::zero(),
                Some(i) => {
                    for j in 0..k {
                        a.swap(p * k + j, i * k + j);
                    }
                    sign = -sign;
                }
            }
        }
        for i in p + 1..k {
            for j in p + 1..k {
                let num = &a[i * k + j] * &a[p * k + p] - &a[i * k + p] * &a[p * k + j];
                a[i * k + j] = num / &prev;
            }
            a[i * k + p] = BigInt::zero();
        }
        prev = a[p * k + p].clone();
    }
    sign * a[(k - 1) * k + (k - 1)].clone()
}

/// The degree read off the top-degree block of the pullback: the pullback of
/// the fundamental class scales by the isogeny degree.
pub fn degree_from_top_block(q: &TorusHom) -> Result<BigInt> {
    let n = q.target().rank();
    let p = induced_pullback(q);
    let top = &p.blocks[n];
    if top.rows() != 1 || top.cols() != 1 {
        return Err(Error::Shape("top block must be 1x1".into()));
    }
    Ok(top.at(0, 0).numer().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::rat;
    use crate::sampling::{random_hom, random_isogeny, SplitMix64};
    use num_traits::Signed;

    #[test]
    fn algebra_ranks() {
        let a = ComplexTorus::surface("A");
        let alg = ExteriorAlgebra::of(&a);
        assert_eq!(alg.total_rank(), 16);
        let ranks: Vec<usize> = (0..=4).map(|m| alg.rank(m)).collect();
        assert_eq!(ranks, vec![1, 4, 6, 4, 1]);
        let e = ComplexTorus::elliptic("E");
        assert_eq!(ExteriorAlgebra::of(&e).total_rank(), 4);
    }

    #[test]
    fn wedge_signs() {
        let e = ComplexTorus::elliptic("E");
        let alg = ExteriorAlgebra::of(&e);
        assert_eq!(alg.wedge_basis(&[0], &[1]), Some((1, vec![0, 1])));
        assert_eq!(alg.wedge_basis(&[1], &[0]), Some((-1, vec![0, 1])));
        assert_eq!(alg.wedge_basis(&[0], &[0]), None);
    }

    #[test]
    fn pullback_of_identity_and_scalar() {
        let e = ComplexTorus::elliptic("E");
        let id = induced_pullback(&TorusHom::identity(&e));
        for (m, b) in id.blocks.iter().enumerate() {
            assert!(b.is_identity(), "degree {m}");
        }
        let two = induced_pullback(&TorusHom::multiplication(&e, 2));
        assert_eq!(two.blocks[1], RatMatrix::scalar(2, &rat(2)));
        assert_eq!(two.blocks[2], RatMatrix::scalar(1, &rat(4)));
    }

    #[test]
    fn pullback_is_contravariant_functorial() {
        let a = ComplexTorus::surface("A");
        let mut rng = SplitMix64::new(31);
        for _ in 0..5 {
            let f = random_hom(&a, &a, &mut rng, 2);
            let h = random_hom(&a, &a, &mut rng, 2);
            let fh = f.compose(&h).unwrap();
            let lhs = induced_pullback(&fh);
            let f_star = induced_pullback(&f);
            let h_star = induced_pullback(&h);
            for m in 0..=4 {
                let rhs = h_star.blocks[m].mul(&f_star.blocks[m]).unwrap();
                assert_eq!(lhs.blocks[m], rhs, "degree {m}");
            }
        }
    }

    #[test]
    fn pullback_respects_wedge() {
        let a = ComplexTorus::surface("A");
        let alg = ExteriorAlgebra::of(&a);
        let mut rng = SplitMix64::new(32);
        let f = random_hom(&a, &a, &mut rng, 2);
        let p = induced_pullback(&f);
        for (m1, m2) in [(1usize, 1usize), (1, 2), (2, 2)] {
            for i in 0..alg.rank(m1) {
                for j in 0..alg.rank(m2) {
                    let v1 = RatMatrix::from_fn(alg.rank(m1), 1, |r, _| if r == i { rat(1) } else { rat(0) });
                    let v2 = RatMatrix::from_fn(alg.rank(m2), 1, |r, _| if r == j { rat(1) } else { rat(0) });
                    let lhs = p.blocks[m1 + m2]
                        .mul(&alg.wedge_vectors(m1, &v1, m2, &v2).unwrap())
                        .unwrap();
                    let rhs = alg
                        .wedge_vectors(
                            m1,
                            &p.blocks[m1].mul(&v1).unwrap(),
                            m2,
                            &p.blocks[m2].mul(&v2).unwrap(),
                        )
                        .unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn duality_signs_match_formula() {
        let e = ComplexTorus::elliptic("E");
        let phi = poincare_phi(&e);
        // degree 0: 1 -> +(top class)
        assert_eq!(phi.blocks[0], RatMatrix::identity(1));
        // degree 1: sign -1 on the duality block
        assert_eq!(duality_sign(1), -1);
        assert!(phi.blocks[1].entries().iter().all(|x| x.is_zero() || x.abs() == rat(1)));
        let a = ComplexTorus::surface("A");
        let phi = poincare_phi(&a);
        assert_eq!(duality_sign(2), -1);
        // every block is a bijection
        for m in 0..=4 {
            assert!(!phi.blocks[m].determinant().unwrap().is_zero());
        }
    }

    #[test]
    fn surface_degree_two_block_matches_wedge_pairings() {
        // brute force: pair each of the 6 basis bivectors against all 6 and
        // read off the coefficient of the fundamental class
        let a = ComplexTorus::surface("A");
        let alg = ExteriorAlgebra::of(&a);
        let phi = poincare_phi(&a);
        assert_eq!(duality_sign(2), -1);
        let expected = RatMatrix::from_fn(6, 6, |k, i| {
            match alg.wedge_basis(&alg.basis(2)[i], &alg.basis(2)[k]) {
                Some((sign, merged)) if merged.len() == 4 => rat(duality_sign(2) * sign),
                _ => rat(0),
            }
        });
        assert_eq!(phi.blocks[2], expected);
    }

    #[test]
    fn pd_square_for_identity_and_doubling() {
        let e = ComplexTorus::elliptic("E");
        assert!(check_pd_square(&TorusHom::identity(&e)).unwrap().ok);
        assert!(check_pd_square(&TorusHom::multiplication(&e, 2)).unwrap().ok);
        let a = ComplexTorus::surface("A");
        assert!(check_pd_square(&TorusHom::multiplication(&a, 3)).unwrap().ok);
    }

    #[test]
    fn pd_square_for_random_isogenies() {
        let mut rng = SplitMix64::new(33);
        let e = ComplexTorus::elliptic("E");
        for _ in 0..5 {
            let q = random_isogeny(&e, &mut rng, 16);
            assert!(check_pd_square(&q).unwrap().ok);
            assert_eq!(degree_from_top_block(&q).unwrap(), q.isogeny_degree().unwrap());
        }
    }

    #[test]
    fn sign_flip_breaks_the_square() {
        let e = ComplexTorus::elliptic("E");
        let two = TorusHom::multiplication(&e, 2);
        for m in 0..=2 {
            let verdict = check_pd_square_with_flip(&two, Some(m)).unwrap();
            assert!(!verdict.ok, "flipping degree {m} must break the square");
            assert_eq!(verdict.witness.unwrap().degree, m);
        }
    }
}
