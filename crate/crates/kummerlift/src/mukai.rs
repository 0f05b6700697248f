//! The hyperbolic lattice `V_A = H^1(A,Z) (+) H^1(A^,Z)` attached to a torus,
//! block isometries of such lattices, and the symplectic (hat-inverse)
//! condition on variety-level block maps.
//!
//! Coordinates: the first leg of `V_A` is `H^1(A,Z)` (dual basis of the torus
//! lattice), the second is `H^1(A^,Z)` (identified with the torus lattice
//! itself). The pairing is the split symmetric form `[[0,I],[I,0]]` and the
//! weight-one Hodge structure acts by `diag(J^T, J)`.
//!
//! The double-dual identification of a torus with its bidual carries a sign.
//! Exactly one choice makes the hat-inverse condition coincide with the
//! hyperbolic isometry condition and makes the reference Poincare map below
//! symplectic, Hodge and an isometry at once; that choice is
//! [`EPSILON_DOUBLE_DUAL`] and it is pinned by tests.

use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::matrix::{rat, RatMatrix};
use crate::torus::{ComplexTorus, TorusHom};

/// Calibrated sign of the double-dual identification `T -> T^^`.
pub const EPSILON_DOUBLE_DUAL: i64 = -1;

/// The canonical isomorphism of a torus with its bidual, as a torus hom with
/// matrix `epsilon * I`.
pub fn double_dual_iso(t: &ComplexTorus) -> TorusHom {
    let m = RatMatrix::scalar(t.rank(), &rat(EPSILON_DOUBLE_DUAL));
    TorusHom::new(t.clone(), t.dual().dual(), m).expect("epsilon*I commutes with J")
}

/// `V_T`: rank `4g`, hyperbolic Gram matrix, induced Hodge structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MukaiSpace {
    base: ComplexTorus,
    gram: RatMatrix,
    j_v: RatMatrix,
}

impl MukaiSpace {
    pub fn of(t: &ComplexTorus) -> Self {
        let r = t.rank();
        let zero = RatMatrix::zeros(r, r);
        let id = RatMatrix::identity(r);
        let gram = RatMatrix::from_blocks(&zero, &id, &id, &zero).expect("block shapes agree");
        let j_v = RatMatrix::block_diag(&[&t.j().transpose(), t.j()]);
        MukaiSpace { base: t.clone(), gram, j_v }
    }

    pub fn base(&self) -> &ComplexTorus {
        &self.base
    }

    pub fn rank(&self) -> usize {
        2 * self.base.rank()
    }

    /// Dimension of each of the two legs.
    pub fn leg(&self) -> usize {
        self.base.rank()
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    pub fn j_v(&self) -> &RatMatrix {
        &self.j_v
    }

    pub fn same_structure(&self, other: &MukaiSpace) -> bool {
        self.base.same_structure(&other.base)
    }
}

/// Witness for a failed isometry check: a pair of basis vectors whose pairing
/// changes.
#[derive(Clone, Debug)]
pub struct PairingWitness {
    pub i: usize,
    pub j: usize,
    pub expected: BigRational,
    pub actual: BigRational,
}

/// Witness for a failed Hodge check: the column where commutation with the
/// complex structures breaks, and the defect column.
#[derive(Clone, Debug)]
pub struct CommutationWitness {
    pub column: usize,
    pub defect: RatMatrix,
}

/// Witness for a failed hat-inverse check.
#[derive(Clone, Debug)]
pub struct HatWitness {
    pub i: usize,
    pub j: usize,
    pub inverse_entry: BigRational,
    pub hat_entry: BigRational,
}

/// A rational block map `V_A -> V_A'` between Mukai spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockIso {
    source: MukaiSpace,
    target: MukaiSpace,
    mat: RatMatrix,
}

impl BlockIso {
    pub fn new(source: MukaiSpace, target: MukaiSpace, mat: RatMatrix) -> Result<Self> {
        if mat.rows() != target.rank() || mat.cols() != source.rank() {
            return Err(Error::Shape(format!(
                "block map must be {}x{}, got {}x{}",
                target.rank(),
                source.rank(),
                mat.rows(),
                mat.cols()
            )));
        }
        Ok(BlockIso { source, target, mat })
    }

    pub fn identity(space: &MukaiSpace) -> Self {
        BlockIso {
            source: space.clone(),
            target: space.clone(),
            mat: RatMatrix::identity(space.rank()),
        }
    }

    pub fn source(&self) -> &MukaiSpace {
        &self.source
    }

    pub fn target(&self) -> &MukaiSpace {
        &self.target
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.mat
    }

    pub fn is_integral(&self) -> bool {
        self.mat.is_integral()
    }

    /// Leg block `(ti, si)`, `ti, si` in `{0, 1}`; `0` is the `H^1(A)` leg.
    pub fn leg_block(&self, ti: usize, si: usize) -> RatMatrix {
        let (lt, ls) = (self.target.leg(), self.source.leg());
        self.mat.block(ti * lt, si * ls, lt, ls)
    }

    #[allow(clippy::result_large_err)]
    pub fn check_isometry(&self) -> std::result::Result<(), PairingWitness> {
        let lhs = self
            .mat
            .transpose()
            .mul(self.target.gram())
            .and_then(|m| m.mul(&self.mat))
            .expect("shapes agree");
        let rhs = self.source.gram();
        for i in 0..lhs.rows() {
            for j in 0..lhs.cols() {
                if lhs.at(i, j) != rhs.at(i, j) {
                    return Err(PairingWitness {
                        i,
                        j,
                        expected: rhs.at(i, j).clone(),
                        actual: lhs.at(i, j).clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_isometry(&self) -> bool {
        self.check_isometry().is_ok()
    }

    pub fn check_hodge(&self) -> std::result::Result<(), CommutationWitness> {
        let lhs = self.mat.mul(self.source.j_v()).expect("shapes agree");
        let rhs = self.target.j_v().mul(&self.mat).expect("shapes agree");
        let diff = lhs.sub(&rhs).expect("same shape");
        for j in 0..diff.cols() {
            let col = diff.column(j);
            if !col.is_zero() {
                return Err(CommutationWitness { column: j, defect: col });
            }
        }
        Ok(())
    }

    pub fn is_hodge(&self) -> bool {
        self.check_hodge().is_ok()
    }

    /// Determinant `+1`, on top of being an isometry.
    pub fn is_special(&self) -> Result<bool> {
        if !self.is_isometry() {
            return Err(Error::NotIsometry);
        }
        Ok(self.mat.determinant()?.is_one())
    }

    pub fn compose(&self, inner: &BlockIso) -> Result<BlockIso> {
        if !inner.target.same_structure(&self.source) {
            return Err(Error::SpaceMismatch("block map legends do not match".into()));
        }
        Ok(BlockIso {
            source: inner.source.clone(),
            target: self.target.clone(),
            mat: self.mat.mul(&inner.mat)?,
        })
    }

    pub fn inverse(&self) -> Result<BlockIso> {
        Ok(BlockIso {
            source: self.target.clone(),
            target: self.source.clone(),
            mat: self.mat.inverse()?,
        })
    }
}

/// A variety-level block map `A x A^ -> A' x A'^` with homomorphism blocks
/// `g1: A -> A'`, `g2: A^ -> A'`, `g3: A -> A'^`, `g4: A^ -> A'^`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticMap {
    source: ComplexTorus,
    target: ComplexTorus,
    g1: TorusHom,
    g2: TorusHom,
    g3: TorusHom,
    g4: TorusHom,
}

impl SymplecticMap {
    pub fn from_matrices(
        source: &ComplexTorus,
        target: &ComplexTorus,
        m1: RatMatrix,
        m2: RatMatrix,
        m3: RatMatrix,
        m4: RatMatrix,
    ) -> Result<Self> {
        Ok(SymplecticMap {
            source: source.clone(),
            target: target.clone(),
            g1: TorusHom::new(source.clone(), target.clone(), m1)?,
            g2: TorusHom::new(source.dual(), target.clone(), m2)?,
            g3: TorusHom::new(source.clone(), target.dual(), m3)?,
            g4: TorusHom::new(source.dual(), target.dual(), m4)?,
        })
    }

    /// Split an assembled `4g x 4g` matrix into the four homomorphism blocks.
    pub fn from_assembled(source: &ComplexTorus, target: &ComplexTorus, m: &RatMatrix) -> Result<Self> {
        let (rs, rt) = (source.rank(), target.rank());
        if m.rows() != 2 * rt || m.cols() != 2 * rs {
            return Err(Error::Shape("assembled map has wrong size".into()));
        }
        Self::from_matrices(
            source,
            target,
            m.block(0, 0, rt, rs),
            m.block(0, rs, rt, rs),
            m.block(rt, 0, rt, rs),
            m.block(rt, rs, rt, rs),
        )
    }

    pub fn identity(t: &ComplexTorus) -> Self {
        let r = t.rank();
        Self::from_matrices(
            t,
            t,
            RatMatrix::identity(r),
            RatMatrix::zeros(r, r),
            RatMatrix::zeros(r, r),
            RatMatrix::identity(r),
        )
        .expect("identity blocks are homs")
    }

    /// The block map `B x B^ -> B^ x B^^` induced by the Fourier transform
    /// against the universal line bundle: `(b, l) -> (-l, kappa(b))` with
    /// `kappa` the calibrated double-dual identification.
    pub fn poincare_reference(b: &ComplexTorus) -> Self {
        let r = b.rank();
        Self::from_matrices(
            b,
            &b.dual(),
            RatMatrix::zeros(r, r),
            RatMatrix::identity(r).neg(),
            RatMatrix::scalar(r, &rat(EPSILON_DOUBLE_DUAL)),
            RatMatrix::zeros(r, r),
        )
        .expect("reference blocks are homs")
    }

    pub fn source(&self) -> &ComplexTorus {
        &self.source
    }

    pub fn target(&self) -> &ComplexTorus {
        &self.target
    }

    pub fn g1(&self) -> &TorusHom {
        &self.g1
    }

    pub fn g2(&self) -> &TorusHom {
        &self.g2
    }

    pub fn g3(&self) -> &TorusHom {
        &self.g3
    }

    pub fn g4(&self) -> &TorusHom {
        &self.g4
    }

    pub fn assembled(&self) -> RatMatrix {
        RatMatrix::from_blocks(
            self.g1.matrix(),
            self.g2.matrix(),
            self.g3.matrix(),
            self.g4.matrix(),
        )
        .expect("block shapes agree")
    }

    pub fn is_integral(&self) -> bool {
        self.assembled().is_integral()
    }

    /// The hat-block matrix `[[g4^, -g2^], [-g3^, g1^]]` with the double-dual
    /// legs identified through `sign * I`.
    pub fn hat_matrix_with_sign(&self, sign: i64) -> RatMatrix {
        let s = rat(-sign);
        RatMatrix::from_blocks(
            &self.g4.matrix().transpose(),
            &self.g2.matrix().transpose().scale(&s),
            &self.g3.matrix().transpose().scale(&s),
            &self.g1.matrix().transpose(),
        )
        .expect("block shapes agree")
    }

    pub fn check_symplectic_with_sign(&self, sign: i64) -> Result<std::result::Result<(), HatWitness>> {
        let m = self.assembled();
        let inv = m.inverse().map_err(|_| Error::Singular)?;
        let hat = self.hat_matrix_with_sign(sign);
        for i in 0..inv.rows() {
            for j in 0..inv.cols() {
                if inv.at(i, j) != hat.at(i, j) {
                    return Ok(Err(HatWitness {
                        i,
                        j,
                        inverse_entry: inv.at(i, j).clone(),
                        hat_entry: hat.at(i, j).clone(),
                    }));
                }
            }
        }
        Ok(Ok(()))
    }

    /// The hat-inverse condition: the assembled inverse equals the hat-block
    /// matrix. Errors on a non-invertible assembly.
    pub fn check_symplectic(&self) -> Result<std::result::Result<(), HatWitness>> {
        self.check_symplectic_with_sign(EPSILON_DOUBLE_DUAL)
    }

    pub fn is_symplectic(&self) -> bool {
        matches!(self.check_symplectic(), Ok(Ok(())))
    }

    pub fn is_symplectic_with_sign(&self, sign: i64) -> bool {
        matches!(self.check_symplectic_with_sign(sign), Ok(Ok(())))
    }

    /// The induced map on the Mukai lattices: inverse-transpose of the
    /// assembled first-homology matrix.
    pub fn orlov_iso(&self) -> Result<BlockIso> {
        if !self.is_symplectic() {
            return Err(Error::NotSymplectic);
        }
        let mat = self.assembled().inverse()?.transpose();
        BlockIso::new(MukaiSpace::of(&self.source), MukaiSpace::of(&self.target), mat)
    }

    pub fn compose(&self, inner: &SymplecticMap) -> Result<SymplecticMap> {
        if !inner.target.same_structure(&self.source) {
            return Err(Error::SpaceMismatch("symplectic maps do not compose".into()));
        }
        let m = self.assembled().mul(&inner.assembled())?;
        Self::from_assembled(&inner.source, &self.target, &m)
    }
}
