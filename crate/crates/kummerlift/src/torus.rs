//! Complex tori as (lattice, complex structure) pairs and the maps between
//! them.
//!
//! A torus owns the standard lattice `Z^2g` in its own coordinates together
//! with a rational complex structure `J` with `J^2 = -I`; every basis choice
//! lives in the maps, never in the torus. Homomorphisms are rational matrices
//! on first homology that intertwine the complex structures.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{rat, RatMatrix};
use crate::snf::{snf, FiniteAbelianGroup};

/// A complex torus of dimension `g`: the lattice `Z^2g` with a rational
/// complex structure `J`, `J^2 = -I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexTorus {
    g: usize,
    j: RatMatrix,
    label: String,
}

impl ComplexTorus {
    pub fn new(g: usize, j: RatMatrix, label: impl Into<String>) -> Result<Self> {
        if g == 0 {
            return Err(Error::Dimension("torus dimension must be positive".into()));
        }
        if j.rows() != 2 * g || j.cols() != 2 * g {
            return Err(Error::ComplexStructure(format!(
                "J must be {0}x{0}, got {1}x{2}",
                2 * g,
                j.rows(),
                j.cols()
            )));
        }
        let square = j.mul(&j)?;
        if square != RatMatrix::identity(2 * g).neg() {
            return Err(Error::ComplexStructure("J^2 != -I".into()));
        }
        Ok(ComplexTorus { g, j, label: label.into() })
    }

    /// The standard square-lattice elliptic curve with `J0 = [[0,-1],[1,0]]`.
    pub fn elliptic(label: impl Into<String>) -> Self {
        ComplexTorus::new(1, j0(), label).expect("J0 is a complex structure")
    }

    /// The abelian surface `E x E` for the standard elliptic curve.
    pub fn surface(label: impl Into<String>) -> Self {
        ComplexTorus::new(2, j0().diag_repeat(2), label).expect("block J0 is a complex structure")
    }

    pub fn product(factors: &[&ComplexTorus], label: impl Into<String>) -> Self {
        let blocks: Vec<&RatMatrix> = factors.iter().map(|t| &t.j).collect();
        let g = factors.iter().map(|t| t.g).sum();
        ComplexTorus::new(g, RatMatrix::block_diag(&blocks), label)
            .expect("block diagonal of complex structures")
    }

    /// `n`-fold self product.
    pub fn power(&self, n: usize, label: impl Into<String>) -> Self {
        let factors: Vec<&ComplexTorus> = std::iter::repeat_n(self, n).collect();
        ComplexTorus::product(&factors, label)
    }

    /// The dual torus: dual lattice coordinates, complex structure `J^T`.
    pub fn dual(&self) -> Self {
        ComplexTorus {
            g: self.g,
            j: self.j.transpose(),
            label: format!("{}^", self.label),
        }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn rank(&self) -> usize {
        2 * self.g
    }

    pub fn j(&self) -> &RatMatrix {
        &self.j
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Structural compatibility: same dimension and complex structure.
    /// Labels are bookkeeping, not identity.
    pub fn same_structure(&self, other: &ComplexTorus) -> bool {
        self.g == other.g && self.j == other.j
    }
}

pub(crate) fn j0() -> RatMatrix {
    RatMatrix::from_i64_rows(&[&[0, -1], &[1, 0]])
}

/// A homomorphism of complex tori, carried by its matrix on first homology.
/// Rational entries model quasi-isogeny data; `is_integral` distinguishes
/// true homomorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusHom {
    source: ComplexTorus,
    target: ComplexTorus,
    matrix: RatMatrix,
}

impl TorusHom {
    pub fn new(source: ComplexTorus, target: ComplexTorus, matrix: RatMatrix) -> Result<Self> {
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(Error::Shape(format!(
                "hom matrix must be {}x{}, got {}x{}",
                target.rank(),
                source.rank(),
                matrix.rows(),
                matrix.cols()
            )));
        }
        let lhs = matrix.mul(source.j())?;
        let rhs = target.j().mul(&matrix)?;
        if lhs != rhs {
            return Err(Error::NotHolomorphic(format!(
                "{} -> {}: M J_source != J_target M",
                source.label(),
                target.label()
            )));
        }
        Ok(TorusHom { source, target, matrix })
    }

    pub fn identity(t: &ComplexTorus) -> Self {
        TorusHom {
            source: t.clone(),
            target: t.clone(),
            matrix: RatMatrix::identity(t.rank()),
        }
    }

    /// Multiplication by `n`.
    pub fn multiplication(t: &ComplexTorus, n: i64) -> Self {
        TorusHom {
            source: t.clone(),
            target: t.clone(),
            matrix: RatMatrix::scalar(t.rank(), &rat(n)),
        }
    }

    /// The summation map `A^n -> A`, an `n`-fold row of identity blocks.
    pub fn summation(a: &ComplexTorus, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension("summation needs n >= 2".into()));
        }
        let id = RatMatrix::identity(a.rank());
        let mut m = id.clone();
        for _ in 1..n {
            m = m.hstack(&id)?;
        }
        TorusHom::new(a.power(n, format!("{}^{n}", a.label())), a.clone(), m)
    }

    /// The diagonal embedding `A -> A^n`, an `n`-fold column of identity blocks.
    pub fn diagonal(a: &ComplexTorus, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::Dimension("diagonal needs n >= 1".into()));
        }
        let id = RatMatrix::identity(a.rank());
        let mut m = id.clone();
        for _ in 1..n {
            m = m.vstack(&id)?;
        }
        TorusHom::new(a.clone(), a.power(n, format!("{}^{n}", a.label())), m)
    }

    /// Projection `X1 x ... x Xk -> Xi` out of a product.
    pub fn projection(factors: &[&ComplexTorus], i: usize, product: &ComplexTorus) -> Result<Self> {
        let offset: usize = factors[..i].iter().map(|t| t.rank()).sum();
        let target = factors[i].clone();
        let m = RatMatrix::from_fn(target.rank(), product.rank(), |r, c| {
            if c == offset + r { rat(1) } else { rat(0) }
        });
        TorusHom::new(product.clone(), target, m)
    }

    pub fn source(&self) -> &ComplexTorus {
        &self.source
    }

    pub fn target(&self) -> &ComplexTorus {
        &self.target
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn is_integral(&self) -> bool {
        self.matrix.is_integral()
    }

    pub fn compose(&self, inner: &TorusHom) -> Result<TorusHom> {
        if !inner.target.same_structure(&self.source) {
            return Err(Error::SpaceMismatch(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.source.label(),
                self.target.label(),
                inner.source.label(),
                inner.target.label()
            )));
        }
        Ok(TorusHom {
            source: inner.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.mul(&inner.matrix)?,
        })
    }

    /// The dual homomorphism, from the dual of the target to the dual of the
    /// source, with the transposed matrix.
    pub fn dual_hom(&self) -> TorusHom {
        TorusHom {
            source: self.target.dual(),
            target: self.source.dual(),
            matrix: self.matrix.transpose(),
        }
    }

    pub fn is_isogeny(&self) -> bool {
        self.is_integral()
            && self.matrix.is_square()
            && !self.matrix.determinant().map(|d| d.is_zero()).unwrap_or(true)
    }

    pub fn isogeny_degree(&self) -> Result<BigInt> {
        if !self.is_isogeny() {
            return Err(Error::NotIsogeny(format!(
                "{} -> {} is not an isogeny",
                self.source.label(),
                self.target.label()
            )));
        }
        Ok(self.matrix.determinant()?.numer().abs())
    }

    /// The kernel as a finite abelian group: `M^{-1}(Lambda_target) / Lambda_source`.
    pub fn kernel_group(&self) -> Result<FiniteAbelianGroup> {
        if !self.is_isogeny() {
            return Err(Error::NotIsogeny("kernel only for isogenies".into()));
        }
        let dec = snf(&self.matrix)?;
        let mut factors = Vec::new();
        let mut generators = Vec::new();
        for (i, d) in dec.diagonal().iter().enumerate() {
            if *d > BigInt::one() {
                factors.push(d.clone());
                let g = dec.v.column(i).scale(&BigRational::new(BigInt::one(), d.clone()));
                generators.push(g);
            }
        }
        Ok(FiniteAbelianGroup { invariant_factors: factors, generators })
    }

    /// Kernel generators packaged as torsion points on the source torus.
    pub fn kernel_points(&self) -> Result<Vec<TorsionPoint>> {
        let group = self.kernel_group()?;
        group
            .generators
            .iter()
            .map(|g| TorsionPoint::new(self.source.clone(), g.clone()))
            .collect()
    }

    /// A deterministic torsion preimage of a torsion point under an isogeny.
    pub fn point_preimage(&self, p: &TorsionPoint) -> Result<TorsionPoint> {
        if !self.is_isogeny() {
            return Err(Error::NotIsogeny("preimages only for isogenies".into()));
        }
        if !p.torus().same_structure(&self.target) {
            return Err(Error::WrongTorus);
        }
        let b = self.matrix.inverse()?.mul(p.vector())?;
        TorsionPoint::new(self.source.clone(), b)
    }

    /// Apply the hom to a torsion point.
    pub fn apply(&self, p: &TorsionPoint) -> Result<TorsionPoint> {
        if !p.torus().same_structure(&self.source) {
            return Err(Error::WrongTorus);
        }
        TorsionPoint::new(self.target.clone(), self.matrix.mul(p.vector())?)
    }
}

/// A torsion point of a torus, stored as the representative in `[0,1)^2g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionPoint {
    torus: ComplexTorus,
    v: RatMatrix,
    order: BigInt,
}

impl TorsionPoint {
    pub fn new(torus: ComplexTorus, v: RatMatrix) -> Result<Self> {
        if v.cols() != 1 || v.rows() != torus.rank() {
            return Err(Error::Shape(format!(
                "torsion point on {} needs a {}x1 column",
                torus.label(),
                torus.rank()
            )));
        }
        let reduced = RatMatrix::from_fn(v.rows(), 1, |i, _| {
            let e = v.at(i, 0);
            e - e.floor()
        });
        let order = reduced
            .entries()
            .iter()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
        Ok(TorsionPoint { torus, v: reduced, order })
    }

    pub fn zero(torus: &ComplexTorus) -> Self {
        TorsionPoint {
            torus: torus.clone(),
            v: RatMatrix::zeros(torus.rank(), 1),
            order: BigInt::one(),
        }
    }

    /// The point `e_i / n`.
    pub fn basis_fraction(torus: &ComplexTorus, i: usize, n: i64) -> Result<Self> {
        let v = RatMatrix::from_fn(torus.rank(), 1, |r, _| {
            if r == i { BigRational::new(BigInt::one(), BigInt::from(n)) } else { rat(0) }
        });
        TorsionPoint::new(torus.clone(), v)
    }

    pub fn torus(&self) -> &ComplexTorus {
        &self.torus
    }

    pub fn vector(&self) -> &RatMatrix {
        &self.v
    }

    pub fn order(&self) -> &BigInt {
        &self.order
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }
}

/// The kernel of a summation map `Sigma: A^n -> A` as a subtorus, with its
/// primitive inclusion. The basis is fixed as `u_i = (e in slot i, -e in the
/// last slot)` for `i < n`.
pub fn kernel_subtorus(sigma: &TorusHom) -> Result<(ComplexTorus, TorusHom)> {
    let a_rank = sigma.target().rank();
    let total = sigma.source().rank();
    if !total.is_multiple_of(a_rank) {
        return Err(Error::Shape("summation source is not a power".into()));
    }
    let n = total / a_rank;
    if n < 2 {
        return Err(Error::Dimension("kernel subtorus needs n >= 2".into()));
    }
    // require the summation shape: a row of identity blocks
    let expected = {
        let id = RatMatrix::identity(a_rank);
        let mut m = id.clone();
        for _ in 1..n {
            m = m.hstack(&id)?;
        }
        m
    };
    if sigma.matrix() != &expected {
        return Err(Error::Shape("kernel_subtorus expects a summation map".into()));
    }
    let basis = RatMatrix::from_fn(total, a_rank * (n - 1), |r, c| {
        let (slot, coord) = (r / a_rank, r % a_rank);
        let (i, k) = (c / a_rank, c % a_rank);
        if slot == i && coord == k {
            rat(1)
        } else if slot == n - 1 && coord == k {
            rat(-1)
        } else {
            rat(0)
        }
    });
    // the restricted complex structure is J_A in every u-block
    let g_a = sigma.target().g();
    let n_torus = ComplexTorus::new(
        g_a * (n - 1),
        sigma.target().j().diag_repeat(n - 1),
        format!("N({})", sigma.target().label()),
    )?;
    let incl = TorusHom::new(n_torus.clone(), sigma.source().clone(), basis)?;
    debug_assert!(sigma.compose(&incl)?.matrix().is_zero());
    Ok((n_torus, incl))
}
