//! The generalized-Kummer pipeline: diagonal embedding of symplectic maps,
//! transport along the isogeny `q: N_A x A -> A^n`, the splitting of
//! transported isometries across the product, and the divisibility criterion
//! on the `g2` block.
//!
//! `N_A` is the kernel of the summation `A^n -> A`, with its fixed basis
//! `u_i = e (slot i) - e (slot n)`. The map `q` sends `((a_1,...,a_n), a)` to
//! `(a_1 + a, ..., a_n + a)`; its dual kernel is a diagonal copy of the
//! n-torsion of the dual surface.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lift::{lift_criterion_between, IsogenyContext, LiftOutcome};
use crate::matrix::{rat, ratq, RatMatrix};
use crate::mukai::{BlockIso, MukaiSpace, SymplecticMap};
use crate::torus::{kernel_subtorus, ComplexTorus, TorsionPoint, TorusHom};

/// One side (surface, summation, kernel torus, product, isogeny) of the
/// pipeline.
#[derive(Clone, Debug)]
pub struct KummerSide {
    pub surface: ComplexTorus,
    pub sigma: TorusHom,
    pub n_torus: ComplexTorus,
    pub incl: TorusHom,
    pub product: ComplexTorus,
    pub q: TorusHom,
    pub ctx: IsogenyContext,
}

fn build_side(a: &ComplexTorus, n: usize) -> Result<KummerSide> {
    let sigma = TorusHom::summation(a, n)?;
    let (n_torus, incl) = kernel_subtorus(&sigma)?;
    let product = ComplexTorus::product(
        &[&n_torus, a],
        format!("{}x{}", n_torus.label(), a.label()),
    );
    let q_matrix = incl.matrix().hstack(TorusHom::diagonal(a, n)?.matrix())?;
    let q = TorusHom::new(product.clone(), sigma.source().clone(), q_matrix)?;
    let ctx = IsogenyContext::new(q.clone())?;
    Ok(KummerSide { surface: a.clone(), sigma, n_torus, incl, product, q, ctx })
}

/// The full two-sided pipeline context.
#[derive(Clone, Debug)]
pub struct KummerContext {
    pub n: usize,
    pub side: KummerSide,
    pub side_prime: KummerSide,
}

impl KummerContext {
    /// Build the context for a pair of abelian surfaces. Other dimensions are
    /// rejected here; see [`KummerContext::new_any_dim`].
    pub fn new(a: &ComplexTorus, a_prime: &ComplexTorus, n: usize) -> Result<Self> {
        if a.g() != 2 || a_prime.g() != 2 {
            return Err(Error::Dimension(
                "the pipeline is validated for abelian surfaces only; use new_any_dim to override"
                    .into(),
            ));
        }
        Self::new_any_dim(a, a_prime, n)
    }

    /// Dimension-agnostic constructor, without the surface-only guarantees.
    pub fn new_any_dim(a: &ComplexTorus, a_prime: &ComplexTorus, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension("the pipeline needs n >= 2".into()));
        }
        if a.g() != a_prime.g() {
            return Err(Error::Dimension("the two surfaces must have equal dimension".into()));
        }
        let ctx = KummerContext {
            n,
            side: build_side(a, n)?,
            side_prime: build_side(a_prime, n)?,
        };
        ctx.verify()?;
        Ok(ctx)
    }

    fn verify(&self) -> Result<()> {
        for side in [&self.side, &self.side_prime] {
            let g2 = side.surface.rank();
            let n = self.n;
            // deg(q) = #A[n] and ker(q-hat) is a copy of the dual n-torsion
            let expected = BigInt::from(n as i64).pow(g2 as u32);
            if side.q.isogeny_degree()? != expected {
                return Err(Error::NotIsogeny("kummer isogeny has the wrong degree".into()));
            }
            let factors = &side.ctx.group().invariant_factors;
            if factors.len() != g2 || factors.iter().any(|f| f != &BigInt::from(n as i64)) {
                return Err(Error::NotIsogeny(
                    "dual kernel does not match the n-torsion of the dual surface".into(),
                ));
            }
            // ker(q) is generated by classes ((a,...,a), -a) with a in A[n]
            for i in 0..g2 {
                let pt = self.kernel_generator(side, i)?;
                if !side.q.apply(&pt)?.is_zero() {
                    return Err(Error::NotIsogeny("standard kernel class escapes".into()));
                }
                if pt.order() != &BigInt::from(n as i64) {
                    return Err(Error::NotIsogeny("kernel class has the wrong order".into()));
                }
            }
            // Sigma . q = n_A . pi_A exactly
            let lhs = side.sigma.matrix().mul(side.q.matrix())?;
            let pi = RatMatrix::from_fn(g2, side.product.rank(), |r, c| {
                if c == side.n_torus.rank() + r { rat(1) } else { rat(0) }
            });
            let rhs = pi.scale(&rat(n as i64));
            if lhs != rhs {
                return Err(Error::Shape("summation square does not commute".into()));
            }
        }
        Ok(())
    }

    /// The kernel class `((a,...,a), -a)` for `a = e_i / n`, written in the
    /// coordinates of `N_A x A`.
    pub fn kernel_generator(&self, side: &KummerSide, i: usize) -> Result<TorsionPoint> {
        let g2 = side.surface.rank();
        let n = self.n;
        let frac = ratq(1, n as i64);
        let v = RatMatrix::from_fn(side.product.rank(), 1, |r, _| {
            if r < side.n_torus.rank() {
                // u-coordinates: the same fraction in every block
                if r % g2 == i { frac.clone() } else { BigRational::zero() }
            } else {
                // A-coordinate: -a
                if r - side.n_torus.rank() == i { -frac.clone() } else { BigRational::zero() }
            }
        });
        TorsionPoint::new(side.product.clone(), v)
    }
}

/// Blockwise diagonal embedding of a symplectic map: each homomorphism block
/// becomes `n` diagonal copies.
pub fn diag_embed(g: &SymplecticMap, n: usize) -> Result<SymplecticMap> {
    if !g.is_symplectic() {
        return Err(Error::NotSymplectic);
    }
    let a_n = g.source().power(n, format!("{}^{n}", g.source().label()));
    let a_n_prime = g.target().power(n, format!("{}^{n}", g.target().label()));
    let embedded = SymplecticMap::from_matrices(
        &a_n,
        &a_n_prime,
        g.g1().matrix().diag_repeat(n),
        g.g2().matrix().diag_repeat(n),
        g.g3().matrix().diag_repeat(n),
        g.g4().matrix().diag_repeat(n),
    )?;
    debug_assert!(embedded.is_symplectic());
    Ok(embedded)
}

/// Why the divisibility criterion failed: a fractional torsion vector whose
/// image under `g2` misses the scaled target lattice.
#[derive(Clone, Debug)]
pub struct CriterionWitness {
    pub vector: RatMatrix,
    pub image: RatMatrix,
    pub modulus: i64,
}

#[derive(Clone, Debug)]
pub struct CriterionVerdict {
    pub holds: bool,
    pub witness: Option<CriterionWitness>,
}

/// The lifting criterion for the pipeline: every entry of the `g2` block must
/// be divisible by `n^2`, i.e. `g2` maps `(1/n) Lambda` into `n Lambda'`.
pub fn kummer_criterion(g: &SymplecticMap, n: usize) -> Result<CriterionVerdict> {
    if !g.is_symplectic() {
        return Err(Error::NotSymplectic);
    }
    let m2 = g.g2().matrix();
    let nn = BigInt::from((n * n) as i64);
    for j in 0..m2.cols() {
        for i in 0..m2.rows() {
            let e = m2.at(i, j);
            if !e.denom().is_one() || !e.numer().mod_floor(&nn).is_zero() {
                let vector = RatMatrix::from_fn(m2.cols(), 1, |r, _| {
                    if r == j { ratq(1, n as i64) } else { BigRational::zero() }
                });
                let image = m2.mul(&vector)?;
                return Ok(CriterionVerdict {
                    holds: false,
                    witness: Some(CriterionWitness { vector, image, modulus: n as i64 }),
                });
            }
        }
    }
    Ok(CriterionVerdict { holds: true, witness: None })
}

/// Diagonally embed, push to the Mukai lattice and conjugate through the
/// comparison maps of the two Kummer contexts. Succeeds exactly when the
/// conjugate is integral.
pub fn transport_and_restrict(kctx: &KummerContext, g: &SymplecticMap) -> Result<LiftOutcome> {
    if !g.source().same_structure(&kctx.side.surface)
        || !g.target().same_structure(&kctx.side_prime.surface)
    {
        return Err(Error::SpaceMismatch("map does not act on the context surfaces".into()));
    }
    let embedded = diag_embed(g, kctx.n)?;
    let f = embedded.orlov_iso()?;
    lift_criterion_between(&kctx.side.ctx, &kctx.side_prime.ctx, &f)
}

fn factor_indices(side: &KummerSide) -> (Vec<usize>, Vec<usize>) {
    let dn = side.n_torus.rank();
    let da = side.surface.rank();
    let leg = dn + da;
    let n_idx: Vec<usize> = (0..dn).chain(leg..leg + dn).collect();
    let a_idx: Vec<usize> = (dn..dn + da).chain(leg + dn..leg + dn + da).collect();
    (n_idx, a_idx)
}

/// Split a transported isometry across the product decomposition
/// `V_{N x A} = V_N (+) V_A`. Returns the two factors exactly when both
/// off-diagonal product blocks vanish.
pub fn split(kctx: &KummerContext, f: &BlockIso) -> Result<Option<(BlockIso, BlockIso)>> {
    let (n_idx, a_idx) = factor_indices(&kctx.side);
    let (n_idx2, a_idx2) = factor_indices(&kctx.side_prime);
    let m = f.matrix();
    for &r in &n_idx2 {
        for &c in &a_idx {
            if !m.at(r, c).is_zero() {
                return Ok(None);
            }
        }
    }
    for &r in &a_idx2 {
        for &c in &n_idx {
            if !m.at(r, c).is_zero() {
                return Ok(None);
            }
        }
    }
    let extract = |rows: &[usize], cols: &[usize]| {
        RatMatrix::from_fn(rows.len(), cols.len(), |i, j| m.at(rows[i], cols[j]).clone())
    };
    let eta1 = BlockIso::new(
        MukaiSpace::of(&kctx.side.n_torus),
        MukaiSpace::of(&kctx.side_prime.n_torus),
        extract(&n_idx2, &n_idx),
    )?;
    let eta2 = BlockIso::new(
        MukaiSpace::of(&kctx.side.surface),
        MukaiSpace::of(&kctx.side_prime.surface),
        extract(&a_idx2, &a_idx),
    )?;
    debug_assert!(eta1.is_isometry() && eta2.is_isometry());
    Ok(Some((eta1, eta2)))
}

/// The expected surface factor of a transported map: the Mukai action of `g`
/// conjugated by the similitude `diag(n, 1)` of legs. (On the surface leg the
/// pipeline rescales the twist data: the primal-to-dual block divides by `n`
/// and the dual-to-primal block multiplies by `n`.)
pub fn expected_surface_factor(g: &SymplecticMap, n: usize) -> Result<BlockIso> {
    let rho = g.orlov_iso()?;
    let leg = rho.source().leg();
    let d = RatMatrix::block_diag(&[
        &RatMatrix::scalar(leg, &rat(n as i64)),
        &RatMatrix::identity(leg),
    ]);
    let mat = d.mul(rho.matrix())?.mul(&d.inverse()?)?;
    BlockIso::new(rho.source().clone(), rho.target().clone(), mat)
}

/// Check that the surface leg of the transported map is exactly the
/// similitude-conjugated Mukai action of `g`.
pub fn eta2_projection_check(kctx: &KummerContext, g: &SymplecticMap) -> Result<bool> {
    let verdict = kummer_criterion(g, kctx.n)?;
    if !verdict.holds {
        return Err(Error::NotMember);
    }
    let transported = match transport_and_restrict(kctx, g)? {
        LiftOutcome::Lifted(t) => t,
        LiftOutcome::Obstructed(_) => return Ok(false),
    };
    let Some((_, eta2)) = split(kctx, &transported)? else {
        return Ok(false);
    };
    Ok(eta2.matrix() == expected_surface_factor(g, kctx.n)?.matrix())
}

/// The kernel factor of a transported map agrees with the diagonal blocks of
/// the embedded map along the inclusion of the kernel lattice:
/// `incl' . eta1[leg2,leg2] = diag(g1) . incl`.
pub fn eta1_diagonal_consistency(
    kctx: &KummerContext,
    g: &SymplecticMap,
    eta1: &BlockIso,
) -> Result<bool> {
    let second_leg = eta1.leg_block(1, 1);
    let lhs = kctx.side_prime.incl.matrix().mul(&second_leg)?;
    let rhs = g.g1().matrix().diag_repeat(kctx.n).mul(kctx.side.incl.matrix())?;
    Ok(lhs == rhs)
}

/// The symmetric-group action on `V_{N x A}` induced by a transposition of
/// the `n` product slots (trivial on the surface factor).
pub fn permutation_v_action(kctx: &KummerContext, p: usize, q: usize) -> Result<RatMatrix> {
    let n = kctx.n;
    if p >= q || q >= n {
        return Err(Error::Dimension("transposition indices out of range".into()));
    }
    let g2 = kctx.side.surface.rank();
    let blocks = n - 1;
    // action on the kernel lattice in the fixed u-basis, as a list of
    // scalar block entries (target block, source block, value)
    let mut entries: Vec<(usize, usize, i64)> = Vec::new();
    if q < n - 1 {
        for k in 0..blocks {
            let target = if k == p { q } else if k == q { p } else { k };
            entries.push((target, k, 1));
        }
    } else {
        // transposition with the last slot: u_p -> -u_p, u_k -> u_k - u_p
        for k in 0..blocks {
            if k == p {
                entries.push((p, p, -1));
            } else {
                entries.push((k, k, 1));
                entries.push((p, k, -1));
            }
        }
    }
    let pn = RatMatrix::from_fn(g2 * blocks, g2 * blocks, |r, c| {
        if r % g2 != c % g2 {
            return rat(0);
        }
        let (bi, bj) = (r / g2, c / g2);
        entries
            .iter()
            .find(|&&(ti, si, _)| ti == bi && si == bj)
            .map_or_else(|| rat(0), |&(_, _, v)| rat(v))
    });
    let on_product = RatMatrix::block_diag(&[&pn, &RatMatrix::identity(g2)]);
    let v_action = RatMatrix::block_diag(&[&on_product.inverse()?.transpose(), &on_product]);
    Ok(v_action)
}
