//! Equivariant lifting machinery at lattice level: isogeny contexts, the
//! rational comparison isometry between Mukai spaces, membership in the
//! equivariant isometry group, the lifting criterion and its inverse
//! restriction, and torsion kernel bookkeeping.
//!
//! For an isogeny `q: B -> A` the comparison map is
//! `iota = (q^*, (q-hat^*)^{-1}): V_{A,Q} -> V_{B,Q}`; its image of the
//! integral lattice of `V_A` is the lift lattice. An integral Hodge isometry
//! of `V_B` is a member of the equivariant group exactly when it maps the
//! lift lattice onto itself.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::mukai::{BlockIso, CommutationWitness, MukaiSpace, PairingWitness, SymplecticMap};
use crate::snf::{lattice_solve, FiniteAbelianGroup};
use crate::torus::{ComplexTorus, TorsionPoint, TorusHom};

/// An isogeny `q: B -> A` packaged with its dual, the kernel of the dual, the
/// comparison isometry and the lift lattice.
#[derive(Clone, Debug)]
pub struct IsogenyContext {
    q: TorusHom,
    q_hat: TorusHom,
    group: FiniteAbelianGroup,
    group_points: Vec<TorsionPoint>,
    iota: RatMatrix,
    iota_inv: RatMatrix,
    base_space: MukaiSpace,
    cover_space: MukaiSpace,
}

impl IsogenyContext {
    pub fn new(q: TorusHom) -> Result<Self> {
        if !q.is_isogeny() {
            return Err(Error::NotIsogeny(format!(
                "{} -> {} must be an integral isogeny",
                q.source().label(),
                q.target().label()
            )));
        }
        let q_hat = q.dual_hom();
        let group = q_hat.kernel_group()?;
        let group_points = q_hat.kernel_points()?;
        let m = q.matrix();
        let iota = RatMatrix::block_diag(&[&m.transpose(), &m.inverse()?]);
        let iota_inv = iota.inverse()?;
        let base_space = MukaiSpace::of(q.target());
        let cover_space = MukaiSpace::of(q.source());

        // iota is an isometry of the rational hyperbolic pairings
        let conj = iota.transpose().mul(cover_space.gram())?.mul(&iota)?;
        if &conj != base_space.gram() {
            return Err(Error::NotIsometry);
        }
        // #ker(q-hat) = deg(q)
        if group.order() != q.isogeny_degree()? {
            return Err(Error::NotIsogeny("kernel order does not match the degree".into()));
        }
        Ok(IsogenyContext {
            q,
            q_hat,
            group,
            group_points,
            iota,
            iota_inv,
            base_space,
            cover_space,
        })
    }

    /// The context of multiplication by `n` on `t`.
    pub fn n_context(t: &ComplexTorus, n: i64) -> Result<Self> {
        Self::new(TorusHom::multiplication(t, n))
    }

    pub fn q(&self) -> &TorusHom {
        &self.q
    }

    pub fn q_hat(&self) -> &TorusHom {
        &self.q_hat
    }

    /// `ker(q-hat)`, the group acting on the base side.
    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    /// Kernel generators as torsion points on the dual of the base.
    pub fn group_points(&self) -> &[TorsionPoint] {
        &self.group_points
    }

    /// The comparison map `V_{A,Q} -> V_{B,Q}` as a matrix.
    pub fn iota(&self) -> &RatMatrix {
        &self.iota
    }

    pub fn iota_inv(&self) -> &RatMatrix {
        &self.iota_inv
    }

    /// Basis of the lift lattice inside `V_{B,Q}` (the columns of `iota`).
    pub fn lift_lattice(&self) -> &RatMatrix {
        &self.iota
    }

    /// `V_A`, the Mukai space of the isogeny target.
    pub fn base_space(&self) -> &MukaiSpace {
        &self.base_space
    }

    /// `V_B`, the Mukai space of the isogeny source.
    pub fn cover_space(&self) -> &MukaiSpace {
        &self.cover_space
    }
}

/// Which leg of the lift lattice a violating vector comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeLeg {
    Primal,
    Dual,
}

/// A lift-lattice vector moved outside the lattice, with the rational
/// coefficients of its image in the target lattice basis.
#[derive(Clone, Debug)]
pub struct LatticeWitness {
    pub leg: LatticeLeg,
    pub index: usize,
    pub vector: RatMatrix,
    pub image: RatMatrix,
    pub image_coefficients: RatMatrix,
}

impl LatticeWitness {
    /// Largest denominator appearing in the coefficients.
    pub fn denominator(&self) -> BigInt {
        self.image_coefficients.denominator_lcm()
    }
}

#[derive(Clone, Debug)]
pub enum MembershipFailure {
    NotIsometry(PairingWitness),
    NotHodge(CommutationWitness),
    NotSpecial,
    Escapes(LatticeWitness),
}

#[derive(Clone, Debug)]
pub struct MembershipVerdict {
    pub member: bool,
    pub failure: Option<MembershipFailure>,
}

impl MembershipVerdict {
    fn ok() -> Self {
        MembershipVerdict { member: true, failure: None }
    }

    fn fail(failure: MembershipFailure) -> Self {
        MembershipVerdict { member: false, failure: Some(failure) }
    }
}

fn leg_of(index: usize, leg_dim: usize) -> LatticeLeg {
    if index < leg_dim {
        LatticeLeg::Primal
    } else {
        LatticeLeg::Dual
    }
}

/// Membership of an integral Hodge isometry `gamma: V_B -> V_B'` in the
/// equivariant isometry set of a pair of contexts: `gamma` must map the lift
/// lattice of `ctx` onto the lift lattice of `ctx2`. Both containments are
/// certified by `lattice_solve`, so failures carry explicit vectors.
pub fn in_g_so_between(
    ctx: &IsogenyContext,
    ctx2: &IsogenyContext,
    gamma: &BlockIso,
) -> Result<MembershipVerdict> {
    if !gamma.source().same_structure(ctx.cover_space())
        || !gamma.target().same_structure(ctx2.cover_space())
    {
        return Err(Error::SpaceMismatch("gamma does not act on the context spaces".into()));
    }
    if !gamma.is_integral() {
        return Err(Error::NonIntegral);
    }
    if let Err(w) = gamma.check_isometry() {
        return Ok(MembershipVerdict::fail(MembershipFailure::NotIsometry(w)));
    }
    if let Err(w) = gamma.check_hodge() {
        return Ok(MembershipVerdict::fail(MembershipFailure::NotHodge(w)));
    }
    if !gamma.is_special()? {
        return Ok(MembershipVerdict::fail(MembershipFailure::NotSpecial));
    }
    let leg = ctx.base_space().leg();
    // gamma L (subset of) L'
    for j in 0..ctx.lift_lattice().cols() {
        let v = ctx.lift_lattice().column(j);
        let image = gamma.matrix().mul(&v)?;
        if lattice_solve(ctx2.lift_lattice(), &image)?.is_none() {
            let coeffs = ctx2.iota_inv().mul(&image)?;
            return Ok(MembershipVerdict::fail(MembershipFailure::Escapes(LatticeWitness {
                leg: leg_of(j, leg),
                index: j,
                vector: v,
                image,
                image_coefficients: coeffs,
            })));
        }
    }
    // L' (subset of) gamma L
    let gamma_l = gamma.matrix().mul(ctx.lift_lattice())?;
    let leg2 = ctx2.base_space().leg();
    for j in 0..ctx2.lift_lattice().cols() {
        let w = ctx2.lift_lattice().column(j);
        if lattice_solve(&gamma_l, &w)?.is_none() {
            let coeffs = gamma_l.inverse()?.mul(&w)?;
            return Ok(MembershipVerdict::fail(MembershipFailure::Escapes(LatticeWitness {
                leg: leg_of(j, leg2),
                index: j,
                vector: w.clone(),
                image: w,
                image_coefficients: coeffs,
            })));
        }
    }
    Ok(MembershipVerdict::ok())
}

/// Autoequivalence-side membership: both lattices come from the same context.
pub fn in_g_so(ctx: &IsogenyContext, gamma: &BlockIso) -> Result<MembershipVerdict> {
    in_g_so_between(ctx, ctx, gamma)
}

/// Witness for a failed lift: a column of the conjugated matrix with a
/// nontrivial denominator.
#[derive(Clone, Debug)]
pub struct DenominatorWitness {
    pub row: usize,
    pub column: usize,
    pub entry: num_rational::BigRational,
    pub denominator: BigInt,
    pub image: RatMatrix,
}

#[derive(Clone, Debug)]
pub enum LiftOutcome {
    Lifted(BlockIso),
    Obstructed(DenominatorWitness),
}

impl LiftOutcome {
    pub fn lifted(self) -> Option<BlockIso> {
        match self {
            LiftOutcome::Lifted(b) => Some(b),
            LiftOutcome::Obstructed(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&DenominatorWitness> {
        match self {
            LiftOutcome::Lifted(_) => None,
            LiftOutcome::Obstructed(w) => Some(w),
        }
    }
}

fn require_so_hdg(f: &BlockIso) -> Result<()> {
    if !f.is_integral() {
        return Err(Error::NonIntegral);
    }
    if !f.is_isometry() {
        return Err(Error::NotIsometry);
    }
    if !f.is_hodge() {
        return Err(Error::NotHodge);
    }
    Ok(())
}

/// Conjugate an integral Hodge isometry `F: V_A -> V_A'` through the
/// comparison maps. The lift exists exactly when the conjugate is integral;
/// it is then automatically a member on the cover side.
pub fn lift_criterion_between(
    ctx: &IsogenyContext,
    ctx2: &IsogenyContext,
    f: &BlockIso,
) -> Result<LiftOutcome> {
    if !f.source().same_structure(ctx.base_space())
        || !f.target().same_structure(ctx2.base_space())
    {
        return Err(Error::SpaceMismatch("F does not act on the context base spaces".into()));
    }
    require_so_hdg(f)?;
    let gamma = ctx2.iota().mul(f.matrix())?.mul(ctx.iota_inv())?;
    match gamma.first_non_integral() {
        None => Ok(LiftOutcome::Lifted(BlockIso::new(
            ctx.cover_space().clone(),
            ctx2.cover_space().clone(),
            gamma,
        )?)),
        Some((i, j, entry)) => {
            let image = gamma.column(j);
            let denominator = entry.denom().clone();
            Ok(LiftOutcome::Obstructed(DenominatorWitness {
                row: i,
                column: j,
                entry,
                denominator,
                image,
            }))
        }
    }
}

pub fn lift_criterion(ctx: &IsogenyContext, f: &BlockIso) -> Result<LiftOutcome> {
    lift_criterion_between(ctx, ctx, f)
}

/// Restrict a member of the equivariant group back to the base: the inverse
/// conjugation, always integral on members.
pub fn restrict_res_between(
    ctx: &IsogenyContext,
    ctx2: &IsogenyContext,
    gamma: &BlockIso,
) -> Result<BlockIso> {
    let verdict = in_g_so_between(ctx, ctx2, gamma)?;
    if !verdict.member {
        return Err(Error::NotMember);
    }
    let f = ctx2.iota_inv().mul(gamma.matrix())?.mul(ctx.iota())?;
    debug_assert!(f.is_integral());
    BlockIso::new(ctx.base_space().clone(), ctx2.base_space().clone(), f)
}

pub fn restrict_res(ctx: &IsogenyContext, gamma: &BlockIso) -> Result<BlockIso> {
    restrict_res_between(ctx, ctx, gamma)
}

/// Divisibility-only membership test for the multiplication-by-n context:
/// the dual-to-primal leg blocks of `gamma` and of its inverse must vanish
/// mod `n^2` and all blocks must be integral.
pub fn n_context_closed_form(n: i64, gamma: &BlockIso) -> Result<bool> {
    if !gamma.source().same_structure(gamma.target()) && gamma.source().leg() != gamma.target().leg()
    {
        return Err(Error::SpaceMismatch("closed form needs equal leg sizes".into()));
    }
    let nn = BigInt::from(n) * BigInt::from(n);
    let divisible = |m: &RatMatrix| -> bool {
        m.entries().iter().all(|e| e.denom().is_one() && e.numer().mod_floor(&nn).is_zero())
    };
    if !gamma.matrix().is_integral() {
        return Ok(false);
    }
    let inv = match gamma.matrix().inverse() {
        Ok(m) => m,
        Err(_) => return Ok(false),
    };
    if !inv.is_integral() {
        return Ok(false);
    }
    let inv_iso = BlockIso::new(gamma.target().clone(), gamma.source().clone(), inv)?;
    Ok(divisible(&gamma.leg_block(0, 1)) && divisible(&inv_iso.leg_block(0, 1)))
}

/// A torsion element of the kernel of the equivariant Orlov map:
/// a translation, a degree-zero twist and a shift.
#[derive(Clone, Debug)]
pub struct OrlovKernelElement {
    pub translation: TorsionPoint,
    pub twist: TorsionPoint,
    pub shift: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelDirection {
    /// Towards the cover row: the twist moves through `q-hat`.
    Up,
    /// Towards the base row: the translation moves through `q`.
    Down,
}

/// The two arrows out of the middle kernel `Alb(B) x A^ x Z`:
/// up to `Alb(B) x B^ x Z` and down to `Alb(A) x A^ x Z`.
pub fn kernel_maps(
    ctx: &IsogenyContext,
    element: &OrlovKernelElement,
    direction: KernelDirection,
) -> Result<OrlovKernelElement> {
    if !element.translation.torus().same_structure(ctx.q().source()) {
        return Err(Error::WrongTorus);
    }
    if !element.twist.torus().same_structure(&ctx.q().target().dual()) {
        return Err(Error::WrongTorus);
    }
    match direction {
        KernelDirection::Up => Ok(OrlovKernelElement {
            translation: element.translation.clone(),
            twist: ctx.q_hat().apply(&element.twist)?,
            shift: element.shift,
        }),
        KernelDirection::Down => Ok(OrlovKernelElement {
            translation: ctx.q().apply(&element.translation)?,
            twist: element.twist.clone(),
            shift: element.shift,
        }),
    }
}

/// The checkable hypothesis for the existence of equivariance data: the
/// variety-level map must send every generator of `G` into the dual factor,
/// i.e. the `g2` block must kill the torsion classes.
pub fn rouquier_maps_group_into_dual(
    g: &SymplecticMap,
    generators: &[TorsionPoint],
) -> Result<bool> {
    for t in generators {
        if !t.torus().same_structure(&g.source().dual()) {
            return Err(Error::WrongTorus);
        }
        let image = g.g2().matrix().mul(t.vector())?;
        if !image.is_integral() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{rat, ratq};
    use crate::sampling::{
        random_symplectic, random_symplectic_with_g2_multiple, SplitMix64, SymplecticFactors,
    };

    fn surface() -> ComplexTorus {
        ComplexTorus::surface("A")
    }

    #[test]
    fn n_context_shape() {
        let a = surface();
        let ctx = IsogenyContext::n_context(&a, 2).unwrap();
        assert_eq!(ctx.group().invariant_factors, vec![BigInt::from(2); 4]);
        // iota = diag(2 I, 1/2 I)
        let expected = RatMatrix::block_diag(&[
            &RatMatrix::scalar(4, &rat(2)),
            &RatMatrix::scalar(4, &ratq(1, 2)),
        ]);
        assert_eq!(ctx.iota(), &expected);
        let id_ctx = IsogenyContext::new(TorusHom::identity(&a)).unwrap();
        assert!(id_ctx.group().is_trivial());
        assert!(id_ctx.iota().is_identity());
    }

    #[test]
    fn identity_is_member() {
        let a = surface();
        let ctx = IsogenyContext::n_context(&a, 2).unwrap();
        let id = BlockIso::identity(ctx.cover_space());
        assert!(in_g_so(&ctx, &id).unwrap().member);
    }

    #[test]
    fn poincare_reference_escapes_the_lift_lattice() {
        for n in [2i64, 3] {
            let b = ComplexTorus::elliptic("E");
            let ctx = IsogenyContext::n_context(&b, n).unwrap();
            let ctx2 = IsogenyContext::n_context(&b.dual(), n).unwrap();
            let rho = SymplecticMap::poincare_reference(&b).orlov_iso().unwrap();
            let verdict = in_g_so_between(&ctx, &ctx2, &rho).unwrap();
            assert!(!verdict.member);
            match verdict.failure.unwrap() {
                MembershipFailure::Escapes(w) => {
                    assert_eq!(w.leg, LatticeLeg::Dual);
                    assert_eq!(w.denominator(), BigInt::from(n * n));
                }
                other => panic!("expected a lattice witness, got {other:?}"),
            }
            // and the lift of rho itself is obstructed with denominator n^2
            let lift = lift_criterion_between(&ctx, &ctx2, &rho).unwrap();
            let w = lift.witness().expect("obstructed").clone();
            assert_eq!(w.denominator, BigInt::from(n * n));
        }
    }

    #[test]
    fn unipotent_lift_cancels_exactly() {
        let a = surface();
        let n = 2i64;
        let ctx = IsogenyContext::n_context(&a, n).unwrap();
        let zero = RatMatrix::zeros(4, 4);
        let id = RatMatrix::identity(4);
        let block = crate::mukai::tests::antisym_block();
        let g = SymplecticMap::from_matrices(&a, &a, id.clone(), block.scale(&rat(n * n)), zero, id)
            .unwrap();
        let f = g.orlov_iso().unwrap();
        let gamma = match lift_criterion(&ctx, &f).unwrap() {
            LiftOutcome::Lifted(gamma) => gamma,
            LiftOutcome::Obstructed(w) => panic!("unexpected obstruction {w:?}"),
        };
        assert!(gamma.is_integral());
        assert!(in_g_so(&ctx, &gamma).unwrap().member);
        // round trip
        let back = restrict_res(&ctx, &gamma).unwrap();
        assert_eq!(back.matrix(), f.matrix());
        // closed form agrees
        assert!(n_context_closed_form(n, &gamma).unwrap());
    }

    #[test]
    fn closed_form_rejects_the_reference_map() {
        let e = ComplexTorus::elliptic("E");
        let rho = SymplecticMap::poincare_reference(&e).orlov_iso().unwrap();
        for n in [2i64, 3] {
            assert!(!n_context_closed_form(n, &rho).unwrap());
        }
    }

    #[test]
    fn closed_form_matches_generic_membership() {
        let a = surface();
        let mut rng = SplitMix64::new(0xabc);
        for n in [2i64, 3] {
            let ctx = IsogenyContext::n_context(&a, n).unwrap();
            for i in 0..40 {
                let gamma = if i % 2 == 0 {
                    // member by construction
                    let g = random_symplectic_with_g2_multiple(&a, &a, n * n, &mut rng, 4);
                    let f = g.orlov_iso().unwrap();
                    match lift_criterion(&ctx, &f).unwrap() {
                        LiftOutcome::Lifted(gamma) => gamma,
                        LiftOutcome::Obstructed(w) => panic!("forced member obstructed: {w:?}"),
                    }
                } else {
                    random_symplectic(&a, &a, &mut rng, &SymplecticFactors::default())
                        .orlov_iso()
                        .unwrap()
                };
                let generic = in_g_so(&ctx, &gamma).unwrap().member;
                let closed = n_context_closed_form(n, &gamma).unwrap();
                assert_eq!(generic, closed);
            }
        }
    }

    #[test]
    fn transported_maps_intertwine_on_the_lift_lattice() {
        let a = surface();
        let ctx = IsogenyContext::n_context(&a, 2).unwrap();
        let mut rng = SplitMix64::new(0xdef);
        let g = random_symplectic_with_g2_multiple(&a, &a, 4, &mut rng, 4);
        let f = g.orlov_iso().unwrap();
        let gamma = lift_criterion(&ctx, &f).unwrap().lifted().unwrap();
        // iota . F = gamma . iota
        assert_eq!(
            ctx.iota().mul(f.matrix()).unwrap(),
            gamma.matrix().mul(ctx.iota()).unwrap()
        );
    }

    #[test]
    fn kernel_maps_move_the_right_factor() {
        let a = surface();
        let ctx = IsogenyContext::n_context(&a, 2).unwrap();
        let b = ctx.q().source().clone();
        let shift_only = OrlovKernelElement {
            translation: TorsionPoint::zero(&b),
            twist: TorsionPoint::zero(&ctx.q().target().dual()),
            shift: 1,
        };
        let up = kernel_maps(&ctx, &shift_only, KernelDirection::Up).unwrap();
        let down = kernel_maps(&ctx, &shift_only, KernelDirection::Down).unwrap();
        assert_eq!(up.shift, 1);
        assert!(up.twist.is_zero() && down.translation.is_zero());

        // a two-torsion translation maps down to a point of order dividing 2
        let t = TorsionPoint::basis_fraction(&b, 0, 2).unwrap();
        let elt = OrlovKernelElement {
            translation: t,
            twist: TorsionPoint::zero(&ctx.q().target().dual()),
            shift: 0,
        };
        let down = kernel_maps(&ctx, &elt, KernelDirection::Down).unwrap();
        assert!(BigInt::from(2).mod_floor(down.translation.order()).is_zero());

        // kernel twists die under the up map
        for t in ctx.group_points() {
            let elt = OrlovKernelElement {
                translation: TorsionPoint::zero(&b),
                twist: t.clone(),
                shift: 0,
            };
            let up = kernel_maps(&ctx, &elt, KernelDirection::Up).unwrap();
            assert!(up.twist.is_zero());
        }
    }

    #[test]
    fn rouquier_condition_examples() {
        let a = surface();
        let ctx = IsogenyContext::n_context(&a, 2).unwrap();
        let id = SymplecticMap::identity(&a);
        assert!(rouquier_maps_group_into_dual(&id, ctx.group_points()).unwrap());

        let zero = RatMatrix::zeros(4, 4);
        let idm = RatMatrix::identity(4);
        let block = crate::mukai::tests::antisym_block();
        // g2 entries even: half-integral classes land in the lattice
        let even = SymplecticMap::from_matrices(&a, &a, idm.clone(), block.scale(&rat(2)), zero.clone(), idm.clone()).unwrap();
        assert!(rouquier_maps_group_into_dual(&even, ctx.group_points()).unwrap());
        // odd entries do not
        let odd = SymplecticMap::from_matrices(&a, &a, idm.clone(), block, zero, idm).unwrap();
        assert!(!rouquier_maps_group_into_dual(&odd, ctx.group_points()).unwrap());
    }
}
