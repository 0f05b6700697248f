//! Equivariant membership and the lifting criterion for multiplication-by-n
//! contexts.
//!
//! Run with `cargo run --example lifting_criterion`.

use kummerlift::lift::{
    in_g_so, in_g_so_between, lift_criterion, lift_criterion_between, n_context_closed_form,
    restrict_res, IsogenyContext, LiftOutcome, MembershipFailure,
};
use kummerlift::matrix::{rat, RatMatrix};
use kummerlift::mukai::SymplecticMap;
use kummerlift::torus::ComplexTorus;

fn main() {
    let n = 2i64;
    let e = ComplexTorus::elliptic("E");
    let ctx = IsogenyContext::n_context(&e, n).unwrap();
    println!("context of multiplication by {n}: kernel {:?}", ctx.group().invariant_factors);
    println!("lift lattice basis (columns):\n{}", ctx.lift_lattice());

    // the reference map escapes the lift lattice with denominator n^2
    let rho = SymplecticMap::poincare_reference(&e).orlov_iso().unwrap();
    let ctx2 = IsogenyContext::n_context(&e.dual(), n).unwrap();
    let verdict = in_g_so_between(&ctx, &ctx2, &rho).unwrap();
    println!("\nreference map is a member: {}", verdict.member);
    if let Some(MembershipFailure::Escapes(w)) = verdict.failure {
        println!(
            "witness: lift-lattice vector #{} of the {:?} leg maps to coefficients with denominator {}",
            w.index,
            w.leg,
            w.denominator()
        );
    }
    match lift_criterion_between(&ctx, &ctx2, &rho).unwrap() {
        LiftOutcome::Obstructed(w) => println!(
            "lift obstructed: conjugated entry ({}, {}) = {} has denominator {}",
            w.row, w.column, w.entry, w.denominator
        ),
        LiftOutcome::Lifted(_) => unreachable!("the reference map never lifts"),
    }

    // over the surface, an n^2-divisible unipotent lifts and restricts back
    let a = ComplexTorus::surface("A");
    let actx = IsogenyContext::n_context(&a, n).unwrap();
    let block = RatMatrix::from_i64_rows(&[
        &[0, 0, 1, 0],
        &[0, 0, 0, -1],
        &[-1, 0, 0, 0],
        &[0, 1, 0, 0],
    ])
    .scale(&rat(n * n));
    let g = SymplecticMap::from_matrices(
        &a,
        &a,
        RatMatrix::identity(4),
        block,
        RatMatrix::zeros(4, 4),
        RatMatrix::identity(4),
    )
    .unwrap();
    let f = g.orlov_iso().unwrap();
    let gamma = lift_criterion(&actx, &f).unwrap().lifted().expect("denominators cancel");
    println!("\nunipotent lift is integral:\n{}", gamma.matrix());
    println!("member of the equivariant group: {}", in_g_so(&actx, &gamma).unwrap().member);
    println!("closed-form divisibility test agrees: {}", n_context_closed_form(n, &gamma).unwrap());
    let back = restrict_res(&actx, &gamma).unwrap();
    assert_eq!(back.matrix(), f.matrix());
    println!("restriction recovers the original map exactly");
}
