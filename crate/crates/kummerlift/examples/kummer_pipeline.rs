//! The full pipeline: diagonal embedding, transport along `N x A -> A^n`,
//! splitting, and the divisibility criterion on the `g2` block.
//!
//! Run with `cargo run --example kummer_pipeline`.

use kummerlift::kummer::{
    expected_surface_factor, kummer_criterion, split, transport_and_restrict, KummerContext,
};
use kummerlift::lift::LiftOutcome;
use kummerlift::matrix::{rat, RatMatrix};
use kummerlift::mukai::SymplecticMap;
use kummerlift::torus::ComplexTorus;

fn antisym_block() -> RatMatrix {
    RatMatrix::from_i64_rows(&[
        &[0, 0, 1, 0],
        &[0, 0, 0, -1],
        &[-1, 0, 0, 0],
        &[0, 1, 0, 0],
    ])
}

fn main() {
    let n = 2usize;
    let a = ComplexTorus::surface("A");
    let a2 = ComplexTorus::surface("A'");
    let kctx = KummerContext::new(&a, &a2, n).unwrap();
    println!(
        "q: N x A -> A^{n} has degree {} and dual kernel {:?}",
        kctx.side.q.isogeny_degree().unwrap(),
        kctx.side.ctx.group().invariant_factors
    );

    let id = RatMatrix::identity(4);
    let zero = RatMatrix::zeros(4, 4);

    // a map whose g2 block is divisible by n^2 transports and splits
    let good = SymplecticMap::from_matrices(
        &a,
        &a2,
        id.clone(),
        antisym_block().scale(&rat((n * n) as i64)),
        zero.clone(),
        id.clone(),
    )
    .unwrap();
    println!("\ncriterion (n^2 | g2): {}", kummer_criterion(&good, n).unwrap().holds);
    let transported = transport_and_restrict(&kctx, &good).unwrap().lifted().unwrap();
    println!("transported map is integral on V_(N x A), rank {}", transported.matrix().rows());
    let (eta1, eta2) = split(&kctx, &transported).unwrap().expect("off-diagonal blocks vanish");
    println!("kernel factor eta1:\n{}", eta1.matrix());
    println!("surface factor eta2:\n{}", eta2.matrix());
    assert_eq!(eta2.matrix(), expected_surface_factor(&good, n).unwrap().matrix());
    println!("eta2 equals the similitude-conjugated lattice action of g, entrywise");

    // an odd g2 block is obstructed, with a denominator witness
    let bad = SymplecticMap::from_matrices(&a, &a2, id.clone(), antisym_block(), zero, id).unwrap();
    let verdict = kummer_criterion(&bad, n).unwrap();
    println!("\nodd g2 block: criterion holds = {}", verdict.holds);
    if let Some(w) = verdict.witness {
        println!(
            "criterion witness: the class with denominator {} maps outside {} * lattice",
            w.vector.denominator_lcm(),
            w.modulus
        );
    }
    match transport_and_restrict(&kctx, &bad).unwrap() {
        LiftOutcome::Obstructed(w) => println!(
            "transport obstructed at entry ({}, {}) with denominator {}",
            w.row, w.column, w.denominator
        ),
        LiftOutcome::Lifted(_) => unreachable!("violating maps do not transport"),
    }
}
