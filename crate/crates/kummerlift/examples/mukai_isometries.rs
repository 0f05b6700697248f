//! The hyperbolic lattice of a torus and the equivalence between the
//! hat-inverse condition and the isometry condition.
//!
//! Run with `cargo run --example mukai_isometries`.

use kummerlift::matrix::{rat, RatMatrix};
use kummerlift::mukai::{BlockIso, MukaiSpace, SymplecticMap, EPSILON_DOUBLE_DUAL};
use kummerlift::torus::ComplexTorus;

fn main() {
    let e = ComplexTorus::elliptic("E");
    let v = MukaiSpace::of(&e);
    println!("V_E has rank {} with Gram\n{}", v.rank(), v.gram());
    println!("and Hodge operator\n{}", v.j_v());

    // the reference map induced by the universal line bundle
    let p = SymplecticMap::poincare_reference(&e);
    println!("reference map, assembled on first homology:\n{}", p.assembled());
    println!("hat condition holds: {}", p.is_symplectic());
    println!(
        "hat condition with the flipped double-dual sign: {}",
        p.is_symplectic_with_sign(-EPSILON_DOUBLE_DUAL)
    );
    let rho = p.orlov_iso().unwrap();
    println!(
        "induced lattice map is isometry={} hodge={} special={}",
        rho.is_isometry(),
        rho.is_hodge(),
        rho.is_special().unwrap()
    );

    // scaling fails the isometry check with an explicit pairing witness
    let doubled = BlockIso::new(v.clone(), v.clone(), RatMatrix::scalar(4, &rat(2))).unwrap();
    let w = doubled.check_isometry().unwrap_err();
    println!(
        "2*id is no isometry: pairing of basis vectors ({}, {}) moves from {} to {}",
        w.i, w.j, w.expected, w.actual
    );

    // a unipotent with a hom-antisymmetric block over the surface
    let a = ComplexTorus::surface("A");
    let block = RatMatrix::from_i64_rows(&[
        &[0, 0, 4, 0],
        &[0, 0, 0, -4],
        &[-4, 0, 0, 0],
        &[0, 4, 0, 0],
    ]);
    let g = SymplecticMap::from_matrices(
        &a,
        &a,
        RatMatrix::identity(4),
        block,
        RatMatrix::zeros(4, 4),
        RatMatrix::identity(4),
    )
    .unwrap();
    println!("\nunipotent with self-dual upper block: symplectic = {}", g.is_symplectic());
    println!("its lattice action:\n{}", g.orlov_iso().unwrap().matrix());
}
