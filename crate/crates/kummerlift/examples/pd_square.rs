//! Graded duality maps and the commuting square
//! `deg(q) . phi_A = qhat^* . phi_B . q^*`.
//!
//! Run with `cargo run --example pd_square`.

use kummerlift::cohomology::{
    check_pd_square, check_pd_square_with_flip, degree_from_top_block, duality_sign,
    induced_pullback, poincare_phi,
};
use kummerlift::kummer::KummerContext;
use kummerlift::torus::{ComplexTorus, TorusHom};

fn main() {
    let e = ComplexTorus::elliptic("E");
    let phi = poincare_phi(&e);
    for m in 0..=2 {
        println!("duality sign in degree {m}: {}", duality_sign(m));
        println!("block degree {m} -> {}:\n{}", 2 - m, phi.blocks[m]);
    }

    let two = TorusHom::multiplication(&e, 2);
    let pullback = induced_pullback(&two);
    println!("pullback of 2_E in degree 2 (scales by deg):\n{}", pullback.blocks[2]);
    assert_eq!(degree_from_top_block(&two).unwrap(), two.isogeny_degree().unwrap());

    println!("square commutes for 2_E: {}", check_pd_square(&two).unwrap().ok);
    let flipped = check_pd_square_with_flip(&two, Some(1)).unwrap();
    println!("with the degree-1 sign negated: {}", flipped.ok);
    if let Some(w) = flipped.witness {
        println!(
            "  first mismatch in degree {} at ({}, {}): {} vs {}",
            w.degree, w.row, w.col, w.lhs, w.rhs
        );
    }

    // the stress case: the rank-8 kernel-of-summation isogeny
    let a = ComplexTorus::surface("A");
    let kctx = KummerContext::new(&a, &a, 2).unwrap();
    let q = &kctx.side.q;
    println!(
        "\nkernel-of-summation isogeny: rank {}, degree {}",
        q.matrix().rows(),
        q.isogeny_degree().unwrap()
    );
    let verdict = check_pd_square(q).unwrap();
    println!("square commutes in all {} degrees: {}", q.matrix().rows() + 1, verdict.ok);
}
