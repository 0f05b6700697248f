//! Complex tori, duals, isogenies and the kernel-of-summation construction.
//!
//! Run with `cargo run --example torus_isogenies`.

use kummerlift::torus::{kernel_subtorus, ComplexTorus, TorsionPoint, TorusHom};

fn main() {
    let e = ComplexTorus::elliptic("E");
    println!("E has rank {} with J =\n{}", e.rank(), e.j());
    println!("its dual carries J^T =\n{}", e.dual().j());

    // multiplication by 2 and its kernel
    let two = TorusHom::multiplication(&e, 2);
    println!("deg(2_E) = {}", two.isogeny_degree().unwrap());
    for p in two.kernel_points().unwrap() {
        println!("kernel point of order {}: ({}, {})", p.order(), p.vector().at(0, 0), p.vector().at(1, 0));
    }

    // a deterministic torsion preimage
    let p = TorsionPoint::basis_fraction(&e, 0, 2).unwrap();
    let b = two.point_preimage(&p).unwrap();
    println!(
        "preimage of ({}, {}) under 2_E is ({}, {})",
        p.vector().at(0, 0),
        p.vector().at(1, 0),
        b.vector().at(0, 0),
        b.vector().at(1, 0)
    );

    // the kernel of the summation map of an abelian surface
    let a = ComplexTorus::surface("A");
    let sigma = TorusHom::summation(&a, 2).unwrap();
    let (n_torus, incl) = kernel_subtorus(&sigma).unwrap();
    println!("\nSigma: A^2 -> A has matrix\n{}", sigma.matrix());
    println!("its kernel has rank {} with primitive inclusion\n{}", n_torus.rank(), incl.matrix());
    assert!(sigma.compose(&incl).unwrap().matrix().is_zero());

    // the associated isogeny N x A -> A^2 has degree #A[2] = 16
    let q_matrix = incl.matrix().hstack(TorusHom::diagonal(&a, 2).unwrap().matrix()).unwrap();
    let product = ComplexTorus::product(&[&n_torus, &a], "NxA");
    let q = TorusHom::new(product, sigma.source().clone(), q_matrix).unwrap();
    println!("deg(q: N x A -> A^2) = {}", q.isogeny_degree().unwrap());
    println!(
        "ker(q-hat) invariant factors: {:?}",
        q.dual_hom().kernel_group().unwrap().invariant_factors
    );
}
