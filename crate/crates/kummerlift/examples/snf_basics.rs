//! Smith normal form, lattice membership and finite quotients.
//!
//! Run with `cargo run --example snf_basics`.

use kummerlift::matrix::RatMatrix;
use kummerlift::snf::{finite_quotient, lattice_solve, snf, sublattice_index};

fn main() {
    // diag(2,3) has invariant factors (1, 6)
    let m = RatMatrix::from_i64_rows(&[&[2, 0], &[0, 3]]);
    let dec = snf(&m).unwrap();
    println!("M =\n{m}");
    println!("U M V = D with D =\n{}", dec.d);
    println!("U =\n{}V =\n{}", dec.u, dec.v);
    assert_eq!(dec.u.mul(&m).unwrap().mul(&dec.v).unwrap(), dec.d);

    // membership in the column lattice of M, with an integer certificate
    let b = RatMatrix::col_from_i64(&[4, 9]);
    let x = lattice_solve(&m, &b).unwrap().unwrap();
    println!("(4,9) = M * ({}, {})", x.at(0, 0), x.at(1, 0));
    assert!(lattice_solve(&m, &RatMatrix::col_from_i64(&[1, 0])).unwrap().is_none());
    println!("(1,0) is not in the lattice: no integer solution exists");

    // index and quotient of a skew sublattice of Z^2
    let skew = RatMatrix::from_i64_rows(&[&[1, 0], &[1, 3]]);
    let ambient = RatMatrix::identity(2);
    let idx = sublattice_index(&ambient, &skew).unwrap().unwrap();
    let quotient = finite_quotient(&ambient, &skew).unwrap();
    println!("[Z^2 : <(1,1),(0,3)>] = {idx}");
    println!("invariant factors: {:?}", quotient.invariant_factors);
    for (d, g) in quotient.invariant_factors.iter().zip(&quotient.generators) {
        println!("generator of order {d}: ({}, {})", g.at(0, 0), g.at(1, 0));
    }
}
