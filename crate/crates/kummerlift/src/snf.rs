//! Smith normal form, lattice membership, sublattice indices and finite
//! quotients, all in exact integer/rational arithmetic.
//!
//! Pivoting is deterministic: smallest nonzero absolute value, ties broken by
//! lowest row then lowest column, so decompositions are reproducible.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::RatMatrix;

/// A decomposition `U * M * V = D` with `U, V` unimodular and `D` diagonal
/// with a divisibility chain `d1 | d2 | ...`, zeros last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfDecomposition {
    pub u: RatMatrix,
    pub d: RatMatrix,
    pub v: RatMatrix,
}

impl SnfDecomposition {
    /// The diagonal of `D`, full length `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d.at(i, i).numer().clone()).collect()
    }

    /// Nontrivial invariant factors (entries `> 1`).
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal().into_iter().filter(|d| *d > BigInt::one()).collect()
    }
}

struct IntGrid {
    rows: usize,
    cols: usize,
    e: Vec<BigInt>,
}

impl IntGrid {
    fn identity(n: usize) -> Self {
        let mut e = vec![BigInt::zero(); n * n];
        for i in 0..n {
            e[i * n + i] = BigInt::one();
        }
        IntGrid { rows: n, cols: n, e }
    }

    fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.e[i * self.cols + j]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.e.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.e.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row a -= q * row b
    fn row_submul(&mut self, a: usize, b: usize, q: &BigInt) {
        for j in 0..self.cols {
            let s = q * self.at(b, j);
            self.e[a * self.cols + j] -= s;
        }
    }

    /// col a -= q * col b
    fn col_submul(&mut self, a: usize, b: usize, q: &BigInt) {
        for i in 0..self.rows {
            let s = q * self.at(i, b);
            self.e[i * self.cols + a] -= s;
        }
    }

    /// row a += row b
    fn row_add(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            let s = self.at(b, j).clone();
            self.e[a * self.cols + j] += s;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -self.at(a, j).clone();
            self.e[a * self.cols + j] = v;
        }
    }

    fn to_matrix(&self) -> RatMatrix {
        RatMatrix::new(
            self.rows,
            self.cols,
            self.e.iter().map(|n| BigRational::from_integer(n.clone())).collect(),
        )
        .expect("grid is non-empty")
    }
}

/// Smith normal form of an integer matrix. Rejects non-integer input.
pub fn snf(m: &RatMatrix) -> Result<SnfDecomposition> {
    let entries = m.to_bigint_entries().ok_or(Error::NonIntegral)?;
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = IntGrid { rows, cols, e: entries };
    let mut u = IntGrid::identity(rows);
    let mut v = IntGrid::identity(cols);

    for k in 0..rows.min(cols) {
        'stage: loop {
            // deterministic pivot: min |entry|, ties by (row, col)
            let mut pivot: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    let val = w.at(i, j);
                    if val.is_zero() {
                        continue;
                    }
                    match &pivot {
                        None => pivot = Some((i, j)),
                        Some((pi, pj)) => {
                            if val.abs() < w.at(*pi, *pj).abs() {
                                pivot = Some((i, j));
                            }
                        }
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break 'stage };
            if pi != k {
                w.swap_rows(pi, k);
                u.swap_rows(pi, k);
            }
            if pj != k {
                w.swap_cols(pj, k);
                v.swap_cols(pj, k);
            }

            let mut dirty = false;
            for i in k + 1..rows {
                if !w.at(i, k).is_zero() {
                    let q = w.at(i, k) / w.at(k, k);
                    if !q.is_zero() {
                        w.row_submul(i, k, &q);
                        u.row_submul(i, k, &q);
                    }
                    if !w.at(i, k).is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in k + 1..cols {
                if !w.at(k, j).is_zero() {
                    let q = w.at(k, j) / w.at(k, k);
                    if !q.is_zero() {
                        w.col_submul(j, k, &q);
                        v.col_submul(j, k, &q);
                    }
                    if !w.at(k, j).is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'stage;
            }

            // enforce the divisibility chain
            let mut fixup = None;
            'scan: for i in k + 1..rows {
                for j in k + 1..cols {
                    if !w.at(i, j).mod_floor(w.at(k, k)).is_zero() {
                        fixup = Some(i);
                        break 'scan;
                    }
                }
            }
            if let Some(i) = fixup {
                w.row_add(k, i);
                u.row_add(k, i);
                continue 'stage;
            }

            if w.at(k, k).is_negative() {
                w.negate_row(k);
                u.negate_row(k);
            }
            break 'stage;
        }
    }

    let dec = SnfDecomposition { u: u.to_matrix(), d: w.to_matrix(), v: v.to_matrix() };
    verify(m, &dec)?;
    Ok(dec)
}

fn verify(m: &RatMatrix, dec: &SnfDecomposition) -> Result<()> {
    let product = dec.u.mul(m)?.mul(&dec.v)?;
    if product != dec.d {
        return Err(Error::Shape("smith normal form verification failed".into()));
    }
    let diag = dec.diagonal();
    for i in 0..diag.len() {
        if diag[i].is_negative() {
            return Err(Error::Shape("negative invariant factor".into()));
        }
        if i + 1 < diag.len() && !diag[i].is_zero() && !diag[i + 1].mod_floor(&diag[i]).is_zero() {
            return Err(Error::Shape("divisibility chain broken".into()));
        }
        if diag[i].is_zero() && i + 1 < diag.len() && !diag[i + 1].is_zero() {
            return Err(Error::Shape("zero invariant factor out of place".into()));
        }
    }
    for i in 0..dec.d.rows() {
        for j in 0..dec.d.cols() {
            if i != j && !dec.d.at(i, j).is_zero() {
                return Err(Error::Shape("smith form is not diagonal".into()));
            }
        }
    }
    Ok(())
}

/// Decide membership of `b` in the lattice `M * Z^k`, returning an integer
/// preimage when one exists. Exact via Smith normal form.
pub fn lattice_solve(m: &RatMatrix, b: &RatMatrix) -> Result<Option<RatMatrix>> {
    if b.cols() != 1 || b.rows() != m.rows() {
        return Err(Error::Shape(format!(
            "lattice_solve expects a {}x1 column, got {}x{}",
            m.rows(),
            b.rows(),
            b.cols()
        )));
    }
    let scale = m.denominator_lcm().lcm(&b.denominator_lcm());
    let scale = BigRational::from_integer(scale);
    let mi = m.scale(&scale);
    let bi = b.scale(&scale);
    let dec = snf(&mi)?;
    let c = dec.u.mul(&bi)?;
    let diag = dec.diagonal();
    let mut y = vec![BigRational::zero(); m.cols()];
    for i in 0..m.rows() {
        let ci = c.at(i, 0);
        if i < diag.len() && !diag[i].is_zero() {
            let d = BigRational::from_integer(diag[i].clone());
            let q = ci / &d;
            if !q.denom().is_one() {
                return Ok(None);
            }
            y[i] = q;
        } else if !ci.is_zero() {
            return Ok(None);
        }
    }
    let x = dec.v.mul(&RatMatrix::column_vector(y))?;
    debug_assert_eq!(m.mul(&x).unwrap(), *b);
    debug_assert!(x.is_integral());
    Ok(Some(x))
}

/// Index `[L : M]` of one full-rank lattice in another, or `None` when
/// `M` is not contained in `L`.
pub fn sublattice_index(l_basis: &RatMatrix, m_basis: &RatMatrix) -> Result<Option<BigInt>> {
    if !l_basis.is_square() || !m_basis.is_square() || l_basis.rows() != m_basis.rows() {
        return Err(Error::Shape("lattice bases must be square of equal size".into()));
    }
    if l_basis.determinant()?.is_zero() || m_basis.determinant()?.is_zero() {
        return Err(Error::RankDeficient);
    }
    let x = l_basis.inverse()?.mul(m_basis)?;
    if !x.is_integral() {
        return Ok(None);
    }
    let det = x.determinant()?;
    Ok(Some(det.numer().abs()))
}

/// A finite abelian group presented by invariant factors with explicit
/// generators, given as rational columns modulo the ambient lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    pub invariant_factors: Vec<BigInt>,
    pub generators: Vec<RatMatrix>,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        FiniteAbelianGroup { invariant_factors: Vec::new(), generators: Vec::new() }
    }

    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }
}

/// The quotient `L / M` of full-rank lattices with `M` contained in `L`.
///
/// Generators are returned as torsion classes `g` with `d * g` in `L` and
/// `k * g` outside `L` for `0 < k < d`.
pub fn finite_quotient(l_basis: &RatMatrix, m_basis: &RatMatrix) -> Result<FiniteAbelianGroup> {
    if !l_basis.is_square() || !m_basis.is_square() || l_basis.rows() != m_basis.rows() {
        return Err(Error::Shape("lattice bases must be square of equal size".into()));
    }
    if l_basis.determinant()?.is_zero() {
        return Err(Error::RankDeficient);
    }
    let x = l_basis.inverse()?.mul(m_basis)?;
    if !x.is_integral() {
        return Err(Error::NotSublattice);
    }
    if x.determinant()?.is_zero() {
        return Err(Error::RankDeficient);
    }
    let dec = snf(&x)?;
    let u_inv = dec.u.inverse()?;
    let mut factors = Vec::new();
    let mut generators = Vec::new();
    for (i, d) in dec.diagonal().iter().enumerate() {
        if *d > BigInt::one() {
            factors.push(d.clone());
            let gen = l_basis
                .mul(&u_inv.column(i))?
                .scale(&BigRational::new(BigInt::one(), d.clone()));
            generators.push(gen);
        }
    }
    Ok(FiniteAbelianGroup { invariant_factors: factors, generators })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::rat;
    use proptest::prelude::*;

    fn diag2(a: i64, b: i64) -> RatMatrix {
        RatMatrix::from_i64_rows(&[&[a, 0], &[0, b]])
    }

    #[test]
    fn snf_of_diag_2_3() {
        let dec = snf(&diag2(2, 3)).unwrap();
        assert_eq!(dec.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn snf_of_identity_and_zero() {
        let dec = snf(&RatMatrix::identity(4)).unwrap();
        assert!(dec.d.is_identity());
        let dec = snf(&RatMatrix::zeros(2, 2)).unwrap();
        assert!(dec.d.is_zero());
    }

    #[test]
    fn snf_rejects_non_integer() {
        let m = RatMatrix::new(1, 1, vec![crate::matrix::ratq(1, 2)]).unwrap();
        assert!(matches!(snf(&m), Err(Error::NonIntegral)));
    }

    #[test]
    fn lattice_solve_componentwise() {
        let m = diag2(2, 3);
        let x = lattice_solve(&m, &RatMatrix::col_from_i64(&[4, 9])).unwrap().unwrap();
        assert_eq!(x, RatMatrix::col_from_i64(&[2, 3]));
        assert!(lattice_solve(&m, &RatMatrix::col_from_i64(&[1, 0])).unwrap().is_none());
    }

    #[test]
    fn lattice_solve_upper_triangular_none() {
        // columns (1,0) and (1,2); membership of (0,1) demands 2*x2 = 1
        let m = RatMatrix::from_i64_rows(&[&[1, 1], &[0, 2]]);
        let b = RatMatrix::col_from_i64(&[0, 1]);
        assert!(lattice_solve(&m, &b).unwrap().is_none());
        // brute-force oracle over a box certified by the entries
        for x1 in -6i64..=6 {
            for x2 in -6i64..=6 {
                assert!(!(x1 + x2 == 0 && 2 * x2 == 1));
            }
        }
    }

    #[test]
    fn index_of_doubled_lattice() {
        let l = RatMatrix::identity(2);
        assert_eq!(sublattice_index(&l, &diag2(2, 2)).unwrap(), Some(BigInt::from(4)));
        assert_eq!(sublattice_index(&l, &l).unwrap(), Some(BigInt::from(1)));
    }

    #[test]
    fn index_of_skew_sublattice_matches_coset_count() {
        // M spanned by (1,1) and (0,3); membership: (a,b) in M iff 3 | b - a
        let m = RatMatrix::from_i64_rows(&[&[1, 0], &[1, 3]]);
        let l = RatMatrix::identity(2);
        let idx = sublattice_index(&l, &m).unwrap().unwrap();
        // brute-force coset count in the box [0,3)^2
        let mut classes: Vec<(i64, i64)> = Vec::new();
        for x in 0..3i64 {
            for y in 0..3i64 {
                let in_m = |a: i64, b: i64| (b - a).rem_euclid(3) == 0;
                if !classes.iter().any(|&(cx, cy)| in_m(x - cx, y - cy)) {
                    classes.push((x, y));
                }
            }
        }
        assert_eq!(idx, BigInt::from(classes.len()));
        assert_eq!(idx, BigInt::from(3));
    }

    #[test]
    fn quotient_by_doubled_lattice() {
        let g = finite_quotient(&RatMatrix::identity(2), &diag2(2, 2)).unwrap();
        assert_eq!(g.invariant_factors, vec![BigInt::from(2), BigInt::from(2)]);
        assert_eq!(g.order(), BigInt::from(4));
        let g = finite_quotient(&RatMatrix::identity(2), &RatMatrix::identity(2)).unwrap();
        assert!(g.is_trivial());
    }

    #[test]
    fn quotient_by_skew_sublattice() {
        let m = RatMatrix::from_i64_rows(&[&[1, 0], &[1, 3]]);
        let g = finite_quotient(&RatMatrix::identity(2), &m).unwrap();
        assert_eq!(g.invariant_factors, vec![BigInt::from(3)]);
        let expected = RatMatrix::new(2, 1, vec![rat(0), crate::matrix::ratq(1, 3)]).unwrap();
        assert_eq!(g.generators[0], expected);
    }

    #[test]
    fn quotient_rejects_non_sublattice() {
        let m = RatMatrix::from_i64_rows(&[&[1, 0], &[0, 3]]);
        let l = diag2(2, 2);
        assert!(matches!(finite_quotient(&l, &m), Err(Error::NotSublattice)));
    }

    fn int_matrix(rows: usize, cols: usize, bound: i64) -> impl Strategy<Value = RatMatrix> {
        proptest::collection::vec(-bound..=bound, rows * cols).prop_map(move |v| {
            RatMatrix::new(rows, cols, v.into_iter().map(rat).collect()).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn snf_invariants(m in int_matrix(3, 4, 5)) {
            let dec = snf(&m).unwrap();
            prop_assert_eq!(dec.u.mul(&m).unwrap().mul(&dec.v).unwrap(), dec.d.clone());
            prop_assert!(dec.u.is_integral() && dec.v.is_integral());
            prop_assert_eq!(dec.u.determinant().unwrap().numer().abs(), BigInt::one());
            prop_assert_eq!(dec.v.determinant().unwrap().numer().abs(), BigInt::one());
        }

        #[test]
        fn solve_agrees_with_brute_force(
            m in int_matrix(2, 2, 3),
            b in proptest::collection::vec(-4i64..=4, 2),
        ) {
            let bvec = RatMatrix::col_from_i64(&b);
            let found = lattice_solve(&m, &bvec).unwrap();
            // Hadamard-style bound: |x_i| <= 40 suffices for entries <= 3, |b| <= 4
            let mut brute = None;
            'search: for x1 in -40i64..=40 {
                for x2 in -40i64..=40 {
                    let y0 = m.at(0,0).numer() * BigInt::from(x1) + m.at(0,1).numer() * BigInt::from(x2);
                    let y1 = m.at(1,0).numer() * BigInt::from(x1) + m.at(1,1).numer() * BigInt::from(x2);
                    if y0 == BigInt::from(b[0]) && y1 == BigInt::from(b[1]) {
                        brute = Some((x1, x2));
                        break 'search;
                    }
                }
            }
            match (found, brute) {
                (Some(x), _) => {
                    prop_assert_eq!(m.mul(&x).unwrap(), bvec);
                    prop_assert!(x.is_integral());
                }
                (None, None) => {}
                (None, Some(_)) => prop_assert!(false, "solver missed a solution"),
            }
        }

        #[test]
        fn solve_agrees_with_brute_force_dim3(
            m in int_matrix(3, 3, 2),
            b in proptest::collection::vec(-3i64..=3, 3),
        ) {
            let bvec = RatMatrix::col_from_i64(&b);
            let found = lattice_solve(&m, &bvec).unwrap();
            let ment: Vec<i64> = m.entries().iter()
                .map(|e| i64::try_from(e.numer()).unwrap())
                .collect();
            let mut brute = false;
            'search: for x0 in -20i64..=20 {
                for x1 in -20i64..=20 {
                    for x2 in -20i64..=20 {
                        let hit = (0..3).all(|r| {
                            ment[3 * r] * x0 + ment[3 * r + 1] * x1 + ment[3 * r + 2] * x2 == b[r]
                        });
                        if hit {
                            brute = true;
                            break 'search;
                        }
                    }
                }
            }
            match found {
                Some(x) => {
                    prop_assert_eq!(m.mul(&x).unwrap(), bvec);
                    prop_assert!(x.is_integral());
                }
                // brute force searches a sub-box, so it can only certify
                // missed solutions, never spurious ones
                None => prop_assert!(!brute, "solver missed a solution"),
            }
        }

        #[test]
        fn index_times_covolume(m in int_matrix(3, 3, 4)) {
            prop_assume!(!m.determinant().unwrap().is_zero());
            let l = RatMatrix::identity(3);
            let idx = sublattice_index(&l, &m).unwrap().unwrap();
            // covolume(L) * [L:M] = covolume(M)
            prop_assert_eq!(BigRational::from_integer(idx.clone()),
                m.determinant().unwrap().abs());
            let q = finite_quotient(&l, &m).unwrap();
            prop_assert_eq!(q.order(), idx);
        }

        #[test]
        fn quotient_generators_have_stated_order(m in int_matrix(3, 3, 4)) {
            prop_assume!(!m.determinant().unwrap().is_zero());
            let q = finite_quotient(&RatMatrix::identity(3), &m).unwrap();
            for (d, g) in q.invariant_factors.iter().zip(&q.generators) {
                let scaled = g.scale(&BigRational::from_integer(d.clone()));
                prop_assert!(scaled.is_integral());
                let mut k = BigInt::one();
                while &k < d {
                    prop_assert!(!g.scale(&BigRational::from_integer(k.clone())).is_integral());
                    k += 1;
                }
            }
        }
    }
}
