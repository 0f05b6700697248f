//! Dense matrices of arbitrary-precision rationals.
//!
//! Every lattice map in this crate is carried by a [`RatMatrix`]. Entries are
//! kept in lowest terms with positive denominator (enforced by
//! `num_rational`), equality is exact entrywise equality, and all operations
//! return new values.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;

use crate::error::{Error, Result};

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for the fraction `p/q`.
pub fn ratq(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Parse a rational written as `"p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let mk_err = || Error::RationalParse(s.to_string());
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(|_| mk_err())?;
            Ok(BigRational::from_integer(n))
        }
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| mk_err())?;
            let q: BigInt = q.trim().parse().map_err(|_| mk_err())?;
            if q.is_zero() {
                return Err(mk_err());
            }
            Ok(BigRational::new(p, q))
        }
    }
}

/// Render a rational as `"p"` or `"p/q"` in lowest terms.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A dense `rows x cols` matrix of exact rationals, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigRational>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "expected {rows}x{cols} = {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(RatMatrix { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        RatMatrix { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| BigRational::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { BigRational::one() } else { BigRational::zero() })
    }

    /// `q * I_n`.
    pub fn scalar(n: usize, q: &BigRational) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { q.clone() } else { BigRational::zero() })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| rat(rows[i][j]))
    }

    pub fn from_str_rows(rows: &[Vec<String>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::Shape("empty matrix".into()));
        }
        let c = rows[0].len();
        let mut entries = Vec::with_capacity(rows.len() * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Shape("ragged rows".into()));
            }
            for s in row {
                entries.push(parse_rational(s)?);
            }
        }
        RatMatrix::new(rows.len(), c, entries)
    }

    pub fn column_vector(entries: Vec<BigRational>) -> Self {
        let rows = entries.len();
        RatMatrix { rows, cols: 1, entries }
    }

    pub fn col_from_i64(entries: &[i64]) -> Self {
        Self::column_vector(entries.iter().map(|&n| rat(n)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && self.entries.iter().enumerate().all(|(k, e)| {
                let (i, j) = (k / self.cols, k % self.cols);
                if i == j { e.is_one() } else { e.is_zero() }
            })
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|e| e.denom().is_one())
    }

    /// First entry (in row-major order) with a nontrivial denominator.
    pub fn first_non_integral(&self) -> Option<(usize, usize, BigRational)> {
        self.entries.iter().enumerate().find_map(|(k, e)| {
            if e.denom().is_one() {
                None
            } else {
                Some((k / self.cols, k % self.cols, e.clone()))
            }
        })
    }

    /// Least common multiple of all entry denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.entries
            .iter()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()))
    }

    pub fn to_bigint_entries(&self) -> Option<Vec<BigInt>> {
        self.entries
            .iter()
            .map(|e| if e.denom().is_one() { Some(e.numer().clone()) } else { None })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| -self.at(i, j))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.at(i, j) * q)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other)?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self.at(i, j) + other.at(i, j)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other)?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self.at(i, j) - other.at(i, j)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = vec![BigRational::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if !b.is_zero() {
                        entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(RatMatrix { rows: self.rows, cols: other.cols, entries })
    }

    fn require_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn block(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        assert!(row0 + rows <= self.rows && col0 + cols <= self.cols, "block out of range");
        Self::from_fn(rows, cols, |i, j| self.at(row0 + i, col0 + j).clone())
    }

    pub fn column(&self, j: usize) -> Self {
        self.block(0, j, self.rows, 1)
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Shape("hstack row mismatch".into()));
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols { self.at(i, j).clone() } else { other.at(i, j - self.cols).clone() }
        }))
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::Shape("vstack column mismatch".into()));
        }
        Ok(Self::from_fn(self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows { self.at(i, j).clone() } else { other.at(i - self.rows, j).clone() }
        }))
    }

    /// Assemble `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        a.hstack(b)?.vstack(&c.hstack(d)?)
    }

    pub fn block_diag(blocks: &[&Self]) -> Self {
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.entries[(r0 + i) * cols + (c0 + j)] = b.at(i, j).clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    /// `n` copies of `self` along the diagonal.
    pub fn diag_repeat(&self, n: usize) -> Self {
        let blocks: Vec<&Self> = std::iter::repeat_n(self, n).collect();
        Self::block_diag(&blocks)
    }

    /// Exact determinant by fraction-aware Gaussian elimination.
    pub fn determinant(&self) -> Result<BigRational> {
        if !self.is_square() {
            return Err(Error::Shape("determinant of non-square matrix".into()));
        }
        let n = self.rows;
        let mut m = self.entries.clone();
        let at = |m: &Vec<BigRational>, i: usize, j: usize| m[i * n + j].clone();
        let mut det = BigRational::one();
        for k in 0..n {
            let pivot_row = (k..n).find(|&i| !at(&m, i, k).is_zero());
            let Some(p) = pivot_row else { return Ok(BigRational::zero()) };
            if p != k {
                for j in 0..n {
                    m.swap(p * n + j, k * n + j);
                }
                det = -det;
            }
            let pivot = at(&m, k, k);
            det *= &pivot;
            for i in k + 1..n {
                let factor = at(&m, i, k) / &pivot;
                if factor.is_zero() {
                    continue;
                }
                for j in k..n {
                    let sub = &factor * &m[k * n + j];
                    m[i * n + j] -= sub;
                }
            }
        }
        Ok(det)
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut m = self.entries.clone();
        let mut inv = RatMatrix::identity(n).entries;
        for k in 0..n {
            let pivot_row = (k..n).find(|&i| !m[i * n + k].is_zero());
            let Some(p) = pivot_row else { return Err(Error::Singular) };
            if p != k {
                for j in 0..n {
                    m.swap(p * n + j, k * n + j);
                    inv.swap(p * n + j, k * n + j);
                }
            }
            let pivot = m[k * n + k].clone();
            for j in 0..n {
                m[k * n + j] /= &pivot;
                inv[k * n + j] /= &pivot;
            }
            for i in 0..n {
                if i == k || m[i * n + k].is_zero() {
                    continue;
                }
                let factor = m[i * n + k].clone();
                for j in 0..n {
                    let a = &factor * &m[k * n + j];
                    m[i * n + j] -= a;
                    let b = &factor * &inv[k * n + j];
                    inv[i * n + j] -= b;
                }
            }
        }
        Ok(RatMatrix { rows: n, cols: n, entries: inv })
    }

    /// Rows of `"p/q"` strings, the canonical wire form.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| format_rational(self.at(i, j))).collect())
            .collect()
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format_rational(self.at(i, j))).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatMatrix({}x{})\n{}", self.rows, self.cols, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small(rows: usize, cols: usize) -> impl Strategy<Value = RatMatrix> {
        proptest::collection::vec(-5i64..=5, rows * cols).prop_map(move |v| {
            RatMatrix::new(rows, cols, v.into_iter().map(rat).collect()).unwrap()
        })
    }

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3", "-2/5", "0", "7/1"] {
            let r = parse_rational(s).unwrap();
            let back = parse_rational(&format_rational(&r)).unwrap();
            assert_eq!(r, back);
        }
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn lowest_terms_invariant() {
        let r = parse_rational("4/-6").unwrap();
        assert_eq!(format_rational(&r), "-2/3");
    }

    #[test]
    fn inverse_of_unimodular_is_integral() {
        let m = RatMatrix::from_i64_rows(&[&[1, 2], &[1, 3]]);
        let inv = m.inverse().unwrap();
        assert!(inv.is_integral());
        assert!(m.mul(&inv).unwrap().is_identity());
    }

    #[test]
    fn determinant_matches_cofactor_small() {
        let m = RatMatrix::from_i64_rows(&[&[2, 1, 0], &[0, 3, -1], &[4, 0, 1]]);
        // brute-force cofactor expansion along the first row
        let det = rat(2) * (rat(3) * rat(1) - rat(-1) * rat(0))
            - rat(1) * (rat(0) * rat(1) - rat(-1) * rat(4));
        assert_eq!(m.determinant().unwrap(), det);
    }

    proptest! {
        #[test]
        fn transpose_involutive(m in small(3, 4)) {
            prop_assert_eq!(m.transpose().transpose(), m);
        }

        #[test]
        fn mul_associative(a in small(2, 3), b in small(3, 2), c in small(2, 2)) {
            let left = a.mul(&b).unwrap().mul(&c).unwrap();
            let right = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn inverse_round_trip(m in small(3, 3)) {
            if let Ok(inv) = m.inverse() {
                prop_assert!(m.mul(&inv).unwrap().is_identity());
                prop_assert!(inv.mul(&m).unwrap().is_identity());
            } else {
                prop_assert!(m.determinant().unwrap().is_zero());
            }
        }

        #[test]
        fn det_multiplicative(a in small(3, 3), b in small(3, 3)) {
            let lhs = a.mul(&b).unwrap().determinant().unwrap();
            let rhs = a.determinant().unwrap() * b.determinant().unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
