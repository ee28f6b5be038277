//! Dense arbitrary-precision integer matrices.
//!
//! Entries are `BigInt` by design: Smith normal form intermediates can grow
//! far beyond any fixed width, and overflow here would be a correctness bug.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

use super::rat_matrix::RatMatrix;
use super::rational::Rational;
use super::LinalgError;

/// Row-major integer matrix. `rows * cols == entries.len()` always.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Convenience constructor from machine integers, row-major.
    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        Self {
            rows,
            cols,
            entries: entries.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }

    /// Row-major 2D construction, mostly for tests and builders.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        Self {
            rows: r,
            cols: c,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    #[inline]
    fn idx(&self, r: usize, c: usize) -> usize {
        debug_assert!(r < self.rows && c < self.cols);
        r * self.cols + c
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[self.idx(r, c)]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        let i = self.idx(r, c);
        self.entries[i] = v;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let i = out.idx(r, c);
                    out.entries[i] += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "matrix has {} columns, vector has {} entries",
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![BigInt::zero(); self.rows];
        for (c, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for r in 0..self.rows {
                let a = self.get(r, c);
                if !a.is_zero() {
                    out[r] += a * x;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec_rational(&self, v: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "matrix has {} columns, vector has {} entries",
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![Rational::zero(); self.rows];
        for (c, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for r in 0..self.rows {
                let a = self.get(r, c);
                if !a.is_zero() {
                    out[r] += Rational::from(a.clone()) * x;
                }
            }
        }
        Ok(out)
    }

    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let mut out = Self::zeros(a.rows + b.rows, a.cols + b.cols);
        for r in 0..a.rows {
            for c in 0..a.cols {
                out.set(r, c, a.get(r, c).clone());
            }
        }
        for r in 0..b.rows {
            for c in 0..b.cols {
                out.set(a.rows + r, a.cols + c, b.get(r, c).clone());
            }
        }
        out
    }

    /// Fraction-free Bareiss determinant. Square matrices only.
    pub fn determinant(&self) -> Result<BigInt, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.entries.clone();
        let at = |m: &Vec<BigInt>, r: usize, c: usize| m[r * n + c].clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if at(&m, k, k).is_zero() {
                // pivot search below
                let mut found = None;
                for r in k + 1..n {
                    if !at(&m, r, k).is_zero() {
                        found = Some(r);
                        break;
                    }
                }
                match found {
                    Some(r) => {
                        for c in 0..n {
                            m.swap(k * n + c, r * n + c);
                        }
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for r in k + 1..n {
                for c in k + 1..n {
                    let v = (at(&m, k, k) * at(&m, r, c) - at(&m, r, k) * at(&m, k, c)) / &prev;
                    m[r * n + c] = v;
                }
                m[r * n + k] = BigInt::zero();
            }
            prev = at(&m, k, k);
        }
        Ok(sign * at(&m, n - 1, n - 1))
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols
            && self
                .determinant()
                .map(|d| d.abs().is_one())
                .unwrap_or(false)
    }

    /// Exact inverse of a unimodular matrix; `None` when |det| != 1.
    pub fn inverse_unimodular(&self) -> Option<Self> {
        if !self.is_unimodular() {
            return None;
        }
        let inv = self.to_rational().inverse()?;
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in inv.entries() {
            debug_assert!(e.is_integer());
            entries.push(e.numer().clone());
        }
        Some(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Inverse transposed, the coefficient duality of the engine.
    pub fn inverse_transpose(&self) -> Option<Self> {
        self.inverse_unimodular().map(|m| m.transpose())
    }

    pub fn to_rational(&self) -> RatMatrix {
        RatMatrix::new(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .map(|e| Rational::from(e.clone()))
                .collect(),
        )
        .expect("dimensions preserved")
    }

    /// Columns [from, to) as a new matrix.
    pub(crate) fn submatrix_cols(&self, from: usize, to: usize) -> Self {
        debug_assert!(from <= to && to <= self.cols);
        let mut out = Self::zeros(self.rows, to - from);
        for r in 0..self.rows {
            for c in from..to {
                out.set(r, c - from, self.get(r, c).clone());
            }
        }
        out
    }

    /// Rows [from, to) as a new matrix.
    pub(crate) fn submatrix_rows(&self, from: usize, to: usize) -> Self {
        debug_assert!(from <= to && to <= self.rows);
        let mut out = Self::zeros(to - from, self.cols);
        for r in from..to {
            for c in 0..self.cols {
                out.set(r - from, c, self.get(r, c).clone());
            }
        }
        out
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    pub(crate) fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let i = r * self.cols + c;
            if !self.entries[i].is_zero() {
                let v = -std::mem::take(&mut self.entries[i]);
                self.entries[i] = v;
            }
        }
    }

    pub(crate) fn negate_col(&mut self, c: usize) {
        for r in 0..self.rows {
            let i = r * self.cols + c;
            if !self.entries[i].is_zero() {
                let v = -std::mem::take(&mut self.entries[i]);
                self.entries[i] = v;
            }
        }
    }

    /// row[dst] += q * row[src], with fast paths for q = +-1
    pub(crate) fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        debug_assert_ne!(dst, src);
        let plus_one = q.is_one();
        let minus_one = !plus_one && (-q).is_one();
        for c in 0..self.cols {
            let s = &self.entries[src * self.cols + c];
            if s.is_zero() {
                continue;
            }
            let s = s.clone();
            let i = dst * self.cols + c;
            if plus_one {
                self.entries[i] += s;
            } else if minus_one {
                self.entries[i] -= s;
            } else {
                self.entries[i] += s * q;
            }
        }
    }

    /// col[dst] += q * col[src], with fast paths for q = +-1
    pub(crate) fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        debug_assert_ne!(dst, src);
        let plus_one = q.is_one();
        let minus_one = !plus_one && (-q).is_one();
        for r in 0..self.rows {
            let s = &self.entries[r * self.cols + src];
            if s.is_zero() {
                continue;
            }
            let s = s.clone();
            let i = r * self.cols + dst;
            if plus_one {
                self.entries[i] += s;
            } else if minus_one {
                self.entries[i] -= s;
            } else {
                self.entries[i] += s * q;
            }
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{} ", self.get(r, c))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_and_unimodularity() {
        let a = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]);
        assert_eq!(a.determinant().unwrap(), BigInt::one());
        assert!(a.is_unimodular());
        let b = IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]);
        assert_eq!(b.determinant().unwrap(), BigInt::from(2));
        assert!(!b.is_unimodular());
        let empty = IntMatrix::zeros(0, 0);
        assert_eq!(empty.determinant().unwrap(), BigInt::one());
    }

    #[test]
    fn inverse_of_unimodular_is_integral() {
        let a = IntMatrix::from_rows(&[vec![1, 0], vec![-3, 1]]);
        let inv = a.inverse_unimodular().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), IntMatrix::identity(2));
        assert!(IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]])
            .inverse_unimodular()
            .is_none());
    }

    #[test]
    fn inverse_transpose_example() {
        // [[1,0],[-1,1]] has inverse transpose [[1,1],[0,1]]
        let a = IntMatrix::from_rows(&[vec![1, 0], vec![-1, 1]]);
        assert_eq!(
            a.inverse_transpose().unwrap(),
            IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]])
        );
    }

    #[test]
    fn block_diag_shape() {
        let a = IntMatrix::identity(2);
        let b = IntMatrix::from_rows(&[vec![5]]);
        let d = IntMatrix::block_diag(&a, &b);
        assert_eq!((d.rows(), d.cols()), (3, 3));
        assert_eq!(d.get(2, 2), &BigInt::from(5));
        assert_eq!(d.get(0, 2), &BigInt::zero());
    }
}
