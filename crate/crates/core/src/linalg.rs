//! Dense exact linear algebra over a characteristic-2 field.
//!
//! Everything here is plain Gaussian elimination; dimensions stay small
//! (≤ 16 in practice) so no effort is spent on asymptotics.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

/// Row-major matrix of exact field elements.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{} ", self.at(r, c))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zero(field: &Field, rows: usize, cols: usize) -> Mat {
        Mat {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Mat {
        let mut m = Mat::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<Elem>>) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Mat { field: field.clone(), rows: r, cols: c, data }
    }

    pub fn from_cols(field: &Field, cols: Vec<Vec<Elem>>) -> Mat {
        let c = cols.len();
        let r = cols.first().map_or(0, |col| col.len());
        let mut m = Mat::zero(field, r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Elem {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vec<Elem> {
        (0..self.cols).map(|c| self.at(r, c).clone()).collect()
    }

    pub fn col(&self, c: usize) -> Vec<Elem> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut m = Mat::zero(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(c, r, self.at(r, c).clone());
            }
        }
        m
    }

    pub fn add(&self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch in add");
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a.add(b))
            .collect();
        Mat { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows, "shape mismatch in mul");
        let mut m = Mat::zero(&self.field, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = m.at(i, j).add(&a.mul(b));
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(self.cols, v.len(), "shape mismatch in mul_vec");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (k, x) in v.iter().enumerate() {
                    if !x.is_zero() && !self.at(i, k).is_zero() {
                        acc = acc.add(&self.at(i, k).mul(x));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, by: &Elem) -> Mat {
        let data = self.data.iter().map(|a| a.mul(by)).collect();
        Mat { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn is_identity(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for r in 0..self.rows {
            for c in 0..self.cols {
                let e = self.at(r, c);
                if (r == c && !e.is_one()) || (r != c && !e.is_zero()) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    /// Reduced row echelon form together with pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..m.cols {
                    let a = m.at(row, c).clone();
                    let b = m.at(p, c).clone();
                    m.set(row, c, b);
                    m.set(p, c, a);
                }
            }
            let inv = m.at(row, col).inv().expect("pivot nonzero");
            for c in 0..m.cols {
                let v = m.at(row, c).mul(&inv);
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r != row && !m.at(r, col).is_zero() {
                    let factor = m.at(r, col).clone();
                    for c in 0..m.cols {
                        let v = m.at(r, c).add(&factor.mul(m.at(row, c)));
                        m.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Option<Mat> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut aug = Mat::zero(&self.field, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.at(r, c).clone());
            }
            aug.set(r, n + r, self.field.one());
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = Mat::zero(&self.field, n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, red.at(r, n + c).clone());
            }
        }
        Some(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Basis of the null space {x : Ax = 0}, echelonized deterministically.
    pub fn kernel_basis(&self) -> Vec<Vec<Elem>> {
        let (red, pivots) = self.rref();
        let mut basis = Vec::new();
        let pivot_set: Vec<usize> = pivots.clone();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![self.field.zero(); self.cols];
            v[free] = self.field.one();
            for (prow, &pcol) in pivot_set.iter().enumerate() {
                // x_pcol = Σ red[prow, free]·x_free (char 2: addition is subtraction)
                v[pcol] = red.at(prow, free).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of Ax = b, if consistent.
    pub fn solve(&self, b: &[Elem]) -> Option<Vec<Elem>> {
        assert_eq!(self.rows, b.len(), "rhs length mismatch");
        let mut aug = Mat::zero(&self.field, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.at(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let (red, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (prow, &pcol) in pivots.iter().enumerate() {
            x[pcol] = red.at(prow, self.cols).clone();
        }
        Some(x)
    }

    /// Column space basis as echelonized rows of the transpose (unique for a
    /// given column space).
    pub fn column_space_rref(&self) -> Mat {
        let (red, pivots) = self.transpose().rref();
        let mut rows = Vec::new();
        for r in 0..pivots.len() {
            rows.push(red.row(r));
        }
        if rows.is_empty() {
            return Mat::zero(&self.field, 0, self.rows);
        }
        Mat::from_rows(&self.field, rows)
    }

    /// Do the columns of `self` and `o` span the same space?
    pub fn same_column_space(&self, o: &Mat) -> bool {
        self.rows == o.rows && self.column_space_rref() == o.column_space_rref()
    }

    pub fn submatrix(&self, rs: std::ops::Range<usize>, cs: std::ops::Range<usize>) -> Mat {
        let mut m = Mat::zero(&self.field, rs.len(), cs.len());
        for (i, r) in rs.clone().enumerate() {
            for (j, c) in cs.clone().enumerate() {
                m.set(i, j, self.at(r, c).clone());
            }
        }
        m
    }

    /// Block-assemble [[a, b], [c, d]].
    pub fn from_blocks(a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Mat {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let mut m = Mat::zero(&a.field, a.rows + c.rows, a.cols + b.cols);
        for r in 0..a.rows {
            for cc in 0..a.cols {
                m.set(r, cc, a.at(r, cc).clone());
            }
            for cc in 0..b.cols {
                m.set(r, a.cols + cc, b.at(r, cc).clone());
            }
        }
        for r in 0..c.rows {
            for cc in 0..c.cols {
                m.set(a.rows + r, cc, c.at(r, cc).clone());
            }
            for cc in 0..d.cols {
                m.set(a.rows + r, c.cols + cc, d.at(r, cc).clone());
            }
        }
        m
    }

    pub fn pow(&self, e: u32) -> Mat {
        assert_eq!(self.rows, self.cols);
        let mut acc = Mat::identity(&self.field, self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Span membership test: is `v` in the row space of `rows`?
pub fn in_span(field: &Field, rows: &[Vec<Elem>], v: &[Elem]) -> bool {
    if rows.is_empty() {
        return v.iter().all(|e| e.is_zero());
    }
    let m = Mat::from_rows(field, rows.to_vec());
    let rank0 = m.rank();
    let mut aug = rows.to_vec();
    aug.push(v.to_vec());
    Mat::from_rows(field, aug).rank() == rank0
}

/// Deterministic echelonized basis of the span of the given vectors.
pub fn span_basis(field: &Field, vecs: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    if vecs.is_empty() {
        return Vec::new();
    }
    let m = Mat::from_rows(field, vecs.to_vec());
    let (red, pivots) = m.rref();
    (0..pivots.len()).map(|r| red.row(r)).collect()
}

/// Check that the two lists of vectors span the same subspace.
pub fn same_span(field: &Field, a: &[Vec<Elem>], b: &[Vec<Elem>]) -> bool {
    span_basis(field, a) == span_basis(field, b)
}

pub fn require_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
