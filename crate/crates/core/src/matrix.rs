//! Dense matrices over a [`Field`] with exact Gaussian elimination.

use std::fmt;

use crate::error::{param, Error, Result};
use crate::field::{Field, FieldElement};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field.spec())?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn new(field: &Field, rows: usize, cols: usize, data: Vec<FieldElement>) -> Result<Self> {
        if data.len() != rows * cols {
            return param(format!("{rows}x{cols} matrix needs {} entries, got {}", rows * cols, data.len()));
        }
        if let Some(bad) = data.iter().find(|x| !field.contains(**x)) {
            return param(format!("{bad} is not an element of {}", field.spec()));
        }
        Ok(Matrix { field: field.clone(), rows, cols, data })
    }

    /// Builds a matrix from integer rows; every row must have the same length.
    pub fn from_rows<R: AsRef<[u32]>>(field: &Field, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return param("ragged rows");
            }
            for &v in r {
                data.push(field.elem(v)?);
            }
        }
        Matrix::new(field, rows.len(), cols, data)
    }

    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols, data: vec![FieldElement::ZERO; rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    /// Row i holds `points[i]^j` for j = 0..cols.
    ///
    /// Points must be distinct and nonzero so that every square block of
    /// consecutive columns stays invertible.
    pub fn vandermonde(field: &Field, points: &[FieldElement], cols: usize) -> Result<Self> {
        if cols == 0 {
            return param("vandermonde matrix needs at least one column");
        }
        if points.len() as u32 >= field.order() {
            return param(format!("{} points need a field larger than {}", points.len(), field.spec()));
        }
        for (i, p) in points.iter().enumerate() {
            if !field.contains(*p) {
                return param(format!("{p} is not an element of {}", field.spec()));
            }
            if p.is_zero() {
                return param("evaluation point 0 is not allowed");
            }
            if points[..i].contains(p) {
                return param(format!("duplicate evaluation point {p}"));
            }
        }
        let mut data = Vec::with_capacity(points.len() * cols);
        for &p in points {
            let mut x = FieldElement::ONE;
            for _ in 0..cols {
                data.push(x);
                x = field.mul(x, p);
            }
        }
        Ok(Matrix { field: field.clone(), rows: points.len(), cols, data })
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

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [FieldElement] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Integer view, handy for comparisons in tests and reports.
    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).iter().map(|x| x.value() as u32).collect()).collect()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        Matrix { field: self.field.clone(), rows: idx.len(), cols: self.cols, data }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for r in 0..self.rows {
            let row = self.row(r);
            data.extend(idx.iter().map(|&c| row[c]));
        }
        Matrix { field: self.field.clone(), rows: self.rows, cols: idx.len(), data }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        self.same_field(other)?;
        if self.rows != other.rows {
            return param(format!("hstack of {} and {} rows", self.rows, other.rows));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(Matrix { field: self.field.clone(), rows: self.rows, cols, data })
    }

    fn same_field(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return param(format!("operands over different fields ({} and {})", self.field.spec(), other.field.spec()));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return param(format!("cannot multiply {}x{} by {}x{}", self.rows, self.cols, other.rows, other.cols));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if !a.is_zero() {
                    // dst += a * other[k]  ==  dst -= (-a) * other[k]
                    f.sub_scaled(dst, other.row(k), f.neg(a));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if v.len() != self.cols {
            return param(format!("vector of length {} for {} columns", v.len(), self.cols));
        }
        Ok((0..self.rows).map(|r| self.field.dot(self.row(r), v)).collect())
    }

    /// Reduces in place to reduced row echelon form and returns the pivot
    /// columns. Pivots are the first nonzero entry, lowest row index first.
    pub fn rref(&mut self) -> Vec<usize> {
        self.eliminate(self.cols, true)
    }

    /// Forward elimination over the first `limit` columns; with `reduce` the
    /// entries above each pivot are cleared as well.
    fn eliminate(&mut self, limit: usize, reduce: bool) -> Vec<usize> {
        let f = self.field.clone();
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut prow = 0;
        for c in 0..limit {
            if prow == self.rows {
                break;
            }
            let Some(found) = (prow..self.rows).find(|&r| !self.get(r, c).is_zero()) else {
                continue;
            };
            if found != prow {
                for j in 0..cols {
                    self.data.swap(found * cols + j, prow * cols + j);
                }
            }
            let inv = f.inv(self.get(prow, c)).expect("pivot is nonzero");
            f.scale(&mut self.data[prow * cols + c..(prow + 1) * cols], inv);
            let pivot: Vec<FieldElement> = self.data[prow * cols + c..(prow + 1) * cols].to_vec();
            let start = if reduce { 0 } else { prow + 1 };
            for r in start..self.rows {
                if r == prow {
                    continue;
                }
                let factor = self.get(r, c);
                if !factor.is_zero() {
                    f.sub_scaled(&mut self.data[r * cols + c..(r + 1) * cols], &pivot, factor);
                }
            }
            pivots.push(c);
            prow += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.eliminate(m.cols, false).len()
    }

    /// Solves `self * x = rhs` for square, invertible `self`.
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix> {
        self.same_field(rhs)?;
        if self.rows != self.cols {
            return param(format!("solve needs a square matrix, got {}x{}", self.rows, self.cols));
        }
        if rhs.rows != self.rows {
            return param(format!("right-hand side has {} rows, expected {}", rhs.rows, self.rows));
        }
        let n = self.rows;
        let mut aug = self.hstack(rhs)?;
        let pivots = aug.eliminate(n, true);
        if pivots.len() < n {
            return Err(Error::Singular { rank: pivots.len() });
        }
        Ok(aug.select_cols(&(n..n + rhs.cols).collect::<Vec<_>>()))
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.solve(&Matrix::identity(&self.field, self.rows))
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }
}
