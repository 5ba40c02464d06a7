use std::fmt;

use super::{LinalgError, Vector};
use crate::field::{Arith, FieldElement, PrimeField, U256};

/// Dense row-major matrix over `F_q`.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<U256>,
}

impl Matrix {
    pub fn zeros(field: &PrimeField, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols, data: vec![U256::ZERO; rows * cols] }
    }

    pub fn identity(field: &PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        let one = field.one().value();
        for i in 0..n {
            m.data[i * n + i] = one;
        }
        m
    }

    /// Entries are reduced mod q. Panics on ragged input.
    pub fn from_u64s(field: &PrimeField, rows: &[&[u64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        let data = rows.iter().flat_map(|r| r.iter().map(|&v| field.element(v).value())).collect();
        Matrix { field: field.clone(), rows: rows.len(), cols, data }
    }

    /// Matrix whose rows are the given vectors.
    pub fn from_rows(rows: &[Vector]) -> Result<Self, LinalgError> {
        let first = rows
            .first()
            .ok_or_else(|| LinalgError::ParameterError("matrix needs at least one row".into()))?;
        let mut data = Vec::with_capacity(rows.len() * first.dim());
        for r in rows {
            first.compatible(r)?;
            data.extend_from_slice(r.raw());
        }
        Ok(Matrix { field: first.field().clone(), rows: rows.len(), cols: first.dim(), data })
    }

    pub(crate) fn from_raw(field: &PrimeField, rows: usize, cols: usize, data: Vec<U256>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Matrix { field: field.clone(), rows, cols, data }
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.field.from_raw(self.data[i * self.cols + j])
    }

    pub(crate) fn raw(&self, i: usize, j: usize) -> &U256 {
        &self.data[i * self.cols + j]
    }

    pub(crate) fn scale_raw(&self, c: &U256) -> Matrix {
        let f = self.field.raw();
        let data = self.data.iter().map(|a| f.mul(a, c)).collect();
        Matrix::from_raw(&self.field, self.rows, self.cols, data)
    }

    pub fn row(&self, i: usize) -> Vector {
        Vector::from_raw(&self.field, self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn mul_vector(&self, x: &Vector) -> Result<Vector, LinalgError> {
        self.field.check(x.field())?;
        if x.dim() != self.cols {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, found: x.dim() });
        }
        let f = self.field.raw();
        let out = (0..self.rows)
            .map(|i| f.dot(&self.data[i * self.cols..(i + 1) * self.cols], x.raw()))
            .collect();
        Ok(Vector::from_raw(&self.field, out))
    }

    pub fn rank(&self) -> usize {
        let mut a = self.data.clone();
        row_echelon(self.field.raw(), self.rows, self.cols, &mut a)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(f, "{:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// Reduces `a` in place to row echelon form, returning the rank.
fn row_echelon(f: &Arith, rows: usize, cols: usize, a: &mut [U256]) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r * cols + col].is_zero()) else {
            continue;
        };
        swap_rows(a, cols, p, rank);
        let inv = f.inv(&a[rank * cols + col]).expect("pivot is nonzero");
        for r in rank + 1..rows {
            let lead = a[r * cols + col];
            if lead.is_zero() {
                continue;
            }
            let factor = f.mul(&lead, &inv);
            for j in col..cols {
                let t = f.mul(&factor, &a[rank * cols + j]);
                a[r * cols + j] = f.sub(&a[r * cols + j], &t);
            }
        }
        rank += 1;
    }
    rank
}

fn swap_rows(a: &mut [U256], cols: usize, i: usize, j: usize) {
    if i != j {
        for k in 0..cols {
            a.swap(i * cols + k, j * cols + k);
        }
    }
}

/// Gaussian elimination with first-nonzero pivoting and back substitution.
pub(crate) fn solve_raw(f: &Arith, n: usize, a: &[U256], b: &[U256]) -> Option<Vec<U256>> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    let mut pivot_inv = Vec::with_capacity(n);
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r * n + col].is_zero())?;
        swap_rows(&mut a, n, p, col);
        b.swap(p, col);
        let inv = f.inv(&a[col * n + col]).expect("pivot is nonzero");
        for r in col + 1..n {
            let lead = a[r * n + col];
            if lead.is_zero() {
                continue;
            }
            let factor = f.mul(&lead, &inv);
            for j in col + 1..n {
                let t = f.mul(&factor, &a[col * n + j]);
                a[r * n + j] = f.sub(&a[r * n + j], &t);
            }
            b[r] = f.sub(&b[r], &f.mul(&factor, &b[col]));
        }
        pivot_inv.push(inv);
    }
    let mut x = vec![U256::ZERO; n];
    for i in (0..n).rev() {
        let tail = f.dot(&a[i * n + i + 1..(i + 1) * n], &x[i + 1..]);
        x[i] = f.mul(&f.sub(&b[i], &tail), &pivot_inv[i]);
    }
    Some(x)
}

/// Solves `A x = b` for square invertible `A`.
pub fn solve_linear(a: &Matrix, b: &Vector) -> Result<Vector, LinalgError> {
    if a.rows != a.cols {
        return Err(LinalgError::ParameterError(format!("{}x{} matrix is not square", a.rows, a.cols)));
    }
    a.field.check(b.field())?;
    if b.dim() != a.rows {
        return Err(LinalgError::DimensionMismatch { expected: a.rows, found: b.dim() });
    }
    let x = solve_raw(a.field.raw(), a.rows, &a.data, b.raw()).ok_or(LinalgError::SingularMatrix)?;
    Ok(Vector::from_raw(&a.field, x))
}
