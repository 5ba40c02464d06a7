//! Linear algebra over `F_q`: vectors in `E = F_q^m`, the symmetric bilinear
//! form `<u, v> = Σ u_k v_k`, Gram matrices and orthogonal projection.
//!
//! The form is not positive-definite over a finite field, so the projection of
//! `v` onto `W = span(B)` is defined algebraically as the unique `g ∈ W` with
//! `v - g ⟂ W`. It exists exactly when the Gram matrix of `B` is invertible,
//! which [`SubspaceBasis`] enforces at construction.

mod basis;
mod matrix;

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::codec::{CodecError, Reader, Writer};
use crate::field::{FieldElement, FieldError, PrimeField, U256};

pub use basis::{GramCache, SubspaceBasis};
pub use matrix::{solve_linear, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("basis vectors are linearly dependent")]
    DependentVectors,
    #[error("Gram matrix of the basis is not invertible")]
    SingularGram,
    #[error("orthogonalized vector {index} is isotropic")]
    IsotropicVector { index: usize },
    #[error("subspace equals the ambient space; no outside vector exists")]
    SubspaceIsAmbient,
    #[error("invalid parameters: {0}")]
    ParameterError(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Inner-product and solve counts for one operation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub inner_products: u64,
    pub solves: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }
}

/// A vector of `E = F_q^m`.
#[derive(Clone, PartialEq, Eq)]
pub struct Vector {
    field: PrimeField,
    coords: Vec<U256>,
}

impl Vector {
    pub fn new(field: &PrimeField, coords: &[FieldElement]) -> Result<Self, LinalgError> {
        if coords.is_empty() {
            return Err(LinalgError::ParameterError("vectors need at least one coordinate".into()));
        }
        let mut raw = Vec::with_capacity(coords.len());
        for c in coords {
            field.check(c.field())?;
            raw.push(c.value());
        }
        Ok(Vector { field: field.clone(), coords: raw })
    }

    /// Coordinates are reduced mod q.
    pub fn from_u64s(field: &PrimeField, coords: &[u64]) -> Self {
        assert!(!coords.is_empty(), "vectors need at least one coordinate");
        Vector {
            field: field.clone(),
            coords: coords.iter().map(|&c| field.element(c).value()).collect(),
        }
    }

    pub fn zero(field: &PrimeField, dim: usize) -> Self {
        Vector { field: field.clone(), coords: vec![U256::ZERO; dim] }
    }

    pub fn random<R: Rng + ?Sized>(field: &PrimeField, dim: usize, rng: &mut R) -> Self {
        Vector {
            field: field.clone(),
            coords: (0..dim).map(|_| field.random_raw(rng)).collect(),
        }
    }

    pub(crate) fn from_raw(field: &PrimeField, coords: Vec<U256>) -> Self {
        Vector { field: field.clone(), coords }
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coord(&self, i: usize) -> FieldElement {
        self.field.from_raw(self.coords[i])
    }

    pub fn coords(&self) -> Vec<FieldElement> {
        self.coords.iter().map(|c| self.field.from_raw(*c)).collect()
    }

    pub(crate) fn raw(&self) -> &[U256] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(U256::is_zero)
    }

    /// Index of the first nonzero coordinate.
    pub fn leading_index(&self) -> Option<usize> {
        self.coords.iter().position(|c| !c.is_zero())
    }

    pub(crate) fn compatible(&self, other: &Vector) -> Result<(), LinalgError> {
        self.field.check(&other.field)?;
        if self.dim() != other.dim() {
            return Err(LinalgError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Vector) -> Result<Vector, LinalgError> {
        self.compatible(rhs)?;
        let f = self.field.raw();
        let coords = self.coords.iter().zip(&rhs.coords).map(|(a, b)| f.add(a, b)).collect();
        Ok(Vector::from_raw(&self.field, coords))
    }

    pub fn sub(&self, rhs: &Vector) -> Result<Vector, LinalgError> {
        self.compatible(rhs)?;
        let f = self.field.raw();
        let coords = self.coords.iter().zip(&rhs.coords).map(|(a, b)| f.sub(a, b)).collect();
        Ok(Vector::from_raw(&self.field, coords))
    }

    pub fn scale(&self, c: &FieldElement) -> Result<Vector, LinalgError> {
        self.field.check(c.field())?;
        Ok(self.scale_raw(&c.value()))
    }

    pub(crate) fn scale_raw(&self, c: &U256) -> Vector {
        let f = self.field.raw();
        Vector::from_raw(&self.field, self.coords.iter().map(|a| f.mul(a, c)).collect())
    }

    /// `self += a * x`
    pub(crate) fn axpy(&mut self, a: &U256, x: &Vector) {
        let f = self.field.raw();
        for (s, b) in self.coords.iter_mut().zip(&x.coords) {
            *s = f.add(s, &f.mul(a, b));
        }
    }

    pub(crate) fn dot_raw(&self, other: &Vector) -> U256 {
        self.field.raw().dot(&self.coords, &other.coords)
    }

    /// `u32` dimension header, then fixed-width coordinates.
    pub fn encode(&self, w: &mut Writer) {
        w.u32(self.dim() as u32);
        let len = self.field.byte_len();
        for c in &self.coords {
            w.raw(&c.to_be_bytes(len));
        }
    }

    pub fn decode(r: &mut Reader<'_>, field: &PrimeField) -> Result<Vector, CodecError> {
        let dim = r.count(field.byte_len())?;
        if dim == 0 {
            return Err(CodecError::Invalid("zero-dimensional vector".into()));
        }
        let coords = (0..dim).map(|_| r.element(field).map(|e| e.value())).collect::<Result<_, _>>()?;
        Ok(Vector::from_raw(field, coords))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.encode(&mut w);
        w.finish()
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// The symmetric bilinear form `Σ u_k v_k mod q`. Counts one inner product.
pub fn bilinear(u: &Vector, v: &Vector, counter: &mut OpCounter) -> Result<FieldElement, LinalgError> {
    u.compatible(v)?;
    counter.inner_products += 1;
    Ok(u.field.from_raw(u.dot_raw(v)))
}
