use std::fmt;

use rand::Rng;

use super::{FieldElement, FieldError, PrimeField, U256};
use crate::codec::{CodecError, Reader, Writer};

/// Univariate polynomial over a prime field, coefficients lowest degree first.
///
/// Always normalized: the leading coefficient is nonzero, except for the zero
/// polynomial which is stored as the single coefficient `0`.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    field: PrimeField,
    coeffs: Vec<U256>,
}

impl Polynomial {
    pub fn new(field: &PrimeField, coeffs: &[FieldElement]) -> Result<Self, FieldError> {
        let mut raw = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            field.check(c.field())?;
            raw.push(c.value());
        }
        Ok(Self::from_raw(field.clone(), raw))
    }

    pub fn from_u64s(field: &PrimeField, coeffs: &[u64]) -> Self {
        let raw = coeffs.iter().map(|&c| field.element(c).value()).collect();
        Self::from_raw(field.clone(), raw)
    }

    pub(crate) fn from_raw(field: PrimeField, mut coeffs: Vec<U256>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(U256::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(U256::ZERO);
        }
        Polynomial { field, coeffs }
    }

    pub fn zero(field: &PrimeField) -> Self {
        Self::from_raw(field.clone(), vec![])
    }

    /// Random polynomial of degree exactly `degree`: the leading coefficient
    /// is resampled until nonzero.
    pub fn random<R: Rng + ?Sized>(field: &PrimeField, degree: usize, rng: &mut R) -> Result<Self, FieldError> {
        if degree == 0 {
            return Err(FieldError::InvalidDegree);
        }
        let mut coeffs: Vec<U256> = (0..degree).map(|_| field.random_raw(rng)).collect();
        coeffs.push(field.random_nonzero(rng).value());
        Ok(Polynomial { field: field.clone(), coeffs })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn coefficients(&self) -> Vec<FieldElement> {
        self.coeffs.iter().map(|c| self.field.from_raw(*c)).collect()
    }

    pub fn coefficient(&self, i: usize) -> FieldElement {
        self.field.from_raw(self.coeffs.get(i).copied().unwrap_or(U256::ZERO))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        self.field.check(x.field())?;
        let f = self.field.raw();
        let xv = x.value();
        let acc = self
            .coeffs
            .iter()
            .rev()
            .fold(U256::ZERO, |acc, c| f.add(&f.mul(&acc, &xv), c));
        Ok(self.field.from_raw(acc))
    }

    pub fn scale(&self, c: &FieldElement) -> Result<Self, FieldError> {
        self.field.check(c.field())?;
        let f = self.field.raw();
        let coeffs = self.coeffs.iter().map(|a| f.mul(a, &c.value())).collect();
        Ok(Self::from_raw(self.field.clone(), coeffs))
    }

    pub fn add(&self, rhs: &Polynomial) -> Result<Self, FieldError> {
        self.field.check(&rhs.field)?;
        let f = self.field.raw();
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let get = |v: &[U256], i: usize| v.get(i).copied().unwrap_or(U256::ZERO);
        let coeffs = (0..len).map(|i| f.add(&get(&self.coeffs, i), &get(&rhs.coeffs, i))).collect();
        Ok(Self::from_raw(self.field.clone(), coeffs))
    }

    pub fn mul(&self, rhs: &Polynomial) -> Result<Self, FieldError> {
        self.field.check(&rhs.field)?;
        let f = self.field.raw();
        let mut out = vec![U256::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        Ok(Self::from_raw(self.field.clone(), out))
    }
}

impl Polynomial {
    /// `u32` coefficient count, then fixed-width coefficients, lowest degree first.
    pub fn encode(&self, w: &mut Writer) {
        w.u32(self.coeffs.len() as u32);
        let len = self.field.byte_len();
        for c in &self.coeffs {
            w.raw(&c.to_be_bytes(len));
        }
    }

    pub fn decode(r: &mut Reader<'_>, field: &PrimeField) -> Result<Self, CodecError> {
        let n = r.count(field.byte_len())?;
        let coeffs = (0..n).map(|_| r.element(field).map(|e| e.value())).collect::<Result<Vec<_>, _>>()?;
        if n == 0 || (n > 1 && coeffs[n - 1].is_zero()) {
            return Err(CodecError::Invalid("polynomial is not normalized".into()));
        }
        Ok(Polynomial { field: field.clone(), coeffs })
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(i, c)| !c.is_zero() || (*i == 0 && self.is_zero()))
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}x"),
                _ => format!("{c}x^{i}"),
            })
            .collect();
        write!(f, "{} over {}", terms.join(" + "), self.field)
    }
}
