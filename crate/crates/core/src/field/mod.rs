//! Prime-field arithmetic and univariate polynomials.

mod arith;
mod poly;
mod primality;
mod uint;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigUint;
use rand::Rng;
use thiserror::Error;

pub(crate) use arith::Arith;
pub use poly::Polynomial;
pub use primality::is_prime;
pub use uint::U256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(String),
    #[error("modulus must be below 2^256")]
    ModulusTooLarge,
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("value is not a canonical residue")]
    NonCanonical,
    #[error("polynomial degree must be at least 1")]
    InvalidDegree,
    #[error("cannot parse integer: {0}")]
    Parse(String),
}

struct FieldInner {
    arith: Arith,
    modulus: U256,
    bits: u32,
    byte_len: usize,
}

/// The prime field `F_q`. Cheap to clone; all clones share one context.
#[derive(Clone)]
pub struct PrimeField(Arc<FieldInner>);

impl PrimeField {
    pub fn new(q: u64) -> Result<Self, FieldError> {
        Self::from_biguint(&BigUint::from(q))
    }

    pub fn from_biguint(q: &BigUint) -> Result<Self, FieldError> {
        let modulus = U256::from_biguint(q).ok_or(FieldError::ModulusTooLarge)?;
        if !is_prime(q) {
            return Err(FieldError::NotPrime(q.to_string()));
        }
        let bits = modulus.bits();
        Ok(PrimeField(Arc::new(FieldInner {
            arith: Arith::new(modulus),
            modulus,
            bits,
            byte_len: bits.div_ceil(8) as usize,
        })))
    }

    pub fn from_be_bytes(bytes: &[u8]) -> Result<Self, FieldError> {
        Self::from_biguint(&BigUint::from_bytes_be(bytes))
    }

    /// Accepts decimal or `0x`-prefixed hexadecimal.
    pub fn parse(s: &str) -> Result<Self, FieldError> {
        Self::from_biguint(&parse_biguint(s)?)
    }

    pub fn modulus(&self) -> U256 {
        self.0.modulus
    }

    pub fn bits(&self) -> u32 {
        self.0.bits
    }

    /// Width of one serialized element: `ceil(bitlen(q) / 8)`.
    pub fn byte_len(&self) -> usize {
        self.0.byte_len
    }

    pub fn zero(&self) -> FieldElement {
        self.wrap(U256::ZERO)
    }

    pub fn one(&self) -> FieldElement {
        self.wrap(self.0.arith.reduce(&U256::ONE))
    }

    /// `v mod q`.
    pub fn element(&self, v: u64) -> FieldElement {
        self.wrap(self.0.arith.reduce(&U256::from_u64(v)))
    }

    pub fn element_from_biguint(&self, v: &BigUint) -> FieldElement {
        let r = v % self.modulus().to_biguint();
        self.wrap(U256::from_biguint(&r).expect("residue fits"))
    }

    /// Rejects values outside `[0, q)`.
    pub fn element_canonical(&self, v: U256) -> Result<FieldElement, FieldError> {
        if v < self.0.modulus {
            Ok(self.wrap(v))
        } else {
            Err(FieldError::NonCanonical)
        }
    }

    pub fn parse_element(&self, s: &str) -> Result<FieldElement, FieldError> {
        Ok(self.element_from_biguint(&parse_biguint(s)?))
    }

    /// Decodes one fixed-width big-endian element.
    pub fn element_from_bytes(&self, bytes: &[u8]) -> Result<FieldElement, FieldError> {
        if bytes.len() != self.byte_len() {
            return Err(FieldError::NonCanonical);
        }
        let v = U256::from_be_slice(bytes).ok_or(FieldError::NonCanonical)?;
        self.element_canonical(v)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        self.wrap(self.random_raw(rng))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        loop {
            let v = self.random_raw(rng);
            if !v.is_zero() {
                return self.wrap(v);
            }
        }
    }

    fn wrap(&self, value: U256) -> FieldElement {
        FieldElement { field: self.clone(), value }
    }

    pub(crate) fn same(&self, other: &PrimeField) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.modulus == other.0.modulus
    }

    pub(crate) fn check(&self, other: &PrimeField) -> Result<(), FieldError> {
        if self.same(other) {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub(crate) fn raw(&self) -> &Arith {
        &self.0.arith
    }

    pub(crate) fn random_raw<R: Rng + ?Sized>(&self, rng: &mut R) -> U256 {
        self.0.arith.random(rng)
    }

    pub(crate) fn from_raw(&self, value: U256) -> FieldElement {
        debug_assert!(value < self.0.modulus);
        self.wrap(value)
    }
}

impl PartialEq for PrimeField {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

impl Eq for PrimeField {}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.modulus)
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.modulus)
    }
}

fn parse_biguint(s: &str) -> Result<BigUint, FieldError> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => BigUint::parse_bytes(hex.as_bytes(), 16),
        None => BigUint::parse_bytes(s.as_bytes(), 10),
    };
    parsed.ok_or_else(|| FieldError::Parse(s.to_string()))
}

/// An element of a [`PrimeField`], always held as its least nonnegative residue.
#[derive(Clone)]
pub struct FieldElement {
    field: PrimeField,
    value: U256,
}

impl FieldElement {
    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn value(&self) -> U256 {
        self.value
    }

    pub fn to_biguint(&self) -> BigUint {
        self.value.to_biguint()
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn add(&self, rhs: &FieldElement) -> Result<FieldElement, FieldError> {
        self.field.check(&rhs.field)?;
        Ok(self.field.wrap(self.field.raw().add(&self.value, &rhs.value)))
    }

    pub fn sub(&self, rhs: &FieldElement) -> Result<FieldElement, FieldError> {
        self.field.check(&rhs.field)?;
        Ok(self.field.wrap(self.field.raw().sub(&self.value, &rhs.value)))
    }

    pub fn mul(&self, rhs: &FieldElement) -> Result<FieldElement, FieldError> {
        self.field.check(&rhs.field)?;
        Ok(self.field.wrap(self.field.raw().mul(&self.value, &rhs.value)))
    }

    pub fn div(&self, rhs: &FieldElement) -> Result<FieldElement, FieldError> {
        self.mul(&rhs.inv()?)
    }

    pub fn neg(&self) -> FieldElement {
        self.field.wrap(self.field.raw().neg(&self.value))
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        self.field
            .raw()
            .inv(&self.value)
            .map(|v| self.field.wrap(v))
            .ok_or(FieldError::DivisionByZero)
    }

    pub fn pow(&self, exp: u64) -> FieldElement {
        self.field.wrap(self.field.raw().pow(&self.value, &U256::from_u64(exp)))
    }

    /// Fixed-width big-endian encoding of length `field.byte_len()`.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.value.to_be_bytes(self.field.byte_len())
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.field.same(&other.field)
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.modulus().hash(state);
        self.value.hash(state);
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.field
            .modulus()
            .cmp(&other.field.modulus())
            .then(self.value.cmp(&other.value))
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.field.modulus())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    #[test]
    fn construction() {
        assert!(PrimeField::new(7).is_ok());
        assert!(PrimeField::new(101).is_ok());
        assert_eq!(PrimeField::new(15).unwrap_err(), FieldError::NotPrime("15".into()));
        assert!(matches!(PrimeField::new(1), Err(FieldError::NotPrime(_))));
        assert!(matches!(PrimeField::new(0), Err(FieldError::NotPrime(_))));
        let big = BigUint::from(1u8) << 256;
        assert_eq!(PrimeField::from_biguint(&big).unwrap_err(), FieldError::ModulusTooLarge);
        let p = PrimeField::parse("340282366920938463463374607431768211297").unwrap();
        assert_eq!(p.bits(), 128);
        assert_eq!(p.byte_len(), 16);
        assert_eq!(PrimeField::parse("0x65").unwrap().modulus(), U256::from_u64(101));
    }

    #[test]
    fn small_field_examples() {
        let f = f7();
        let (a, b) = (f.element(3), f.element(5));
        assert_eq!(a.add(&b).unwrap(), f.element(1));
        assert_eq!(a.inv().unwrap(), f.element(5));
        assert_eq!(f.zero().add(&a).unwrap(), a);
        assert_eq!(f.zero().inv().unwrap_err(), FieldError::DivisionByZero);
        assert_eq!(f.element(10), f.element(3));
        assert_eq!(a.neg(), f.element(4));
        assert_eq!(a.div(&b).unwrap().mul(&b).unwrap(), a);
    }

    #[test]
    fn cross_field_rejected() {
        let a = f7().element(3);
        let b = PrimeField::new(11).unwrap().element(3);
        assert_eq!(a.add(&b).unwrap_err(), FieldError::FieldMismatch);
        assert_eq!(a.mul(&b).unwrap_err(), FieldError::FieldMismatch);
        assert_ne!(a, b);
        // Independently constructed handles to the same modulus interoperate.
        assert_eq!(a.add(&f7().element(1)).unwrap(), f7().element(4));
    }

    #[test]
    fn inverses_exhaustive_small_primes() {
        for q in [2u64, 3, 5, 7, 11, 13, 31, 97, 101] {
            let f = PrimeField::new(q).unwrap();
            for a in 1..q {
                let a = f.element(a);
                assert_eq!(a.inv().unwrap().mul(&a).unwrap(), f.one(), "q={q}");
            }
        }
    }

    #[test]
    fn element_bytes() {
        let f = PrimeField::new(65537).unwrap();
        assert_eq!(f.byte_len(), 3);
        let x = f.element(65536);
        assert_eq!(x.to_bytes(), vec![1, 0, 0]);
        assert_eq!(f.element_from_bytes(&[1, 0, 0]).unwrap(), x);
        assert_eq!(f.element_from_bytes(&[1, 0, 1]).unwrap_err(), FieldError::NonCanonical);
        assert_eq!(f.element_from_bytes(&[0, 1]).unwrap_err(), FieldError::NonCanonical);
    }

    fn field_axioms(f: &PrimeField, a: u64, b: u64, c: u64) -> Result<(), TestCaseError> {
        let (a, b, c) = (f.element(a), f.element(b), f.element(c));
        prop_assert_eq!(a.add(&b)?.add(&c)?, a.add(&b.add(&c)?)?);
        prop_assert_eq!(a.mul(&b)?.mul(&c)?, a.mul(&b.mul(&c)?)?);
        prop_assert_eq!(a.add(&b)?, b.add(&a)?);
        prop_assert_eq!(a.mul(&b)?, b.mul(&a)?);
        prop_assert_eq!(a.mul(&b.add(&c)?)?, a.mul(&b)?.add(&a.mul(&c)?)?);
        prop_assert_eq!(a.add(&f.zero())?, a.clone());
        prop_assert_eq!(a.mul(&f.one())?, a.clone());
        prop_assert_eq!(a.add(&a.neg())?, f.zero());
        if !a.is_zero() {
            prop_assert_eq!(a.mul(&a.inv()?)?, f.one());
        }
        Ok(())
    }

    proptest! {
        #[test]
        fn axioms_small(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            field_axioms(&PrimeField::new(101).unwrap(), a, b, c)?;
            field_axioms(&PrimeField::new(18446744073709551557).unwrap(), a, b, c)?;
        }

        #[test]
        fn axioms_wide(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let f = PrimeField::parse("340282366920938463463374607431768211297").unwrap();
            // spread inputs over the full width
            let big = |x: u64| f.element(x).mul(&f.element(x.rotate_left(17) | 1)).unwrap().pow(3);
            let (a, b, c) = (big(a), big(b), big(c));
            prop_assert_eq!(a.add(&b)?.add(&c)?, a.add(&b.add(&c)?)?);
            prop_assert_eq!(a.mul(&b.add(&c)?)?, a.mul(&b)?.add(&a.mul(&c)?)?);
            if !a.is_zero() {
                prop_assert_eq!(a.mul(&a.inv()?)?, f.one());
            }
        }
    }
}
