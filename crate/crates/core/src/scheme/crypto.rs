//! Key derivation and the authenticated cipher.
//!
//! Both keys are `SHA-256(len(tag) ‖ tag ‖ encode(projection) ‖ counter)`,
//! where `encode` is the vector wire format (`u32` dimension, fixed-width
//! big-endian coordinates) and `counter` is the challenge nonce or the
//! broadcast epoch as a big-endian `u64`.
//!
//! The cipher is ChaCha20-Poly1305 keyed with the 32-byte derived key; the
//! 96-bit nonce is the challenge nonce left-padded with four zero bytes.

use std::fmt;

use chacha20poly1305::aead::{Aead, KeyInit, Payload};
use chacha20poly1305::{ChaCha20Poly1305, Key, Nonce};
use sha2::{Digest, Sha256};

use super::messages::GroupKeyBroadcast;
use super::SchemeError;
use crate::linalg::{SubspaceBasis, Vector};

pub const AUTH_KEY_TAG: &[u8] = b"gks-v1/auth-key";
pub const GROUP_KEY_TAG: &[u8] = b"gks-v1/group-key";
const DIGEST_TAG: &[u8] = b"gks-v1/key-digest";

/// A 256-bit symmetric key. `Debug` prints only a digest.
#[derive(Clone, PartialEq, Eq)]
pub struct SymmetricKey([u8; 32]);

impl SymmetricKey {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    /// One-way fingerprint safe to log or compare in transcripts.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update([DIGEST_TAG.len() as u8]);
        h.update(DIGEST_TAG);
        h.update(self.0);
        hex::encode(&h.finalize()[..16])
    }
}

impl fmt::Debug for SymmetricKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymmetricKey({})", self.digest())
    }
}

pub(crate) fn kdf(tag: &[u8], projection: &Vector, counter: u64) -> SymmetricKey {
    let mut h = Sha256::new();
    h.update([tag.len() as u8]);
    h.update(tag);
    h.update(projection.to_bytes());
    h.update(counter.to_be_bytes());
    SymmetricKey(h.finalize().into())
}

/// Key for answering challenge `nonce` with challenge vector `u`.
pub fn auth_key(basis: &SubspaceBasis, u: &Vector, nonce: u64) -> Result<SymmetricKey, SchemeError> {
    Ok(kdf(AUTH_KEY_TAG, &basis.project(u)?, nonce))
}

/// `KDF(Proj_W(broadcast vector) ‖ epoch)` computed from any basis of `W`.
pub fn derive_group_key(basis: &SubspaceBasis, bc: &GroupKeyBroadcast) -> Result<SymmetricKey, SchemeError> {
    Ok(kdf(GROUP_KEY_TAG, &basis.project(&bc.vector)?, bc.epoch))
}

fn aead_nonce(nonce: u64) -> Nonce {
    let mut n = [0u8; 12];
    n[4..].copy_from_slice(&nonce.to_be_bytes());
    n.into()
}

pub(crate) fn seal(key: &SymmetricKey, nonce: u64, aad: &[u8], plaintext: &[u8]) -> Result<Vec<u8>, SchemeError> {
    let cipher = ChaCha20Poly1305::new(Key::from_slice(&key.0));
    cipher
        .encrypt(&aead_nonce(nonce), Payload { msg: plaintext, aad })
        .map_err(|_| SchemeError::Encryption)
}

pub(crate) fn open(key: &SymmetricKey, nonce: u64, aad: &[u8], ciphertext: &[u8]) -> Option<Vec<u8>> {
    let cipher = ChaCha20Poly1305::new(Key::from_slice(&key.0));
    cipher.decrypt(&aead_nonce(nonce), Payload { msg: ciphertext, aad }).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    #[test]
    fn kdf_is_bit_exact() {
        let f = PrimeField::new(101).unwrap();
        let v = Vector::from_u64s(&f, &[1, 2, 3]);
        let mut input = vec![GROUP_KEY_TAG.len() as u8];
        input.extend_from_slice(GROUP_KEY_TAG);
        input.extend_from_slice(&[0, 0, 0, 3, 1, 2, 3]);
        input.extend_from_slice(&7u64.to_be_bytes());
        let expect: [u8; 32] = Sha256::digest(&input).into();
        assert_eq!(kdf(GROUP_KEY_TAG, &v, 7).as_bytes(), &expect);
        assert_ne!(kdf(AUTH_KEY_TAG, &v, 7), kdf(GROUP_KEY_TAG, &v, 7));
        assert_ne!(kdf(GROUP_KEY_TAG, &v, 7), kdf(GROUP_KEY_TAG, &v, 8));
    }

    #[test]
    fn seal_open() {
        let f = PrimeField::new(101).unwrap();
        let k = kdf(AUTH_KEY_TAG, &Vector::from_u64s(&f, &[4]), 1);
        let ct = seal(&k, 1, b"ad", b"hello").unwrap();
        assert_eq!(open(&k, 1, b"ad", &ct).unwrap(), b"hello");
        assert!(open(&k, 2, b"ad", &ct).is_none());
        assert!(open(&k, 1, b"other", &ct).is_none());
        let mut bad = ct.clone();
        bad[0] ^= 1;
        assert!(open(&k, 1, b"ad", &bad).is_none());
    }
}
