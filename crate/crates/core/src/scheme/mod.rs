//! The protocol: manager setup, member registration, one-by-one
//! authentication, broadcast group-key agreement and member sponsorship.
//!
//! The manager's secrets are a basis `v_1..v_n` of `W ⊂ F_q^m`, nonzero
//! scalars `r_2..r_n` and a polynomial `f` of degree `d`. A member with public
//! key `x` receives the basis
//!
//! ```text
//! { f(x) v_1, f(x) r_2 v_2, ..., f(x) r_n v_n }
//! ```
//!
//! which spans the same `W`. Projections onto `W` are basis independent, so
//! every member and the manager derive the same vector from a public challenge.

mod crypto;
mod manager;
mod member;
mod messages;

use std::fmt;

use thiserror::Error;

use crate::codec::{CodecError, Reader, Writer};
use crate::field::{FieldElement, FieldError, PrimeField};
use crate::linalg::LinalgError;

pub use crypto::{auth_key, derive_group_key, SymmetricKey, AUTH_KEY_TAG, GROUP_KEY_TAG};
pub use manager::{GroupManager, Registration};
pub use member::{MemberCredential, Sponsorship};
pub use messages::{AuthChallenge, AuthResponse, GroupKeyBroadcast, RejectReason, VerifyOutcome};

/// Follows the magic and version of every file holding key material.
pub(crate) const SECRET_MARKER: &[u8] = b"SECRET";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("invalid parameters: {0}")]
    ParameterError(String),
    #[error("public key {0} is already registered")]
    DuplicatePublicKey(PublicKey),
    #[error("f(x) = 0 for public key {0}; it would yield an all-zero basis")]
    DegeneratePublicKey(FieldElement),
    #[error("challenge {0} was never issued by this manager")]
    UnknownChallenge(u64),
    #[error("challenge {0} has already been answered")]
    StaleNonce(u64),
    #[error("public key {0} is not a sponsored key")]
    NotSponsored(PublicKey),
    #[error("sponsorship index {0} already used by this credential")]
    IndexReused(u64),
    #[error("credential does not belong to this group: {0}")]
    ForeignCredential(String),
    #[error("encryption failed")]
    Encryption,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

impl SchemeError {
    /// Stable short code for transcripts and machine output.
    pub fn code(&self) -> &'static str {
        match self {
            SchemeError::ParameterError(_) => "parameter-error",
            SchemeError::DuplicatePublicKey(_) => "duplicate-public-key",
            SchemeError::DegeneratePublicKey(_) => "degenerate-public-key",
            SchemeError::UnknownChallenge(_) => "unknown-challenge",
            SchemeError::StaleNonce(_) => "stale-nonce",
            SchemeError::NotSponsored(_) => "not-sponsored",
            SchemeError::IndexReused(_) => "index-reused",
            SchemeError::ForeignCredential(_) => "foreign-credential",
            SchemeError::Encryption => "encryption",
            SchemeError::Linalg(_) => "linalg",
            SchemeError::Field(_) => "field",
            SchemeError::Codec(_) => "codec",
        }
    }
}

/// Key-derivation function identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KdfId {
    Sha256 = 1,
}

/// Authenticated cipher identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CipherId {
    ChaCha20Poly1305 = 1,
}

/// Public group parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupParams {
    pub field: PrimeField,
    /// `m = dim E`
    pub ambient_dim: usize,
    /// `n = dim W`
    pub subspace_dim: usize,
    /// degree of the manager's polynomial
    pub degree: usize,
    pub kdf: KdfId,
    pub cipher: CipherId,
}

impl GroupParams {
    pub fn new(field: PrimeField, ambient_dim: usize, subspace_dim: usize, degree: usize) -> Result<Self, SchemeError> {
        let p = GroupParams {
            field,
            ambient_dim,
            subspace_dim,
            degree,
            kdf: KdfId::Sha256,
            cipher: CipherId::ChaCha20Poly1305,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), SchemeError> {
        if self.subspace_dim == 0 || self.subspace_dim >= self.ambient_dim {
            return Err(SchemeError::ParameterError(format!(
                "need 1 <= n < m, got n = {}, m = {}",
                self.subspace_dim, self.ambient_dim
            )));
        }
        if self.degree == 0 {
            return Err(SchemeError::ParameterError("polynomial degree must be at least 1".into()));
        }
        Ok(())
    }

    pub(crate) fn encode(&self, w: &mut Writer) {
        w.field(&self.field)
            .u32(self.ambient_dim as u32)
            .u32(self.subspace_dim as u32)
            .u32(self.degree as u32)
            .u8(self.kdf as u8)
            .u8(self.cipher as u8);
    }

    pub(crate) fn decode(r: &mut Reader<'_>) -> Result<Self, SchemeError> {
        let field = r.field()?;
        let (m, n, d) = (r.u32()? as usize, r.u32()? as usize, r.u32()? as usize);
        let kdf = match r.u8()? {
            1 => KdfId::Sha256,
            t => return Err(CodecError::UnknownTag(t).into()),
        };
        let cipher = match r.u8()? {
            1 => CipherId::ChaCha20Poly1305,
            t => return Err(CodecError::UnknownTag(t).into()),
        };
        let p = GroupParams { field, ambient_dim: m, subspace_dim: n, degree: d, kdf, cipher };
        p.validate()?;
        Ok(p)
    }
}

/// A member's public identity.
///
/// Sponsored keys carry the sponsor's own `x`, so anyone can read off who
/// enrolled the holder.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PublicKey {
    Direct(FieldElement),
    Sponsored { sponsor: FieldElement, index: u64 },
}

impl PublicKey {
    /// The `x` the manager evaluates `f` at.
    pub fn x(&self) -> &FieldElement {
        match self {
            PublicKey::Direct(x) | PublicKey::Sponsored { sponsor: x, .. } => x,
        }
    }

    pub fn is_sponsored(&self) -> bool {
        matches!(self, PublicKey::Sponsored { .. })
    }

    pub fn encode(&self, w: &mut Writer) {
        match self {
            PublicKey::Direct(x) => {
                w.u8(1).element(x);
            }
            PublicKey::Sponsored { sponsor, index } => {
                w.u8(2).element(sponsor).u64(*index);
            }
        }
    }

    pub fn decode(r: &mut Reader<'_>, field: &PrimeField) -> Result<Self, CodecError> {
        match r.u8()? {
            1 => Ok(PublicKey::Direct(r.element(field)?)),
            2 => Ok(PublicKey::Sponsored { sponsor: r.element(field)?, index: r.u64()? }),
            t => Err(CodecError::UnknownTag(t)),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.encode(&mut w);
        w.finish()
    }
}

impl fmt::Display for PublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PublicKey::Direct(x) => write!(f, "direct({x})"),
            PublicKey::Sponsored { sponsor, index } => write!(f, "sponsored({sponsor},{index})"),
        }
    }
}

/// Recovers the sponsor's public `x` from a sponsored key. Needs no secrets.
pub fn identify_sponsor(key: &PublicKey) -> Result<FieldElement, SchemeError> {
    match key {
        PublicKey::Sponsored { sponsor, .. } => Ok(sponsor.clone()),
        PublicKey::Direct(_) => Err(SchemeError::NotSponsored(key.clone())),
    }
}
