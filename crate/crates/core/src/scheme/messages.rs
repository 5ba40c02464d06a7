use std::fmt;

use super::{PublicKey, SchemeError};
use crate::codec::{Reader, Writer};
use crate::field::{FieldElement, PrimeField};
use crate::linalg::Vector;

/// The manager's challenge: a vector outside `W` and a single-use nonce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthChallenge {
    pub nonce: u64,
    pub vector: Vector,
}

impl AuthChallenge {
    pub fn encode(&self, w: &mut Writer) {
        w.u64(self.nonce);
        self.vector.encode(w);
    }

    pub fn decode(r: &mut Reader<'_>, field: &PrimeField) -> Result<Self, SchemeError> {
        Ok(AuthChallenge { nonce: r.u64()?, vector: Vector::decode(r, field)? })
    }
}

/// A member's answer: its claimed identity and the sealed first basis vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthResponse {
    pub claimed: PublicKey,
    pub ciphertext: Vec<u8>,
}

impl AuthResponse {
    /// Associated data: challenge nonce, then the claimed key encoding.
    pub(crate) fn associated_data(claimed: &PublicKey, nonce: u64) -> Vec<u8> {
        let mut w = Writer::new();
        w.u64(nonce);
        claimed.encode(&mut w);
        w.finish()
    }

    pub fn encode(&self, w: &mut Writer) {
        self.claimed.encode(w);
        w.u32(self.ciphertext.len() as u32).raw(&self.ciphertext);
    }

    pub fn decode(r: &mut Reader<'_>, field: &PrimeField) -> Result<Self, SchemeError> {
        let claimed = PublicKey::decode(r, field)?;
        let len = r.count(1)?;
        Ok(AuthResponse { claimed, ciphertext: r.take(len)?.to_vec() })
    }
}

/// Public vector from which every holder of a basis of `W` derives the group key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupKeyBroadcast {
    pub epoch: u64,
    pub vector: Vector,
}

impl GroupKeyBroadcast {
    pub fn encode(&self, w: &mut Writer) {
        w.u64(self.epoch);
        self.vector.encode(w);
    }

    pub fn decode(r: &mut Reader<'_>, field: &PrimeField) -> Result<Self, SchemeError> {
        Ok(GroupKeyBroadcast { epoch: r.u64()?, vector: Vector::decode(r, field)? })
    }
}

/// Which verification check failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RejectReason {
    /// Claimed direct key is not registered, or a sponsored key names an
    /// unregistered sponsor.
    UnknownIdentity,
    /// The tag did not verify: the responder does not hold a basis of `W`.
    AeadFailure,
    /// The plaintext is not an encoded vector of `E`.
    MalformedPlaintext,
    /// The decrypted vector is not a multiple of `v_1`.
    NotMultipleOfBase,
    /// The recovered scalar differs from `f(x)` for a direct key.
    ValueMismatch,
    /// The recovered scalar is zero.
    ZeroScalar,
    /// A sponsored key was previously accepted with a different scalar.
    SponsorScalarConflict,
}

impl RejectReason {
    pub fn code(&self) -> &'static str {
        match self {
            RejectReason::UnknownIdentity => "unknown-identity",
            RejectReason::AeadFailure => "aead-failure",
            RejectReason::MalformedPlaintext => "malformed-plaintext",
            RejectReason::NotMultipleOfBase => "not-multiple-of-base",
            RejectReason::ValueMismatch => "value-mismatch",
            RejectReason::ZeroScalar => "zero-scalar",
            RejectReason::SponsorScalarConflict => "sponsor-scalar-conflict",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Result of checking one response. Rejections name the claimed identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyOutcome {
    Accept {
        identity: PublicKey,
        /// For sponsored keys: the scalar the sponsor applied, `ρ / f(x)`.
        sponsor_scalar: Option<FieldElement>,
    },
    Reject {
        identity: PublicKey,
        reason: RejectReason,
    },
}

impl VerifyOutcome {
    pub fn is_accept(&self) -> bool {
        matches!(self, VerifyOutcome::Accept { .. })
    }

    pub fn identity(&self) -> &PublicKey {
        match self {
            VerifyOutcome::Accept { identity, .. } | VerifyOutcome::Reject { identity, .. } => identity,
        }
    }

    pub fn reason(&self) -> Option<RejectReason> {
        match self {
            VerifyOutcome::Reject { reason, .. } => Some(*reason),
            VerifyOutcome::Accept { .. } => None,
        }
    }

    pub fn encode(&self, w: &mut Writer) {
        match self {
            VerifyOutcome::Accept { identity, sponsor_scalar } => {
                w.u8(1);
                identity.encode(w);
                match sponsor_scalar {
                    Some(t) => w.u8(1).element(t),
                    None => w.u8(0),
                };
            }
            VerifyOutcome::Reject { identity, reason } => {
                w.u8(2);
                identity.encode(w);
                w.bytes16(reason.code().as_bytes());
            }
        }
    }
}

impl fmt::Display for VerifyOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyOutcome::Accept { identity, sponsor_scalar: None } => write!(f, "Accept {identity}"),
            VerifyOutcome::Accept { identity, sponsor_scalar: Some(t) } => {
                write!(f, "Accept {identity} sponsor={} scalar={t}", identity.x())
            }
            VerifyOutcome::Reject { identity, reason } => write!(f, "Reject {identity} reason={reason}"),
        }
    }
}
