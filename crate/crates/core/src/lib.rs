//! Group authentication and key establishment over inner-product spaces.
//!
//! A group manager keeps a secret subspace `W` of `E = F_q^m` together with a
//! basis of it. Every member holds a differently scaled basis of the same `W`;
//! projecting a public vector onto `W` gives the same result from any basis,
//! which is what both authentication and group-key agreement are built on.
//!
//! Modules, bottom-up:
//!
//! * [`field`] prime-field arithmetic and polynomials
//! * [`linalg`] vectors, bilinear form, Gram matrices and projections
//! * [`scheme`] manager setup, registration, authentication, group keys, sponsorship
//! * [`simulator`] in-memory multi-actor runs with adversaries and transcripts
//! * [`analysis`] counting experiments on what an adversary can learn
//! * [`perf`] timing and operation-count harness for projections

pub mod analysis;
pub mod codec;
pub mod field;
pub mod linalg;
pub mod perf;
pub mod scheme;
pub mod simulator;

pub use field::{FieldElement, FieldError, Polynomial, PrimeField, U256};
pub use linalg::{GramCache, LinalgError, Matrix, OpCounter, SubspaceBasis, Vector};
pub use scheme::{
    AuthChallenge, AuthResponse, GroupKeyBroadcast, GroupManager, GroupParams, MemberCredential, PublicKey,
    RejectReason, SchemeError, SymmetricKey, VerifyOutcome,
};
