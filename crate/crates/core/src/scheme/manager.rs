use std::collections::BTreeMap;

use rand::Rng;

use super::crypto::{auth_key, derive_group_key, open, SymmetricKey};
use super::member::MemberCredential;
use super::messages::{AuthChallenge, AuthResponse, GroupKeyBroadcast, RejectReason, VerifyOutcome};
use super::{GroupParams, PublicKey, SchemeError, SECRET_MARKER};
use crate::codec::{CodecError, Reader, Writer};
use crate::field::{FieldElement, Polynomial};
use crate::linalg::{SubspaceBasis, Vector};

const STATE_MAGIC: &str = "GKSG";
const STATE_VERSION: u8 = 1;

/// What the manager remembers about an identity.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Registration {
    /// Set for sponsored keys once their first response is accepted.
    pub sponsor_scalar: Option<FieldElement>,
}

/// The group manager: holds the secret basis, scalars and polynomial, the
/// registry and the challenge ledger.
#[derive(Debug, Clone)]
pub struct GroupManager {
    params: GroupParams,
    basis: SubspaceBasis,
    scalars: Vec<FieldElement>,
    poly: Polynomial,
    registry: BTreeMap<PublicKey, Registration>,
    pending: BTreeMap<u64, Vector>,
    next_nonce: u64,
    next_epoch: u64,
}

impl GroupManager {
    pub fn setup<R: Rng + ?Sized>(params: GroupParams, rng: &mut R) -> Result<Self, SchemeError> {
        params.validate()?;
        let f = &params.field;
        let basis = SubspaceBasis::random(f, params.ambient_dim, params.subspace_dim, rng)?;
        let scalars = (1..params.subspace_dim).map(|_| f.random_nonzero(rng)).collect();
        let poly = Polynomial::random(f, params.degree, rng)?;
        Self::from_parts(params, basis, scalars, poly)
    }

    /// Assembles a manager from explicit secrets, with an empty registry.
    pub fn from_parts(
        params: GroupParams,
        basis: SubspaceBasis,
        scalars: Vec<FieldElement>,
        poly: Polynomial,
    ) -> Result<Self, SchemeError> {
        params.validate()?;
        let bad = |msg: String| Err(SchemeError::ParameterError(msg));
        if basis.field() != &params.field || poly.field() != &params.field {
            return bad("secrets are over a different field".into());
        }
        if basis.dim() != params.subspace_dim || basis.ambient_dim() != params.ambient_dim {
            return bad(format!(
                "basis has shape {}x{}, parameters say {}x{}",
                basis.dim(),
                basis.ambient_dim(),
                params.subspace_dim,
                params.ambient_dim
            ));
        }
        if scalars.len() + 1 != params.subspace_dim {
            return bad(format!("expected {} scalars, got {}", params.subspace_dim - 1, scalars.len()));
        }
        if scalars.iter().any(|r| r.is_zero() || r.field() != &params.field) {
            return bad("scalars must be nonzero elements of the group field".into());
        }
        if poly.degree() != params.degree {
            return bad(format!("polynomial has degree {}, parameters say {}", poly.degree(), params.degree));
        }
        Ok(GroupManager {
            params,
            basis,
            scalars,
            poly,
            registry: BTreeMap::new(),
            pending: BTreeMap::new(),
            next_nonce: 1,
            next_epoch: 1,
        })
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn basis(&self) -> &SubspaceBasis {
        &self.basis
    }

    /// `r_2..r_n`
    pub fn scalars(&self) -> &[FieldElement] {
        &self.scalars
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    pub fn registry(&self) -> &BTreeMap<PublicKey, Registration> {
        &self.registry
    }

    pub fn is_registered(&self, key: &PublicKey) -> bool {
        self.registry.contains_key(key)
    }

    pub fn pending_challenges(&self) -> usize {
        self.pending.len()
    }

    /// The credential basis for `x`, without touching the registry.
    pub fn credential_for(&self, x: &FieldElement) -> Result<MemberCredential, SchemeError> {
        let fx = self.poly.eval(x)?;
        if fx.is_zero() {
            return Err(SchemeError::DegeneratePublicKey(x.clone()));
        }
        let v = self.basis.vectors();
        let mut vectors = Vec::with_capacity(v.len());
        vectors.push(v[0].scale(&fx)?);
        for (vk, r) in v[1..].iter().zip(&self.scalars) {
            vectors.push(vk.scale(&fx.mul(r)?)?);
        }
        let basis = SubspaceBasis::new(vectors)?;
        Ok(MemberCredential::new(PublicKey::Direct(x.clone()), basis))
    }

    pub fn register_member(&mut self, x: &FieldElement) -> Result<MemberCredential, SchemeError> {
        let key = PublicKey::Direct(x.clone());
        if self.registry.contains_key(&key) {
            return Err(SchemeError::DuplicatePublicKey(key));
        }
        let cred = self.credential_for(x)?;
        if !cred.basis().spans_same(&self.basis)? {
            return Err(SchemeError::ForeignCredential("issued basis does not span W".into()));
        }
        self.registry.insert(key, Registration::default());
        Ok(cred)
    }

    pub fn issue_challenge<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<AuthChallenge, SchemeError> {
        let vector = self.basis.sample_outside(rng)?;
        let nonce = self.next_nonce;
        self.next_nonce += 1;
        self.pending.insert(nonce, vector.clone());
        Ok(AuthChallenge { nonce, vector })
    }

    /// Checks a response to one of this manager's challenges. The challenge
    /// is consumed whatever the outcome.
    pub fn verify(&mut self, resp: &AuthResponse, ch: &AuthChallenge) -> Result<VerifyOutcome, SchemeError> {
        match self.pending.get(&ch.nonce) {
            None if ch.nonce == 0 || ch.nonce >= self.next_nonce => return Err(SchemeError::UnknownChallenge(ch.nonce)),
            None => return Err(SchemeError::StaleNonce(ch.nonce)),
            Some(u) if u != &ch.vector => {
                self.pending.remove(&ch.nonce);
                return Err(SchemeError::UnknownChallenge(ch.nonce));
            }
            Some(_) => {
                self.pending.remove(&ch.nonce);
            }
        }

        let identity = resp.claimed.clone();
        let reject = |reason| Ok(VerifyOutcome::Reject { identity: identity.clone(), reason });

        let x = identity.x();
        if x.field() != &self.params.field || !self.registry.contains_key(&PublicKey::Direct(x.clone())) {
            return reject(RejectReason::UnknownIdentity);
        }

        let key = auth_key(&self.basis, &ch.vector, ch.nonce)?;
        let aad = AuthResponse::associated_data(&identity, ch.nonce);
        let Some(plaintext) = open(&key, ch.nonce, &aad, &resp.ciphertext) else {
            return reject(RejectReason::AeadFailure);
        };
        let t = match decode_vector(&plaintext, &self.params) {
            Some(t) => t,
            None => return reject(RejectReason::MalformedPlaintext),
        };

        let v1 = &self.basis.vectors()[0];
        let j = v1.leading_index().expect("basis vectors are nonzero");
        let rho = t.coord(j).div(&v1.coord(j))?;
        if t != v1.scale(&rho)? {
            return reject(RejectReason::NotMultipleOfBase);
        }
        if rho.is_zero() {
            return reject(RejectReason::ZeroScalar);
        }
        let fx = self.poly.eval(x)?;
        match &identity {
            PublicKey::Direct(_) => {
                if rho != fx {
                    return reject(RejectReason::ValueMismatch);
                }
                Ok(VerifyOutcome::Accept { identity, sponsor_scalar: None })
            }
            PublicKey::Sponsored { .. } => {
                let scalar = rho.div(&fx)?;
                let entry = self.registry.entry(identity.clone()).or_default();
                match &entry.sponsor_scalar {
                    Some(prev) if prev != &scalar => return reject(RejectReason::SponsorScalarConflict),
                    _ => entry.sponsor_scalar = Some(scalar.clone()),
                }
                Ok(VerifyOutcome::Accept { identity, sponsor_scalar: Some(scalar) })
            }
        }
    }

    pub fn broadcast_group_key<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<GroupKeyBroadcast, SchemeError> {
        let vector = self.basis.sample_outside(rng)?;
        let epoch = self.next_epoch;
        self.next_epoch += 1;
        Ok(GroupKeyBroadcast { epoch, vector })
    }

    pub fn group_key(&self, bc: &GroupKeyBroadcast) -> Result<SymmetricKey, SchemeError> {
        derive_group_key(&self.basis, bc)
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.raw(STATE_MAGIC.as_bytes()).u8(STATE_VERSION).raw(SECRET_MARKER);
        self.params.encode(&mut w);
        self.basis.encode(&mut w);
        w.u32(self.scalars.len() as u32);
        for r in &self.scalars {
            w.element(r);
        }
        self.poly.encode(&mut w);
        w.u32(self.registry.len() as u32);
        for (key, reg) in &self.registry {
            key.encode(&mut w);
            match &reg.sponsor_scalar {
                Some(t) => w.u8(1).element(t),
                None => w.u8(0),
            };
        }
        w.u32(self.pending.len() as u32);
        for (nonce, u) in &self.pending {
            w.u64(*nonce);
            u.encode(&mut w);
        }
        w.u64(self.next_nonce).u64(self.next_epoch);
        w.finish()
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, SchemeError> {
        let mut r = Reader::new(bytes);
        r.magic(STATE_MAGIC)?;
        let version = r.u8()?;
        if version != STATE_VERSION {
            return Err(CodecError::UnsupportedVersion(version).into());
        }
        if r.take(SECRET_MARKER.len())? != SECRET_MARKER {
            return Err(CodecError::BadMagic { expected: "SECRET" }.into());
        }
        let params = GroupParams::decode(&mut r)?;
        let f = params.field.clone();
        let basis = SubspaceBasis::decode(&mut r, &f)?;
        let count = r.count(f.byte_len())?;
        let scalars = (0..count).map(|_| r.element(&f)).collect::<Result<Vec<_>, _>>()?;
        let poly = Polynomial::decode(&mut r, &f)?;
        let mut gm = Self::from_parts(params, basis, scalars, poly)?;
        for _ in 0..r.count(2)? {
            let key = PublicKey::decode(&mut r, &f)?;
            let sponsor_scalar = match r.u8()? {
                0 => None,
                1 => Some(r.element(&f)?),
                t => return Err(CodecError::UnknownTag(t).into()),
            };
            gm.registry.insert(key, Registration { sponsor_scalar });
        }
        for _ in 0..r.count(12)? {
            let nonce = r.u64()?;
            gm.pending.insert(nonce, Vector::decode(&mut r, &f)?);
        }
        gm.next_nonce = r.u64()?;
        gm.next_epoch = r.u64()?;
        r.finish()?;
        if gm.pending.keys().any(|&n| n == 0 || n >= gm.next_nonce) {
            return Err(CodecError::Invalid("pending challenge nonce out of range".into()).into());
        }
        Ok(gm)
    }
}

fn decode_vector(bytes: &[u8], params: &GroupParams) -> Option<Vector> {
    let mut r = Reader::new(bytes);
    let v = Vector::decode(&mut r, &params.field).ok()?;
    r.finish().ok()?;
    (v.dim() == params.ambient_dim).then_some(v)
}
