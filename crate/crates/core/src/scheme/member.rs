use std::collections::BTreeSet;

use rand::Rng;

use super::crypto::{auth_key, derive_group_key, seal, SymmetricKey};
use super::messages::{AuthChallenge, AuthResponse, GroupKeyBroadcast};
use super::{PublicKey, SchemeError, SECRET_MARKER};
use crate::codec::{CodecError, Reader, Writer};
use crate::field::FieldElement;
use crate::linalg::SubspaceBasis;

const CREDENTIAL_MAGIC: &str = "GKSC";
const CREDENTIAL_VERSION: u8 = 1;

/// A member's private basis of `W` and its public key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemberCredential {
    public_key: PublicKey,
    basis: SubspaceBasis,
    sponsored: BTreeSet<u64>,
}

/// Output of [`MemberCredential::sponsor`]. The scalar stays with the sponsor.
#[derive(Debug, Clone)]
pub struct Sponsorship {
    pub credential: MemberCredential,
    pub scalar: FieldElement,
}

impl MemberCredential {
    pub fn new(public_key: PublicKey, basis: SubspaceBasis) -> Self {
        MemberCredential { public_key, basis, sponsored: BTreeSet::new() }
    }

    pub fn public_key(&self) -> &PublicKey {
        &self.public_key
    }

    pub fn basis(&self) -> &SubspaceBasis {
        &self.basis
    }

    /// Indices already handed out by this credential.
    pub fn sponsored_indices(&self) -> &BTreeSet<u64> {
        &self.sponsored
    }

    /// Seals the first basis vector under the key projected from the challenge.
    pub fn respond(&self, ch: &AuthChallenge) -> Result<AuthResponse, SchemeError> {
        let key = auth_key(&self.basis, &ch.vector, ch.nonce)?;
        let aad = AuthResponse::associated_data(&self.public_key, ch.nonce);
        let ciphertext = seal(&key, ch.nonce, &aad, &self.basis.vectors()[0].to_bytes())?;
        Ok(AuthResponse { claimed: self.public_key.clone(), ciphertext })
    }

    pub fn group_key(&self, bc: &GroupKeyBroadcast) -> Result<SymmetricKey, SchemeError> {
        derive_group_key(&self.basis, bc)
    }

    /// Enrolls a new member under `index` with a random nonzero scalar.
    pub fn sponsor<R: Rng + ?Sized>(&mut self, index: u64, rng: &mut R) -> Result<Sponsorship, SchemeError> {
        let scalar = self.basis.field().random_nonzero(rng);
        self.sponsor_with_scalar(index, scalar)
    }

    pub fn sponsor_with_scalar(&mut self, index: u64, scalar: FieldElement) -> Result<Sponsorship, SchemeError> {
        if scalar.is_zero() {
            return Err(SchemeError::ParameterError("sponsor scalar must be nonzero".into()));
        }
        if self.sponsored.contains(&index) {
            return Err(SchemeError::IndexReused(index));
        }
        let basis = self.basis.scaled(&scalar)?;
        self.sponsored.insert(index);
        let public_key = PublicKey::Sponsored { sponsor: self.public_key.x().clone(), index };
        Ok(Sponsorship { credential: MemberCredential::new(public_key, basis), scalar })
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.raw(CREDENTIAL_MAGIC.as_bytes()).u8(CREDENTIAL_VERSION).raw(SECRET_MARKER).field(self.basis.field());
        self.public_key.encode(&mut w);
        self.basis.encode(&mut w);
        w.u32(self.sponsored.len() as u32);
        for i in &self.sponsored {
            w.u64(*i);
        }
        w.finish()
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, SchemeError> {
        let mut r = Reader::new(bytes);
        r.magic(CREDENTIAL_MAGIC)?;
        let version = r.u8()?;
        if version != CREDENTIAL_VERSION {
            return Err(CodecError::UnsupportedVersion(version).into());
        }
        if r.take(SECRET_MARKER.len())? != SECRET_MARKER {
            return Err(CodecError::BadMagic { expected: "SECRET" }.into());
        }
        let field = r.field()?;
        let public_key = PublicKey::decode(&mut r, &field)?;
        let basis = SubspaceBasis::decode(&mut r, &field)?;
        let mut sponsored = BTreeSet::new();
        for _ in 0..r.count(8)? {
            sponsored.insert(r.u64()?);
        }
        r.finish()?;
        Ok(MemberCredential { public_key, basis, sponsored })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::scheme::{GroupManager, GroupParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn setup() -> (GroupManager, ChaCha20Rng) {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let params = GroupParams::new(PrimeField::new(101).unwrap(), 8, 3, 10).unwrap();
        (GroupManager::setup(params, &mut rng).unwrap(), rng)
    }

    #[test]
    fn scaled_basis_gives_same_auth_key() {
        let (mut gm, mut rng) = setup();
        let f = gm.params().field.clone();
        let cred = gm.register_member(&f.element(5)).unwrap();
        let ch = gm.issue_challenge(&mut rng).unwrap();
        let scaled = cred.basis().scaled(&f.element(5)).unwrap();
        assert_eq!(
            auth_key(cred.basis(), &ch.vector, ch.nonce).unwrap(),
            auth_key(&scaled, &ch.vector, ch.nonce).unwrap()
        );
    }

    #[test]
    fn identity_scaling_sponsorship() {
        let (mut gm, mut rng) = setup();
        let f = gm.params().field.clone();
        let mut sponsor = gm.register_member(&f.element(9)).unwrap();
        let grant = sponsor.sponsor_with_scalar(4, f.one()).unwrap();
        assert_eq!(grant.credential.basis(), sponsor.basis());
        assert_ne!(grant.credential.public_key(), sponsor.public_key());
        let ch = gm.issue_challenge(&mut rng).unwrap();
        let out = gm.verify(&grant.credential.respond(&ch).unwrap(), &ch).unwrap();
        assert!(out.is_accept());
        assert!(sponsor.sponsor_with_scalar(5, f.zero()).is_err());
    }

    #[test]
    fn random_basis_is_rejected() {
        let (mut gm, mut rng) = setup();
        let f = gm.params().field.clone();
        gm.register_member(&f.element(2)).unwrap();
        let forged = SubspaceBasis::random(&f, 8, 3, &mut rng).unwrap();
        let fake = MemberCredential::new(PublicKey::Direct(f.element(2)), forged);
        let ch = gm.issue_challenge(&mut rng).unwrap();
        let out = gm.verify(&fake.respond(&ch).unwrap(), &ch).unwrap();
        assert_eq!(out.reason(), Some(super::super::RejectReason::AeadFailure));
    }

    #[test]
    fn credential_file_round_trip() {
        let (mut gm, mut rng) = setup();
        let f = gm.params().field.clone();
        let mut cred = gm.register_member(&f.element(42)).unwrap();
        let child = cred.sponsor(7, &mut rng).unwrap().credential;
        for c in [&cred, &child] {
            let bytes = c.encode();
            assert_eq!(&bytes[..5], b"GKSC\x01");
            assert_eq!(&MemberCredential::decode(&bytes).unwrap(), c);
        }
        assert_eq!(MemberCredential::decode(&cred.encode()).unwrap().sponsored_indices().len(), 1);
        let mut bad = cred.encode();
        bad[4] = 9;
        assert_eq!(MemberCredential::decode(&bad).unwrap_err(), SchemeError::Codec(CodecError::UnsupportedVersion(9)));
    }
}
