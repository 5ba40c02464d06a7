mod common;

use gks_core::scheme::identify_sponsor;
use gks_core::simulator::ci_params;
use gks_core::{
    GroupManager, GroupParams, MemberCredential, PrimeField, PublicKey, RejectReason, SchemeError,
    SubspaceBasis, VerifyOutcome,
};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha20Rng;

fn register<R: Rng>(gm: &mut GroupManager, rng: &mut R) -> MemberCredential {
    loop {
        let x = gm.params().field.random(rng);
        match gm.register_member(&x) {
            Ok(c) => return c,
            Err(SchemeError::DuplicatePublicKey(_) | SchemeError::DegeneratePublicKey(_)) => continue,
            Err(e) => panic!("{e}"),
        }
    }
}

fn small_params(q: u64, m: usize, n: usize, d: usize) -> GroupParams {
    GroupParams::new(PrimeField::new(q).unwrap(), m, n, d).unwrap()
}

fn setup(seed: u64) -> (GroupManager, ChaCha20Rng) {
    let mut rng = common::rng(seed);
    let gm = GroupManager::setup(ci_params(), &mut rng).unwrap();
    (gm, rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn completeness(seed in any::<u64>()) {
        let (mut gm, mut rng) = setup(seed);
        let creds: Vec<_> = (0..3).map(|_| register(&mut gm, &mut rng)).collect();
        for c in &creds {
            let ch = gm.issue_challenge(&mut rng).unwrap();
            let out = gm.verify(&c.respond(&ch).unwrap(), &ch).unwrap();
            prop_assert_eq!(out, VerifyOutcome::Accept { identity: c.public_key().clone(), sponsor_scalar: None });
        }
    }

    #[test]
    fn key_agreement_includes_sponsored(seed in any::<u64>()) {
        let (mut gm, mut rng) = setup(seed);
        let mut creds: Vec<_> = (0..3).map(|_| register(&mut gm, &mut rng)).collect();
        let child = creds[0].sponsor(1, &mut rng).unwrap().credential;
        let grandchild = child.clone().sponsor(1, &mut rng).unwrap().credential;
        creds.push(child);
        creds.push(grandchild);
        let bc = gm.broadcast_group_key(&mut rng).unwrap();
        let expect = gm.group_key(&bc).unwrap();
        for c in &creds {
            let key = c.group_key(&bc).unwrap();
            prop_assert_eq!(key.as_bytes(), expect.as_bytes());
        }
        let next = gm.broadcast_group_key(&mut rng).unwrap();
        prop_assert!(next.epoch > bc.epoch);
        prop_assert_ne!(gm.group_key(&next).unwrap(), expect);
    }

    #[test]
    fn replay_is_always_rejected(seed in any::<u64>()) {
        let (mut gm, mut rng) = setup(seed);
        let c = register(&mut gm, &mut rng);
        let ch = gm.issue_challenge(&mut rng).unwrap();
        let resp = c.respond(&ch).unwrap();
        prop_assert!(gm.verify(&resp, &ch).unwrap().is_accept());
        prop_assert_eq!(gm.verify(&resp, &ch).unwrap_err(), SchemeError::StaleNonce(ch.nonce));
        let fresh = gm.issue_challenge(&mut rng).unwrap();
        prop_assert_eq!(gm.verify(&resp, &fresh).unwrap().reason(), Some(RejectReason::AeadFailure));
    }

    #[test]
    fn sponsor_attribution_recovers_scalar(seed in any::<u64>()) {
        let (mut gm, mut rng) = setup(seed);
        let mut sponsor = register(&mut gm, &mut rng);
        let index = rng.random::<u64>();
        let grant = sponsor.sponsor(index, &mut rng).unwrap();
        let ch = gm.issue_challenge(&mut rng).unwrap();
        let out = gm.verify(&grant.credential.respond(&ch).unwrap(), &ch).unwrap();
        let VerifyOutcome::Accept { identity, sponsor_scalar: Some(t) } = out else {
            return Err(TestCaseError::fail("sponsored member not accepted"));
        };
        prop_assert_eq!(t, grant.scalar);
        prop_assert_eq!(identify_sponsor(&identity).unwrap(), sponsor.public_key().x().clone());
    }

    #[test]
    fn no_cross_group_acceptance(seed in any::<u64>()) {
        let (mut g1, mut rng) = setup(seed);
        let mut g2 = GroupManager::setup(ci_params(), &mut rng).unwrap();
        let c1 = register(&mut g1, &mut rng);
        g2.register_member(c1.public_key().x()).ok();
        let ch = g2.issue_challenge(&mut rng).unwrap();
        let out = g2.verify(&c1.respond(&ch).unwrap(), &ch).unwrap();
        prop_assert!(!out.is_accept());
        let bc = g2.broadcast_group_key(&mut rng).unwrap();
        prop_assert_ne!(c1.group_key(&bc).unwrap(), g2.group_key(&bc).unwrap());
    }

    #[test]
    fn claimed_identity_is_bound(seed in any::<u64>()) {
        let (mut gm, mut rng) = setup(seed);
        let a = register(&mut gm, &mut rng);
        let b = register(&mut gm, &mut rng);
        let ch = gm.issue_challenge(&mut rng).unwrap();
        let mut resp = a.respond(&ch).unwrap();
        resp.claimed = b.public_key().clone();
        prop_assert_eq!(gm.verify(&resp, &ch).unwrap().reason(), Some(RejectReason::AeadFailure));
    }
}

#[test]
fn challenge_vector_mismatch() {
    let (mut gm, mut rng) = setup(1);
    let c = register(&mut gm, &mut rng);
    let ch = gm.issue_challenge(&mut rng).unwrap();
    let wrong = gm.issue_challenge(&mut rng).unwrap();
    let swapped = gks_core::AuthChallenge { nonce: wrong.nonce, vector: ch.vector.clone() };
    let resp = c.respond(&swapped).unwrap();
    assert_eq!(gm.verify(&resp, &swapped).unwrap_err(), SchemeError::UnknownChallenge(wrong.nonce));
    assert_eq!(gm.verify(&resp, &swapped).unwrap_err(), SchemeError::StaleNonce(wrong.nonce));
}

#[test]
fn non_multiple_plaintext_is_caught() {
    // A holder of a basis of W whose first vector is not a multiple of v_1
    // passes the cipher but fails the scalar check.
    let (mut gm, mut rng) = setup(2);
    let c = register(&mut gm, &mut rng);
    let v = c.basis().vectors();
    let mut rotated = v.to_vec();
    rotated[0] = v[0].add(&v[1]).unwrap();
    let other = MemberCredential::new(c.public_key().clone(), SubspaceBasis::new(rotated).unwrap());
    let ch = gm.issue_challenge(&mut rng).unwrap();
    let out = gm.verify(&other.respond(&ch).unwrap(), &ch).unwrap();
    assert_eq!(out.reason(), Some(RejectReason::NotMultipleOfBase));

    let scaled = MemberCredential::new(c.public_key().clone(), c.basis().scaled(&gm.params().field.element(2)).unwrap());
    let ch = gm.issue_challenge(&mut rng).unwrap();
    assert_eq!(gm.verify(&scaled.respond(&ch).unwrap(), &ch).unwrap().reason(), Some(RejectReason::ValueMismatch));
}

#[test]
fn sponsored_scalar_conflict() {
    let (mut gm, mut rng) = setup(3);
    let mut s = register(&mut gm, &mut rng);
    let first = s.clone().sponsor(5, &mut rng).unwrap();
    let second = s.sponsor(5, &mut rng).unwrap();
    assert_ne!(first.scalar, second.scalar);
    let ch = gm.issue_challenge(&mut rng).unwrap();
    assert!(gm.verify(&first.credential.respond(&ch).unwrap(), &ch).unwrap().is_accept());
    let ch = gm.issue_challenge(&mut rng).unwrap();
    let out = gm.verify(&second.credential.respond(&ch).unwrap(), &ch).unwrap();
    assert_eq!(out.reason(), Some(RejectReason::SponsorScalarConflict));
}

#[test]
fn sponsored_key_with_unknown_sponsor() {
    let (mut gm, mut rng) = setup(4);
    let mut s = register(&mut gm, &mut rng);
    let grant = s.sponsor(1, &mut rng).unwrap();
    let f = gm.params().field.clone();
    let ch = gm.issue_challenge(&mut rng).unwrap();
    let mut resp = grant.credential.respond(&ch).unwrap();
    resp.claimed = PublicKey::Sponsored { sponsor: s.public_key().x().add(&f.one()).unwrap(), index: 1 };
    assert_eq!(gm.verify(&resp, &ch).unwrap().reason(), Some(RejectReason::UnknownIdentity));
}

#[test]
fn files_survive_round_trip_and_keep_working() {
    let (mut gm, mut rng) = setup(5);
    let c = register(&mut gm, &mut rng);
    let mut gm = GroupManager::decode(&gm.encode()).unwrap();
    let c = MemberCredential::decode(&c.encode()).unwrap();
    let ch = gm.issue_challenge(&mut rng).unwrap();
    assert!(gm.verify(&c.respond(&ch).unwrap(), &ch).unwrap().is_accept());
}

#[test]
fn small_field_soundness_is_statistical() {
    let params = small_params(101, 8, 4, 8);
    let rep = gks_core::analysis::guessing_experiment(&params, 2_000, &mut common::rng(6)).unwrap();
    assert_eq!(rep.accepts, 0);
    assert!(rep.within_bound());
}
