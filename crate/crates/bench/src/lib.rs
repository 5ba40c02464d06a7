//! Fixtures shared by the benchmarks.

use gks_core::{GroupManager, GroupParams, MemberCredential, PrimeField, SchemeError};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn params(field: PrimeField, m: usize, n: usize, d: usize) -> GroupParams {
    GroupParams::new(field, m, n, d).expect("valid parameters")
}

/// A manager with `members` registered credentials.
pub fn group(params: GroupParams, members: usize, rng: &mut ChaCha20Rng) -> (GroupManager, Vec<MemberCredential>) {
    let mut gm = GroupManager::setup(params, rng).expect("setup");
    let field = gm.params().field.clone();
    let mut creds = Vec::with_capacity(members);
    while creds.len() < members {
        match gm.register_member(&field.random(rng)) {
            Ok(c) => creds.push(c),
            Err(SchemeError::DuplicatePublicKey(_) | SchemeError::DegeneratePublicKey(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
    (gm, creds)
}
