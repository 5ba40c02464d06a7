use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

const MR_ROUNDS: usize = 64;

/// Deterministic below 2^64; 64 Miller-Rabin rounds above that.
pub fn is_prime(n: &BigUint) -> bool {
    match n.to_u64() {
        Some(small) if small < 1 << 32 => trial_division(small),
        Some(word) => {
            // These twelve bases are exact for every n < 3.3 * 10^24.
            const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
            if BASES.contains(&word) {
                return true;
            }
            if BASES.iter().any(|b| word % b == 0) {
                return false;
            }
            BASES.iter().all(|&b| miller_rabin_round(n, &BigUint::from(b)))
        }
        None => {
            if !n.bit(0) {
                return false;
            }
            // Bases are drawn from a generator keyed by n so results are reproducible.
            let seed: [u8; 32] = Sha256::digest(n.to_bytes_be()).into();
            let mut rng = ChaCha20Rng::from_seed(seed);
            let three = BigUint::from(3u8);
            let span = n - &three;
            (0..MR_ROUNDS).all(|_| {
                let base = random_below(&mut rng, &span) + 2u8;
                miller_rabin_round(n, &base)
            })
        }
    }
}

fn trial_division(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn miller_rabin_round(n: &BigUint, base: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    let mut x = base.modpow(&d, n);
    if x == one || x == n_minus_one {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_one {
            return true;
        }
    }
    false
}

fn random_below<R: Rng + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    debug_assert!(!bound.is_zero());
    let bytes = bound.to_bytes_be().len();
    loop {
        let mut buf = vec![0u8; bytes];
        rng.fill_bytes(&mut buf);
        let v = BigUint::from_bytes_be(&buf);
        if &v < bound {
            return v;
        }
    }
}
