//! Modular arithmetic kernels on canonical residues.
//!
//! Moduli that fit in one machine word use native `u64`/`u128` arithmetic.
//! Wider odd moduli use Montgomery multiplication over two or four limbs;
//! residues stay canonical outside a single call, Montgomery form is never
//! stored.

use num_bigint::BigUint;
use rand::Rng;

use super::uint::U256;

#[derive(Clone, Debug)]
pub(crate) enum Arith {
    Word(u64),
    Mont2(Montgomery<2>),
    Mont4(Montgomery<4>),
}

#[derive(Clone, Debug)]
pub(crate) struct Montgomery<const N: usize> {
    p: U256,
    /// `-p^{-1} mod 2^64`
    inv: u64,
    /// `R^2 mod p` with `R = 2^(64N)`
    r2: U256,
}

impl<const N: usize> Montgomery<N> {
    fn new(p: U256) -> Self {
        debug_assert!(p.0[0] & 1 == 1, "Montgomery form needs an odd modulus");
        let p0 = p.0[0];
        let mut x: u64 = 1;
        for _ in 0..6 {
            x = x.wrapping_mul(2u64.wrapping_sub(p0.wrapping_mul(x)));
        }
        let r2 = (BigUint::from(1u8) << (128 * N)) % p.to_biguint();
        Montgomery {
            p,
            inv: x.wrapping_neg(),
            r2: U256::from_biguint(&r2).expect("r2 < p"),
        }
    }

    /// `a * b * R^{-1} mod p` for `a, b < p` (CIOS).
    #[inline]
    fn mul(&self, a: &U256, b: &U256) -> U256 {
        let p = &self.p.0;
        let mut t = [0u64; 6];
        for i in 0..N {
            let bi = b.0[i] as u128;
            let mut c: u64 = 0;
            for j in 0..N {
                let s = t[j] as u128 + (a.0[j] as u128) * bi + c as u128;
                t[j] = s as u64;
                c = (s >> 64) as u64;
            }
            let s = t[N] as u128 + c as u128;
            t[N] = s as u64;
            t[N + 1] = (s >> 64) as u64;

            let m = t[0].wrapping_mul(self.inv) as u128;
            let s = t[0] as u128 + m * p[0] as u128;
            let mut c = (s >> 64) as u64;
            for j in 1..N {
                let s = t[j] as u128 + m * p[j] as u128 + c as u128;
                t[j - 1] = s as u64;
                c = (s >> 64) as u64;
            }
            let s = t[N] as u128 + c as u128;
            t[N - 1] = s as u64;
            t[N] = t[N + 1] + (s >> 64) as u64;
        }
        let mut r = U256::ZERO;
        r.0[..N].copy_from_slice(&t[..N]);
        if t[N] != 0 || r >= self.p {
            r = r.overflowing_sub(&self.p).0;
            for limb in r.0[N..].iter_mut() {
                *limb = 0;
            }
        }
        r
    }

    #[inline]
    fn mul_canonical(&self, a: &U256, b: &U256) -> U256 {
        self.mul(&self.mul(a, b), &self.r2)
    }

    fn dot(&self, u: &[U256], v: &[U256]) -> U256 {
        // Σ a·b·R^{-1}, then one correction by R^2·R^{-1}.
        let mut acc = U256::ZERO;
        for (a, b) in u.iter().zip(v) {
            acc = add_mod(&self.p, &acc, &self.mul(a, b));
        }
        self.mul(&acc, &self.r2)
    }

    fn pow(&self, base: &U256, exp: &U256) -> U256 {
        let one = U256::ONE;
        let mut acc = self.mul(&one, &self.r2);
        let b = self.mul(base, &self.r2);
        for i in (0..exp.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if exp.bit(i) {
                acc = self.mul(&acc, &b);
            }
        }
        self.mul(&acc, &one)
    }
}

#[inline]
fn add_mod(p: &U256, a: &U256, b: &U256) -> U256 {
    let (s, carry) = a.overflowing_add(b);
    if carry || s >= *p {
        s.overflowing_sub(p).0
    } else {
        s
    }
}

#[inline]
fn sub_mod(p: &U256, a: &U256, b: &U256) -> U256 {
    let (d, borrow) = a.overflowing_sub(b);
    if borrow {
        d.overflowing_add(p).0
    } else {
        d
    }
}

impl Arith {
    pub(crate) fn new(p: U256) -> Self {
        match p.bits() {
            0..=64 => Arith::Word(p.0[0]),
            65..=128 => Arith::Mont2(Montgomery::new(p)),
            _ => Arith::Mont4(Montgomery::new(p)),
        }
    }

    pub(crate) fn modulus(&self) -> U256 {
        match self {
            Arith::Word(p) => U256::from_u64(*p),
            Arith::Mont2(m) => m.p,
            Arith::Mont4(m) => m.p,
        }
    }

    #[inline]
    pub(crate) fn add(&self, a: &U256, b: &U256) -> U256 {
        match self {
            Arith::Word(p) => {
                let s = a.0[0] as u128 + b.0[0] as u128;
                let p = *p as u128;
                U256::from_u64(if s >= p { s - p } else { s } as u64)
            }
            Arith::Mont2(m) => add_mod(&m.p, a, b),
            Arith::Mont4(m) => add_mod(&m.p, a, b),
        }
    }

    #[inline]
    pub(crate) fn sub(&self, a: &U256, b: &U256) -> U256 {
        match self {
            Arith::Word(p) => {
                let (a, b) = (a.0[0], b.0[0]);
                U256::from_u64(if a >= b { a - b } else { (a as u128 + *p as u128 - b as u128) as u64 })
            }
            Arith::Mont2(m) => sub_mod(&m.p, a, b),
            Arith::Mont4(m) => sub_mod(&m.p, a, b),
        }
    }

    pub(crate) fn neg(&self, a: &U256) -> U256 {
        self.sub(&U256::ZERO, a)
    }

    #[inline]
    pub(crate) fn mul(&self, a: &U256, b: &U256) -> U256 {
        match self {
            Arith::Word(p) => U256::from_u64(word_mul(*p, a.0[0], b.0[0])),
            Arith::Mont2(m) => m.mul_canonical(a, b),
            Arith::Mont4(m) => m.mul_canonical(a, b),
        }
    }

    /// `Σ u_k v_k mod p` over the common prefix of the two slices.
    pub(crate) fn dot(&self, u: &[U256], v: &[U256]) -> U256 {
        match self {
            Arith::Word(p) => {
                let p = *p;
                if p >> 32 == 0 {
                    // Products fit in 64 bits; a u128 accumulator cannot overflow
                    // for any realistic dimension.
                    let acc: u128 = u.iter().zip(v).map(|(a, b)| (a.0[0] * b.0[0]) as u128).sum();
                    U256::from_u64((acc % p as u128) as u64)
                } else {
                    let mut acc: u64 = 0;
                    for (a, b) in u.iter().zip(v) {
                        let t = word_mul(p, a.0[0], b.0[0]);
                        let s = acc as u128 + t as u128;
                        acc = if s >= p as u128 { (s - p as u128) as u64 } else { s as u64 };
                    }
                    U256::from_u64(acc)
                }
            }
            Arith::Mont2(m) => m.dot(u, v),
            Arith::Mont4(m) => m.dot(u, v),
        }
    }

    pub(crate) fn pow(&self, base: &U256, exp: &U256) -> U256 {
        match self {
            Arith::Word(p) => {
                let mut acc = 1 % *p;
                for i in (0..exp.bits()).rev() {
                    acc = word_mul(*p, acc, acc);
                    if exp.bit(i) {
                        acc = word_mul(*p, acc, base.0[0]);
                    }
                }
                U256::from_u64(acc)
            }
            Arith::Mont2(m) => m.pow(base, exp),
            Arith::Mont4(m) => m.pow(base, exp),
        }
    }

    /// Inverse by Fermat's little theorem; `None` for zero.
    pub(crate) fn inv(&self, a: &U256) -> Option<U256> {
        if a.is_zero() {
            return None;
        }
        let p = self.modulus();
        let e = p.overflowing_sub(&U256::from_u64(2)).0;
        Some(self.pow(a, &e))
    }

    /// Reduces an arbitrary 256-bit value into `[0, p)`.
    pub(crate) fn reduce(&self, v: &U256) -> U256 {
        let p = self.modulus();
        if *v < p {
            return *v;
        }
        if let (Some(v), Arith::Word(p)) = (v.to_u64(), self) {
            return U256::from_u64(v % p);
        }
        U256::from_biguint(&(v.to_biguint() % p.to_biguint())).expect("residue < p")
    }

    /// Uniform residue in `[0, p)` by rejection sampling on `bits(p)` random bits.
    pub(crate) fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> U256 {
        let p = self.modulus();
        let bits = p.bits();
        let limbs = bits.div_ceil(64) as usize;
        let top_mask = match bits % 64 {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        };
        loop {
            let mut v = U256::ZERO;
            for limb in v.0[..limbs].iter_mut() {
                *limb = rng.next_u64();
            }
            v.0[limbs - 1] &= top_mask;
            if v < p {
                return v;
            }
        }
    }
}

#[inline]
fn word_mul(p: u64, a: u64, b: u64) -> u64 {
    if p >> 32 == 0 {
        (a * b) % p
    } else {
        ((a as u128 * b as u128) % p as u128) as u64
    }
}
