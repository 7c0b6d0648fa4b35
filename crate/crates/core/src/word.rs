//! Minimal integer abstraction shared by the hot loops.
//!
//! Everything that runs inside enumerations (tower lifts, Pollard rho, order
//! refinement) is written once against [`Word`] and instantiated for `u64`
//! (moduli below 2^64, products via `u128`) and for [`BigUint`].

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

pub(crate) trait Word: Clone + Ord + Eq + Hash + Debug + Send + Sync + Sized {
    fn from_u64(v: u64) -> Self;
    fn to_big(&self) -> BigUint;
    fn w_to_u64(&self) -> Option<u64>;
    fn w_zero() -> Self {
        Self::from_u64(0)
    }
    fn w_one() -> Self {
        Self::from_u64(1)
    }
    fn w_is_zero(&self) -> bool;
    fn w_is_one(&self) -> bool;
    fn w_is_even(&self) -> bool;
    fn w_bits(&self) -> u64;
    fn w_rem(&self, m: &Self) -> Self;
    fn w_div(&self, d: &Self) -> Self;
    fn w_gcd(&self, other: &Self) -> Self;
    fn add_mod(&self, other: &Self, m: &Self) -> Self;
    fn sub_mod(&self, other: &Self, m: &Self) -> Self;
    fn mul_mod(&self, other: &Self, m: &Self) -> Self;
    fn pow_mod(&self, e: &Self, m: &Self) -> Self;
    /// Exact product, or `None` once it exceeds `cap`.
    fn mul_capped(&self, other: &Self, cap: &Self) -> Option<Self>;
    /// Inverse modulo `m`, if it exists.
    fn inv_mod(&self, m: &Self) -> Option<Self>;
    fn w_mul(&self, other: &Self) -> Self;
}

impl Word for u64 {
    fn from_u64(v: u64) -> Self {
        v
    }
    fn to_big(&self) -> BigUint {
        BigUint::from(*self)
    }
    fn w_to_u64(&self) -> Option<u64> {
        Some(*self)
    }
    fn w_is_zero(&self) -> bool {
        *self == 0
    }
    fn w_is_one(&self) -> bool {
        *self == 1
    }
    fn w_is_even(&self) -> bool {
        *self & 1 == 0
    }
    fn w_bits(&self) -> u64 {
        64 - u64::from(self.leading_zeros())
    }
    fn w_rem(&self, m: &Self) -> Self {
        self % m
    }
    fn w_div(&self, d: &Self) -> Self {
        self / d
    }
    fn w_gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn add_mod(&self, other: &Self, m: &Self) -> Self {
        ((u128::from(*self) + u128::from(*other)) % u128::from(*m)) as u64
    }
    fn sub_mod(&self, other: &Self, m: &Self) -> Self {
        let (a, b) = (self % m, other % m);
        if a >= b {
            a - b
        } else {
            m - (b - a)
        }
    }
    fn mul_mod(&self, other: &Self, m: &Self) -> Self {
        ((u128::from(*self) * u128::from(*other)) % u128::from(*m)) as u64
    }
    fn pow_mod(&self, e: &Self, m: &Self) -> Self {
        pow_mod_u64(*self, *e, *m)
    }
    fn mul_capped(&self, other: &Self, cap: &Self) -> Option<Self> {
        self.checked_mul(*other).filter(|p| p <= cap)
    }
    fn inv_mod(&self, m: &Self) -> Option<Self> {
        inv_mod_i128(i128::from(*self % m), i128::from(*m)).map(|v| v as u64)
    }
    fn w_mul(&self, other: &Self) -> Self {
        self * other
    }
}

pub(crate) fn pow_mod_u64(base: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = u128::from(m);
    let mut b = u128::from(base) % m128;
    let mut acc: u128 = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m128;
        }
        e >>= 1;
        if e > 0 {
            b = b * b % m128;
        }
    }
    acc as u64
}

fn inv_mod_i128(a: i128, m: i128) -> Option<i128> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a, m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m))
}

impl Word for BigUint {
    fn from_u64(v: u64) -> Self {
        BigUint::from(v)
    }
    fn to_big(&self) -> BigUint {
        self.clone()
    }
    fn w_to_u64(&self) -> Option<u64> {
        ToPrimitive::to_u64(self)
    }
    fn w_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn w_is_one(&self) -> bool {
        One::is_one(self)
    }
    fn w_is_even(&self) -> bool {
        Integer::is_even(self)
    }
    fn w_bits(&self) -> u64 {
        BigUint::bits(self)
    }
    fn w_rem(&self, m: &Self) -> Self {
        self % m
    }
    fn w_div(&self, d: &Self) -> Self {
        self / d
    }
    fn w_gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn add_mod(&self, other: &Self, m: &Self) -> Self {
        (self + other) % m
    }
    fn sub_mod(&self, other: &Self, m: &Self) -> Self {
        let (a, b) = (self % m, other % m);
        if a >= b {
            a - b
        } else {
            m - (b - a)
        }
    }
    fn mul_mod(&self, other: &Self, m: &Self) -> Self {
        (self * other) % m
    }
    fn pow_mod(&self, e: &Self, m: &Self) -> Self {
        if One::is_one(m) {
            return BigUint::zero();
        }
        self.modpow(e, m)
    }
    fn mul_capped(&self, other: &Self, cap: &Self) -> Option<Self> {
        if self.bits() + other.bits() > cap.bits() + 1 {
            return None;
        }
        Some(self * other).filter(|p| p <= cap)
    }
    fn inv_mod(&self, m: &Self) -> Option<Self> {
        inv_mod_big(self, m)
    }
    fn w_mul(&self, other: &Self) -> Self {
        self * other
    }
}

pub(crate) fn inv_mod_big(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    if One::is_one(m) {
        return Some(BigUint::zero());
    }
    let m_int = BigInt::from(m.clone());
    let a_int = BigInt::from(a % m);
    let egcd = a_int.extended_gcd(&m_int);
    if !One::is_one(&egcd.gcd) {
        return None;
    }
    let x = egcd.x.mod_floor(&m_int);
    match x.into_parts() {
        (Sign::Minus, _) => None,
        (_, mag) => Some(mag),
    }
}

/// `a^e` if it does not exceed `cap`.
pub(crate) fn pow_capped<W: Word>(a: &W, e: &W, cap: &W) -> Option<W> {
    if e.w_is_zero() || a.w_is_one() {
        return if W::w_one() <= *cap { Some(W::w_one()) } else { None };
    }
    if a.w_is_zero() {
        return Some(W::w_zero());
    }
    // a >= 2 from here on, so a^e >= 2^e.
    let e = e.w_to_u64()?;
    if e > cap.w_bits() {
        return None;
    }
    let mut acc = W::w_one();
    let mut base = a.clone();
    let mut rest = e;
    loop {
        if rest & 1 == 1 {
            acc = acc.mul_capped(&base, cap)?;
        }
        rest >>= 1;
        if rest == 0 {
            return Some(acc);
        }
        base = base.mul_capped(&base, cap)?;
    }
}

/// Solve `x = r1 (mod m1)`, `x = r2 (mod m2)` for coprime moduli; returns `x mod m1*m2`.
pub(crate) fn crt_pair<W: Word>(r1: &W, m1: &W, r2: &W, m2: &W) -> Option<W> {
    if m1.w_is_one() {
        return Some(r2.w_rem(m2));
    }
    if m2.w_is_one() {
        return Some(r1.w_rem(m1));
    }
    let inv = m1.w_rem(m2).inv_mod(m2)?;
    // x = r1 + m1 * ((r2 - r1) * inv mod m2)
    let t = r2.sub_mod(r1, m2).mul_mod(&inv, m2);
    let modulus = m1.w_mul(m2);
    Some(m1.w_mul(&t).add_mod(&r1.w_rem(m1), &modulus))
}

/// Largest divisor of `n` coprime to `a`, and the complementary factor.
pub(crate) fn orthogonal_split<W: Word>(a: &W, n: &W) -> (W, W) {
    let mut v = n.clone();
    let mut g = a.w_gcd(&v);
    while !g.w_is_one() && !g.w_is_zero() {
        v = v.w_div(&g);
        g = v.w_gcd(&g);
    }
    let w = n.w_div(&v);
    (v, w)
}
