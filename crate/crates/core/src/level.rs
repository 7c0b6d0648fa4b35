//! Levels lev_n(a) and iterated multiplicative orders ord_n^(k)(a).
//!
//! The level is the preperiod of the eventually constant sequence (ᵏa mod n).
//! It is computed directly from tetration residues, and for bases coprime to
//! L(n) also from the iterated-order chain.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::Factorizer;
use crate::carmichael::{orthogonal_decomposition, LambdaChain};
use crate::error::{Error, Result};
use crate::order::multiplicative_order_factored;
use crate::tetration::Tetrator;

/// Default cap on the j-scan in [`prime_power_level`].
pub const DEFAULT_M_SCAN_CAP: u32 = 64;

/// lev_n(a) = min{k : ᵏ⁺¹a ≡ ᵏa (mod n)}.
pub fn level_direct(a: &BigUint, n: &BigUint, fz: &Factorizer) -> Result<u64> {
    if a.is_one() || n.is_one() {
        return Ok(0);
    }
    Ok(Tetrator::new(n, fz)?.level(a))
}

/// The chain n = ord⁽⁰⁾, ord⁽¹⁾, ... up to and including the first 1.
pub fn order_chain(a: &BigUint, n: &BigUint, fz: &Factorizer) -> Result<Vec<BigUint>> {
    if a.is_zero() || n.is_zero() {
        return Err(Error::InvalidInput("base and modulus must be positive".into()));
    }
    let mut chain = vec![n.clone()];
    let mut current = n.clone();
    while !current.is_one() {
        let v = orthogonal_decomposition(a, &current).v;
        current = multiplicative_order_factored(&(a % &v), &v, fz)?;
        chain.push(current.clone());
    }
    Ok(chain)
}

/// ord_n⁽ᵏ⁾(a); past the end of the chain the value stays 1.
pub fn iterated_order(a: &BigUint, n: &BigUint, k: usize, fz: &Factorizer) -> Result<BigUint> {
    let chain = order_chain(a, n, fz)?;
    Ok(chain.get(k).cloned().unwrap_or_else(BigUint::one))
}

/// L_a(n): lcm of the order chain.
pub fn l_a(a: &BigUint, n: &BigUint, fz: &Factorizer) -> Result<BigUint> {
    Ok(order_chain(a, n, fz)?.iter().fold(BigUint::one(), |acc, o| acc.lcm(o)))
}

/// min{ν ≥ 1 : ord⁽ᵛ⁾ = 1} - 1, a lower bound on lev_n(a) for every base.
pub fn level_lower_bound(a: &BigUint, n: &BigUint, fz: &Factorizer) -> Result<u64> {
    let chain = order_chain(a, n, fz)?;
    Ok(first_one_from(&chain, 1) - 1)
}

fn first_one_from(chain: &[BigUint], start: usize) -> u64 {
    // The chain ends with 1 and stays there.
    (start..).find(|&i| chain.get(i).map_or(true, One::is_one)).unwrap() as u64
}

/// lev_n(a) from the order chain, valid when gcd(a, L(n)) = 1.
///
/// Both closed forms are evaluated: min{ν ≥ 1 : ord⁽ᵛ⁾ = 1} - 1 and
/// min{ν ≥ 0 : ord⁽ᵛ⁾ | a - 1}. A disagreement is reported as an internal error.
pub fn level_via_orders(a: &BigUint, n: &BigUint, fz: &Factorizer) -> Result<u64> {
    if a.is_one() {
        return Ok(0);
    }
    let chain = LambdaChain::new(n, fz)?;
    let big_l = chain.big_l();
    if !a.gcd(big_l).is_one() {
        return Err(Error::NotCoprimeToL { base: a.clone(), modulus: n.clone(), big_l: big_l.clone() });
    }
    let orders = order_chain(a, n, fz)?;
    let by_unit = first_one_from(&orders, 1) - 1;
    let a_minus_1 = a - 1u32;
    let by_divisor = orders
        .iter()
        .position(|o| (&a_minus_1 % o).is_zero())
        .map_or(orders.len() as u64, |i| i as u64);
    if by_unit != by_divisor {
        return Err(Error::Internal(format!(
            "closed forms disagree for a={a}, n={n}: {by_unit} vs {by_divisor}"
        )));
    }
    Ok(by_unit)
}

/// lev_{p^n}(a) = lev_p(a) + ⌈n/(M-1) - 1⌉ with M = min{j : p | ord_{p^j}(a)},
/// for odd primes p. The units modulo 2ⁿ are not cyclic for n ≥ 3 and the
/// closed form is wrong there, so p = 2 is rejected; use [`level_direct`].
pub fn prime_power_level(a: &BigUint, p: &BigUint, n: u32, fz: &Factorizer) -> Result<u64> {
    prime_power_level_with_cap(a, p, n, DEFAULT_M_SCAN_CAP, fz)
}

pub fn prime_power_level_with_cap(
    a: &BigUint,
    p: &BigUint,
    n: u32,
    cap: u32,
    fz: &Factorizer,
) -> Result<u64> {
    if !crate::arith::is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    if p == &BigUint::from(2u32) {
        return Err(Error::InvalidInput("the prime-power level formula needs an odd prime".into()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("prime power exponent must be at least 1".into()));
    }
    if (a % p).is_zero() {
        return Err(Error::not_coprime(a.clone(), p.clone()));
    }
    let m = power_scan_m(a, p, cap, fz)?;
    let base_level = level_direct(a, p, fz)?;
    // ⌈n/(M-1) - 1⌉ = ⌈(n - M + 1)/(M - 1)⌉, never negative for n >= 1
    let num = i64::from(n) - i64::from(m) + 1;
    let den = i64::from(m) - 1;
    let extra = Integer::div_ceil(&num, &den).max(0) as u64;
    Ok(base_level + extra)
}

/// M = min{j ≥ 1 : p | ord_{p^j}(a)}.
///
/// ord_{p^j}(a) is ord_p(a) times a power of p, so p divides it exactly when
/// a^ord_p(a) is not 1 modulo p^j.
fn power_scan_m(a: &BigUint, p: &BigUint, cap: u32, fz: &Factorizer) -> Result<u32> {
    let base_order = multiplicative_order_factored(&(a % p), p, fz)?;
    let mut pj = p.clone();
    for j in 1..=cap {
        let order = multiplicative_order_in_prime_power(a, p, &pj, &base_order);
        if (&order % p).is_zero() {
            return Ok(j);
        }
        pj *= p;
    }
    Err(Error::MNotFound { base: a.clone(), prime: p.clone(), cap })
}

fn multiplicative_order_in_prime_power(a: &BigUint, p: &BigUint, pj: &BigUint, base_order: &BigUint) -> BigUint {
    let mut order = base_order.clone();
    let mut x = a.modpow(&order, pj);
    while !x.is_one() {
        x = x.modpow(p, pj);
        order *= p;
    }
    order
}

/// Levels modulo each maximal prime-power divisor of n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelDecomposition {
    #[serde(serialize_with = "crate::serde_util::big_key_map")]
    pub parts: BTreeMap<BigUint, u64>,
}

impl LevelDecomposition {
    pub fn max(&self) -> u64 {
        self.parts.values().copied().max().unwrap_or(0)
    }
}

pub fn level_decompose(a: &BigUint, n: &BigUint, fz: &Factorizer) -> Result<LevelDecomposition> {
    let f = fz.factorize(n)?;
    let mut parts = BTreeMap::new();
    for (p, &e) in f.factors() {
        let q = p.pow(e);
        let lev = level_direct(a, &q, fz)?;
        parts.insert(q, lev);
    }
    Ok(LevelDecomposition { parts })
}

/// Everything about the pair (a, n) that this module computes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelProfile {
    pub base: BigUint,
    pub modulus: BigUint,
    pub level: u64,
    pub order_chain: Vec<BigUint>,
    pub l_a: BigUint,
}

pub fn level_profile(a: &BigUint, n: &BigUint, fz: &Factorizer) -> Result<LevelProfile> {
    let level = level_direct(a, n, fz)?;
    let order_chain = order_chain(a, n, fz)?;
    let l_a = order_chain.iter().fold(BigUint::one(), |acc, o| acc.lcm(o));
    Ok(LevelProfile { base: a.clone(), modulus: n.clone(), level, order_chain, l_a })
}
