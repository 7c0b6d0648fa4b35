use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{is_prime, FactoredInteger};
use crate::error::{Error, Result};
use crate::word::Word;

/// Work budget for [`Factorizer`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorConfig {
    /// Primes below this bound are removed by trial division.
    pub trial_division_bound: u64,
    /// Total Pollard-rho iterations allowed per composite cofactor.
    pub rho_iteration_cap: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig { trial_division_bound: 10_000, rho_iteration_cap: 1 << 24 }
    }
}

/// Trial division followed by Brent's variant of Pollard rho.
///
/// Rho parameters are derived from the cofactor itself, so the same input
/// always takes the same path. Primes supplied with [`Factorizer::with_known_primes`]
/// are divided out first, which lets callers factor numbers (and their
/// Carmichael chains) whose large prime factors are already known.
#[derive(Debug, Clone, Default)]
pub struct Factorizer {
    config: FactorConfig,
    known_primes: Vec<BigUint>,
}

/// Factor with the default budget.
pub fn factorize(n: &BigUint) -> Result<FactoredInteger> {
    Factorizer::default().factorize(n)
}

impl Factorizer {
    pub fn new(config: FactorConfig) -> Self {
        Factorizer { config, known_primes: Vec::new() }
    }

    /// Add primes to divide out before any search. Non-primes are rejected.
    pub fn with_known_primes<I: IntoIterator<Item = BigUint>>(mut self, primes: I) -> Result<Self> {
        for p in primes {
            if !is_prime(&p) {
                return Err(Error::InvalidInput(format!("{p} is not prime")));
            }
            if !self.known_primes.contains(&p) {
                self.known_primes.push(p);
            }
        }
        self.known_primes.sort();
        Ok(self)
    }

    pub fn known_primes(&self) -> &[BigUint] {
        &self.known_primes
    }

    pub fn config(&self) -> FactorConfig {
        self.config
    }

    pub fn factorize(&self, n: &BigUint) -> Result<FactoredInteger> {
        if n.is_zero() {
            return Err(Error::InvalidInput("cannot factor 0".into()));
        }
        let mut factors = BTreeMap::new();
        let mut rest = n.clone();
        for p in &self.known_primes {
            let mut e = 0;
            loop {
                let (q, r) = rest.div_rem(p);
                if !r.is_zero() {
                    break;
                }
                rest = q;
                e += 1;
            }
            if e > 0 {
                factors.insert(p.clone(), e);
            }
        }
        match rest.to_u64() {
            Some(small) => {
                let left = self.trial_divide_u64(small, &mut factors);
                if left > 1 {
                    self.split_u64(left, &mut factors)?;
                }
            }
            None => {
                rest = self.trial_divide_big(rest, &mut factors);
                if !rest.is_one() {
                    self.split_big(rest, &mut factors)?;
                }
            }
        }
        Ok(FactoredInteger::from_trusted(factors))
    }

    fn trial_divide_u64(&self, mut n: u64, out: &mut BTreeMap<BigUint, u32>) -> u64 {
        let bound = self.config.trial_division_bound.max(2);
        let mut d = 2u64;
        while d < bound && d.saturating_mul(d) <= n {
            if n % d == 0 {
                let mut e = 0;
                while n % d == 0 {
                    n /= d;
                    e += 1;
                }
                *out.entry(BigUint::from(d)).or_insert(0) += e;
            }
            d += if d == 2 { 1 } else { 2 };
        }
        if n > 1 && d.saturating_mul(d) > n {
            // everything below d is gone, so what is left is prime
            *out.entry(BigUint::from(n)).or_insert(0) += 1;
            return 1;
        }
        n
    }

    fn trial_divide_big(&self, mut n: BigUint, out: &mut BTreeMap<BigUint, u32>) -> BigUint {
        let bound = self.config.trial_division_bound.max(2);
        let mut d = 2u64;
        while d < bound {
            let (q, r) = n.div_rem(&BigUint::from(d));
            if r.is_zero() {
                n = q;
                let mut e = 1;
                loop {
                    let (q, r) = n.div_rem(&BigUint::from(d));
                    if !r.is_zero() {
                        break;
                    }
                    n = q;
                    e += 1;
                }
                *out.entry(BigUint::from(d)).or_insert(0) += e;
            }
            d += if d == 2 { 1 } else { 2 };
        }
        n
    }

    fn split_u64(&self, n: u64, out: &mut BTreeMap<BigUint, u32>) -> Result<()> {
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if m == 1 {
                continue;
            }
            if super::is_prime_u64(m) {
                *out.entry(BigUint::from(m)).or_insert(0) += 1;
                continue;
            }
            let d = if let Some(r) = exact_square_root_u64(m) {
                r
            } else {
                brent_rho(&m, self.config.rho_iteration_cap)
                    .ok_or_else(|| Error::EffortExceeded { cofactor: BigUint::from(m) })?
            };
            stack.push(d);
            stack.push(m / d);
        }
        Ok(())
    }

    fn split_big(&self, n: BigUint, out: &mut BTreeMap<BigUint, u32>) -> Result<()> {
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if m.is_one() {
                continue;
            }
            if let Some(small) = m.to_u64() {
                self.split_u64(small, out)?;
                continue;
            }
            if is_prime(&m) {
                *out.entry(m).or_insert(0) += 1;
                continue;
            }
            let root = num_integer::Roots::sqrt(&m);
            let d = if &root * &root == m {
                root
            } else {
                brent_rho(&m, self.config.rho_iteration_cap)
                    .ok_or_else(|| Error::EffortExceeded { cofactor: m.clone() })?
            };
            let other = &m / &d;
            stack.push(d);
            stack.push(other);
        }
        Ok(())
    }
}

fn exact_square_root_u64(n: u64) -> Option<u64> {
    let r = num_integer::Roots::sqrt(&n);
    (r * r == n).then_some(r)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn seed_of<W: Word>(n: &W) -> u64 {
    let big = n.to_big();
    big.iter_u64_digits().fold(0x5EED_u64, |acc, d| splitmix64(acc ^ d))
}

/// A nontrivial divisor of the odd-or-even composite `n`, or `None` when the
/// iteration cap runs out.
fn brent_rho<W: Word>(n: &W, cap: u64) -> Option<W> {
    if n.w_is_even() {
        return Some(W::from_u64(2));
    }
    const BATCH: u64 = 128;
    let mut state = seed_of(n);
    let mut spent = 0u64;
    while spent < cap {
        state = splitmix64(state);
        let c = W::from_u64(1 + state % 0xFFFF_FFFF).w_rem(n);
        state = splitmix64(state);
        let mut y = W::from_u64(state).w_rem(n);
        let step = |x: &W| x.mul_mod(x, n).add_mod(&c, n);

        let mut g = W::w_one();
        let mut r = 1u64;
        let mut q = W::w_one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.w_is_one() {
            x = y.clone();
            for _ in 0..r {
                y = step(&y);
            }
            spent += r;
            let mut k = 0u64;
            while k < r && g.w_is_one() {
                ys = y.clone();
                let m = BATCH.min(r - k);
                for _ in 0..m {
                    y = step(&y);
                    q = q.mul_mod(&x.sub_mod(&y, n), n);
                }
                g = q.w_gcd(n);
                k += m;
            }
            spent += k;
            r *= 2;
            if spent >= cap {
                break;
            }
        }
        if g == *n {
            // backtrack one step at a time from the saved point
            loop {
                ys = step(&ys);
                g = x.sub_mod(&ys, n).w_gcd(n);
                spent += 1;
                if !g.w_is_one() || spent >= cap {
                    break;
                }
            }
        }
        if !g.w_is_one() && g != *n && !g.w_is_zero() {
            return Some(g);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn examples() {
        assert_eq!(factorize(&big(12)).unwrap().to_string(), "2^2*3");
        assert!(factorize(&big(1)).unwrap().is_one());
        let f = factorize(&big(60507095029)).unwrap();
        assert_eq!(f.to_string(), "224951*268979");
        assert_eq!(big(224951) * big(268979), big(60507095029));
    }

    #[test]
    fn reconstructs_up_to_1e6() {
        let fz = Factorizer::default();
        for n in 1u64..=1_000_000 {
            let f = fz.factorize(&big(n)).unwrap();
            assert_eq!(f.value(), &big(n));
            for p in f.factors().keys() {
                assert!(is_prime(p));
            }
        }
    }

    #[test]
    fn rho_does_the_work_without_trial_division() {
        let fz = Factorizer::new(FactorConfig { trial_division_bound: 2, rho_iteration_cap: 1 << 20 });
        for n in [91u64, 8051, 1541, 60507095029, 999_999_999_989 * 3, 4_294_967_291 * 4_294_967_279] {
            let f = fz.factorize(&big(n)).unwrap();
            assert_eq!(f.value(), &big(n));
            assert!(f.factors().keys().all(is_prime));
        }
        let p = big(1_000_000_007);
        let q = big(998_244_353);
        let r = (BigUint::one() << 61) - 1u32;
        let n = &p * &q * &r * &r;
        let f = fz.factorize(&n).unwrap();
        assert_eq!(f.exponent_of(&r), 2);
        assert_eq!(f.value(), &n);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let fz = Factorizer::new(FactorConfig { trial_division_bound: 2, rho_iteration_cap: 4 });
        let n = big(4_294_967_291) * big(4_294_967_279);
        assert!(matches!(fz.factorize(&n), Err(Error::EffortExceeded { .. })));
    }

    #[test]
    fn deterministic() {
        let n = big(4_294_967_291) * big(2_147_483_647) * big(1_000_003);
        let a = factorize(&n).unwrap();
        let b = factorize(&n).unwrap();
        assert_eq!(a, b);
    }
}
