//! Arbitrary-precision plumbing: factored integers, Chinese remaindering,
//! modular exponentiation, primality, factorization.

mod factor;
mod prime;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::word::{crt_pair, Word};

pub use factor::{factorize, FactorConfig, Factorizer};
pub use prime::is_prime;
#[doc(hidden)]
pub use prime::{is_prime_bpsw, is_prime_u64};

/// A positive integer together with its prime-power factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredInteger {
    value: BigUint,
    factors: BTreeMap<BigUint, u32>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        FactoredInteger { value: BigUint::one(), factors: BTreeMap::new() }
    }

    /// Build from a prime-exponent map. Primality of the keys is checked.
    pub fn from_factors(factors: BTreeMap<BigUint, u32>) -> Result<Self> {
        let mut value = BigUint::one();
        for (p, &e) in &factors {
            if e == 0 {
                return Err(Error::InvalidInput(format!("zero exponent for {p}")));
            }
            if !is_prime(p) {
                return Err(Error::InvalidInput(format!("{p} is not prime")));
            }
            value *= p.pow(e);
        }
        Ok(FactoredInteger { value, factors })
    }

    /// Skips the primality check; callers guarantee every key is prime.
    pub(crate) fn from_trusted(factors: BTreeMap<BigUint, u32>) -> Self {
        let value = factors.iter().fold(BigUint::one(), |acc, (p, &e)| acc * p.pow(e));
        FactoredInteger { value, factors }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn factors(&self) -> &BTreeMap<BigUint, u32> {
        &self.factors
    }

    pub fn exponent_of(&self, p: &BigUint) -> u32 {
        self.factors.get(p).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// E(n): the largest exponent, 0 for n = 1.
    pub fn max_exponent(&self) -> u32 {
        self.factors.values().copied().max().unwrap_or(0)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.values().all(|&e| e == 1)
    }

    /// Product of the primes carrying an odd exponent.
    pub fn squarefree_part(&self) -> BigUint {
        self.factors
            .iter()
            .filter(|(_, &e)| e % 2 == 1)
            .fold(BigUint::one(), |acc, (p, _)| acc * p)
    }

    pub fn radical(&self) -> BigUint {
        self.factors.keys().fold(BigUint::one(), |acc, p| acc * p)
    }

    /// Euler's totient from the factorization.
    pub fn totient(&self) -> BigUint {
        self.factors.iter().fold(BigUint::one(), |acc, (p, &e)| {
            acc * p.pow(e - 1) * (p - 1u32)
        })
    }

    /// Exponent-wise maximum.
    pub fn lcm(&self, other: &FactoredInteger) -> FactoredInteger {
        let mut factors = self.factors.clone();
        for (p, &e) in &other.factors {
            let slot = factors.entry(p.clone()).or_insert(0);
            *slot = (*slot).max(e);
        }
        FactoredInteger::from_trusted(factors)
    }

    pub fn mul(&self, other: &FactoredInteger) -> FactoredInteger {
        let mut factors = self.factors.clone();
        for (p, &e) in &other.factors {
            *factors.entry(p.clone()).or_insert(0) += e;
        }
        FactoredInteger { value: &self.value * &other.value, factors }
    }

    pub fn divides(&self, other: &FactoredInteger) -> bool {
        self.factors.iter().all(|(p, &e)| other.exponent_of(p) >= e)
    }

    /// All positive divisors, ascending.
    pub fn divisors(&self) -> Vec<BigUint> {
        let mut divs = vec![BigUint::one()];
        for (p, &e) in &self.factors {
            let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
            for d in &divs {
                let mut pk = d.clone();
                next.push(pk.clone());
                for _ in 0..e {
                    pk *= p;
                    next.push(pk.clone());
                }
            }
            divs = next;
        }
        divs.sort();
        divs
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, &e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

impl Serialize for FactoredInteger {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, u32> =
            self.factors.iter().map(|(p, &e)| (p.to_string(), e)).collect();
        map.serialize(serializer)
    }
}

/// A list of congruences `x = residue (mod modulus)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSystem {
    pairs: Vec<(BigUint, BigUint)>,
}

impl ResidueSystem {
    /// Residues are reduced into `[0, modulus)`. Coprimality is checked by [`crt`].
    pub fn new<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BigUint, BigUint)>,
    {
        let mut out = Vec::new();
        for (r, m) in pairs {
            if m.is_zero() {
                return Err(Error::InvalidInput("modulus must be at least 1".into()));
            }
            out.push((r % &m, m));
        }
        Ok(ResidueSystem { pairs: out })
    }

    pub fn pairs(&self) -> &[(BigUint, BigUint)] {
        &self.pairs
    }
}

/// The unique `0 <= r < prod(moduli)` satisfying every congruence.
pub fn crt(system: &ResidueSystem) -> Result<(BigUint, BigUint)> {
    let pairs = system.pairs();
    for (i, (_, mi)) in pairs.iter().enumerate() {
        for (_, mj) in &pairs[i + 1..] {
            if !mi.gcd(mj).is_one() {
                return Err(Error::not_coprime(mi.clone(), mj.clone()));
            }
        }
    }
    let mut acc = (BigUint::zero(), BigUint::one());
    for (r, m) in pairs {
        let x = crt_pair(&acc.0, &acc.1, r, m)
            .ok_or_else(|| Error::not_coprime(acc.1.clone(), m.clone()))?;
        acc = (x, &acc.1 * m);
    }
    Ok(acc)
}

/// `a^e mod n` by square-and-multiply; `n = 1` gives 0.
pub fn mod_pow(a: &BigUint, e: &BigUint, n: &BigUint) -> BigUint {
    assert!(!n.is_zero(), "modulus must be positive");
    Word::pow_mod(a, e, n)
}

pub fn gcd(a: &BigUint, b: &BigUint) -> BigUint {
    a.gcd(b)
}

pub fn lcm(a: &BigUint, b: &BigUint) -> BigUint {
    a.lcm(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn system(pairs: &[(u64, u64)]) -> ResidueSystem {
        ResidueSystem::new(pairs.iter().map(|&(r, m)| (big(r), big(m)))).unwrap()
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt(&system(&[(1, 3), (2, 5)])).unwrap(), (big(7), big(15)));
        assert_eq!(crt(&system(&[(0, 4), (3, 9)])).unwrap(), (big(12), big(36)));
        assert_eq!(crt(&system(&[(5, 7)])).unwrap(), (big(5), big(7)));
    }

    #[test]
    fn crt_rejects_shared_moduli() {
        let err = crt(&system(&[(1, 6), (2, 9)])).unwrap_err();
        assert!(matches!(err, Error::NotCoprime { .. }));
    }

    #[test]
    fn mod_pow_examples() {
        assert_eq!(mod_pow(&big(2), &big(10), &big(1000)), big(24));
        assert_eq!(mod_pow(&big(7), &big(0), &big(13)), big(1));
        assert_eq!(mod_pow(&big(3), &big(27), &big(5)), big(2));
        assert_eq!(mod_pow(&big(3), &big(0), &big(1)), big(0));
    }

    #[test]
    fn mod_pow_matches_repeated_multiplication() {
        for n in 1u64..=200 {
            for a in (0u64..=200).step_by(7) {
                let mut naive = 1 % n;
                for e in 0u64..=200 {
                    assert_eq!(mod_pow(&big(a), &big(e), &big(n)), big(naive), "{a}^{e} mod {n}");
                    naive = naive * a % n;
                }
            }
        }
    }

    #[test]
    fn factored_helpers() {
        let f = factorize(&big(360)).unwrap();
        assert_eq!(f.to_string(), "2^3*3^2*5");
        assert_eq!(f.totient(), big(96));
        assert_eq!(f.squarefree_part(), big(10));
        assert_eq!(f.radical(), big(30));
        assert_eq!(f.max_exponent(), 3);
        assert_eq!(f.divisors().len(), 24);
        assert!(FactoredInteger::from_factors([(big(4), 1)].into()).is_err());
    }
}
