//! Carmichael's function, its iterates, and orthogonal decomposition.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;

use crate::arith::{FactoredInteger, Factorizer};
use crate::error::{Error, Result};
use crate::word::orthogonal_split;

/// λ(n) from the prime-power formulas. Each `p - 1` is factored with `fz`.
pub fn lambda(n: &FactoredInteger, fz: &Factorizer) -> Result<FactoredInteger> {
    let two = BigUint::from(2u8);
    let mut acc = FactoredInteger::one();
    for (p, &e) in n.factors() {
        let part = if *p == two {
            match e {
                1 => FactoredInteger::one(),
                2 => FactoredInteger::from_trusted(BTreeMap::from([(two.clone(), 1)])),
                _ => FactoredInteger::from_trusted(BTreeMap::from([(two.clone(), e - 2)])),
            }
        } else {
            let mut f = fz.factorize(&(p - 1u32))?;
            if e > 1 {
                f = f.mul(&FactoredInteger::from_trusted(BTreeMap::from([(p.clone(), e - 1)])));
            }
            f
        };
        acc = acc.lcm(&part);
    }
    Ok(acc)
}

/// The sequence n, λ(n), λ(λ(n)), ..., 1 with every term factored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaChain {
    terms: Vec<FactoredInteger>,
    big_l: FactoredInteger,
}

impl LambdaChain {
    pub fn new(n: &BigUint, fz: &Factorizer) -> Result<Self> {
        if n < &BigUint::one() {
            return Err(Error::InvalidInput("lambda chain needs n >= 1".into()));
        }
        Self::from_factored(fz.factorize(n)?, fz)
    }

    /// Start from a known factorization of n (only the later terms get factored).
    pub fn from_factored(n: FactoredInteger, fz: &Factorizer) -> Result<Self> {
        let mut big_l = n.clone();
        let mut terms = vec![n];
        while let Some(last) = terms.last().filter(|t| !t.is_one()) {
            let next = lambda(last, fz)?;
            big_l = big_l.lcm(&next);
            terms.push(next);
        }
        Ok(LambdaChain { terms, big_l })
    }

    pub fn modulus(&self) -> &BigUint {
        self.terms[0].value()
    }

    pub fn terms(&self) -> &[FactoredInteger] {
        &self.terms
    }

    pub fn values(&self) -> impl Iterator<Item = &BigUint> {
        self.terms.iter().map(FactoredInteger::value)
    }

    /// H(n): number of λ applications needed to reach 1.
    pub fn height(&self) -> usize {
        self.terms.len() - 1
    }

    /// L(n), the lcm of every term.
    pub fn big_l(&self) -> &BigUint {
        self.big_l.value()
    }

    pub fn big_l_factored(&self) -> &FactoredInteger {
        &self.big_l
    }

    /// E(n), with E(1) = 0.
    pub fn e_max(&self) -> u32 {
        self.terms[0].max_exponent()
    }

    /// L(t, n): lcm of the last t + 1 terms, with L(0, n) = 1.
    pub fn l_t(&self, t: usize) -> Option<BigUint> {
        let h = self.height();
        if t > h {
            return None;
        }
        if t == 0 {
            return Some(BigUint::one());
        }
        let tail = &self.terms[h - t..];
        let l = tail.iter().fold(FactoredInteger::one(), |acc, f| acc.lcm(f));
        Some(l.value().clone())
    }
}

pub fn lambda_chain(n: &BigUint, fz: &Factorizer) -> Result<LambdaChain> {
    LambdaChain::new(n, fz)
}

/// n = V * W where V is the largest divisor of n coprime to a.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalDecomposition {
    pub v: BigUint,
    pub w: BigUint,
}

pub fn orthogonal_decomposition(a: &BigUint, n: &BigUint) -> OrthogonalDecomposition {
    let (v, w) = orthogonal_split(a, n);
    OrthogonalDecomposition { v, w }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn lambda_of(n: u64) -> u64 {
        let fz = Factorizer::default();
        let f = fz.factorize(&big(n)).unwrap();
        lambda(&f, &fz).unwrap().value().try_into().unwrap()
    }

    // Oracle: smallest m with a^m = 1 for every unit a.
    fn group_exponent(n: u64) -> u64 {
        let units: Vec<u64> = (1..=n).filter(|a| a.gcd(&n) == 1).collect();
        (1..=n)
            .find(|&m| units.iter().all(|&a| crate::word::pow_mod_u64(a, m, n) == 1 % n))
            .unwrap()
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_of(8), 2);
        assert_eq!(lambda_of(1), 1);
        assert_eq!(lambda_of(2), 1);
        assert_eq!(lambda_of(4), 2);
        assert_eq!(lambda_of(15), 4);
        assert_eq!(group_exponent(15), 4);
    }

    #[test]
    fn lambda_matches_group_exponent() {
        for n in 1..=400 {
            assert_eq!(lambda_of(n), group_exponent(n), "n = {n}");
        }
    }

    #[test]
    fn chain_examples() {
        let fz = Factorizer::default();
        let c = lambda_chain(&big(10), &fz).unwrap();
        let vals: Vec<_> = c.values().cloned().collect();
        assert_eq!(vals, vec![big(10), big(4), big(2), big(1)]);
        assert_eq!(c.height(), 3);
        assert_eq!(c.big_l(), &big(20));
        assert_eq!(c.e_max(), 1);
        assert_eq!(c.l_t(0), Some(big(1)));
        assert_eq!(c.l_t(1), Some(big(2)));
        assert_eq!(c.l_t(2), Some(big(4)));
        assert_eq!(c.l_t(3), Some(big(20)));
        assert_eq!(c.l_t(4), None);

        let c = lambda_chain(&big(2), &fz).unwrap();
        assert_eq!(c.height(), 1);
        let c = lambda_chain(&big(1), &fz).unwrap();
        assert_eq!(c.height(), 0);
        assert_eq!(c.terms().len(), 1);
        assert_eq!(c.e_max(), 0);
        assert!(lambda_chain(&big(0), &fz).is_err());
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(orthogonal_decomposition(&big(6), &big(45)), OrthogonalDecomposition { v: big(5), w: big(9) });
        assert_eq!(orthogonal_decomposition(&big(2), &big(15)), OrthogonalDecomposition { v: big(15), w: big(1) });
        assert_eq!(orthogonal_decomposition(&big(10), &big(10)), OrthogonalDecomposition { v: big(1), w: big(10) });
    }
}
