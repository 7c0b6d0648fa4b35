//! Multiplicative order by divisor refinement of a known group-order multiple.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::arith::{FactoredInteger, Factorizer};
use crate::carmichael::lambda;
use crate::error::{Error, Result};
use crate::word::Word;

/// Smallest m with a^m ≡ 1 (mod n), given a factored multiple of it.
pub fn order_from_multiple(a: &BigUint, n: &BigUint, multiple: &FactoredInteger) -> BigUint {
    if n.is_one() {
        return BigUint::one();
    }
    let mut m = multiple.value().clone();
    for (p, &e) in multiple.factors() {
        for _ in 0..e {
            let candidate = &m / p;
            if Word::pow_mod(a, &candidate, n).is_one() {
                m = candidate;
            } else {
                break;
            }
        }
    }
    m
}

/// ord_n(a), refining λ(n). Requires gcd(a, n) = 1.
pub fn multiplicative_order_factored(a: &BigUint, n: &BigUint, fz: &Factorizer) -> Result<BigUint> {
    if !a.gcd(n).is_one() {
        return Err(Error::not_coprime(a.clone(), n.clone()));
    }
    if n.is_one() {
        return Ok(BigUint::one());
    }
    let group_exponent = lambda(&fz.factorize(n)?, fz)?;
    Ok(order_from_multiple(a, n, &group_exponent))
}
