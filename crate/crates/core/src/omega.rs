//! Density of bases for which the tetration split fails.
//!
//! ω(u, v) is the fraction of units a modulo L(lcm(u, v)) with
//! lev_u(a) = lev_v(a). It is computed exactly by enumeration; for a pair of
//! primes p < q it is also bounded by a double sum over divisors of p - 1 and
//! q - 1, and the bound is exact when p ∤ L(q).

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::{is_prime, FactoredInteger, Factorizer};
use crate::carmichael::LambdaChain;
use crate::error::{Error, Result};
use crate::reduction::split_with;
use crate::tetration::Tetrator;

/// Default cap on L(lcm(u, v)), the size of the enumerated residue range.
pub const DEFAULT_ENUMERATION_CAP: u64 = 20_000_000;

const BLOCK: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OmegaReport {
    #[serde(serialize_with = "crate::serde_util::big")]
    pub u: BigUint,
    #[serde(serialize_with = "crate::serde_util::big")]
    pub v: BigUint,
    #[serde(serialize_with = "crate::serde_util::big")]
    pub k: BigUint,
    #[serde(serialize_with = "crate::serde_util::big")]
    pub big_l: BigUint,
    /// |W_{u,v}|
    #[serde(serialize_with = "crate::serde_util::big")]
    pub numerator: BigUint,
    /// φ(L(k))
    #[serde(serialize_with = "crate::serde_util::big")]
    pub denominator: BigUint,
    #[serde(serialize_with = "rational")]
    pub omega: BigRational,
    /// The divisor-sum bound over all pairs (primes only).
    #[serde(serialize_with = "rational_opt")]
    pub bound: Option<BigRational>,
    /// The divisor-sum bound without mixed unit pairs (primes only).
    #[serde(serialize_with = "rational_opt")]
    pub corrected_bound: Option<BigRational>,
    /// True iff u < v are primes with u ∤ L(v).
    pub equality_expected: bool,
    /// Candidates scanned, units among them.
    pub candidates: u64,
    pub units: u64,
    /// gcd(λ⁽ʲ⁾(u), λ⁽ʲ⁾(v)) for j = 1, 2, ... while either side exceeds 1.
    #[serde(serialize_with = "crate::serde_util::big_vec")]
    pub lambda_gcds: Vec<BigUint>,
}

fn rational<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

fn rational_opt<S: Serializer>(r: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => rational(r, s),
        None => s.serialize_none(),
    }
}

/// Lossy view for display.
pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact ω machinery with a shared memo of brute-force values.
#[derive(Debug)]
pub struct OmegaCalculator {
    fz: Factorizer,
    cap: u64,
    memo: Mutex<HashMap<(BigUint, BigUint), BigRational>>,
}

impl OmegaCalculator {
    pub fn new(fz: Factorizer, enumeration_cap: u64) -> Self {
        OmegaCalculator { fz, cap: enumeration_cap, memo: Mutex::new(HashMap::new()) }
    }

    /// Enumerate every unit modulo L(lcm(u, v)) and compare levels.
    pub fn omega_brute(&self, u: &BigUint, v: &BigUint) -> Result<OmegaReport> {
        if u.is_zero() || v.is_zero() {
            return Err(Error::InvalidInput("u and v must be positive".into()));
        }
        let k = u.lcm(v);
        let chain = LambdaChain::new(&k, &self.fz)?;
        let big_l = chain.big_l().clone();
        let l = big_l.to_u64().filter(|&l| l <= self.cap).ok_or_else(|| Error::TooLarge {
            what: "L(lcm(u, v))",
            size: big_l.clone(),
            cap: BigUint::from(self.cap),
        })?;
        let tu = Tetrator::new(u, &self.fz)?;
        let tv = Tetrator::new(v, &self.fz)?;

        // Residues 1..=l cover Z/l (l itself stands in for 0, a unit only when l = 1).
        let blocks = l.div_ceil(BLOCK);
        let (units, equal) = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let (mut units, mut equal) = (0u64, 0u64);
                for a in (b * BLOCK + 1)..=((b + 1) * BLOCK).min(l) {
                    if a.gcd(&l) != 1 {
                        continue;
                    }
                    units += 1;
                    let lu = tu.level_u64(a).expect("word-sized modulus");
                    let lv = tv.level_u64(a).expect("word-sized modulus");
                    if lu == lv {
                        equal += 1;
                    }
                }
                (units, equal)
            })
            .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));

        let denominator = chain.big_l_factored().totient();
        if BigUint::from(units) != denominator {
            return Err(Error::Internal(format!("counted {units} units but φ(L) = {denominator}")));
        }
        let numerator = BigUint::from(equal);
        let omega = BigRational::new(numerator.clone().into(), denominator.clone().into());
        let equality_expected = match ordered_prime_pair(u, v) {
            Some((p, q)) => !divides_big_l(&p, &q, &self.fz)?,
            None => false,
        };
        Ok(OmegaReport {
            lambda_gcds: lambda_gcds(u, v, &self.fz)?,
            u: u.clone(),
            v: v.clone(),
            k,
            big_l,
            numerator,
            denominator,
            omega,
            bound: None,
            corrected_bound: None,
            equality_expected,
            candidates: l,
            units,
        })
    }

    /// ω(u, v) alone, memoized on the unordered pair.
    pub fn omega(&self, u: &BigUint, v: &BigUint) -> Result<BigRational> {
        if u == v {
            return Ok(BigRational::one());
        }
        let key = if u < v { (u.clone(), v.clone()) } else { (v.clone(), u.clone()) };
        if let Some(hit) = self.memo.lock().expect("memo poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let value = self.omega_brute(&key.0, &key.1)?.omega;
        self.memo.lock().expect("memo poisoned").insert(key, value.clone());
        Ok(value)
    }

    /// (1/φ(pq)) Σ_{r | p-1} φ(r) Σ_{s | q-1} φ(s) ω(r, s), summed over every divisor pair.
    ///
    /// This is an upper bound for ω(p, q) but, as written, never an equality
    /// for p, q ≤ 31: see [`OmegaCalculator::omega_bound_corrected`].
    pub fn omega_bound(&self, p: &BigUint, q: &BigUint) -> Result<BigRational> {
        self.divisor_sum(p, q, false)
    }

    /// The same divisor sum without the pairs where exactly one of r, s is 1.
    ///
    /// lev_u(a) = lev_{ord_u(a)}(a) + 1 unless ord_u(a) = 1, in which case
    /// lev_u(a) = 0. So a base of order 1 modulo p and order s > 1 modulo q
    /// always has distinct levels, whatever ω(1, s) says, and those pairs
    /// contribute nothing. With them removed the sum equals ω(p, q) whenever
    /// p ∤ L(q) (checked exhaustively for p < q ≤ 31).
    pub fn omega_bound_corrected(&self, p: &BigUint, q: &BigUint) -> Result<BigRational> {
        self.divisor_sum(p, q, true)
    }

    fn divisor_sum(&self, p: &BigUint, q: &BigUint, drop_mixed_units: bool) -> Result<BigRational> {
        if !(is_prime(p) && is_prime(q)) || p >= q {
            return Err(Error::InvalidInput(format!("need primes p < q, got {p}, {q}")));
        }
        let fp = self.fz.factorize(&(p - 1u32))?;
        let fq = self.fz.factorize(&(q - 1u32))?;
        let pairs: Vec<(BigUint, BigUint)> = fp
            .divisors()
            .into_iter()
            .flat_map(|r| fq.divisors().into_iter().map(move |s| (r.clone(), s)))
            .filter(|(r, s)| !(drop_mixed_units && r.is_one() != s.is_one()))
            .collect();
        let terms = pairs
            .par_iter()
            .map(|(r, s)| {
                let w = self.omega(r, s)?;
                let weight = totient(r, &self.fz)? * totient(s, &self.fz)?;
                Ok(w * BigRational::from_integer(weight.into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let sum = terms.into_iter().fold(BigRational::zero(), |acc, t| acc + t);
        let phi_n = (p - 1u32) * (q - 1u32);
        Ok(sum / BigRational::from_integer(phi_n.into()))
    }

    /// Brute force plus, for a pair of distinct primes, the divisor-sum bound.
    pub fn omega_report(&self, u: &BigUint, v: &BigUint) -> Result<OmegaReport> {
        let mut report = self.omega_brute(u, v)?;
        if let Some((p, q)) = ordered_prime_pair(u, v) {
            report.bound = Some(self.omega_bound(&p, &q)?);
            report.corrected_bound = Some(self.omega_bound_corrected(&p, &q)?);
        }
        Ok(report)
    }
}

impl Default for OmegaCalculator {
    fn default() -> Self {
        OmegaCalculator::new(Factorizer::default(), DEFAULT_ENUMERATION_CAP)
    }
}

pub fn omega_brute(u: &BigUint, v: &BigUint) -> Result<OmegaReport> {
    OmegaCalculator::default().omega_brute(u, v)
}

pub fn omega_bound(p: &BigUint, q: &BigUint) -> Result<BigRational> {
    OmegaCalculator::default().omega_bound(p, q)
}

fn ordered_prime_pair(u: &BigUint, v: &BigUint) -> Option<(BigUint, BigUint)> {
    if u == v || !is_prime(u) || !is_prime(v) {
        return None;
    }
    Some(if u < v { (u.clone(), v.clone()) } else { (v.clone(), u.clone()) })
}

fn divides_big_l(p: &BigUint, q: &BigUint, fz: &Factorizer) -> Result<bool> {
    Ok((LambdaChain::new(q, fz)?.big_l() % p).is_zero())
}

fn totient(n: &BigUint, fz: &Factorizer) -> Result<BigUint> {
    Ok(fz.factorize(n)?.totient())
}

fn lambda_gcds(u: &BigUint, v: &BigUint, fz: &Factorizer) -> Result<Vec<BigUint>> {
    let cu: Vec<BigUint> = LambdaChain::new(u, fz)?.values().cloned().collect();
    let cv: Vec<BigUint> = LambdaChain::new(v, fz)?.values().cloned().collect();
    let len = cu.len().max(cv.len());
    let one = BigUint::one();
    Ok((1..len)
        .map(|j| cu.get(j).unwrap_or(&one).gcd(cv.get(j).unwrap_or(&one)))
        .collect())
}

/// Bases in 2..=base_max for which the split fails, for an N whose factorization is known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaseReport {
    #[serde(serialize_with = "crate::serde_util::big")]
    pub n: BigUint,
    pub base_max: u64,
    pub failing_bases: Vec<u64>,
}

pub fn base_success_report(n: &FactoredInteger, base_max: u64, fz: &Factorizer) -> Result<BaseReport> {
    let oracle = Tetrator::from_chain(LambdaChain::from_factored(n.clone(), fz)?);
    let failing_bases: Vec<u64> = (2..=base_max)
        .into_par_iter()
        .filter(|&a| !split_with(&oracle, &BigUint::from(a)).is_split())
        .collect();
    Ok(BaseReport { n: n.value().clone(), base_max, failing_bases })
}
