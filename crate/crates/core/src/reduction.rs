//! Factoring with a modular-tetration oracle.
//!
//! For a base a the probes g_k = gcd(ᵏ⁺¹a - ᵏa, N), k = 0..=⌈log₂N⌉, expose a
//! proper divisor whenever some prime p | N has lev_p(a) ≠ lev_N(a). Repeated
//! splitting computes the squarefree part of N, and usually its full
//! factorization.
//!
//! The tetration oracle used here is [`Tetrator`], which factors the λ-chain
//! of N internally. The splitting logic itself only ever sees tetration
//! residues, gcds and, unless `oracle_only_top` is set, primality verdicts.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{is_prime, FactoredInteger, Factorizer};
use crate::error::{Error, Result};
use crate::tetration::Tetrator;
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitStatus {
    Split,
    NoSplit,
    InputPrime,
    InputUnit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitOutcome {
    pub status: SplitStatus,
    #[serde(serialize_with = "crate::serde_util::big_opt")]
    pub divisor: Option<BigUint>,
    #[serde(serialize_with = "crate::serde_util::big_opt")]
    pub witness_base: Option<BigUint>,
    pub witness_height: Option<u64>,
}

impl SplitOutcome {
    fn bare(status: SplitStatus) -> Self {
        SplitOutcome { status, divisor: None, witness_base: None, witness_height: None }
    }

    pub fn is_split(&self) -> bool {
        self.status == SplitStatus::Split
    }
}

/// Knobs shared by the splitting front ends.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SplitConfig {
    /// Largest base tried; `None` means ⌈(log₂N)²⌉.
    pub base_bound: Option<u64>,
    /// Never consult the primality test before searching; nodes are only
    /// classified after the tetration probes have been exhausted.
    pub oracle_only_top: bool,
}

/// ⌈(log₂N)²⌉, at least 2.
pub fn default_base_bound(n: &BigUint) -> u64 {
    let log2 = log2_big(n);
    ((log2 * log2).ceil() as u64).max(2)
}

fn log2_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(1.0).log2();
    }
    let shift = bits - 60;
    let top = (n >> shift).to_f64().unwrap_or(1.0);
    top.log2() + shift as f64
}

/// Number of probe heights: k = 0..=⌈log₂N⌉.
fn probe_heights(n: &BigUint) -> u64 {
    let bits = n.bits();
    // ⌈log₂N⌉ is bits - 1 for a power of two, bits otherwise
    if n.is_zero() || (n & (n - 1u32)).is_zero() {
        bits.saturating_sub(1)
    } else {
        bits
    }
}

/// Run the g_k probes for one base.
pub fn tetration_split(n: &BigUint, a: &BigUint, fz: &Factorizer) -> Result<SplitOutcome> {
    if n.is_one() {
        return Ok(SplitOutcome::bare(SplitStatus::InputUnit));
    }
    if n.is_zero() {
        return Err(Error::InvalidInput("N must be positive".into()));
    }
    Ok(split_with(&Tetrator::new(n, fz)?, a))
}

/// Probes for one base against an already prepared oracle.
pub fn split_with(oracle: &Tetrator, a: &BigUint) -> SplitOutcome {
    let n = oracle.modulus();
    if n.is_one() {
        return SplitOutcome::bare(SplitStatus::InputUnit);
    }
    let top = probe_heights(n);
    let found = match (a.to_u64(), n.to_u64()) {
        (Some(a_small), Some(n_small)) => {
            let mut prev = oracle.tetrate_u64(a_small, 0).expect("word-sized chain");
            (0..=top).find_map(|k| {
                let next = oracle.tetrate_u64(a_small, k + 1).expect("word-sized chain");
                let g = next.sub_mod(&prev, &n_small).gcd(&n_small);
                prev = next;
                (g != 1 && g != n_small).then(|| (BigUint::from(g), k))
            })
        }
        _ => {
            let mut prev = oracle.tetrate(a, 0);
            (0..=top).find_map(|k| {
                let next = oracle.tetrate(a, k + 1);
                let g = Word::sub_mod(&next, &prev, n).gcd(n);
                prev = next;
                (!g.is_one() && &g != n).then_some((g, k))
            })
        }
    };
    match found {
        Some((divisor, k)) => {
            debug_assert!((n % &divisor).is_zero());
            SplitOutcome {
                status: SplitStatus::Split,
                divisor: Some(divisor),
                witness_base: Some(a.clone()),
                witness_height: Some(k),
            }
        }
        None => SplitOutcome::bare(SplitStatus::NoSplit),
    }
}

/// Result of scanning bases a = 2, 3, ..., bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitSearch {
    #[serde(flatten)]
    pub outcome: SplitOutcome,
    pub bases_tried: u64,
    pub base_bound: u64,
}

/// The first base in `2..=base_bound` (lowest base, then lowest height) whose probes split N.
pub fn find_split(n: &BigUint, base_bound: u64, fz: &Factorizer) -> Result<SplitSearch> {
    if n.is_zero() {
        return Err(Error::InvalidInput("N must be positive".into()));
    }
    if n.is_one() {
        return Ok(SplitSearch {
            outcome: SplitOutcome::bare(SplitStatus::InputUnit),
            bases_tried: 0,
            base_bound,
        });
    }
    Ok(find_split_with(&Tetrator::new(n, fz)?, base_bound))
}

pub fn find_split_with(oracle: &Tetrator, base_bound: u64) -> SplitSearch {
    let found = (2..=base_bound)
        .into_par_iter()
        .map(|a| split_with(oracle, &BigUint::from(a)))
        .find_first(SplitOutcome::is_split);
    match found {
        Some(outcome) => {
            let a = outcome.witness_base.as_ref().and_then(ToPrimitive::to_u64).unwrap_or(2);
            SplitSearch { outcome, bases_tried: a - 1, base_bound }
        }
        None => SplitSearch {
            outcome: SplitOutcome::bare(SplitStatus::NoSplit),
            bases_tried: base_bound.saturating_sub(1),
            base_bound,
        },
    }
}

/// Like [`find_split`], but reports `InputPrime` for primes without searching
/// (unless `oracle_only_top` is set).
pub fn classify_and_split(n: &BigUint, cfg: &SplitConfig, fz: &Factorizer) -> Result<SplitSearch> {
    let bound = cfg.base_bound.unwrap_or_else(|| default_base_bound(n));
    if !cfg.oracle_only_top && is_prime(n) {
        return Ok(SplitSearch {
            outcome: SplitOutcome::bare(SplitStatus::InputPrime),
            bases_tried: 0,
            base_bound: bound,
        });
    }
    let mut search = find_split(n, bound, fz)?;
    if search.outcome.status == SplitStatus::NoSplit && is_prime(n) {
        search.outcome.status = SplitStatus::InputPrime;
    }
    Ok(search)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeafKind {
    Unit,
    Prime,
    /// No base within the bound split this node; squarefree only conditionally.
    NoSplit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SplitSource {
    /// Division by 2 or 3, done before any tetration probe.
    SmallPrime { prime: u32 },
    Tetration {
        #[serde(serialize_with = "crate::serde_util::big")]
        base: BigUint,
        height: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "node", rename_all = "kebab-case")]
pub enum FactorNode {
    Leaf {
        #[serde(serialize_with = "crate::serde_util::big")]
        value: BigUint,
        leaf: LeafKind,
    },
    /// value = u·v with g = gcd(u, v); children are u/g and value/(u·g).
    Split {
        #[serde(serialize_with = "crate::serde_util::big")]
        value: BigUint,
        #[serde(serialize_with = "crate::serde_util::big")]
        u: BigUint,
        #[serde(serialize_with = "crate::serde_util::big")]
        g: BigUint,
        source: SplitSource,
        left: Box<FactorNode>,
        right: Box<FactorNode>,
    },
}

impl FactorNode {
    pub fn value(&self) -> &BigUint {
        match self {
            FactorNode::Leaf { value, .. } | FactorNode::Split { value, .. } => value,
        }
    }

    /// r(node) = r(left)·r(right); a leaf is its own squarefree part.
    pub fn squarefree_part(&self) -> BigUint {
        match self {
            FactorNode::Leaf { value, .. } => value.clone(),
            FactorNode::Split { left, right, .. } => left.squarefree_part() * right.squarefree_part(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            FactorNode::Leaf { .. } => 0,
            FactorNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaves(&self) -> Vec<(&BigUint, &LeafKind)> {
        match self {
            FactorNode::Leaf { value, leaf } => vec![(value, leaf)],
            FactorNode::Split { left, right, .. } => {
                let mut out = left.leaves();
                out.extend(right.leaves());
                out
            }
        }
    }

    /// Structural check: value = left·right·g² and each child is at most half its parent.
    pub fn verify(&self) -> bool {
        match self {
            FactorNode::Leaf { .. } => true,
            FactorNode::Split { value, g, left, right, .. } => {
                let half = value / 2u32;
                left.value() * right.value() * g * g == *value
                    && *left.value() <= half
                    && *right.value() <= half
                    && left.verify()
                    && right.verify()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certification {
    /// Every leaf is 1 or a prime.
    Unconditional,
    /// Some composite leaf is declared squarefree because no base split it.
    Conditional,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SquarefreeResult {
    #[serde(serialize_with = "crate::serde_util::big")]
    pub r: BigUint,
    pub certified: Certification,
    pub tree: FactorNode,
}

/// r(N), the smallest r with N/r a square, via the recursive split tree.
pub fn squarefree_part(n: &BigUint, cfg: &SplitConfig, fz: &Factorizer) -> Result<SquarefreeResult> {
    if n.is_zero() {
        return Err(Error::InvalidInput("N must be positive".into()));
    }
    let tree = build_node(n.clone(), cfg, fz)?;
    let r = tree.squarefree_part();
    let certified = if tree.leaves().iter().any(|(_, k)| **k == LeafKind::NoSplit) {
        Certification::Conditional
    } else {
        Certification::Unconditional
    };
    Ok(SquarefreeResult { r, certified, tree })
}

fn build_node(n: BigUint, cfg: &SplitConfig, fz: &Factorizer) -> Result<FactorNode> {
    if n.is_one() {
        return Ok(FactorNode::Leaf { value: n, leaf: LeafKind::Unit });
    }
    for small in [2u32, 3] {
        let p = BigUint::from(small);
        if n == p {
            return Ok(FactorNode::Leaf { value: n, leaf: LeafKind::Prime });
        }
        if (&n % &p).is_zero() {
            return split_node(n, p, SplitSource::SmallPrime { prime: small }, cfg, fz);
        }
    }
    if !cfg.oracle_only_top && is_prime(&n) {
        return Ok(FactorNode::Leaf { value: n, leaf: LeafKind::Prime });
    }
    let bound = cfg.base_bound.unwrap_or_else(|| default_base_bound(&n));
    let search = find_split(&n, bound, fz)?;
    match search.outcome {
        SplitOutcome { status: SplitStatus::Split, divisor: Some(d), witness_base: Some(a), witness_height: Some(k) } => {
            split_node(n, d, SplitSource::Tetration { base: a, height: k }, cfg, fz)
        }
        _ => {
            let leaf = if is_prime(&n) { LeafKind::Prime } else { LeafKind::NoSplit };
            Ok(FactorNode::Leaf { value: n, leaf })
        }
    }
}

fn split_node(n: BigUint, u: BigUint, source: SplitSource, cfg: &SplitConfig, fz: &Factorizer) -> Result<FactorNode> {
    let v = &n / &u;
    let g = u.gcd(&v);
    let left = build_node(&u / &g, cfg, fz)?;
    let right = build_node(&n / (&u * &g), cfg, fz)?;
    Ok(FactorNode::Split { value: n, u, g, source, left: Box::new(left), right: Box::new(right) })
}

/// Multipliers tried by [`power_probe_schedule`]: 1 and the primorials up to 210.
pub const PROBE_MULTIPLIERS: [u64; 5] = [1, 2, 6, 30, 210];

/// gcd(a^(l(N-1)) - 1, N).
pub fn power_probe(n: &BigUint, a: &BigUint, l: u64) -> Result<BigUint> {
    if n < &BigUint::from(3u8) {
        return Err(Error::InvalidInput("power probe needs N >= 3".into()));
    }
    if !a.gcd(n).is_one() {
        return Err(Error::not_coprime(a.clone(), n.clone()));
    }
    let e = (n - 1u32) * l;
    let x = a.modpow(&e, n);
    Ok(Word::sub_mod(&x, &BigUint::one(), n).gcd(n))
}

/// First multiplier in [`PROBE_MULTIPLIERS`] whose probe gives a proper divisor.
pub fn power_probe_schedule(n: &BigUint, a: &BigUint) -> Result<Option<(u64, BigUint)>> {
    for &l in &PROBE_MULTIPLIERS {
        let g = power_probe(n, a, l)?;
        if !g.is_one() && &g != n {
            return Ok(Some((l, g)));
        }
    }
    Ok(None)
}

/// Complete factorization by repeated splitting; primes are recognised by the
/// primality test, and anything that neither splits nor tests prime is an error.
pub fn full_factorization_via_mtp(n: &BigUint, cfg: &SplitConfig, fz: &Factorizer) -> Result<FactoredInteger> {
    if n.is_zero() {
        return Err(Error::InvalidInput("N must be positive".into()));
    }
    let mut primes = std::collections::BTreeMap::new();
    let mut stack = vec![n.clone()];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if !cfg.oracle_only_top && is_prime(&m) {
            *primes.entry(m).or_insert(0) += 1;
            continue;
        }
        let bound = cfg.base_bound.unwrap_or_else(|| default_base_bound(&m));
        let search = find_split(&m, bound, fz)?;
        match search.outcome.divisor {
            Some(d) => {
                stack.push(&m / &d);
                stack.push(d);
            }
            None if is_prime(&m) => *primes.entry(m).or_insert(0) += 1,
            None => return Err(Error::Unresolved { cofactor: m }),
        }
    }
    Ok(FactoredInteger::from_trusted(primes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn fz() -> Factorizer {
        Factorizer::default()
    }

    #[test]
    fn split_examples() {
        let out = tetration_split(&big(60507095029), &big(2), &fz()).unwrap();
        assert_eq!(out.status, SplitStatus::Split);
        assert_eq!(out.divisor, Some(big(224951)));
        // gcd(⁶2 - ⁵2, N) = 1; the divisor appears one probe later
        assert_eq!(out.witness_height, Some(6));

        let out = tetration_split(&big(15), &big(2), &fz()).unwrap();
        assert_eq!(out.divisor, Some(big(3)));
        assert_eq!(out.witness_height, Some(2));

        let out = tetration_split(&big(7), &big(2), &fz()).unwrap();
        assert_eq!(out.status, SplitStatus::NoSplit);
        assert_eq!(tetration_split(&big(1), &big(2), &fz()).unwrap().status, SplitStatus::InputUnit);
    }

    #[test]
    fn find_split_examples() {
        let s = find_split(&big(15), 10, &fz()).unwrap();
        assert_eq!(s.outcome.witness_base, Some(big(2)));
        assert_eq!(s.bases_tried, 1);
        let s = find_split(&big(101), 40, &fz()).unwrap();
        assert_eq!(s.outcome.status, SplitStatus::NoSplit);
        assert_eq!(s.bases_tried, 39);
    }

    #[test]
    fn classify_marks_primes() {
        let s = classify_and_split(&big(101), &SplitConfig::default(), &fz()).unwrap();
        assert_eq!(s.outcome.status, SplitStatus::InputPrime);
        let cfg = SplitConfig { oracle_only_top: true, ..Default::default() };
        let s = classify_and_split(&big(101), &cfg, &fz()).unwrap();
        assert_eq!(s.outcome.status, SplitStatus::InputPrime);
        assert!(s.bases_tried > 0);
    }

    #[test]
    fn default_bound() {
        assert_eq!(default_base_bound(&big(16)), 16);
        assert_eq!(default_base_bound(&big(15)), 16);
        assert_eq!(default_base_bound(&big(1024)), 100);
        assert_eq!(default_base_bound(&big(2)), 2);
        assert_eq!(probe_heights(&big(1024)), 10);
        assert_eq!(probe_heights(&big(1025)), 11);
    }

    #[test]
    fn squarefree_examples() {
        let cfg = SplitConfig::default();
        for (n, r) in [(12u64, 3u64), (1, 1), (360, 10), (49, 1), (5 * 5 * 7 * 7 * 7 * 11, 77)] {
            let res = squarefree_part(&big(n), &cfg, &fz()).unwrap();
            assert_eq!(res.r, big(r), "r({n})");
            assert!(res.tree.verify());
        }
    }

    #[test]
    fn probe_examples() {
        assert_eq!(power_probe(&big(1541), &big(2), 1).unwrap(), big(23));
        assert_eq!(power_probe(&big(91), &big(3), 1).unwrap(), big(91));
        assert_eq!(power_probe(&big(35), &big(36), 1).unwrap(), big(35));
        assert!(matches!(power_probe(&big(91), &big(7), 1), Err(Error::NotCoprime { .. })));
        assert_eq!(power_probe_schedule(&big(1541), &big(2)).unwrap(), Some((1, big(23))));
    }

    #[test]
    fn full_factorization_examples() {
        let cfg = SplitConfig::default();
        assert_eq!(full_factorization_via_mtp(&big(15), &cfg, &fz()).unwrap().to_string(), "3*5");
        assert_eq!(full_factorization_via_mtp(&big(8), &cfg, &fz()).unwrap().to_string(), "2^3");
        assert_eq!(full_factorization_via_mtp(&big(17), &cfg, &fz()).unwrap().to_string(), "17");
        assert!(full_factorization_via_mtp(&big(1), &cfg, &fz()).unwrap().is_one());
        let f = full_factorization_via_mtp(&big(60507095029), &cfg, &fz()).unwrap();
        assert_eq!(f.to_string(), "224951*268979");
    }
}
