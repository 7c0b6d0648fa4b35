//! Tetration modulo N, given the ability to factor the λ-chain of N.
//!
//! The value of ᵏa mod N is assembled bottom-up: a seed residue modulo a deep
//! chain term is lifted one term at a time. At each step the next modulus m
//! is split as V·W with V coprime to a. Modulo V the next tower level is
//! a^(previous residue); modulo W it is 0, because the tower already exceeds
//! every exponent in W. The Chinese remainder theorem glues the two parts.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::Factorizer;
use crate::carmichael::LambdaChain;
use crate::error::{Error, Result};
use crate::word::{crt_pair, orthogonal_split, pow_capped, Word};

/// The triple (a, k, N) of a modular tetration question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TetrationQuery {
    pub base: BigUint,
    pub height: u64,
    pub modulus: BigUint,
}

impl TetrationQuery {
    pub fn new(base: impl Into<BigUint>, height: u64, modulus: impl Into<BigUint>) -> Result<Self> {
        let (base, modulus) = (base.into(), modulus.into());
        if base.is_zero() {
            return Err(Error::InvalidInput("tetration base must be at least 1".into()));
        }
        if modulus.is_zero() {
            return Err(Error::InvalidInput("modulus must be at least 1".into()));
        }
        Ok(TetrationQuery { base, height, modulus })
    }
}

pub(crate) enum Threshold<W> {
    /// ᵍa is the first tower value above the cap; `below` is ᵍ⁻¹a.
    Exceeds { g: u64, below: W },
    /// ˡⁱᵐⁱᵗa itself is still at most the cap.
    Within(W),
}

/// Walk the integer tower ⁰a, ¹a, ... up to `limit`, stopping at the first value above `cap`.
pub(crate) fn tower_threshold<W: Word>(a: &W, cap: &W, limit: u64) -> Threshold<W> {
    let mut t = W::w_one();
    for j in 1..=limit {
        match pow_capped(a, &t, cap) {
            Some(next) => t = next,
            None => return Threshold::Exceeds { g: j, below: t },
        }
    }
    Threshold::Within(t)
}

/// One lift: from `b ≡ ᵗa (mod λ(m))`-style data to the residue of ᵗ⁺¹a modulo `m`.
pub(crate) fn lift_step<W: Word>(a: &W, b: &W, v: &W, w: &W) -> W {
    let on_v = if v.w_is_one() { W::w_zero() } else { a.pow_mod(b, v) };
    crt_pair(&on_v, v, &W::w_zero(), w).expect("orthogonal parts are coprime")
}

/// ᵏa mod chain[0], where `chain` is the full λ-chain ending in 1.
pub(crate) fn tetrate_on_chain<W: Word>(a: &W, k: u64, chain: &[W]) -> W {
    let n = &chain[0];
    if n.w_is_one() {
        return W::w_zero();
    }
    if k == 0 || a.w_is_one() {
        return W::w_one();
    }
    let h = chain.len() - 1;
    let (mut b, below) = if k > h as u64 {
        // ᵏa ≡ ʰ⁺¹a. Seeds: ¹a ≡ 0 mod λ⁽ʰ⁾ = 1 and ²a ≡ a mod 2 = λ⁽ʰ⁻¹⁾.
        let seed = if a.w_is_even() { W::w_zero() } else { W::w_one() };
        (seed.w_rem(&chain[h - 1]), h - 1)
    } else {
        let k = k as usize;
        match tower_threshold(a, n, k as u64) {
            Threshold::Within(exact) => return exact.w_rem(n),
            Threshold::Exceeds { g, below } => {
                let depth = k - g as usize;
                (a.pow_mod(&below, &chain[depth]), depth)
            }
        }
    };
    for m in chain[..below].iter().rev() {
        let (v, w) = orthogonal_split(a, m);
        b = lift_step(a, &b, &v, &w);
    }
    b
}

#[derive(Debug, Clone)]
enum PreparedChain {
    Small(Vec<u64>),
    Big(Vec<BigUint>),
}

/// A modulus with its λ-chain computed once, for repeated tetration queries.
#[derive(Debug, Clone)]
pub struct Tetrator {
    chain: LambdaChain,
    prepared: PreparedChain,
}

impl Tetrator {
    pub fn new(modulus: &BigUint, fz: &Factorizer) -> Result<Self> {
        Ok(Self::from_chain(LambdaChain::new(modulus, fz)?))
    }

    pub fn from_chain(chain: LambdaChain) -> Self {
        let prepared = match chain.values().map(ToPrimitive::to_u64).collect::<Option<Vec<u64>>>() {
            Some(small) => PreparedChain::Small(small),
            None => PreparedChain::Big(chain.values().cloned().collect()),
        };
        Tetrator { chain, prepared }
    }

    pub fn chain(&self) -> &LambdaChain {
        &self.chain
    }

    pub fn modulus(&self) -> &BigUint {
        self.chain.modulus()
    }

    /// H(N) + 1: from this height on the residue no longer depends on k.
    pub fn stabilization_height(&self) -> usize {
        self.chain.height() + 1
    }

    /// ᵏa mod N.
    pub fn tetrate(&self, a: &BigUint, k: u64) -> BigUint {
        match (&self.prepared, a.to_u64()) {
            (PreparedChain::Small(chain), Some(a)) => BigUint::from(tetrate_on_chain(&a, k, chain)),
            (PreparedChain::Small(chain), None) => {
                let chain: Vec<BigUint> = chain.iter().map(|&c| BigUint::from(c)).collect();
                tetrate_on_chain(a, k, &chain)
            }
            (PreparedChain::Big(chain), _) => tetrate_on_chain(a, k, chain),
        }
    }

    /// Fast path for word-sized bases and moduli.
    pub fn tetrate_u64(&self, a: u64, k: u64) -> Option<u64> {
        match &self.prepared {
            PreparedChain::Small(chain) => Some(tetrate_on_chain(&a, k, chain)),
            PreparedChain::Big(_) => None,
        }
    }

    /// Residues of ⁰a, ¹a, ..., ˡᵉⁿ⁻¹a modulo N.
    pub fn sequence(&self, a: &BigUint, len: usize) -> Vec<BigUint> {
        (0..len as u64).map(|k| self.tetrate(a, k)).collect()
    }

    /// lev_N(a): the least k with ᵏ⁺¹a ≡ ᵏa (mod N).
    pub fn level(&self, a: &BigUint) -> u64 {
        if let Some(small) = a.to_u64() {
            if let Some(level) = self.level_u64(small) {
                return level;
            }
        }
        let mut prev = self.tetrate(a, 0);
        for k in 0.. {
            let next = self.tetrate(a, k + 1);
            if next == prev {
                return k;
            }
            prev = next;
        }
        unreachable!()
    }

    pub fn level_u64(&self, a: u64) -> Option<u64> {
        let PreparedChain::Small(chain) = &self.prepared else {
            return None;
        };
        let mut prev = tetrate_on_chain(&a, 0, chain);
        for k in 0.. {
            let next = tetrate_on_chain(&a, k + 1, chain);
            if next == prev {
                return Some(k);
            }
            prev = next;
        }
        unreachable!()
    }
}

/// ᵏa mod N via the λ-chain of N.
pub fn tetration_mod(q: &TetrationQuery, fz: &Factorizer) -> Result<BigUint> {
    Ok(Tetrator::new(&q.modulus, fz)?.tetrate(&q.base, q.height))
}

/// H(N) + 1.
pub fn stabilization_height(n: &BigUint, fz: &Factorizer) -> Result<usize> {
    Ok(LambdaChain::new(n, fz)?.height() + 1)
}

/// How [`naive_tetration_mod`] evaluates the tower without any chain knowledge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NaiveMode {
    /// Materialize ᵏ⁻¹a exactly (at most `bit_budget` bits), then one modular power.
    ExactTower { bit_budget: u64 },
    /// With E = ᵏ⁻²a exact and at most `iteration_cap`, start from a and raise to
    /// the a-th power E times (plain squaring when a = 2).
    SquaringChain { iteration_cap: u64 },
}

impl NaiveMode {
    pub const fn exact_tower() -> Self {
        NaiveMode::ExactTower { bit_budget: 1 << 24 }
    }

    pub const fn squaring_chain() -> Self {
        NaiveMode::SquaringChain { iteration_cap: 1 << 26 }
    }
}

/// ᵏa as an exact integer, if every intermediate stays within `bit_budget` bits.
pub fn exact_tower(a: &BigUint, k: u64, bit_budget: u64) -> Option<BigUint> {
    let mut t = BigUint::one();
    if a.is_one() || k == 0 {
        return Some(t);
    }
    let step_bits = a.bits() - 1;
    for _ in 0..k {
        let e = t.to_u64()?;
        if step_bits.checked_mul(e)? > bit_budget {
            return None;
        }
        t = a.pow(u32::try_from(e).ok()?);
        if t.bits() > bit_budget {
            return None;
        }
    }
    Some(t)
}

/// Reference value of ᵏa mod N that never looks at the λ-chain.
pub fn naive_tetration_mod(q: &TetrationQuery, mode: NaiveMode) -> Result<BigUint> {
    let n = &q.modulus;
    let a = &q.base;
    if q.height == 0 {
        return Ok(BigUint::one() % n);
    }
    match mode {
        NaiveMode::ExactTower { bit_budget } => {
            let e = exact_tower(a, q.height - 1, bit_budget).ok_or_else(|| {
                Error::OracleInfeasible(format!(
                    "tower of height {} over {a} exceeds {bit_budget} bits",
                    q.height - 1
                ))
            })?;
            Ok(Word::pow_mod(a, &e, n))
        }
        NaiveMode::SquaringChain { iteration_cap } => {
            if q.height == 1 {
                return Ok(a % n);
            }
            let rounds = exact_tower(a, q.height - 2, 64)
                .and_then(|e| e.to_u64())
                .filter(|&e| e <= iteration_cap)
                .ok_or_else(|| {
                    Error::OracleInfeasible(format!(
                        "top exponent of height {} over {a} exceeds {iteration_cap} rounds",
                        q.height - 2
                    ))
                })?;
            let mut x = a % n;
            for _ in 0..rounds {
                x = Word::pow_mod(&x, a, n);
            }
            Ok(x)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn tet(a: u64, k: u64, n: u64) -> BigUint {
        tetration_mod(&TetrationQuery::new(a, k, n).unwrap(), &Factorizer::default()).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(tet(2, 3, 10), big(6));
        for a in 1..10 {
            assert_eq!(tet(a, 0, 7), big(1));
            assert_eq!(tet(a, 0, 1), big(0));
        }
        assert_eq!(tet(1, 50, 9), big(1));
    }

    #[test]
    fn sixty_billion_example_divisor() {
        // N = 224951 · 268979. ⁶2 mod N is also reachable by squaring 2 exactly
        // 65536 times, which is what the naive squaring chain does. The levels of
        // 2 are 6 modulo 224951 and 8 modulo 268979, so the first probe that
        // separates the primes compares ⁷2 with ⁶2; ⁶2 and ⁵2 still differ modulo both.
        let fz = Factorizer::default();
        let n = big(60507095029);
        let t = Tetrator::new(&n, &fz).unwrap();
        let gap = |k: u64| {
            let (hi, lo) = (t.tetrate(&big(2), k + 1), t.tetrate(&big(2), k));
            let diff = if hi >= lo { &hi - &lo } else { &n - (&lo - &hi) };
            num_integer::Integer::gcd(&diff, &n)
        };
        assert_eq!(gap(5), big(1));
        assert_eq!(gap(6), big(224951));
        assert_eq!(t.tetrate(&big(2), 5), big(57510861392));
        assert_eq!(t.tetrate(&big(2), 6), big(40854113651));
        let naive = naive_tetration_mod(
            &TetrationQuery::new(2u32, 6, n.clone()).unwrap(),
            NaiveMode::squaring_chain(),
        )
        .unwrap();
        assert_eq!(naive, t.tetrate(&big(2), 6));
        assert_eq!(t.level(&big(2)), 8);
        assert_eq!(Tetrator::new(&big(224951), &fz).unwrap().level(&big(2)), 6);
    }

    #[test]
    fn naive_examples() {
        let q = TetrationQuery::new(2u32, 4, 100u32).unwrap();
        assert_eq!(naive_tetration_mod(&q, NaiveMode::exact_tower()).unwrap(), big(36));
        let q = TetrationQuery::new(3u32, 2, 7u32).unwrap();
        assert_eq!(naive_tetration_mod(&q, NaiveMode::exact_tower()).unwrap(), big(6));
        let q = TetrationQuery::new(3u32, 5, 7u32).unwrap();
        assert!(matches!(
            naive_tetration_mod(&q, NaiveMode::exact_tower()),
            Err(Error::OracleInfeasible(_))
        ));
        let q = TetrationQuery::new(2u32, 7, 7u32).unwrap();
        assert!(naive_tetration_mod(&q, NaiveMode::squaring_chain()).is_err());
    }

    #[test]
    fn naive_modes_agree() {
        for n in 1u64..60 {
            for a in 1u64..6 {
                for k in 0..5 {
                    let q = TetrationQuery::new(a, k, n).unwrap();
                    let exact = naive_tetration_mod(&q, NaiveMode::exact_tower());
                    let chain = naive_tetration_mod(&q, NaiveMode::squaring_chain());
                    if let (Ok(x), Ok(y)) = (exact, chain) {
                        assert_eq!(x, y, "a={a} k={k} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn stabilization_examples() {
        let fz = Factorizer::default();
        assert_eq!(stabilization_height(&big(1), &fz).unwrap(), 1);
        assert_eq!(stabilization_height(&big(10), &fz).unwrap(), 4);
        assert_eq!(stabilization_height(&big(2), &fz).unwrap(), 2);
    }

    #[test]
    fn huge_base_matches_reduced_base() {
        // L(360) = 360 and E(360) = 3, so bases congruent mod 360 and >= 3 agree.
        let fz = Factorizer::default();
        let t = Tetrator::new(&big(360), &fz).unwrap();
        assert_eq!(t.chain().big_l(), &big(360));
        let shift = BigUint::from(360u32) * BigUint::from(u64::MAX);
        for a in 3u64..40 {
            let huge = &shift + a;
            for k in 0..8 {
                assert_eq!(t.tetrate(&huge, k), t.tetrate(&big(a), k), "a={a} k={k}");
            }
        }
    }

    #[test]
    fn tower_threshold_finds_first_exceedance() {
        match tower_threshold(&2u64, &100, 10) {
            Threshold::Exceeds { g, below } => assert_eq!((g, below), (4, 16)),
            Threshold::Within(_) => panic!(),
        }
        match tower_threshold(&2u64, &100, 2) {
            Threshold::Within(v) => assert_eq!(v, 4),
            Threshold::Exceeds { .. } => panic!(),
        }
    }
}
