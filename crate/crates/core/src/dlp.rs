//! Tetration from iterated multiplicative orders alone.
//!
//! Instead of the λ-chain of N, this path only asks an order oracle for
//! ord⁽¹⁾(a), ord⁽²⁾(a), ... where each order is taken modulo the part of
//! the previous one coprime to a. The oracle is a discrete-log solver
//! (baby-step giant-step by default), so the construction shows that modular
//! tetration reduces to discrete logarithms. The stabilization height is the
//! crude h = ⌈log₂ N⌉, which needs no factorization.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::Factorizer;
use crate::error::{Error, Result};
use crate::order::multiplicative_order_factored;
use crate::tetration::{tower_threshold, Threshold, TetrationQuery};
use crate::word::{crt_pair, inv_mod_big, orthogonal_split, Word};

/// Default cap on the modulus handed to baby-step giant-step.
pub const DEFAULT_BSGS_CAP: u64 = 1 << 48;
/// Default cap on the modulus for the brute-force order search.
pub const DEFAULT_BRUTE_CAP: u64 = 1 << 32;

/// Smallest x ≥ 0 with gˣ ≡ h (mod n), by baby-step giant-step.
pub fn discrete_log(g: &BigUint, h: &BigUint, n: &BigUint) -> Result<BigUint> {
    discrete_log_with_cap(g, h, n, DEFAULT_BSGS_CAP)
}

pub fn discrete_log_with_cap(g: &BigUint, h: &BigUint, n: &BigUint, cap: u64) -> Result<BigUint> {
    if n.is_zero() {
        return Err(Error::InvalidInput("modulus must be at least 1".into()));
    }
    if !g.gcd(n).is_one() {
        return Err(Error::not_coprime(g.clone(), n.clone()));
    }
    if n.is_one() {
        return Ok(BigUint::zero());
    }
    let n64 = n.to_u64().filter(|&v| v <= cap).ok_or_else(|| Error::TooLarge {
        what: "discrete-log modulus",
        size: n.clone(),
        cap: BigUint::from(cap),
    })?;
    let g = (g % n).to_u64().expect("reduced below n");
    let h = (h % n).to_u64().expect("reduced below n");
    bsgs(g, h, n64).map(BigUint::from).ok_or(Error::NoSolution)
}

fn bsgs(g: u64, h: u64, n: u64) -> Option<u64> {
    // The order of g is below n, so x < m² with m = ⌈√n⌉ covers every solution.
    let m = (n as f64).sqrt().ceil() as u64 + 1;
    let mut baby: HashMap<u64, u64> = HashMap::with_capacity(m as usize);
    let mut e = 1 % n;
    for j in 0..m {
        baby.entry(e).or_insert(j);
        e = e.mul_mod(&g, &n);
    }
    let giant = g.pow_mod(&m, &n).inv_mod(&n).expect("g is a unit");
    let mut gamma = h;
    for i in 0..=m {
        if let Some(&j) = baby.get(&gamma) {
            return Some(i * m + j);
        }
        gamma = gamma.mul_mod(&giant, &n);
    }
    None
}

/// How the oracle answers order queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderMethod {
    /// ord_n(a) = dlog_a(a⁻¹) + 1.
    Bsgs,
    /// Repeated multiplication.
    Brute,
    /// Factor n and refine λ(n).
    FactoredRefinement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderQuery {
    #[serde(serialize_with = "crate::serde_util::big")]
    pub base: BigUint,
    #[serde(serialize_with = "crate::serde_util::big")]
    pub modulus: BigUint,
    #[serde(serialize_with = "crate::serde_util::big")]
    pub order: BigUint,
}

/// Every order the oracle handed out, in query order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderOracleTrace {
    pub method: OrderMethod,
    pub queries: Vec<OrderQuery>,
}

impl OrderOracleTrace {
    /// Each order annihilates its base and no proper divisor does.
    pub fn verify(&self, fz: &Factorizer) -> Result<bool> {
        for q in &self.queries {
            if !Word::pow_mod(&q.base, &q.order, &q.modulus).is_one() && !q.modulus.is_one() {
                return Ok(false);
            }
            for p in fz.factorize(&q.order)?.factors().keys() {
                if Word::pow_mod(&q.base, &(&q.order / p), &q.modulus).is_one() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[derive(Debug, Clone)]
pub struct OrderOracle {
    pub method: OrderMethod,
    pub bsgs_cap: u64,
    pub brute_cap: u64,
    fz: Factorizer,
}

impl OrderOracle {
    pub fn new(method: OrderMethod) -> Self {
        OrderOracle { method, bsgs_cap: DEFAULT_BSGS_CAP, brute_cap: DEFAULT_BRUTE_CAP, fz: Factorizer::default() }
    }

    pub fn with_factorizer(mut self, fz: Factorizer) -> Self {
        self.fz = fz;
        self
    }

    /// ord_n(a). Requires gcd(a, n) = 1.
    pub fn order(&self, a: &BigUint, n: &BigUint) -> Result<BigUint> {
        if n.is_zero() {
            return Err(Error::InvalidInput("modulus must be at least 1".into()));
        }
        if !a.gcd(n).is_one() {
            return Err(Error::not_coprime(a.clone(), n.clone()));
        }
        if n.is_one() {
            return Ok(BigUint::one());
        }
        match self.method {
            OrderMethod::Bsgs => {
                let inv = inv_mod_big(a, n).expect("a is a unit");
                Ok(discrete_log_with_cap(a, &inv, n, self.bsgs_cap)? + 1u32)
            }
            OrderMethod::Brute => {
                let n64 = n.to_u64().filter(|&v| v <= self.brute_cap).ok_or_else(|| Error::TooLarge {
                    what: "brute-force order modulus",
                    size: n.clone(),
                    cap: BigUint::from(self.brute_cap),
                })?;
                let a64 = (a % n).to_u64().expect("reduced below n");
                let mut x = a64;
                let mut m = 1u64;
                while x != 1 {
                    x = x.mul_mod(&a64, &n64);
                    m += 1;
                }
                Ok(BigUint::from(m))
            }
            OrderMethod::FactoredRefinement => multiplicative_order_factored(a, n, &self.fz),
        }
    }

    fn traced(&self, a: &BigUint, n: &BigUint, trace: &mut OrderOracleTrace) -> Result<BigUint> {
        let order = self.order(a, n)?;
        trace.queries.push(OrderQuery { base: a.clone(), modulus: n.clone(), order: order.clone() });
        Ok(order)
    }
}

impl Default for OrderOracle {
    fn default() -> Self {
        OrderOracle::new(OrderMethod::Bsgs)
    }
}

/// ord_n(a) by baby-step giant-step, or by factored refinement beyond the BSGS cap.
pub fn multiplicative_order(a: &BigUint, n: &BigUint) -> Result<BigUint> {
    match OrderOracle::default().order(a, n) {
        Err(Error::TooLarge { .. }) => multiplicative_order_factored(a, n, &Factorizer::default()),
        other => other,
    }
}

/// The run of the order-only algorithm, for inspection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DlpTetration {
    #[serde(serialize_with = "crate::serde_util::big")]
    pub residue: BigUint,
    /// ⌈log₂ N⌉.
    pub h: u64,
    /// min(k, h + 1): the height actually evaluated.
    pub m: u64,
    /// Smallest g with ᵍa > N, if reached within height m.
    pub g: Option<u64>,
    /// N, ord⁽¹⁾(a), ord⁽²⁾(a), ... as far as the run needed.
    #[serde(serialize_with = "crate::serde_util::big_vec")]
    pub order_chain: Vec<BigUint>,
    pub trace: OrderOracleTrace,
}

/// ⌈log₂ n⌉ for n ≥ 1.
pub fn ceil_log2(n: &BigUint) -> u64 {
    if n <= &BigUint::one() {
        0
    } else {
        (n - 1u32).bits()
    }
}

/// W = gcd(a^h mod o, o); equals the non-coprime part of o once h bounds its exponents.
pub fn w_part(a: &BigUint, h: u64, o: &BigUint) -> BigUint {
    Word::pow_mod(a, &BigUint::from(h), o).gcd(o)
}

/// ᵏa mod N using only iterated multiplicative orders.
pub fn tetration_mod_via_orders(q: &TetrationQuery) -> Result<BigUint> {
    Ok(tetration_via_orders_traced(q, &OrderOracle::default())?.residue)
}

pub fn tetration_via_orders_traced(q: &TetrationQuery, oracle: &OrderOracle) -> Result<DlpTetration> {
    let (a, k, n) = (&q.base, q.height, &q.modulus);
    let h = ceil_log2(n);
    let m = k.min(h + 1);
    let mut run = DlpTetration {
        residue: BigUint::zero(),
        h,
        m,
        g: None,
        order_chain: vec![n.clone()],
        trace: OrderOracleTrace { method: oracle.method, queries: Vec::new() },
    };
    if n.is_one() {
        return Ok(run);
    }
    if m == 0 || a.is_one() {
        run.residue = BigUint::one();
        return Ok(run);
    }
    let (g, below) = match tower_threshold(a, n, m) {
        Threshold::Within(exact) => {
            run.residue = exact % n;
            return Ok(run);
        }
        Threshold::Exceeds { g, below } => (g, below),
    };
    run.g = Some(g);
    let depth = (m - g) as usize;

    // ord⁽ⁱ⁺¹⁾ is the order of a modulo the coprime part of ord⁽ⁱ⁾.
    for i in 0..depth {
        let o = &run.order_chain[i];
        let v = o / w_part(a, h, o);
        let next = oracle.traced(a, &v, &mut run.trace)?;
        run.order_chain.push(next);
    }

    let mut b = Word::pow_mod(a, &below, &run.order_chain[depth]);
    for o in run.order_chain[..depth].iter().rev() {
        let w = w_part(a, h, o);
        let v = o / &w;
        let on_v = if v.is_one() { BigUint::zero() } else { Word::pow_mod(a, &b, &v) };
        b = crt_pair(&on_v, &v, &BigUint::zero(), &w).expect("orthogonal parts are coprime");
    }
    run.residue = b;
    Ok(run)
}

/// Does the gcd-based W extraction agree with stripping the primes of a?
pub fn w_part_matches_orthogonal(a: &BigUint, h: u64, o: &BigUint) -> bool {
    let (_, w) = orthogonal_split(a, o);
    w_part(a, h, o) == w
}
