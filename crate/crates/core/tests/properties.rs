//! Exhaustive and randomized invariants across the library.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;
use rayon::prelude::*;

use tetrakit::arith::{crt, ResidueSystem};
use tetrakit::dlp::{tetration_via_orders_traced, w_part_matches_orthogonal, OrderOracle};
use tetrakit::level::{l_a, level_decompose, level_direct, level_lower_bound, order_chain};
use tetrakit::omega::OmegaCalculator;
use tetrakit::reduction::{
    default_base_bound, find_split, squarefree_part, tetration_split, SplitConfig, SplitStatus,
};
use tetrakit::tetration::exact_tower;
use tetrakit::{
    is_prime, lambda, naive_tetration_mod, orthogonal_decomposition, Factorizer, LambdaChain, NaiveMode,
    TetrationQuery, Tetrator,
};

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn fz() -> Factorizer {
    Factorizer::default()
}

fn radical(mut n: u64) -> u64 {
    let mut r = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            r *= d;
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        r *= n;
    }
    r
}

fn totient(n: u64) -> u64 {
    (1..=n).filter(|x| x.gcd(&n) == 1).count() as u64
}

// ---------------------------------------------------------------- Carmichael

#[test]
fn lambda_basic_properties() {
    let fz = fz();
    let lam: Vec<u64> = (0..=2000u64)
        .map(|n| if n == 0 { 0 } else { lambda(&fz.factorize(&big(n)).unwrap(), &fz).unwrap().value().to_u64().unwrap() })
        .collect();
    for n in 2..=2000u64 {
        let l = lam[n as usize];
        assert!(l < n, "λ({n}) = {l}");
        if n >= 3 {
            assert_eq!(l % 2, 0, "λ({n}) odd");
        }
        if n % 2 == 0 {
            assert!(l <= n / 2, "λ({n}) = {l}");
        }
        for d in 1..=n {
            if n % d == 0 {
                assert_eq!(l % lam[d as usize], 0, "λ({d}) ∤ λ({n})");
            }
        }
    }
}

#[test]
fn lambda_chain_shape() {
    let fz = fz();
    for n in 1..=2000u64 {
        let chain = LambdaChain::new(&big(n), &fz).unwrap();
        let values: Vec<&BigUint> = chain.values().collect();
        assert!(values.last().unwrap().is_one());
        assert!(values.windows(2).all(|w| w[1] < w[0] || w[0].is_one()));
        let l = values.iter().fold(BigUint::one(), |acc, v| acc.lcm(v));
        assert_eq!(&l, chain.big_l());
    }
}

#[test]
fn orthogonal_decomposition_properties() {
    (1..=500u64).into_par_iter().for_each(|n| {
        for a in 1..=500u64 {
            let d = orthogonal_decomposition(&big(a), &big(n));
            let (v, w) = (d.v.to_u64().unwrap(), d.w.to_u64().unwrap());
            assert_eq!(v * w, n);
            assert_eq!(v.gcd(&a), 1);
            assert_eq!(radical(a) % radical(w), 0, "rad(W) ∤ rad(a) for a={a}, n={n}");
        }
    });
}

// ------------------------------------------------------------------ tetration

#[test]
fn residue_sequence_has_constant_tail_by_h_plus_one() {
    let fz = fz();
    (1..=300u64).into_par_iter().for_each(|n| {
        let t = Tetrator::new(&big(n), &fz).unwrap();
        let h = t.chain().height();
        for a in 1..=12u64 {
            let seq = t.sequence(&big(a), h + 5);
            let tail = &seq[h + 1..];
            assert!(tail.iter().all(|x| x == &tail[0]), "a={a}, N={n}: {seq:?}");
            assert!(t.level(&big(a)) <= (h + 1) as u64);
        }
    });
}

#[test]
fn exponent_reduction_modulo_lambda() {
    // a^k ≡ a^j (mod n) whenever k ≡ j (mod λ(n)) and k ≥ j ≥ E(n).
    let fz = fz();
    for n in 1..=200u64 {
        let chain = LambdaChain::new(&big(n), &fz).unwrap();
        let lam = chain.values().nth(1).map(|v| v.to_u64().unwrap()).unwrap_or(1);
        let e = u64::from(chain.e_max());
        for a in 1..=20u64 {
            for j in e..e + lam {
                for t in 1..=3 {
                    let k = j + t * lam;
                    assert_eq!(
                        big(a).modpow(&big(k), &big(n)),
                        big(a).modpow(&big(j), &big(n)),
                        "a={a}, n={n}, j={j}, k={k}"
                    );
                }
            }
        }
    }
}

#[test]
fn tower_differences_divide_each_other() {
    // ᵏa - ᵏ⁻¹a divides ᵏ⁺¹a - ᵏa, on towers small enough to hold exactly.
    let budget = 1 << 20;
    for a in 1..=20u64 {
        let towers: Vec<BigUint> = (0..)
            .map_while(|k| exact_tower(&big(a), k, budget))
            .take(8)
            .collect();
        for k in 1..towers.len().saturating_sub(1) {
            let d0 = &towers[k] - &towers[k - 1];
            let d1 = &towers[k + 1] - &towers[k];
            if d0.is_zero() {
                assert!(d1.is_zero());
            } else {
                assert!((&d1 % &d0).is_zero(), "a={a}, k={k}");
            }
        }
    }
}

// ---------------------------------------------------------------------- level

#[test]
fn order_chain_reaches_one_within_height() {
    let fz = fz();
    (1..=500u64).into_par_iter().for_each(|n| {
        let chain = LambdaChain::new(&big(n), &fz).unwrap();
        let lam: Vec<BigUint> = chain.values().cloned().collect();
        for a in 1..=30u64 {
            let ords = order_chain(&big(a), &big(n), &fz).unwrap();
            let first_one = ords.iter().position(One::is_one).expect("chain ends in 1");
            assert!(first_one <= chain.height() + 1, "a={a}, n={n}: {ords:?}");
            // each iterated order divides the matching λ iterate
            for (o, l) in ords.iter().zip(lam.iter().chain(std::iter::repeat(&BigUint::one()))) {
                assert!((l % o).is_zero(), "a={a}, n={n}: {o} ∤ {l}");
            }
        }
    });
}

#[test]
fn level_lower_bound_holds_for_every_base() {
    let fz = fz();
    (1..=300u64).into_par_iter().for_each(|n| {
        let t = Tetrator::new(&big(n), &fz).unwrap();
        for a in 1..=300u64 {
            let lev = t.level(&big(a));
            let lower = level_lower_bound(&big(a), &big(n), &fz).unwrap();
            assert!(lev >= lower, "a={a}, n={n}: level {lev} < {lower}");
        }
    });
}

#[test]
fn level_depends_on_base_modulo_l_a() {
    let fz = fz();
    (2..=200u64).into_par_iter().for_each(|n| {
        let l = LambdaChain::new(&big(n), &fz).unwrap().big_l().clone();
        for a in 2..=100u64 {
            if !big(a).gcd(&l).is_one() {
                continue;
            }
            let la = l_a(&big(a), &big(n), &fz).unwrap();
            let reduced = big(a) % &la;
            assert_eq!(
                level_direct(&big(a), &big(n), &fz).unwrap(),
                level_direct(&reduced, &big(n), &fz).unwrap(),
                "a={a}, n={n}, L_a={la}"
            );
        }
    });
}

#[test]
fn level_direct_matches_exact_towers() {
    let fz = fz();
    let budget = 1 << 20;
    for a in 1..=12u64 {
        let towers: Vec<BigUint> = (0..).map_while(|k| exact_tower(&big(a), k, budget)).take(7).collect();
        for n in 1..=150u64 {
            let r: Vec<BigUint> = towers.iter().map(|t| t % big(n)).collect();
            if let Some(k) = (0..r.len() - 1).find(|&k| r[k] == r[k + 1]) {
                // towers stabilise for good once two consecutive residues agree
                assert_eq!(level_direct(&big(a), &big(n), &fz).unwrap(), k as u64, "a={a}, n={n}");
            }
        }
    }
}

// ----------------------------------------------------------------- reduction

#[test]
fn split_found_iff_some_prime_level_differs() {
    let fz = fz();
    (2..=2000u64).into_par_iter().for_each(|n| {
        let f = fz.factorize(&big(n)).unwrap();
        if !f.is_squarefree() || is_prime(&big(n)) {
            return;
        }
        for a in 2..=20u64 {
            let parts = level_decompose(&big(a), &big(n), &fz).unwrap();
            let lev_n = level_direct(&big(a), &big(n), &fz).unwrap();
            assert_eq!(parts.max(), lev_n);
            let differs = parts.parts.values().any(|&l| l != lev_n);
            let out = tetration_split(&big(n), &big(a), &fz).unwrap();
            assert_eq!(out.is_split(), differs, "a={a}, N={n}");
        }
    });
}

#[test]
fn non_squarefree_inputs_coprime_to_six_always_split() {
    let fz = fz();
    (5..=2000u64).into_par_iter().for_each(|n| {
        if n % 2 == 0 || n % 3 == 0 {
            return;
        }
        let f = fz.factorize(&big(n)).unwrap();
        if f.is_squarefree() {
            return;
        }
        let search = find_split(&big(n), default_base_bound(&big(n)), &fz).unwrap();
        assert_eq!(search.outcome.status, SplitStatus::Split, "N={n}");
    });
}

#[test]
fn returned_divisors_are_proper() {
    let fz = fz();
    (2..=3000u64).into_par_iter().for_each(|n| {
        for a in 2..=10u64 {
            let out = tetration_split(&big(n), &big(a), &fz).unwrap();
            if let Some(d) = out.divisor {
                let d = d.to_u64().unwrap();
                assert!(d > 1 && d < n && n % d == 0, "a={a}, N={n}, d={d}");
            }
        }
    });
}

#[test]
fn squarefree_trees_reconstruct() {
    let fz = fz();
    let cfg = SplitConfig::default();
    let samples = [
        big(2).pow(20) * big(3).pow(7) * big(101),
        big(1_000_003) * big(1_000_003) * big(17),
        big(224951) * big(224951) * big(268979),
        big(60507095029),
        big(7).pow(9),
    ];
    for n in samples {
        let res = squarefree_part(&n, &cfg, &fz).unwrap();
        assert!(res.tree.verify(), "N={n}");
        assert_eq!(res.tree.value(), &n);
        assert_eq!(res.tree.squarefree_part(), res.r);
        assert_eq!(res.r, fz.factorize(&n).unwrap().squarefree_part(), "N={n}");
    }
}

// --------------------------------------------------------------------- omega

#[test]
fn omega_denominator_is_unit_count() {
    let calc = OmegaCalculator::default();
    for u in 1..=12u64 {
        for v in u..=12u64 {
            let r = calc.omega_brute(&big(u), &big(v)).unwrap();
            if r.big_l > big(100_000) {
                continue;
            }
            let l = r.big_l.to_u64().unwrap();
            assert_eq!(r.denominator, big(totient(l)));
            assert_eq!(big(r.units), r.denominator);
        }
    }
}

#[test]
fn residue_classes_split_units_evenly() {
    // |{x ∈ (Z/b)* : x ≡ c (mod a)}| = φ(b)/φ(a) for a | b and gcd(a, c) = 1.
    (1..=5000u64).into_par_iter().for_each(|b| {
        let units: Vec<u64> = (0..b).filter(|x| x.gcd(&b) == 1).collect();
        let phi_b = units.len() as u64;
        for a in (1..=b).filter(|a| b % a == 0) {
            let mut counts = vec![0u64; a as usize];
            for &x in &units {
                counts[(x % a) as usize] += 1;
            }
            let phi_a = (0..a).filter(|c| c.gcd(&a) == 1).count() as u64;
            for c in 0..a {
                if c.gcd(&a) == 1 {
                    assert_eq!(counts[c as usize] * phi_a, phi_b, "a={a}, b={b}, c={c}");
                }
            }
        }
    });
}

#[test]
fn omega_is_one_exactly_on_the_diagonal_and_odd_doubling_pairs() {
    // ω(r, r) = 1. Off the diagonal ω(r, s) = 1 also holds for {r, 2r} with r odd:
    // every unit modulo an even L is odd, so its level modulo 2 is 0 and
    // lev_{2r} = max(lev_2, lev_r) = lev_r.
    let calc = OmegaCalculator::default();
    for r in 1..=20u64 {
        for s in 1..=20u64 {
            let w = calc.omega_brute(&big(r), &big(s)).unwrap().omega;
            let odd_double = (s == 2 * r && r % 2 == 1) || (r == 2 * s && s % 2 == 1);
            assert_eq!(w.is_one(), r == s || odd_double, "ω({r}, {s}) = {w}");
        }
    }
}

#[test]
fn omega_is_symmetric_and_memo_is_consistent() {
    let calc = OmegaCalculator::default();
    for (u, v) in [(3u64, 7u64), (4, 9), (5, 12), (6, 10)] {
        let a = calc.omega_brute(&big(u), &big(v)).unwrap();
        let b = calc.omega_brute(&big(v), &big(u)).unwrap();
        assert_eq!(a.omega, b.omega);
        assert_eq!(calc.omega(&big(u), &big(v)).unwrap(), a.omega);
        assert_eq!(calc.omega(&big(v), &big(u)).unwrap(), a.omega);
    }
}

// ----------------------------------------------------------------------- dlp

#[test]
fn dlp_orders_divide_lambda_iterates_and_w_parts_match() {
    let fz = fz();
    let oracle = OrderOracle::default();
    (2..=300u64).into_par_iter().for_each(|n| {
        let lam: Vec<BigUint> = LambdaChain::new(&big(n), &fz).unwrap().values().cloned().collect();
        for a in 2..=15u64 {
            let q = TetrationQuery::new(a, 12, n).unwrap();
            let run = tetration_via_orders_traced(&q, &oracle).unwrap();
            for (i, o) in run.order_chain.iter().enumerate() {
                let l = lam.get(i).cloned().unwrap_or_else(BigUint::one);
                assert!((&l % o).is_zero(), "a={a}, N={n}: ord⁽{i}⁾ = {o} ∤ {l}");
                assert!(w_part_matches_orthogonal(&big(a), run.h, o));
            }
            assert!(run.trace.verify(&fz).unwrap());
        }
    });
}

// ------------------------------------------------------------------ random

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn crt_reproduces_each_residue(
        moduli in proptest::collection::vec(1u64..10_000, 1..5),
        residues in proptest::collection::vec(any::<u64>(), 5),
    ) {
        // keep a pairwise-coprime subset
        let mut kept: Vec<u64> = Vec::new();
        for m in moduli {
            if kept.iter().all(|k| k.gcd(&m) == 1) {
                kept.push(m);
            }
        }
        let pairs: Vec<(BigUint, BigUint)> = kept.iter().zip(&residues).map(|(&m, &r)| (big(r), big(m))).collect();
        let (x, modulus) = crt(&ResidueSystem::new(pairs.clone()).unwrap()).unwrap();
        prop_assert!(x < modulus);
        for (r, m) in pairs {
            prop_assert_eq!(&x % &m, r % &m);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn factorization_reconstructs(n in 1u64..u64::MAX) {
        let f = fz().factorize(&big(n)).unwrap();
        prop_assert_eq!(f.value(), &big(n));
        for p in f.factors().keys() {
            prop_assert!(is_prime(p));
        }
    }

    #[test]
    fn tetration_matches_squaring_chain(a in 2u64..6, k in 0u64..6, n in 1u64..1_000_000_000_000) {
        let q = TetrationQuery::new(a, k, n).unwrap();
        if let Ok(naive) = naive_tetration_mod(&q, NaiveMode::squaring_chain()) {
            prop_assert_eq!(Tetrator::new(&big(n), &fz()).unwrap().tetrate(&big(a), k), naive);
        }
    }

    #[test]
    fn dlp_bridge_matches_chain_on_larger_moduli(a in 2u64..1000, k in 0u64..40, n in 1u64..100_000_000) {
        let q = TetrationQuery::new(a, k, n).unwrap();
        let via_orders = tetrakit::dlp::tetration_mod_via_orders(&q).unwrap();
        prop_assert_eq!(via_orders, Tetrator::new(&big(n), &fz()).unwrap().tetrate(&big(a), k));
    }
}

#[test]
fn prime_power_level_formula_beyond_small_primes() {
    let fz = fz();
    [3u64, 5, 7, 11, 13, 17, 19, 23].into_par_iter().for_each(|p| {
        for e in 1..=5u32 {
            let m = big(p).pow(e);
            for a in 2..=60u64 {
                if a % p == 0 {
                    continue;
                }
                let formula = tetrakit::level::prime_power_level(&big(a), &big(p), e, &fz).unwrap();
                assert_eq!(formula, level_direct(&big(a), &m, &fz).unwrap(), "a={a}, {p}^{e}");
            }
        }
    });
}
