use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::word::pow_mod_u64;

const SMALL_PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Witness set that is deterministic for every n < 2^64.
const U64_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic below 2^64; Baillie-PSW above. A `false` is always correct.
pub fn is_prime(n: &BigUint) -> bool {
    match n.to_u64() {
        Some(small) => is_prime_u64(small),
        None => is_prime_bpsw(n),
    }
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &U64_WITNESSES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((u128::from(x) * u128::from(x)) % u128::from(n)) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Strong base-2 Miller-Rabin followed by a strong Lucas test (Selfridge parameters).
pub fn is_prime_bpsw(n: &BigUint) -> bool {
    if *n < BigUint::from(2u8) {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    strong_probable_prime(n, &BigUint::from(2u8)) && strong_lucas(n)
}

fn strong_probable_prime(n: &BigUint, base: &BigUint) -> bool {
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = base.modpow(&d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol (a/n) for odd n, with `a` given as a signed small value.
fn jacobi(a: i64, n: &BigUint) -> i32 {
    let mut a = if a >= 0 {
        BigUint::from(a as u64) % n
    } else {
        let r = BigUint::from(a.unsigned_abs()) % n;
        if r.is_zero() {
            r
        } else {
            n - r
        }
    };
    let mut n = n.clone();
    let mut result = 1;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        if tz % 2 == 1 {
            let n8 = (&n % 8u32).to_u32().unwrap_or(0);
            if n8 == 3 || n8 == 5 {
                result = -result;
            }
        }
        a >>= tz;
        if (&a % 4u32).to_u32() == Some(3) && (&n % 4u32).to_u32() == Some(3) {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= &n;
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

fn half_mod(x: BigUint, n: &BigUint) -> BigUint {
    if x.is_odd() {
        (x + n) >> 1
    } else {
        x >> 1
    }
}

fn signed_residue(v: i64, n: &BigUint) -> BigUint {
    let r = BigUint::from(v.unsigned_abs()) % n;
    if v >= 0 || r.is_zero() {
        r
    } else {
        n - r
    }
}

fn strong_lucas(n: &BigUint) -> bool {
    let root = n.sqrt();
    if &root * &root == *n {
        return false;
    }
    let mut d: i64 = 5;
    loop {
        match jacobi(d, n) {
            -1 => break,
            0 => {
                if BigUint::from(d.unsigned_abs()) != *n {
                    return false;
                }
            }
            _ => {}
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }
    let q = (1 - d) / 4;
    let d_res = signed_residue(d, n);
    let q_res = signed_residue(q, n);
    let two = BigUint::from(2u8);

    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let k = &n_plus_1 >> s;

    // P = 1: U_1 = 1, V_1 = 1.
    let mut u = BigUint::one();
    let mut v = BigUint::one();
    let mut qk = q_res.clone();
    let bits = k.bits();
    for i in (0..bits - 1).rev() {
        u = &u * &v % n;
        v = (&v * &v + n * &two - (&qk * &two) % n) % n;
        qk = &qk * &qk % n;
        if k.bit(i) {
            let nu = half_mod(&u + &v, n);
            let nv = half_mod((&d_res * &u + &v) % n, n);
            u = nu % n;
            v = nv % n;
            qk = &qk * &q_res % n;
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v + n * &two - (&qk * &two) % n) % n;
        if v.is_zero() {
            return true;
        }
        qk = &qk * &qk % n;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn small_values() {
        assert!(is_prime(&BigUint::from(2u8)));
        assert!(!is_prime(&BigUint::from(1u8)));
        assert!(!is_prime(&BigUint::zero()));
        assert_eq!(is_prime_u64(224951), trial(224951));
        assert!(is_prime_u64(224951));
        assert!(is_prime_u64(268979));
    }

    #[test]
    fn u64_path_matches_trial_division() {
        for n in 0..20_000u64 {
            assert_eq!(is_prime_u64(n), trial(n), "{n}");
        }
    }

    #[test]
    fn bpsw_matches_deterministic_path() {
        for n in 2..20_000u64 {
            assert_eq!(is_prime_bpsw(&BigUint::from(n)), is_prime_u64(n), "{n}");
        }
        // strong pseudoprimes to base 2 and Carmichael numbers
        for n in [2047u64, 3277, 4033, 4681, 8321, 561, 1105, 1729, 25326001, 3215031751, 3825123056546413051] {
            assert!(!is_prime_bpsw(&BigUint::from(n)), "{n}");
            assert!(!is_prime_u64(n), "{n}");
        }
    }

    #[test]
    fn large_primes() {
        let m127 = (BigUint::one() << 127) - 1u32;
        assert!(is_prime(&m127));
        assert!(!is_prime(&(&m127 * &m127)));
        let m89 = (BigUint::one() << 89) - 1u32;
        assert!(!is_prime(&(&m127 * &m89)));
        let p: BigUint = "37975227936943673922808872755445627854565536638199".parse().unwrap();
        let q: BigUint = "40094690950920881030683735292761468389214899724061".parse().unwrap();
        assert!(is_prime(&p));
        assert!(is_prime(&q));
        assert!(!is_prime(&(&p * &q)));
    }
}
