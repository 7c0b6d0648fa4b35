//! Levels: the height from which ᵏa mod N stops changing.
//!
//!     cargo run --example levels
//!
//! Compares the direct level with the order-chain formula, breaks it down by
//! prime power, and shows the base for which the two formulas disagree.

use num_bigint::BigUint;
use tetrakit::level::{level_decompose, level_direct, level_lower_bound, level_profile, level_via_orders, prime_power_level};
use tetrakit::Factorizer;

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn main() -> tetrakit::Result<()> {
    let fz = Factorizer::default();

    println!("{:>6} {:>4} {:>6} {:>7} {:>6}  order chain", "N", "a", "level", "formula", "lower");
    for (a, n) in [(3u64, 1000u64), (7, 9991), (5, 1541), (13, 1541), (11, 4096)] {
        let p = level_profile(&big(a), &big(n), &fz)?;
        let formula = level_via_orders(&big(a), &big(n), &fz)
            .map(|v| v.to_string())
            .unwrap_or_else(|_| "-".into());
        let lower = level_lower_bound(&big(a), &big(n), &fz)?;
        let chain: Vec<String> = p.order_chain.iter().map(|o| o.to_string()).collect();
        println!("{n:>6} {a:>4} {:>6} {formula:>7} {lower:>6}  {}", p.level, chain.join(" → "));
    }

    // The formula needs gcd(a, L) = 1. Without it the order chain only gives a
    // lower bound: for 2 mod 5 the chain 5 → 4 → 1 suggests 1, yet the
    // towers 1, 2, 4, 16, 65536, ... settle only from height 3.
    println!(
        "\n2 mod 5: order-chain formula {}, true level {}, guarded formula: {}",
        level_lower_bound(&big(2), &big(5), &fz)?,
        level_direct(&big(2), &big(5), &fz)?,
        level_via_orders(&big(2), &big(5), &fz).map_or_else(|e| e.to_string(), |v| v.to_string())
    );

    println!("\nlevels of 2 modulo the prime-power parts of 9240615:");
    for (q, l) in level_decompose(&big(2), &big(9_240_615), &fz)?.parts {
        println!("  {q:>8}: {l}");
    }

    println!("\nlevel of a modulo 7^n:");
    for a in [2u64, 3, 6, 8] {
        let row: Vec<String> = (1..=4).map(|n| prime_power_level(&big(a), &big(7), n, &fz).unwrap().to_string()).collect();
        println!("  a = {a}: {}", row.join(" "));
    }
    Ok(())
}
