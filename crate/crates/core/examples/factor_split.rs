//! Splitting an integer with tetration residues.
//!
//!     cargo run --release --example factor_split [N]
//!
//! For each base a = 2, 3, ... the probes gcd(ᵏ⁺¹a − ᵏa, N) are taken for
//! growing k; the first nontrivial gcd is a divisor. Defaults to
//! 60507095029 = 224951 · 268979.

use std::time::Instant;

use num_bigint::BigUint;
use tetrakit::level::level_decompose;
use tetrakit::reduction::{default_base_bound, find_split, full_factorization_via_mtp, SplitConfig};
use tetrakit::Factorizer;

fn main() -> tetrakit::Result<()> {
    let n: BigUint = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("N must be a decimal integer"))
        .unwrap_or_else(|| BigUint::from(60_507_095_029u64));
    let fz = Factorizer::default();

    let start = Instant::now();
    let search = find_split(&n, default_base_bound(&n), &fz)?;
    let o = &search.outcome;
    println!("N = {n}");
    println!("  status        {:?}", o.status);
    if let (Some(d), Some(a), Some(k)) = (&o.divisor, &o.witness_base, o.witness_height) {
        println!("  divisor       {d} (cofactor {})", &n / d);
        println!("  witness       base {a}, height {k}");
        println!("  levels of {a}:");
        for (q, l) in level_decompose(a, &n, &fz)?.parts {
            println!("    mod {q}: {l}");
        }
    }
    println!("  bases tried   {} of {}", search.bases_tried, search.base_bound);
    println!("  time          {:.3?}", start.elapsed());

    let full = full_factorization_via_mtp(&n, &SplitConfig::default(), &fz)?;
    println!("  factorization {full}");
    Ok(())
}
