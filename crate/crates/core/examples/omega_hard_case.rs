//! How often the split fails: the density ω(u, v).
//!
//!     cargo run --release --example omega_hard_case
//!
//! ω(u, v) is the fraction of units a modulo L = lcm(λ-chains of u and v)
//! whose levels modulo u and uv coincide, so tetration probes with base a
//! cannot separate u from v. For primes p < q the divisor-sum bound is
//! printed next to the exact value. 1541 = 23 · 67 is the worst pair below 100.

use num_bigint::BigUint;
use tetrakit::omega::{base_success_report, to_f64, OmegaCalculator};
use tetrakit::Factorizer;

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn main() -> tetrakit::Result<()> {
    let calc = OmegaCalculator::default();
    println!("{:>4} {:>4} {:>10} {:>10} {:>10} {:>10}", "p", "q", "L", "ω", "bound", "corrected");
    for (p, q) in [(3u64, 5u64), (3, 7), (5, 11), (7, 29), (23, 67)] {
        let r = calc.omega_report(&big(p), &big(q))?;
        let f = |x: &Option<num_rational::BigRational>| x.as_ref().map(|x| format!("{:.6}", to_f64(x))).unwrap_or_default();
        println!(
            "{p:>4} {q:>4} {:>10} {:>10.6} {:>10} {:>10}",
            r.big_l,
            to_f64(&r.omega),
            f(&r.bound),
            f(&r.corrected_bound)
        );
    }

    let fz = Factorizer::default();
    let n = fz.factorize(&big(1541))?;
    let report = base_success_report(&n, 60, &fz)?;
    println!("\nbases a ≤ 60 that fail to split 1541: {:?}", report.failing_bases);
    Ok(())
}
