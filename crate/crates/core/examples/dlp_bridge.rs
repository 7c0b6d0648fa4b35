//! Tetration from a multiplicative-order oracle.
//!
//!     cargo run --release --example dlp_bridge
//!
//! ᵏa mod N can be evaluated from the iterated orders of a alone; here the
//! orders come from a discrete-logarithm solver (baby-step giant-step), a
//! brute-force search, or refinement over the factored λ. Each run records
//! every oracle query, which can be re-checked independently.

use num_bigint::BigUint;
use tetrakit::dlp::{discrete_log, tetration_via_orders_traced, OrderMethod, OrderOracle};
use tetrakit::{Factorizer, TetrationQuery, Tetrator};

fn main() -> tetrakit::Result<()> {
    let fz = Factorizer::default();

    let x = discrete_log(&BigUint::from(3u32), &BigUint::from(13u32), &BigUint::from(17u32))?;
    println!("log_3 13 mod 17 = {x}");

    for method in [OrderMethod::Bsgs, OrderMethod::Brute, OrderMethod::FactoredRefinement] {
        let oracle = OrderOracle::new(method);
        let q = TetrationQuery::new(7u64, 9, 9991u64)?;
        let run = tetration_via_orders_traced(&q, &oracle)?;
        let chain = Tetrator::new(&BigUint::from(9991u32), &fz)?.tetrate(&BigUint::from(7u32), 9);
        let orders: Vec<String> = run.order_chain.iter().map(|o| o.to_string()).collect();
        println!(
            "{method:?}: ⁹7 mod 9991 = {} (chain gives {chain}), h = {}, m = {}, orders {}, {} queries, verified {}",
            run.residue,
            run.h,
            run.m,
            orders.join(" → "),
            run.trace.queries.len(),
            run.trace.verify(&fz)?
        );
        assert_eq!(run.residue, chain);
    }
    Ok(())
}
