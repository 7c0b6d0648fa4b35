//! Power towers modulo N through the Carmichael chain.
//!
//!     cargo run --example tetrate
//!
//! Prints the chain for a few moduli, a table of ᵏa mod N, and checks the
//! smallest cases against the exact tower.

use num_bigint::BigUint;
use tetrakit::{naive_tetration_mod, Factorizer, NaiveMode, TetrationQuery, Tetrator};

fn main() -> tetrakit::Result<()> {
    let fz = Factorizer::default();

    for n in [1000u64, 1_000_000_007, 60_507_095_029] {
        let t = Tetrator::new(&BigUint::from(n), &fz)?;
        let chain: Vec<String> = t.chain().values().map(|v| v.to_string()).collect();
        println!("N = {n}");
        println!("  λ-chain      {}", chain.join(" → "));
        println!("  stabilizes   by height {}", t.stabilization_height());
        for a in [2u64, 3, 7] {
            let row: Vec<String> = (0..=6).map(|k| t.tetrate(&BigUint::from(a), k).to_string()).collect();
            println!("  ᵏ{a} for k=0..6  {}", row.join(", "));
        }
    }

    // ⁴3 = 3^27 = 7625597484987, small enough to check directly
    let q = TetrationQuery::new(3u64, 3, 1000u64)?;
    let exact = naive_tetration_mod(&q, NaiveMode::squaring_chain())?;
    let fast = tetrakit::tetration_mod(&q, &fz)?;
    println!("\n³3 mod 1000: chain {fast}, exact {exact}");
    assert_eq!(fast, exact);

    // heights far beyond anything that could be written down
    let n = BigUint::parse_bytes(b"340282366920938463463374607431768211507", 10).unwrap();
    let t = Tetrator::new(&n, &fz)?;
    println!("¹⁰⁰⁰2 mod {n} = {}", t.tetrate(&BigUint::from(2u32), 1000));
    Ok(())
}
