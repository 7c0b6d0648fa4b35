//! Squarefree part by repeated splitting.
//!
//!     cargo run --release --example squarefree
//!
//! The split tree is printed for each input; every split is the
//! factorization value = (u/g)·(value/(u·g))·g², so the squarefree part
//! survives the recursion.

use num_bigint::BigUint;
use tetrakit::reduction::{squarefree_part, FactorNode, SplitConfig};
use tetrakit::Factorizer;

fn show(node: &FactorNode, depth: usize) {
    let pad = "  ".repeat(depth + 1);
    match node {
        FactorNode::Leaf { value, leaf } => println!("{pad}{value} [{leaf:?}]"),
        FactorNode::Split { value, u, g, left, right, .. } => {
            println!("{pad}{value} = split by {u}, g = {g}");
            show(left, depth + 1);
            show(right, depth + 1);
        }
    }
}

fn main() -> tetrakit::Result<()> {
    let fz = Factorizer::default();
    let cfg = SplitConfig::default();
    let inputs = [
        BigUint::from(360u32),
        BigUint::from(224_951u64 * 224_951 * 268_979),
        BigUint::from(1_000_003u64).pow(2) * 17u32 * 19u32,
    ];
    for n in inputs {
        let res = squarefree_part(&n, &cfg, &fz)?;
        println!("r({n}) = {}  ({:?})", res.r, res.certified);
        show(&res.tree, 0);
        assert!(res.tree.verify());
        assert_eq!(res.r, fz.factorize(&n)?.squarefree_part());
    }
    Ok(())
}
