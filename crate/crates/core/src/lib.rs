//! Modular tetration and the number theory around it.
//!
//! * [`tetration`]: ᵏa mod N through the iterated Carmichael chain, plus
//!   naive oracles for cross-checking.
//! * [`carmichael`]: λ(n), the chain n, λ(n), λ(λ(n)), ..., 1, and L(n).
//! * [`level`]: the level of a base (where its tower stabilizes) and the
//!   iterated-order formulas for it.
//! * [`reduction`]: splitting integers and computing squarefree parts from a
//!   tetration oracle.
//! * [`omega`]: the exact density of bases for which that split fails.
//! * [`dlp`]: tetration from iterated orders supplied by a discrete-log solver.
//! * [`cli`]: the `tetrakit` command line.

pub mod arith;
pub mod carmichael;
pub mod cli;
pub mod dlp;
pub mod error;
pub mod level;
pub mod omega;
pub mod order;
pub mod reduction;
pub mod tetration;

mod serde_util;
pub(crate) mod word;

pub use arith::{factorize, is_prime, FactoredInteger, Factorizer};
pub use carmichael::{lambda, lambda_chain, orthogonal_decomposition, LambdaChain};
pub use error::{Error, Result};
pub use tetration::{naive_tetration_mod, tetration_mod, NaiveMode, TetrationQuery, Tetrator};
