//! Symbols and test functions: expression trees, derivative jets, and
//! structural family recognition.

mod expr;
mod family;
mod jet;
mod parse;
pub mod poly;

pub use expr::{eval_jet, Func, Node, SymbolExpr};
pub use family::{recognize_family, Family};
pub use jet::{compose_jets, Jet};
