//! Numerical analysis of composition operators `C_φ: f ↦ f∘φ` on spaces of
//! smooth functions over ℝ.
//!
//! The crate is organised bottom-up:
//!
//! - [`symbol`]: expression trees, derivative jets, family recognition
//! - [`dynamics`]: orbits, Cesàro means, fixed points, monotonicity, escape
//! - [`seminorm`]: weighted sup seminorms and polynomial growth fits
//! - [`classify`]: the verdict engine
//! - [`lab`]: iterated composition applied to concrete test functions
//! - [`report`] and [`cli`]: JSON/CSV output and the command-line front end

pub mod classify;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod grid;
pub mod lab;
pub mod report;
pub mod seminorm;
pub mod symbol;

pub use error::{Error, Result};
pub use symbol::{Family, Jet, SymbolExpr};
