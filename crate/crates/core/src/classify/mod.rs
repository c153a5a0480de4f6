//! Verdict engine for power boundedness, mean ergodicity and the
//! supercyclicity/mixing family of properties.

mod ergodic;
mod polynomial;
mod power;
mod profile;
mod schwartz;
mod supercyclic;
mod verdict;

pub use ergodic::{mean_ergodic_necessary, mean_ergodic_necessary_in, summarize_mean_ergodic, DEFAULT_K};
pub use power::{monotone_pb_analysis, monotone_pb_analysis_in, pb_grid, power_bounded_empirical, PB_GRID_X_MAX};
pub use polynomial::{classify_polynomial, escape_radius, polynomial_pb};
pub use profile::{analyse, equal_value_pair, Located, Shape, SymbolProfile};
pub use schwartz::{schwartz_pb_check, schwartz_symbol_check, PB_X_MAX as SCHWARTZ_PB_X_MAX, SYMBOL_X_MAX as SCHWARTZ_SYMBOL_X_MAX};
pub use supercyclic::{
    mixing_classification, mixing_classification_in, supercyclicity_obstructions, supercyclicity_obstructions_in,
};
pub use verdict::{sort_verdicts, Citation, Property, Provenance, SpaceTag, Status, Verdict, Witness};
