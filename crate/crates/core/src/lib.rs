//! Binary linear discriminants trained by max-min fuzzy linear programming
//! with fuzzy resources, plus the Fisher baseline, noise-margin metrics and
//! a small plotting/persistence layer used by the `fclda` command.

pub mod cli;
pub mod dataset;
pub mod discriminant;
pub mod fuzzy_lp;
pub mod linear;
pub mod lp;
pub mod metrics;
pub mod olda;
pub mod persist;
pub mod plot;
