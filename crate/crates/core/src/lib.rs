//! Weighted one-counter deterministic automata: exact evaluation,
//! reachability, equivalence, regularity, covering and translations.

pub mod analysis;
pub mod boolean;
pub mod equiv;
pub mod error;
pub mod exactla;
pub mod fixtures;
pub mod format;
pub mod model;
pub mod oracle;
pub mod reach;
pub mod translate;
pub mod wa_algo;

pub use error::{Error, Result};
pub use exactla::{Matrix, Rational, Vector, VectorSpace};
pub use model::{Alphabet, Configuration, CounterStructure, WeightedOdca, Word};
