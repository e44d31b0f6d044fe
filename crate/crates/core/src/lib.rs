//! Combinatorial machinery for geometric types of pseudo-Anosov flows:
//! validation, equivalence and canonical forms, symbolic dynamics, an exact
//! model of the lifted Markovian family, rectangle paths and their
//! homotopies, cycles, and surgery prong arithmetic.

pub mod cover;
pub mod cycles;
pub mod equivalence;
pub mod error;
pub mod field;
pub mod format;
pub mod layout;
pub mod model;
pub mod paths;
pub mod random;
pub mod surgery;
pub mod symbolic;

pub use error::Error;
pub use model::{GeometricType, Kind, Sign, SlotRef, Transition};
