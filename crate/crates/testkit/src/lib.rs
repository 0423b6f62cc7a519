//! Test-only reference implementations.
//!
//! Nothing in here depends on `stockbabble-core`: every oracle is written
//! from the textbook definition, as slowly and literally as possible, so the
//! production code can be checked against it.

pub mod oracle;
pub mod series;
