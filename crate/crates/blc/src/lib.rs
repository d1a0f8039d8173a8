//! Binary lambda calculus toolkit: exact counting of de Bruijn terms under
//! the bit-size model, rank/unrank bijections, uniform and Boltzmann
//! random generation, a simple-type typability sieve, and the numerics of
//! the counting sequence's growth law.

pub mod analytic;
pub mod boltzmann;
pub mod counting;
pub mod term;
pub mod types;
pub mod unrank;

#[cfg(test)]
mod testutil;

pub use boltzmann::{BoltzmannError, RandomSource, SamplerParams, SamplerStats};
pub use counting::{CountTable, FreeBound};
pub use term::{BitString, Term};
pub use types::SimpleType;
pub use unrank::GenError;
