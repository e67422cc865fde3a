//! Computational toolkit for fractional Fibonacci groups `F^{k/l}(n)`:
//! free words, presentation builders, abelian invariants, the `V_n` sequence,
//! coset enumeration, finite-group analysis and checkable rewrite certificates.

pub mod analysis;
pub mod certificates;
pub mod enumerator;
pub mod exec;
pub mod invariants;
pub mod presentations;
pub mod sequences;
pub mod words;

pub use exec::Exec;
