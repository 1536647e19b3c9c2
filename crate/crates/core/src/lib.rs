//! Exact analysis of monopoly market segmentations.
//!
//! A market is a finite set of consumer values with masses. A segmentation
//! splits the consumers into coalitions, each facing a revenue-maximizing
//! price. This crate decides whether a segmentation is stable against
//! coalitional deviations, builds stable segmentations, evaluates the core,
//! stable sets and farsighted blocking chains, and checks all of it against a
//! brute-force model with finitely many consumers.
//!
//! All arithmetic is exact ([`Rational`] is an arbitrary-precision fraction).
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod constructions;
pub mod cooperative;
mod error;
pub mod fixtures;
pub mod layout;
pub mod market;
pub mod oracle;
pub mod plan;
pub mod rational;
pub mod segmentation;
pub mod stability;

pub use error::{Error, Result};
pub use market::{Coalition, Market};
pub use plan::{DeviationScenario, TransportPlan};
pub use rational::Rational;
pub use segmentation::{consumer_surplus, Segment, Segmentation, SurplusProfile};
