//! Transmit-power scheduling for an energy-harvesting secondary user sharing
//! spectrum with a primary user under an interference-to-signal ratio limit.
//!
//! Two allocators bracket the minimum average buffer length:
//!
//! - [`greedy`]: online, transmits at the binding per-slot cap; an upper bound.
//! - [`pa`]: offline staged water-filling over cumulative energy budgets; a
//!   lower bound.
//!
//! [`oracle`] holds brute-force reference solvers, [`bounds`] certifies when
//! either bound is exact, and [`experiments`] reproduces the published
//! scenarios.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod greedy;
pub mod model;
pub mod oracle;
pub mod pa;

pub use error::{Error, Result};
pub use model::{CapKind, CapMode, ConstraintProfile, ScenarioConfig, Schedule, SlotCaps, SlotState};
