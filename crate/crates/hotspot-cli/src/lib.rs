//! Scenario-driven laboratory for hot-spot dynamics of heat flows with
//! inverse-square-type potentials.
//!
//! The library half of the `hotspot-lab` binary: scenario files and their
//! validation ([`scenario`]), the φ expression grammar ([`expr`]), pipeline
//! orchestration and report emission ([`pipeline`]), an independent polar
//! alternating-direction solver used as a cross-check oracle ([`oracle2d`]),
//! and the numbered acceptance checks behind the `verify` subcommand
//! ([`suite`]).

pub mod expr;
pub mod oracle2d;
pub mod pipeline;
pub mod scenario;
pub mod suite;
