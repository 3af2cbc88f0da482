//! Typed Petri nets with identifiers (t-PNIDs) and typed Jackson nets.
//!
//! The crate covers the data model, execution semantics and bounded state
//! spaces, behavioural and structural equivalences, Jackson type algebra,
//! the typed Jackson net rewrite rules, type projection and composition,
//! event-log induction and per-projection process discovery.

#![allow(clippy::type_complexity)]

pub mod bisim;
pub mod cli;
pub mod discovery;
pub mod dot;
pub mod error;
pub mod eventlog;
pub mod fixtures;
pub mod iso;
pub mod jackson;
pub mod lts;
pub mod model;
pub mod projection;
pub mod rules;
pub mod semantics;
pub mod statespace;
pub mod wfnet;

pub use error::{Error, Result};
pub use model::{Marking, Net, PlaceType};
