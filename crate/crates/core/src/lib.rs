//! Finite groupoid spines: validation, regular extension to a groupoid,
//! extraction of the vertex group, and coset tests in finite groups.

pub mod catalog;
pub mod cli;
pub mod coset;
pub mod document;
pub mod error;
pub mod extension;
pub mod generators;
pub mod group;
pub mod model;

pub use error::{Error, Result};
pub use extension::{check_regularity, extend_to_groupoid, symmetric_closure, ExtensionResult, RegularityReport};
pub use group::{extract_group, group_on_fiber, relabel_group, GroupAction, GroupTable};
pub use model::{compose, invert, validate_spine, FiniteMap, FiniteSet, GroupoidSpine, ValidationReport, Violation};
