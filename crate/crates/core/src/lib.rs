//! Multizone building simulation: heat, air and moisture balances of a set
//! of well-mixed zones, with a choice of model for each phenomenon made per
//! building, per zone or per wall.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod airflow;
pub mod building;
pub mod engine;
pub mod error;
pub mod hvac;
pub mod linalg;
pub mod moisture;
pub mod solar;
pub mod thermal;

pub use building::{case_study_building, parse_building, validate_building, Building};
pub use error::{Diagnostic, Error, Result};
