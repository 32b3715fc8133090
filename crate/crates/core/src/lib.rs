//! Pointwise verification of almost Einstein solitons on explicit coordinate charts.
//!
//! Metrics, potential fields and soliton data are written as scalar
//! expressions over a chart ([`expr`]), evaluated with exact order-3 jets
//! ([`jet`]), turned into curvature quantities ([`geometry`]) and checked
//! against the soliton identities ([`soliton`]).

pub mod catalogue;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod jet;
pub mod run;
pub mod soliton;

pub use error::{Error, Result};
