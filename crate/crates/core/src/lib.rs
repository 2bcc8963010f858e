//! Symbolic-numeric verification of generalized CRF structures on coordinate charts.

pub mod domain;
pub mod expr;
pub mod jet;
pub mod tensor;
pub mod point;
pub mod big;
pub mod report;
pub mod genstruct;
pub mod genmetric;
pub mod contact;
pub mod io;
pub mod checks;
pub mod catalog;
pub mod cli;
