//! Convex feasibility with the centralized circumcentered-reflection method.
//!
//! The crate provides projection oracles for a family of closed convex sets,
//! a robust circumcenter routine, the cCRM, MAP and CRM iterations, rate and
//! curvature diagnostics, a catalog of worked example problems, and a
//! double-double arithmetic engine for checking rates below double precision.

pub mod catalog;
pub mod circumcenter;
pub mod diagnostics;
pub mod error;
pub mod extended;
pub mod io;
pub mod linalg;
pub mod sets;
pub mod solvers;
pub mod tables;

pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};
