pub mod error;
pub mod exec;
pub mod fit;
pub mod genlimits;
pub mod models;
pub mod normality;
pub mod quantum_limit;
pub mod residue;
pub mod special;
pub mod spectral;
pub mod suites;
pub mod summation;

pub use error::{Error, Result};
