//! Local toric period integrals for minimal supercuspidal representations of
//! GL(2) and its quaternion inner forms over the p-adic rationals, computed by
//! exact brute-force summation and compared against closed forms.

pub mod error;
pub mod padic;
pub mod quad;
pub mod phase;
pub mod quaternion;
pub mod registry;
pub mod report;
pub mod cuspidal;
pub mod waldspurger;
pub mod appendix;
pub mod orbital;
pub mod suite;
pub mod cli;

pub use error::{Error, Result};
