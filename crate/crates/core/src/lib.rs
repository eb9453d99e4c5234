//! Separated quotient-spaces of compact metric spaces by Hausdorff closure,
//! instantiated for the scaling action on linear relations: hinges and their
//! positive-definite variant.

pub mod cli;
pub mod error;
pub mod linalg;
pub mod linrel;
pub mod metric;
pub mod hinge;
pub mod json;
pub mod quotient;
pub mod random;
pub mod symspace;

pub use error::{Error, Result};
