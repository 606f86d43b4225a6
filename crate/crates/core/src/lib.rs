//! Spectra of periodic banded matrices and one-dimensional periodic
//! Schrodinger operators, with reference oracles and set metrics.

// `!(x < y)` guards also reject NaN; keep them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cloud;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod metrics;
pub mod oracles;
pub mod periodic_matrix;
pub mod potential;
pub mod scan;
pub mod schrodinger;
pub mod tower;

pub use cloud::{Certificate, RequiredResolution, SpectralCloud, Window};
pub use error::{Result, SpectraError};
