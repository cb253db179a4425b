//! Exact genus-zero Givental formalism: correlator tables, potentials,
//! quantum products, the symplectic space, transformation matrices and
//! crepant-resolution checks.

#![allow(clippy::needless_range_loop)]

pub mod cohring;
pub mod crc;
pub mod datasets;
pub mod error;
pub mod exactfield;
pub mod fps;
pub mod genpair;
pub mod giventalspace;
pub mod gwstore;
pub mod linalg;
pub mod potentials;
pub mod report;
pub mod transform;

pub use error::{Error, Result};
