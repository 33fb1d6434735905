//! Entropy efficiency of point-push stirring protocols on the punctured disk.
//!
//! Matrices act on row vectors from the right throughout, so the matrix of a
//! product of protocols is the product of the matrices in the same order.

pub mod bounds;
pub mod config;
pub mod error;
pub mod exact;
pub mod freegroup;
pub mod gsr;
pub mod laurent;
pub mod matrix_rep;
pub mod protocol;
pub mod spectral;
pub mod verify;

pub use config::Config;
pub use error::{Error, Result};
pub use exact::ExactMatrix;
pub use freegroup::{Automorphism, FreeWord, Letter, OccurrenceVector};
pub use protocol::{BraidWord, ProtocolWord};
