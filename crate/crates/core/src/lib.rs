//! Continuous-variable tripartite entanglement: Gaussian moment tables,
//! entanglement witnesses, the three-squeezer beamsplitter network, and the
//! triply concurrent down-conversion models (undepleted, positive-P and
//! intracavity).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamsplitter;
pub mod criteria;
pub mod error;
pub mod gaussian;
pub mod intracavity;
pub mod numeric;
pub mod opo;
pub mod positivep;
pub mod undepleted;

pub use error::{Error, Result};
pub use gaussian::{MomentTable, ModeLabel, Quadrature, SpectralMomentTable, SqueezerSpec};
