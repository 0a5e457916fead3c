//! Solvers, generators and recovery experiments for low-rank + sparse convex
//! decompositions: graphical lasso and its latent-variable extension, robust
//! PCA with partial observations, robust regression, compressive low-rank +
//! sparse acquisition and the planted-clique relaxation.

pub mod error;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod mask;
pub mod matrix;
pub mod prox;
pub mod solvers;
pub mod synth;

pub use error::{Error, Result};
pub use mask::Mask;
pub use matrix::DenseMatrix;
