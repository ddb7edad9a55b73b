//! Desk-scale simulation of quantum eigenvalue transformation for normal
//! matrices and commuting Hermitian families.
//!
//! The crate is organised bottom-up:
//!
//! * [`matrices`]: dense complex linear algebra and the brute-force spectral
//!   oracles every other module is checked against.
//! * [`circuit`]: a small operator-tree simulator that lets block-encodings
//!   with many ancillas be applied to state vectors without materialising
//!   their full unitary.
//! * [`blockenc`]: block-encodings with subnormalization, ancilla and error
//!   bookkeeping, plus product and linear-combination constructions.
//! * [`chebpoly`], [`approx`], [`decomp`]: Chebyshev machinery, tensor-grid
//!   interpolation and the sum-of-products decompositions.
//! * [`qet`], [`ntca`]: the end-to-end pipelines.

pub mod approx;
pub mod blockenc;
pub mod chebpoly;
pub mod circuit;
pub mod decomp;
pub mod error;
pub mod fixtures;
pub mod matrices;
pub mod ntca;
pub mod qet;
pub mod tolerance;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use tolerance::Tolerances;

/// Crate version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
