//! Spectral analysis of a PT-symmetric six-site lattice Hamiltonian.
//!
//! The model is a real 6x6 tridiagonal matrix with zero diagonal whose
//! off-diagonal pairs carry three coupling products `(A, B, C)`. Its
//! characteristic polynomial is even in the energy, so the six levels are
//! the square roots of a cubic in `s = E^2` that is solved in closed form.
//! The crate reconstructs the physical domain (the parameter region with an
//! entirely real, simple spectrum), traces its exceptional-point boundary
//! surfaces, detects the anomalous gap intervals, and classifies boundary
//! crossings into complexifying (first-kind) and level-crossing
//! (second-kind) transitions. Every closed-form path is cross-validated by
//! an independent eigensolver in [`oracle`].
//!
//! Modules:
//! - [`model`]: matrix builders and the coupling coordinate changes
//! - [`secular`]: closed-form spectra from the secular polynomial
//! - [`boundary`]: implicit-curve machinery delimiting the physical domain
//! - [`domain`]: membership, slices, boundary meshes, transition kinds
//! - [`oracle`]: characteristic polynomials and Aberth eigenvalues
//! - [`battery`]: the self-test checks shared by CLI and acceptance suite

pub mod battery;
pub mod boundary;
pub mod domain;
pub mod model;
pub mod oracle;
pub mod secular;
mod solvers;

pub use boundary::{AlphaProfile, AlphaRoot, BranchProfile};
pub use domain::{BoundaryMesh, BoundarySlice, DomainVerdict, TransitionKind, TransitionReport, Verdict};
pub use model::{CartesianCouplings, ProductCouplings, RealMatrix};
pub use oracle::EigenResult;
pub use secular::{Classification, SecularCoefficients, SpectrumResult};

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix dimension must be a positive even integer, got {0}")]
    InvalidDimension(usize),
    #[error("unsupported dimension {0}: only 4 and 6 are built here")]
    UnsupportedDimension(usize),
    #[error("entries would be complex for lambda={lambda}, a={a}; build the product representative for these couplings instead")]
    ComplexEntries { lambda: f64, a: f64 },
    #[error("no real preimage: coupling product {0} exceeds 1")]
    NoRealPreimage(f64),
    #[error("evaluation at E={e} is within {margin:e} of the pole at {pole}")]
    Pole { e: f64, pole: f64, margin: f64 },
    #[error("the coupling-zero limit {0} = 0 is a boundary sheet, not an interior case")]
    UnphysicalLimit(&'static str),
    #[error("negative alpha branch: mirror the +alpha profile through E -> -E")]
    NegativeAlpha,
    #[error("root iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("inconclusive crossing: {0}")]
    InconclusiveCrossing(String),
    #[error("point is not on the domain boundary (verdict {0:?})")]
    NotOnBoundary(Verdict),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

