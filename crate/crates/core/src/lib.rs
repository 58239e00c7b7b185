//! Nonreciprocal SSH chains with a linear hopping gradient.
//!
//! The Hamiltonian is a zero-diagonal real tridiagonal matrix whose links
//! alternate between `v` and `w`, with a nonreciprocity `g` and a per-link
//! gradient `a`. The crate builds it, computes spectra and eigenvectors,
//! locates and classifies exceptional points, evaluates the four-site
//! closed forms, runs renormalised time evolution, and exports sweeps.

pub mod assign;
pub mod closedform;
pub mod dynamics;
pub mod ep;
pub mod error;
pub mod linalg;
pub mod model;
pub mod spectral;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{build_hamiltonian, chiral_conjugate, link_products, Axis, ChainParams, LinkProducts, TridiagonalHamiltonian};
pub use spectral::{eigenvalues, Spectrum};
