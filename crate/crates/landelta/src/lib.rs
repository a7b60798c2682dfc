//! Spectra of two-dimensional Landau Hamiltonians perturbed by attractive or
//! repulsive delta-potentials supported on closed planar curves.
//!
//! The crate provides, at desk scale:
//!
//! * closed-form Landau-level objects (Green function, spectral projections,
//!   symmetric-gauge eigenmodes) built on dedicated special-function kernels,
//! * Nystrom discretizations of the boundary integral operators entering the
//!   Krein resolvent formula (Weyl function, single-layer operator, gamma-field),
//! * a Birman-Schwinger eigenvalue solver that locates the discrete spectrum in
//!   the gaps between Landau levels and reports per-level cluster asymptotics,
//! * Toeplitz-type operators of Landau modes restricted to sub-arcs with their
//!   factorial singular-value asymptotics,
//! * logarithmic capacities and equilibrium measures of curves, arcs, and
//!   unions by constrained energy minimization,
//! * Galerkin verification of the norm-resolvent approximation of the singular
//!   operator by squeezed regular potentials,
//! * a CLI front end with JSON configuration, CSV/SVG output, and caching.

pub mod bie;
pub mod capacity;
pub mod cli;
pub mod geometry;
pub mod landau;
pub mod linalg;
pub mod oracle;
pub mod quad;
pub mod selftest;
pub mod specfun;
pub mod spectral;
pub mod squeeze;
pub mod toeplitz;

pub use num_complex::Complex64;
