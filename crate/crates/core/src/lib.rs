//! Explicit curl eigenfields on the round 3-sphere and the flat 3-torus,
//! together with the numerical certificates that classify the contact
//! structures they induce.
//!
//! The crate is organised bottom-up:
//!
//! * [`manifold`]: Hopf coordinates, the global frame `{R, X1, X2}`, finite
//!   difference curl and Laplacian, and quadrature on `S^3` and `T^3`.
//! * [`orthopoly`]: exact `(1,1)`-Jacobi polynomials, the coefficient
//!   functions `F_m`, `G_m`, the characteristic polynomial and root isolation.
//! * [`sphere_fields`] / [`torus_fields`]: constructions of the eigenfields.
//! * [`nodal`]: Laplace eigenfunctions on `T^2` and `S^2` and their nodal sets.
//! * [`contact`]: contact volume, collinearity sets, Giroux classification
//!   and linear contact homotopies.
//! * [`hopf_invariant`]: Whitehead integral for axisymmetric Gauss maps.
//! * [`openbook`]: the two planar open books supporting `V_2` and `V_3`.
//! * [`report`] / [`cli`]: JSON reports and the command-line front end.

pub mod contact;
pub mod error;
pub mod hopf_invariant;
pub mod manifold;
pub mod nodal;
pub mod openbook;
pub mod orthopoly;
pub mod quadrature;
pub mod report;
pub mod sphere_fields;
pub mod torus_fields;
pub mod vec3;

pub mod cli;

pub use error::{Error, Result};
