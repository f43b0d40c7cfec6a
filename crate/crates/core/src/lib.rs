//! Kramers isothermal-slip problem for a Fermi gas whose collision frequency
//! is proportional to molecular speed.
//!
//! The crate evaluates the closed-form solution built on the Williams
//! dispersion function and the factorizing function `X(z)` of the associated
//! Riemann problem, and cross-checks it with an independent discrete-ordinates
//! solver of the same half-space transport equation.
//!
//! All solvers are generic over the scalar type (see [`Real`]); the `*64`
//! aliases below fix it to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersion;
pub mod error;
pub mod fermi;
pub mod fit;
pub mod kramers;
pub mod moments;
pub mod oracle;
pub mod quadrature;
pub mod scalar;
pub mod verify;
pub mod xfunction;

pub use error::{Error, Result};
pub use scalar::{lit, QuadValue, Real};

pub type Alpha64 = fermi::Alpha<f64>;
pub type FermiIntegrals64 = fermi::FermiIntegrals<f64>;
pub type QuadratureConfig64 = quadrature::QuadratureConfig<f64>;
pub type Integrator64 = quadrature::Integrator<f64>;
pub type XFunction64 = xfunction::XFunction<f64>;
pub type MomentTable64 = moments::MomentTable<f64>;
pub type SlipSolution64 = kramers::SlipSolution<f64>;
pub type OracleConfig64 = oracle::OracleConfig<f64>;
