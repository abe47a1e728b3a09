//! Elliptic hypergeometric integrals of 4d gauge theories and their
//! hyperbolic (small-β) asymptotics.
//!
//! Layers, bottom up: [`special`] (Pochhammer, eta, elliptic and hyperbolic
//! gamma), [`theory`] (groups, weights, anomaly checks), [`rains`] (the
//! piecewise potential and its relatives), [`minimizer`], [`quadrature`] and
//! [`asymptotics`].

pub mod asymptotics;
pub mod catalog;
pub mod error;
pub mod minimizer;
pub mod numeric;
pub mod output;
pub mod quadrature;
pub mod rains;
pub mod special;
pub mod theory;

pub use error::{Error, Result};
pub use num_complex::Complex64;
