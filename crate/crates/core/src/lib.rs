//! Statistics of the real eigenvalues of products of truncated Haar-orthogonal
//! random matrices.
//!
//! The crate has an exact side and a numeric side. The exact side works in
//! the ring Q[pi^(1/2), pi^(-1/2)] ([`ring`]), evaluates the moment
//! Meijer-G functions in closed form or by a recurrence reduction
//! ([`meijer`]), and assembles the generating function of the number of real
//! eigenvalues, its probabilities and expectations ([`corr`]). The numeric
//! side carries the weights, correlation kernel and asymptotic laws
//! ([`density`]) plus a Monte Carlo engine with an in-house real Schur
//! eigensolver ([`mc`], [`schur`]) to validate everything end to end.

pub mod corr;
pub mod density;
pub mod error;
pub mod mc;
pub mod meijer;
pub mod polymat;
pub mod quad;
pub mod ring;
pub mod schur;
pub mod special;

pub use corr::EnsembleSpec;
pub use error::{Error, Result};
pub use ring::{PiLaurent, Rational};
