//! Colored-link signature functions from generalized Seifert matrices, their
//! integrals over subtori of the unit torus, and the twist-knot obstruction
//! pipeline built on them.

pub mod abelian;
pub mod alexander;
pub mod error;
pub mod hermitian;
pub mod integrate;
pub mod seifert;
pub mod signature;
pub mod torus;
pub mod twistknot;

pub type Complex64 = nalgebra::Complex<f64>;

pub use abelian::{subtorus, AbelianPresentation, Sample, SampleGrid, SubtorusParam};
pub use error::{Error, Result};
pub use hermitian::{inertia, EigenSolver, HermitianForm, InertiaResult};
pub use integrate::{r_invariant, rho0, rho2, IntegralResult, IntegrationConfig};
pub use seifert::{ColoredSeifertData, SignVector};
pub use signature::{cf_signature, sigma_hat, z_map, EvalOptions, SignatureValue};
pub use torus::{Angle, TorusPoint};
