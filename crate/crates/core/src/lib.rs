//! KPP reaction-diffusion fronts with heat loss in a shear-flow cylinder.
//!
//! The toolkit covers the cross-sectional eigenvalue problems, the dispersion
//! relation and regime classification, a splitting solver for the Cauchy
//! problem, front diagnostics, and the construction of traveling fronts by
//! monotone iteration on a bounded domain.

pub mod banded;
pub mod cli;
pub mod config;
pub mod cross_section;
pub mod diagnostics;
pub mod dispersion;
pub mod eigen;
pub mod error;
pub mod front;
pub mod ivp;
pub mod optimize;
pub mod output;
pub mod tridiag;

pub use cross_section::{build_model, CrossSectionModel, ModelSpec, Profile};
pub use eigen::PrincipalEigenpair;
pub use error::{Error, Result};
