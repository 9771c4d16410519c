//! Pseudospectral incompressible Navier-Stokes on the periodic box `[0, 2π)³`
//! with isotropic and anisotropic Littlewood-Paley analysis, Besov and
//! anisotropic Sobolev norms, and tracking of the scale-critical quantities
//! that control regularity of the flow.

pub mod error;
pub mod flow;
pub mod io;
pub mod lab;
pub mod littlewood_paley;
pub mod monitor;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
