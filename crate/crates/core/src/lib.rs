//! Spectral-domain solver for the currents and fields excited by an electric
//! dipole on an infinitely long PEC strip above a PEC ground plane.

pub mod config;
pub mod em;
pub mod error;
pub mod fields;
pub mod fullwave;
pub mod linalg;
pub mod narrowstrip;
pub mod quadrature;
pub mod run;
pub mod selftest;
pub mod specfun;
pub mod temwire;
pub mod transform;
pub mod vec3;

pub use em::{DipoleAxis, Medium, Scenario, SpectralPoint};
pub use error::{Error, Result};
