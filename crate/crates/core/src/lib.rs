//! Hessian manifolds from a potential on an affine chart: metric,
//! Amari-Chentsov tensor, curvature, Koszul forms, dual connections,
//! warped products and the Cheng-Yau equation on 2D cones.

pub mod chart;
pub mod constructions;
pub mod duality;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod monge_ampere;
pub mod oracle;
pub mod report;
pub mod sampling;
pub mod tensor;

pub use chart::PotentialChart;
pub use error::{Error, Result};
pub use expr::{parse, Expr};
