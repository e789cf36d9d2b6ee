mod cplx;
pub mod cli;
pub mod dynamics;
pub mod eqregion;
pub mod error;
pub mod hmat;
pub mod oracle;
pub mod projective;
pub mod quat;
pub mod spectral;

pub use error::{Error, Result};
pub use hmat::HMatrix;
pub use projective::{point_dist, span, subspace_dist, ProjectivePoint, ProjectiveSubspace};
pub use quat::Quaternion;
