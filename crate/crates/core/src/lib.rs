//! Construction and machine verification of a family of locally 5-arc
//! transitive amalgams over F_q, q = 3^r, realized as permutation groups on
//! Ω = F_q³.

pub mod amalgam;
pub mod ball;
pub mod certificate;
pub mod cover;
pub mod error;
pub mod field;
pub mod group;
pub mod named;
pub mod omega;
pub mod perm;
pub mod relations;
pub mod structure;
pub mod trace;

pub use error::{Error, Result};
pub use field::{Field, Scalar};
pub use group::GroupHandle;
pub use omega::{GenSpec, Omega, OmegaPoint};
pub use perm::{Perm, Point};
