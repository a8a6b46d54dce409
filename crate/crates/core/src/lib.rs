//! Exact distance, bisector, kinematic and incidence computations over the
//! finite plane F_p².

pub mod ffield;
pub mod gen;
pub mod incidence;
pub mod kinematic;
pub mod plane;
pub mod projective;
pub mod clifford;
pub mod report;
pub mod stats;
pub mod structure;

pub use ffield::{FieldCtx, FieldScalar};
pub use plane::{Curve, Line, PlanePoint, RigidMotion, Segment};
pub use stats::PointSet;
