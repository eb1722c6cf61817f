//! PSL(2,R), its universal cover and discrete connections over surfaces:
//! rotation numbers, nonnegative paths, curvature cones, holonomy, and the
//! disc model of the action.

pub mod connections;
pub mod cover;
pub mod error;
pub mod hyperdisc;
pub mod io;
pub mod mat2;
pub mod paths;
pub mod sl2core;
pub mod verify;

pub use connections::{CylinderConnection, GaugeField, LoopConnection, PantsHolonomyData};
pub use cover::LiftedElement;
pub use error::{Error, Result};
pub use hyperdisc::{DiscIsometry, DiscLieElement};
pub use mat2::Mat2;
pub use paths::{GroupPath, PathReport};
pub use sl2core::{classify, cone_test, ClassKind, Cone, ConjClass, GroupElement, LieElement, Tolerances};
pub use verify::{RunConfig, SuiteReport};
