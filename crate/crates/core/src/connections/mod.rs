//! Connections in the gauge A(s,t)dt: loops, cylinders, squares, and the
//! boundary rotation bookkeeping built on them.

mod cylinder;
mod line;
mod loop_conn;
mod milnor_wood;

pub use cylinder::{
    BoundaryRotation, CylinderConnection, GaugeField, BOUNDARY_CONVENTION, PATH_BUMP, TWIST_PROFILE,
};
pub use line::SmoothStep;
pub use loop_conn::LoopConnection;
pub use milnor_wood::{milnor_wood_cylinder, milnor_wood_pants, MilnorWoodReport, PantsHolonomyData, PANTS_CONVENTION};

#[cfg(test)]
mod tests;
