//! Nonlocal perimeters and curvatures of sets on regular grids, the
//! moving-planes sweep, and rigidity checks for critical sets.

mod ballcount;
pub mod curvature;
pub mod error;
pub mod grid;
pub mod gridfile;
pub mod kernel;
pub mod moving_planes;
pub mod quadrature;
pub mod rigidity;

mod lines;

pub use error::{Error, Result};
pub use grid::{BoundarySample, Hyperplane, IndicatorGrid, Side};
pub use kernel::{DistributionFunction, Integrability, KernelKind, Profile, RadialKernel};
