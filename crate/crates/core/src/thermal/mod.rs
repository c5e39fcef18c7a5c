//! Nodal thermal model: per-zone systems, their assembly and solution, and
//! the connection between zones.

pub mod convection;
pub mod coupling;
pub mod solar_gains;
pub mod system;
pub mod wall;
pub mod zone;

pub use convection::{interior_h, ConvectionModel, SurfaceClass, SurfaceFacing};
pub use coupling::{couple_zones, CouplingOptions, CouplingOutcome};
pub use solar_gains::{distribute_solar_gains, window_transmission, AbsorbingSurface, SolarDistribution};
pub use system::{step_implicit, ZoneSystem};
pub use wall::{discretize_wall, WallNodes};
pub use zone::{compile_zones, Boundary, FlowSource, Inflow, ZoneLoads, ZoneModel, AIR};
