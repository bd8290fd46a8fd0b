//! Network geometry: hexagonal base-station layout, Poisson user drops and
//! the integration regions used by the closed-form interference statistics.

mod density;
mod drop;
mod layout;
mod point;
pub mod quadrature;
mod region;

pub use density::{DensityKind, DensityMap};
pub use drop::{
    sample_user_drop, DropSettings, SamplingWindow, UserDrop, UserRecord, MIN_LINK_DISTANCE,
};
pub use layout::{
    build_hex_layout, hex_area, hex_boundary_radius, in_hexagon, NetworkLayout, MAX_RINGS,
};
pub use point::Point;
pub use quadrature::{gauss_legendre, gauss_legendre_on};
pub use region::{
    integration_region, QuadNode, RegionDescriptor, RegionMode, RegionSpec,
    DEFAULT_ANGULAR_NODES, DEFAULT_RADIAL_NODES, DEFAULT_R_MAX_FACTOR,
};
