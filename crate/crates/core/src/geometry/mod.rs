//! Domains, grids, graph hypersurfaces, normals, causal classification and
//! space-time regions.

mod grid;
mod region;
mod surface;

pub use grid::{BoundarySample, Domain, DomainKind, SpatialGrid, TimeGrid};
pub use region::{RegionMasks, SigmaColumn};
pub use surface::{
    classify, unit_normal, validate_foliation, CausalClass, CausalKind, FoliationViolation, Hypersurface, Interface,
    SurfaceNormal, SurfacePoint, SurfaceSpec, CLASSIFICATION_TOL,
};
