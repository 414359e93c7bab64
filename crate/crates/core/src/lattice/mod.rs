//! Planarization of drawn 2-local Hamiltonians and their square-lattice form.

mod planar;
mod route;

pub use planar::{planarize, PlanarizeConfig, Planarized, Stage};
pub use route::{
    lattice_violations, match_path_lengths, snap_and_route, EdgePath, GridPoint, LatticeEmbedding, LatticeHamiltonian,
    RouteConfig,
};
