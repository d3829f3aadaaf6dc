//! Static limit: the Harper equation on torus and cylinder geometries, the
//! flux sweep, bulk gaps and their edge-counted topological invariants.

mod edge;
mod harper;

pub use edge::{
    cylinder_matrix, edge_spectrum, gap_invariant, hall_conductivity, EdgeBandStructure,
    EdgeOptions, EdgeSelect, EdgeWarning, RIGHT_MOVING_SIGN,
};
pub use harper::{
    bulk_spectrum, butterfly, find_gaps, harper_eigenvalues, harper_matrix, kx_grid, nu_grid,
    ButterflyPoint, GapRecord, HarperSpectrum, DEFAULT_MIN_GAP_WIDTH,
};
