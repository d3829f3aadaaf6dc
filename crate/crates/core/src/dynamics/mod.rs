//! Time evolution of the cavity amplitude and the atomic density matrix.

mod integrate;
mod rhs;
mod state;

pub use integrate::{evolve, step, step_euler, step_rk4, EvolveOptions, Stepper};
pub(crate) use rhs::rhs_parts_with;
pub use rhs::{cavity_rhs, density_rhs, density_rhs_parts, Hopping, RhsOptions, RhsParts};
pub use state::{build_initial_state, InitialStateSpec, SystemState};
