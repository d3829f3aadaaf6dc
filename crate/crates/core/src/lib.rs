//! Numerical core for a two-dimensional atomic lattice whose hopping is
//! driven by a single lossy cavity mode: Hofstadter/Harper spectra with
//! edge-counted gap invariants, and the mean-field-plus-fluctuation
//! evolution of the cavity amplitude and atomic density matrix.
//!
//! `no_std` with `alloc`; file formats and the command line live in the
//! companion `hallcav` crate.
#![no_std]
#[cfg(test)]
extern crate std;
extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod observables;
pub mod spectrum;

pub use error::{Error, Result};
pub use lattice::{site_from_index, site_index, vertex_v1, vertex_v2, Flux, ModelParams, Site, C64};
