use alloc::vec::Vec;
use core::f64::consts::TAU;

use nalgebra::DMatrix;
// float methods are inherent whenever std is linked anywhere in the build
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::lattice::{Flux, ModelParams, C64};
use crate::linalg::cyclic_tridiagonal_eigenvalues;

/// Gaps narrower than this (in units of |α|) are treated as grid noise.
pub const DEFAULT_MIN_GAP_WIDTH: f64 = 0.05;

/// The `q × q` magnetic-unit-cell Harper matrix at Bloch phase `nu` and
/// magnetic quasi-momentum `kx`.
///
/// Row `m` reads `-λ(e^{iθ} ψ_{m-1} + e^{-iθ} ψ_{m+1}) - 2Ω cos(2πmΦ - ν + θ) ψ_m`
/// with the Bloch condition `ψ_{m+q} = e^{i q kx} ψ_m` closing the cell.
/// Every off-diagonal entry is written together with its conjugate partner,
/// so the result is Hermitian bit for bit.
pub fn harper_matrix(p: &ModelParams, nu: f64, kx: f64) -> DMatrix<C64> {
    let q = p.flux.denom() as usize;
    let mut m = DMatrix::from_element(q, q, C64::new(0.0, 0.0));
    for row in 0..q {
        let phase = p.flux.column_phase(row as i64) - nu + p.theta;
        m[(row, row)] = C64::new(-2.0 * p.omega * phase.cos(), 0.0);
    }
    // Hop from m to m+1 carries -λ e^{-iθ}; the link q-1 -> q wraps onto 0
    // with the Bloch factor.
    let forward = C64::from_polar(p.lambda, -p.theta) * -1.0;
    let bloch = C64::from_polar(1.0, q as f64 * kx);
    for row in 0..q {
        let (col, amp) = if row + 1 < q { (row + 1, forward) } else { (0, forward * bloch) };
        if row == col {
            // q = 1: both wrap links land on the diagonal.
            m[(row, row)] += amp + amp.conj();
        } else {
            m[(row, col)] += amp;
            m[(col, row)] += amp.conj();
        }
    }
    m
}

/// Sorted eigenvalues `E/|α|` of [`harper_matrix`].
pub fn harper_eigenvalues(p: &ModelParams, nu: f64, kx: f64) -> Vec<f64> {
    cyclic_tridiagonal_eigenvalues(&harper_matrix(p, nu, kx))
}

/// Uniform magnetic Brillouin-zone grid `kx ∈ [0, 2π/q)`.
pub fn kx_grid(q: u64, n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / (q as f64 * n as f64)).collect()
}

/// Uniform grid `ν ∈ [0, 2π)`.
pub fn nu_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

/// Torus spectrum of one rational flux: `q` sorted eigenvalues per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct HarperSpectrum {
    pub flux: Flux,
    pub kx: Vec<f64>,
    pub nu: Vec<f64>,
    /// Point `(ikx, inu)` occupies `energies[(ikx * nu.len() + inu) * q ..][..q]`.
    pub energies: Vec<f64>,
}

impl HarperSpectrum {
    pub fn q(&self) -> usize {
        self.flux.denom() as usize
    }

    pub fn points(&self) -> usize {
        self.kx.len() * self.nu.len()
    }

    pub fn point(&self, ikx: usize, inu: usize) -> &[f64] {
        let q = self.q();
        let start = (ikx * self.nu.len() + inu) * q;
        &self.energies[start..start + q]
    }

    /// `[min, max]` of each band over the sampled grid.
    pub fn band_ranges(&self) -> Vec<(f64, f64)> {
        let q = self.q();
        let mut ranges = alloc::vec![(f64::INFINITY, f64::NEG_INFINITY); q];
        for chunk in self.energies.chunks_exact(q) {
            for (r, &e) in ranges.iter_mut().zip(chunk) {
                r.0 = r.0.min(e);
                r.1 = r.1.max(e);
            }
        }
        ranges
    }

    pub fn min_energy(&self) -> f64 {
        self.energies.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_energy(&self) -> f64 {
        self.energies.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Diagonalizes the Harper matrix over a uniform `n_kx × n_nu` grid.
pub fn bulk_spectrum(p: &ModelParams, n_kx: usize, n_nu: usize) -> Result<HarperSpectrum> {
    if n_kx == 0 || n_nu == 0 {
        return Err(Error::InvalidParameter { name: "grid", reason: "grid sizes must be >= 1" });
    }
    let p = p.validated()?;
    let q = p.flux.denom();
    let kx = kx_grid(q, n_kx);
    let nu = nu_grid(n_nu);
    let mut energies = Vec::with_capacity(n_kx * n_nu * q as usize);
    for &k in &kx {
        for &v in &nu {
            energies.extend(harper_eigenvalues(&p, v, k));
        }
    }
    Ok(HarperSpectrum { flux: p.flux, kx, nu, energies })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ButterflyPoint {
    pub flux: Flux,
    pub energy: f64,
}

/// Scatter data of the bulk spectrum over every reduced `p/q < 1` with
/// `q <= q_max`, ordered by flux then energy. `p.flux` is ignored.
pub fn butterfly(p: &ModelParams, q_max: u64, n_kx: usize, n_nu: usize) -> Result<Vec<ButterflyPoint>> {
    if q_max == 0 {
        return Err(Error::InvalidParameter { name: "q_max", reason: "must be >= 1" });
    }
    let mut out = Vec::new();
    for flux in Flux::farey(q_max) {
        let spec = bulk_spectrum(&ModelParams { flux, ..*p }, n_kx, n_nu)?;
        let mut energies = spec.energies;
        energies.sort_by(f64::total_cmp);
        out.extend(energies.into_iter().map(|energy| ButterflyPoint { flux, energy }));
    }
    Ok(out)
}

/// A bulk gap and, once computed, its edge-counted invariant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRecord {
    pub lower: f64,
    pub upper: f64,
    /// Number of bulk bands below the gap.
    pub bands_below: usize,
    pub gamma: Option<i64>,
    pub n_left: u32,
    pub n_right: u32,
}

impl GapRecord {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn fermi_energy(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// Maximal energy intervals of width `>= min_width` free of bulk states.
///
/// Each band is the continuous image of the Brillouin zone, so the occupied
/// set is the union of the per-band `[min, max]` intervals; gaps are the
/// holes in that union. This keeps the sampling holes of a discrete grid
/// from being reported as gaps.
pub fn find_gaps(spec: &HarperSpectrum, min_width: f64) -> Vec<GapRecord> {
    let ranges = spec.band_ranges();
    let mut gaps = Vec::new();
    let mut top = f64::NEG_INFINITY;
    for (r, window) in ranges.windows(2).enumerate() {
        top = top.max(window[0].1);
        let next = window[1].0;
        if next - top >= min_width {
            gaps.push(GapRecord {
                lower: top,
                upper: next,
                bands_below: r + 1,
                gamma: None,
                n_left: 0,
                n_right: 0,
            });
        }
    }
    gaps
}
