use alloc::vec::Vec;
use core::f64::consts::TAU;

use nalgebra::DMatrix;
// float methods are inherent whenever std is linked anywhere in the build
#[allow(unused_imports)]
use num_traits::Float;

use super::harper::GapRecord;
use crate::error::{Error, Result};
use crate::lattice::{Flux, ModelParams, C64};
use crate::linalg::hermitian_eigen;

/// Sign of `dE/dk_y` that counts as right-moving.
///
/// The orientation of the `k_y` axis relative to the edges is a convention;
/// this one makes the lowest gap at `Φ = 1/5`, `λ = Ω` carry `γ = +1` on the
/// left edge.
pub const RIGHT_MOVING_SIGN: f64 = -1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeOptions {
    /// Fraction of the cylinder width counted as each edge strip.
    pub edge_fraction: f64,
    /// Minimum strip weight for a state to count as living on that edge.
    pub edge_threshold: f64,
    /// Minimum squared overlap for continuing a band between adjacent `k_y`.
    pub overlap_min: f64,
    pub keep_vectors: bool,
}

impl Default for EdgeOptions {
    fn default() -> Self {
        EdgeOptions { edge_fraction: 0.2, edge_threshold: 0.5, overlap_min: 0.7, keep_vectors: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeSelect {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeWarning {
    /// Fewer than `2q` sites: the two edges are not separated by bulk.
    NarrowCylinder { l_open: usize, recommended: usize },
}

/// Cylinder bands `E_l(k_y)` with localization, velocity and band-tracking
/// metadata. All per-state arrays are `k_y`-major: state `l` at `ky[s]` sits
/// at `s * l_open + l`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeBandStructure {
    pub flux: Flux,
    pub l_open: usize,
    pub ky: Vec<f64>,
    pub energies: Vec<f64>,
    pub left_weight: Vec<f64>,
    pub right_weight: Vec<f64>,
    pub bulk_weight: Vec<f64>,
    pub velocity: Vec<f64>,
    /// Index at `ky[s + 1]` (cyclically) of the continuation of each state.
    pub successor: Vec<usize>,
    /// Whether the continuation was established by overlap (vs. sorted order).
    pub tracked: Vec<bool>,
    pub vectors: Option<Vec<DMatrix<C64>>>,
    pub options: EdgeOptions,
    pub warning: Option<EdgeWarning>,
}

impl EdgeBandStructure {
    pub fn n_ky(&self) -> usize {
        self.ky.len()
    }

    #[inline]
    pub fn at(&self, s: usize, l: usize) -> usize {
        s * self.l_open + l
    }

    pub fn bands_at(&self, s: usize) -> &[f64] {
        &self.energies[s * self.l_open..(s + 1) * self.l_open]
    }
}

/// The `L × L` open-boundary Harper matrix at `ν = k_y`.
pub fn cylinder_matrix(p: &ModelParams, ky: f64, l_open: usize) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(l_open, l_open, C64::new(0.0, 0.0));
    let forward = C64::from_polar(p.lambda, -p.theta) * -1.0;
    for row in 0..l_open {
        let phase = p.flux.column_phase(row as i64) - ky + p.theta;
        m[(row, row)] = C64::new(-2.0 * p.omega * phase.cos(), 0.0);
        if row + 1 < l_open {
            m[(row, row + 1)] = forward;
            m[(row + 1, row)] = forward.conj();
        }
    }
    m
}

/// Solves the cylinder (open in x, periodic in y) on `n_ky` uniform momenta.
pub fn edge_spectrum(
    p: &ModelParams,
    l_open: usize,
    n_ky: usize,
    options: EdgeOptions,
) -> Result<EdgeBandStructure> {
    if l_open < 2 {
        return Err(Error::InvalidParameter { name: "l_open", reason: "must be >= 2" });
    }
    if n_ky == 0 {
        return Err(Error::InvalidParameter { name: "n_ky", reason: "must be >= 1" });
    }
    let p = p.validated()?;
    let q = p.flux.denom() as usize;
    let warning = (l_open < 2 * q).then_some(EdgeWarning::NarrowCylinder { l_open, recommended: 2 * q });
    let strip = ((options.edge_fraction * l_open as f64).ceil() as usize).clamp(1, l_open / 2);

    let ky: Vec<f64> = (0..n_ky).map(|s| TAU * s as f64 / n_ky as f64).collect();
    let eigs: Vec<(Vec<f64>, DMatrix<C64>)> =
        ky.iter().map(|&k| hermitian_eigen(cylinder_matrix(&p, k, l_open))).collect();

    let total = n_ky * l_open;
    let mut energies = Vec::with_capacity(total);
    let mut left_weight = Vec::with_capacity(total);
    let mut right_weight = Vec::with_capacity(total);
    let mut bulk_weight = Vec::with_capacity(total);
    for (values, vectors) in &eigs {
        energies.extend_from_slice(values);
        for l in 0..l_open {
            let col = vectors.column(l);
            let w = |range: core::ops::Range<usize>| range.map(|m| col[m].norm_sqr()).sum::<f64>();
            left_weight.push(w(0..strip));
            right_weight.push(w(l_open - strip..l_open));
            bulk_weight.push(w(strip..l_open - strip));
        }
    }

    let mut successor = Vec::with_capacity(total);
    let mut tracked = Vec::with_capacity(total);
    for s in 0..n_ky {
        let next = (s + 1) % n_ky;
        let (succ, ok) = track(&eigs[s].1, &eigs[next].1, options.overlap_min);
        successor.extend(succ);
        tracked.extend(ok);
    }

    let mut velocity = alloc::vec![0.0; total];
    if n_ky > 1 {
        let dk = TAU / n_ky as f64;
        for s in 0..n_ky {
            let next = (s + 1) % n_ky;
            let prev = (s + n_ky - 1) % n_ky;
            let mut predecessor = alloc::vec![0usize; l_open];
            for l in 0..l_open {
                predecessor[successor[prev * l_open + l]] = l;
            }
            for l in 0..l_open {
                let forward = energies[next * l_open + successor[s * l_open + l]];
                let backward = energies[prev * l_open + predecessor[l]];
                velocity[s * l_open + l] = (forward - backward) / (2.0 * dk);
            }
        }
    }

    let vectors = options.keep_vectors.then(|| eigs.into_iter().map(|(_, v)| v).collect());
    Ok(EdgeBandStructure {
        flux: p.flux,
        l_open,
        ky,
        energies,
        left_weight,
        right_weight,
        bulk_weight,
        velocity,
        successor,
        tracked,
        vectors,
        options,
        warning,
    })
}

/// Maps every state at one momentum to its continuation at the next by
/// maximal squared overlap. States without a partner above `overlap_min`
/// take the free targets in sorted order so the map stays a permutation.
fn track(from: &DMatrix<C64>, to: &DMatrix<C64>, overlap_min: f64) -> (Vec<usize>, Vec<bool>) {
    let n = from.ncols();
    let overlaps = from.adjoint() * to;
    let mut succ = alloc::vec![usize::MAX; n];
    let mut ok = alloc::vec![false; n];
    let mut taken = alloc::vec![false; n];
    for l in 0..n {
        let (best, w) = (0..n)
            .map(|k| (k, overlaps[(l, k)].norm_sqr()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        // Above 1/2 the partner is unique because each column has unit norm.
        if w >= overlap_min.max(0.5 + 1e-12) && !taken[best] {
            succ[l] = best;
            ok[l] = true;
            taken[best] = true;
        }
    }
    let mut free = (0..n).filter(|&k| !taken[k]);
    for s in succ.iter_mut().filter(|s| **s == usize::MAX) {
        *s = free.next().expect("permutation targets exhausted");
    }
    (succ, ok)
}

/// Counts chiral crossings of the gap's midpoint by states on one edge and
/// returns the gap with `γ = n_right - n_left` filled in.
pub fn gap_invariant(edge: &EdgeBandStructure, gap: &GapRecord, select: EdgeSelect) -> Result<GapRecord> {
    let fermi = gap.fermi_energy();
    let n_ky = edge.n_ky();
    let l_open = edge.l_open;
    let threshold = edge.options.edge_threshold;
    let dk = TAU / n_ky as f64;

    let (mut n_left, mut n_right) = (0u32, 0u32);
    let mut ambiguous = Vec::new();
    if n_ky > 1 {
        for s in 0..n_ky {
            let next = (s + 1) % n_ky;
            for l in 0..l_open {
                let here = edge.at(s, l);
                let there = edge.at(next, edge.successor[here]);
                let e0 = edge.energies[here] - fermi;
                let e1 = edge.energies[there] - fermi;
                if (e0 < 0.0) == (e1 < 0.0) {
                    continue;
                }
                let left = 0.5 * (edge.left_weight[here] + edge.left_weight[there]);
                let right = 0.5 * (edge.right_weight[here] + edge.right_weight[there]);
                let on_selected = match select {
                    EdgeSelect::Left => left,
                    EdgeSelect::Right => right,
                };
                if on_selected >= threshold {
                    if (e1 - e0) * RIGHT_MOVING_SIGN > 0.0 {
                        n_right += 1;
                    } else {
                        n_left += 1;
                    }
                } else if left < threshold && right < threshold {
                    ambiguous.push(edge.ky[s] + 0.5 * dk);
                }
            }
        }
    }
    if !ambiguous.is_empty() {
        return Err(Error::AmbiguousLocalization { ky: ambiguous });
    }
    Ok(GapRecord { gamma: Some(n_right as i64 - n_left as i64), n_left, n_right, ..*gap })
}

/// `σ_H = γ / 2π` in units where `e = ħ = 1`.
pub fn hall_conductivity(gamma: i64) -> f64 {
    gamma as f64 / TAU
}
