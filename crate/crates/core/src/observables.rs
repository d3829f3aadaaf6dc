//! Bond currents, the Hall current and conservation diagnostics.
//!
//! Every current is defined on the bond leaving site `(i, j)` in the `+x`
//! or `+y` direction and enters the discrete continuity equation
//! `∂ρ_{ij} = −(J_x(ij) − J_x(i−1 j) + J_y(ij) − J_y(i j−1))`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
// float methods are inherent whenever std is linked anywhere in the build
#[allow(unused_imports)]
use num_traits::Float;

use crate::dynamics::{rhs_parts_with, Hopping, RhsOptions, RhsParts, SystemState};
use crate::error::{Error, Result};
use crate::lattice::{ModelParams, C64};
use crate::linalg::{hermitian_eigenvalues, hermiticity_residual};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Coherent,
    Classical,
    Quantum,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Coherent, Channel::Classical, Channel::Quantum];
}

/// Per-site bond currents of one channel, indexed by flat site index.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentField {
    pub channel: Channel,
    pub l: usize,
    pub jx: Vec<f64>,
    pub jy: Vec<f64>,
    /// Largest imaginary magnitude dropped when taking real parts.
    pub discarded_imag: f64,
}

impl CurrentField {
    fn zeros(channel: Channel, l: usize) -> Self {
        CurrentField { channel, l, jx: vec![0.0; l * l], jy: vec![0.0; l * l], discarded_imag: 0.0 }
    }

    pub fn total_x(&self) -> f64 {
        self.jx.iter().sum()
    }

    pub fn total_y(&self) -> f64 {
        self.jy.iter().sum()
    }

    /// `J_x(ij) − J_x(i−1 j) + J_y(ij) − J_y(i j−1)` per site.
    pub fn divergence(&self) -> Vec<f64> {
        let l = self.l;
        (0..l * l)
            .map(|a| {
                let (m, n) = (a / l, a % l);
                let mut d = self.jx[a] + self.jy[a];
                if m > 0 {
                    d -= self.jx[a - l];
                }
                if n > 0 {
                    d -= self.jy[a - 1];
                }
                d
            })
            .collect()
    }

    fn add(&mut self, other: &CurrentField) {
        for (a, b) in self.jx.iter_mut().zip(&other.jx) {
            *a += b;
        }
        for (a, b) in self.jy.iter_mut().zip(&other.jy) {
            *a += b;
        }
        self.discarded_imag = self.discarded_imag.max(other.discarded_imag);
    }
}

fn check_params(s: &SystemState, p: &ModelParams) -> Result<usize> {
    let l = s.lattice_size();
    if p.lattice_size != l {
        return Err(Error::DimensionMismatch { expected: p.lattice_size, found: l });
    }
    Ok(l)
}

/// Cavity-mediated currents.
///
/// `J_x(ij) = −2λ Im α* ρ_{i+1j,ij}` and
/// `J_y(ij) = −2Ω Im α* e^{i2π iΦ} ρ_{ij+1,ij}`; the `y` bond element is taken
/// in the same order as the `x` one, which is the ordering that satisfies the
/// continuity equation against the coherent part of the density-matrix
/// derivative.
pub fn coherent_current(s: &SystemState, p: &ModelParams) -> Result<CurrentField> {
    let l = check_params(s, p)?;
    let mut f = CurrentField::zeros(Channel::Coherent, l);
    let a_star = s.alpha.conj();
    for m in 0..l {
        let phase = p.flux.column_factor(m as i64);
        for n in 0..l {
            let a = m * l + n;
            if m + 1 < l {
                f.jx[a] = -2.0 * p.lambda * (a_star * s.rho[(a + l, a)]).im;
            }
            if n + 1 < l {
                f.jy[a] = -2.0 * p.omega * (a_star * phase * s.rho[(a + 1, a)]).im;
            }
        }
    }
    Ok(f)
}

/// Thermal-fluctuation currents with prefactor `−2κ/(Δ² + κ²)`:
///
/// `J_x = −2K [λ² ρ_{i+1j,i+1j} + λΩ cos(φi) ρ_{i+1j,ij+1}]`,
/// `J_y = −2K [Ω² ρ_{ij+1,ij+1} + λΩ cos(φi) ρ_{i+1j,ij+1}]`, `φ = 2πΦ`.
/// The mixed element is complex in general; its real part is kept and the
/// dropped imaginary magnitude recorded.
pub fn classical_current(s: &SystemState, p: &ModelParams) -> Result<CurrentField> {
    let l = check_params(s, p)?;
    let mut f = CurrentField::zeros(Channel::Classical, l);
    let k = p.dissipation_rate();
    for m in 0..l {
        let cos = p.flux.column_factor(m as i64).re;
        for n in 0..l {
            let a = m * l + n;
            let (i, j) = (m as i64, n as i64);
            let mixed = s.rho_at(i + 1, j, i, j + 1) * (p.lambda * p.omega * cos);
            f.discarded_imag = f.discarded_imag.max(k * mixed.im.abs());
            if m + 1 < l {
                f.jx[a] = -2.0 * k * (p.lambda * p.lambda * s.rho[(a + l, a + l)].re + mixed.re);
            }
            if n + 1 < l {
                f.jy[a] = -2.0 * k * (p.omega * p.omega * s.rho[(a + 1, a + 1)].re + mixed.re);
            }
        }
    }
    Ok(f)
}

/// Quantum-fluctuation currents with prefactor `+2κ/(Δ² + κ²)`, bilinear in ρ:
///
/// `J_x = 2K Σ_{ml} [λ² Re ρ_{m+1l,i+1j} ρ_{ij,ml} + λΩ Re e^{iφm} ρ_{ml+1,i+1j} ρ_{ij,ml}]`,
/// `J_y = 2K Σ_{ml} [λΩ Re e^{−iφi} ρ_{m+1l,ij+1} ρ_{ij,ml} + Ω² Re e^{iφ(m−i)} ρ_{ml−1,ij+1} ρ_{ij,ml}]`.
pub fn quantum_current(s: &SystemState, p: &ModelParams) -> Result<CurrentField> {
    let l = check_params(s, p)?;
    let mut f = CurrentField::zeros(Channel::Quantum, l);
    let k = p.dissipation_rate();
    if k == 0.0 {
        return Ok(f);
    }
    let li = l as i64;
    let (ll, oo, lo) = (p.lambda * p.lambda, p.omega * p.omega, p.lambda * p.omega);
    for i in 0..li {
        let e_i = p.flux.column_factor(i);
        for j in 0..li {
            let a = (i * li + j) as usize;
            let mut sx = C64::new(0.0, 0.0);
            let mut sy = C64::new(0.0, 0.0);
            for m in 0..li {
                let e_m = p.flux.column_factor(m);
                for l_ in 0..li {
                    let r = s.rho_at(i, j, m, l_);
                    if r == C64::new(0.0, 0.0) {
                        continue;
                    }
                    if i + 1 < li {
                        sx += s.rho_at(m + 1, l_, i + 1, j) * r * ll
                            + e_m * s.rho_at(m, l_ + 1, i + 1, j) * r * lo;
                    }
                    if j + 1 < li {
                        sy += e_i.conj() * s.rho_at(m + 1, l_, i, j + 1) * r * lo
                            + e_m * e_i.conj() * s.rho_at(m, l_ - 1, i, j + 1) * r * oo;
                    }
                }
            }
            f.jx[a] = 2.0 * k * sx.re;
            f.jy[a] = 2.0 * k * sy.re;
            f.discarded_imag = f.discarded_imag.max(2.0 * k * sx.im.abs().max(sy.im.abs()));
        }
    }
    Ok(f)
}

pub fn current(s: &SystemState, p: &ModelParams, channel: Channel) -> Result<CurrentField> {
    match channel {
        Channel::Coherent => coherent_current(s, p),
        Channel::Classical => classical_current(s, p),
        Channel::Quantum => quantum_current(s, p),
    }
}

/// Channel-resolved sums of the bond currents over the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurrentTotals {
    pub co_x: f64,
    pub co_y: f64,
    pub cl_x: f64,
    pub cl_y: f64,
    pub qu_x: f64,
    pub qu_y: f64,
}

impl CurrentTotals {
    /// `J^Hall = Σ (J^co_y + J^cl_y + J^qu_y)`.
    pub fn hall(&self) -> f64 {
        self.co_y + self.cl_y + self.qu_y
    }

    pub fn x_total(&self) -> f64 {
        self.co_x + self.cl_x + self.qu_x
    }
}

pub fn total_currents(s: &SystemState, p: &ModelParams) -> Result<CurrentTotals> {
    let [co, cl, qu] = all_currents(s, p)?;
    Ok(totals_of(&co, &cl, &qu))
}

fn all_currents(s: &SystemState, p: &ModelParams) -> Result<[CurrentField; 3]> {
    Ok([coherent_current(s, p)?, classical_current(s, p)?, quantum_current(s, p)?])
}

fn totals_of(co: &CurrentField, cl: &CurrentField, qu: &CurrentField) -> CurrentTotals {
    CurrentTotals {
        co_x: co.total_x(),
        co_y: co.total_y(),
        cl_x: cl.total_x(),
        cl_y: cl.total_y(),
        qu_x: qu.total_x(),
        qu_y: qu.total_y(),
    }
}

fn residual(drho: &DMatrix<C64>, field: &CurrentField) -> f64 {
    field
        .divergence()
        .iter()
        .enumerate()
        .map(|(a, d)| (drho[(a, a)].re + d).abs())
        .fold(0.0, f64::max)
}

/// `max_sites |∂ρ_{ijij} + div J|` with `J` the sum of all three channels.
pub fn continuity_residual(s: &SystemState, p: &ModelParams) -> Result<f64> {
    let hop = Hopping::new(p);
    let parts = rhs_parts_with(&hop, p, s.alpha, &s.rho, RhsOptions::default());
    let [mut co, cl, qu] = all_currents(s, p)?;
    co.add(&cl);
    co.add(&qu);
    Ok(residual(&parts.total(), &co))
}

/// Continuity residual of one channel against the matching group of terms
/// (coherent / dissipative / fluctuation) of the density-matrix derivative.
pub fn channel_continuity_residual(s: &SystemState, p: &ModelParams, channel: Channel) -> Result<f64> {
    let hop = Hopping::new(p);
    let parts = rhs_parts_with(&hop, p, s.alpha, &s.rho, RhsOptions::default());
    Ok(residual(channel_part(&parts, channel), &current(s, p, channel)?))
}

fn channel_part(parts: &RhsParts, channel: Channel) -> &DMatrix<C64> {
    match channel {
        Channel::Coherent => &parts.coherent,
        Channel::Classical => &parts.dissipative,
        Channel::Quantum => &parts.fluctuation,
    }
}

pub fn cavity_population(s: &SystemState) -> f64 {
    s.alpha.norm_sqr()
}

/// Everything reported for one sample of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    /// `κt`.
    pub time: f64,
    pub alpha: C64,
    pub population: f64,
    pub j_hall: f64,
    pub j_x_total: f64,
    pub currents: CurrentTotals,
    pub trace: f64,
    pub herm_residual: f64,
    pub min_eig: f64,
    pub max_eig: f64,
    /// Three-channel residual against the full derivative.
    pub continuity_residual: f64,
    /// Coherent channel against the coherent terms alone.
    pub coherent_continuity_residual: f64,
    pub discarded_imag: f64,
}

/// Evaluates the full observable set; `opts` selects the derivative the
/// continuity residual is checked against.
pub fn record(s: &SystemState, p: &ModelParams, opts: RhsOptions) -> Result<TrajectoryRecord> {
    let hop = Hopping::new(p);
    record_with(&hop, s, p, opts)
}

pub(crate) fn record_with(
    hop: &Hopping,
    s: &SystemState,
    p: &ModelParams,
    opts: RhsOptions,
) -> Result<TrajectoryRecord> {
    let [co, cl, qu] = all_currents(s, p)?;
    let totals = totals_of(&co, &cl, &qu);
    let parts = rhs_parts_with(hop, p, s.alpha, &s.rho, opts);

    let coherent_continuity_residual = residual(&parts.coherent, &co);
    let mut sum = co.clone();
    sum.add(&cl);
    if opts.fluctuations {
        sum.add(&qu);
    }
    let continuity_residual = residual(&parts.total(), &sum);

    let eig = hermitian_eigenvalues(s.rho.clone());
    Ok(TrajectoryRecord {
        time: s.time,
        alpha: s.alpha,
        population: cavity_population(s),
        j_hall: totals.hall(),
        j_x_total: totals.x_total(),
        currents: totals,
        trace: s.trace(),
        herm_residual: hermiticity_residual(&s.rho),
        min_eig: eig.first().copied().unwrap_or(0.0),
        max_eig: eig.last().copied().unwrap_or(0.0),
        continuity_residual,
        coherent_continuity_residual,
        discarded_imag: sum.discarded_imag.max(qu.discarded_imag),
    })
}
