//! Right-hand sides of the cavity and density-matrix equations.
//!
//! Both vertex functions are the matrix elements of a single hop operator:
//! with `W[a, b] = v₁(b, a)`, i.e. `W[a, a+x̂] = λ` and
//! `W[a, a+ŷ] = Ω e^{i2π m_a Φ}`, one has `v₂(a, b) = conj(W[a, b]) = W†[b, a]`.
//! The printed equation then collapses to
//!
//! ```text
//! ∂ρ = i[G, ρ] − K {W†W, ρ} + 2K W ρ W† + K (Xρ + ρX)
//! G  = −(α* W + α W†),   X = W†ρW − WρW†,   K = κ/(Δ² + κ²)
//! ```
//!
//! Every product with `W` is applied through its bond list, so the single-ρ
//! terms cost `O(L⁴)`. The bilinear terms need the dense products `Xρ`, `ρX`.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::state::SystemState;
use crate::error::{Error, Result};
use crate::lattice::{ModelParams, C64};

/// Bond list of the hop operator `W` on the open `L × L` lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Hopping {
    l: usize,
    /// `(a, b, w)` meaning `W[a, b] = w`.
    bonds: Vec<(usize, usize, C64)>,
}

impl Hopping {
    pub fn new(p: &ModelParams) -> Self {
        let l = p.lattice_size;
        let mut bonds = Vec::with_capacity(2 * l * l);
        for m in 0..l {
            let factor = p.flux.column_factor(m as i64) * p.omega;
            for n in 0..l {
                let a = m * l + n;
                if m + 1 < l && p.lambda != 0.0 {
                    bonds.push((a, a + l, C64::new(p.lambda, 0.0)));
                }
                if n + 1 < l && p.omega != 0.0 {
                    bonds.push((a, a + 1, factor));
                }
            }
        }
        Hopping { l, bonds }
    }

    pub fn lattice_size(&self) -> usize {
        self.l
    }

    pub fn bonds(&self) -> &[(usize, usize, C64)] {
        &self.bonds
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let n = self.l * self.l;
        let mut w = DMatrix::zeros(n, n);
        for &(a, b, v) in &self.bonds {
            w[(a, b)] += v;
        }
        w
    }

    /// `W ρ`.
    pub fn left(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(rho.nrows(), rho.ncols());
        for &(a, b, w) in &self.bonds {
            for c in 0..rho.ncols() {
                out[(a, c)] += w * rho[(b, c)];
            }
        }
        out
    }

    /// `W† ρ`.
    pub fn left_adjoint(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(rho.nrows(), rho.ncols());
        for &(a, b, w) in &self.bonds {
            let w = w.conj();
            for c in 0..rho.ncols() {
                out[(b, c)] += w * rho[(a, c)];
            }
        }
        out
    }

    /// `ρ W`.
    pub fn right(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(rho.nrows(), rho.ncols());
        for &(a, b, w) in &self.bonds {
            for r in 0..rho.nrows() {
                out[(r, b)] += rho[(r, a)] * w;
            }
        }
        out
    }

    /// `ρ W†`.
    pub fn right_adjoint(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(rho.nrows(), rho.ncols());
        for &(a, b, w) in &self.bonds {
            let w = w.conj();
            for r in 0..rho.nrows() {
                out[(r, a)] += rho[(r, b)] * w;
            }
        }
        out
    }

    /// `Tr(W ρ) = Σ λ ρ_{a+x̂, a} + Ω e^{i2π m Φ} ρ_{a+ŷ, a}`.
    pub fn bond_sum(&self, rho: &DMatrix<C64>) -> C64 {
        self.bonds.iter().map(|&(a, b, w)| w * rho[(b, a)]).sum()
    }
}

/// Which groups of terms enter the density-matrix derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RhsOptions {
    /// Include the bilinear `ρρ` fluctuation terms.
    pub fluctuations: bool,
}

impl Default for RhsOptions {
    fn default() -> Self {
        RhsOptions { fluctuations: true }
    }
}

/// The density-matrix derivative split by physical origin.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsParts {
    /// Cavity-amplitude (coherent) hopping, linear in `α`.
    pub coherent: DMatrix<C64>,
    /// Single-ρ dissipative contractions.
    pub dissipative: DMatrix<C64>,
    /// Bilinear fluctuation terms; zero when switched off.
    pub fluctuation: DMatrix<C64>,
}

impl RhsParts {
    pub fn total(&self) -> DMatrix<C64> {
        &self.coherent + &self.dissipative + &self.fluctuation
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn check_dims(s: &SystemState, hop: &Hopping) -> Result<()> {
    if s.lattice_size() != hop.lattice_size() {
        return Err(Error::DimensionMismatch { expected: hop.lattice_size(), found: s.lattice_size() });
    }
    Ok(())
}

/// `dα/dt = −i(Δ − iκ)α + i Σ (λ ρ_{a+x̂,a} + Ω e^{i2π m Φ} ρ_{a+ŷ,a})`.
pub fn cavity_rhs(s: &SystemState, p: &ModelParams) -> Result<C64> {
    let hop = Hopping::new(p);
    check_dims(s, &hop)?;
    Ok(cavity_rhs_with(&hop, p, s.alpha, &s.rho))
}

pub(crate) fn cavity_rhs_with(hop: &Hopping, p: &ModelParams, alpha: C64, rho: &DMatrix<C64>) -> C64 {
    let i = C64::new(0.0, 1.0);
    -i * C64::new(p.delta, -p.kappa) * alpha + i * hop.bond_sum(rho)
}

pub fn density_rhs(s: &SystemState, p: &ModelParams) -> Result<DMatrix<C64>> {
    Ok(density_rhs_parts(s, p, RhsOptions::default())?.total())
}

pub fn density_rhs_parts(s: &SystemState, p: &ModelParams, opts: RhsOptions) -> Result<RhsParts> {
    let hop = Hopping::new(p);
    check_dims(s, &hop)?;
    Ok(rhs_parts_with(&hop, p, s.alpha, &s.rho, opts))
}

pub(crate) fn rhs_parts_with(
    hop: &Hopping,
    p: &ModelParams,
    alpha: C64,
    rho: &DMatrix<C64>,
    opts: RhsOptions,
) -> RhsParts {
    let i = C64::new(0.0, 1.0);
    let k = p.dissipation_rate();
    let a_star = alpha.conj();

    let w_rho = hop.left(rho);
    let wd_rho = hop.left_adjoint(rho);
    let rho_w = hop.right(rho);
    let rho_wd = hop.right_adjoint(rho);

    // i(Gρ − ρG) with G = −(α* W + α W†)
    let coherent = (&w_rho * a_star + &wd_rho * alpha - &rho_w * a_star - &rho_wd * alpha) * -i;

    let w_rho_wd = hop.right_adjoint(&w_rho);
    let anticomm = hop.left_adjoint(&w_rho) + hop.right(&rho_wd);
    let dissipative = (w_rho_wd * re(2.0) - anticomm) * re(k);

    let fluctuation = if opts.fluctuations && k != 0.0 {
        let x = hop.right(&wd_rho) - hop.right_adjoint(&w_rho);
        (&x * rho + rho * &x) * re(k)
    } else {
        DMatrix::zeros(rho.nrows(), rho.ncols())
    };

    RhsParts { coherent, dissipative, fluctuation }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{vertex_v1, vertex_v2, Flux};
    use crate::linalg::hermiticity_residual;

    fn params(l: usize, flux: Flux) -> ModelParams {
        ModelParams { lambda: 0.7, omega: 0.4, delta: 0.3, kappa: 1.1, flux, lattice_size: l, ..Default::default() }
    }

    fn pseudo_random_hermitian(n: usize, seed: u64) -> DMatrix<C64> {
        let mut x = seed;
        let mut next = move || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let a = DMatrix::from_fn(n, n, |_, _| C64::new(next(), next()));
        (&a + a.adjoint()) * C64::new(0.5, 0.0)
    }

    #[test]
    fn hop_operator_matches_vertex_functions() {
        let p = params(4, Flux::new(2, 5).unwrap());
        let w = Hopping::new(&p).to_dense();
        for a in 0..16i64 {
            for b in 0..16i64 {
                let (i, j, ip, jp) = (a / 4, a % 4, b / 4, b % 4);
                assert_eq!(w[(a as usize, b as usize)], vertex_v1(&p, ip, jp, i, j));
                assert_eq!(w.adjoint()[(b as usize, a as usize)], vertex_v2(&p, i, j, ip, jp));
            }
        }
    }

    #[test]
    fn sparse_products_match_dense() {
        let p = params(3, Flux::new(1, 3).unwrap());
        let hop = Hopping::new(&p);
        let w = hop.to_dense();
        let r = pseudo_random_hermitian(9, 7) + DMatrix::from_fn(9, 9, |a, b| C64::new(0.0, (a * b) as f64));
        assert!((hop.left(&r) - &w * &r).camax() < 1e-14);
        assert!((hop.left_adjoint(&r) - w.adjoint() * &r).camax() < 1e-14);
        assert!((hop.right(&r) - &r * &w).camax() < 1e-14);
        assert!((hop.right_adjoint(&r) - &r * w.adjoint()).camax() < 1e-14);
        assert!((hop.bond_sum(&r) - (&w * &r).trace()).norm() < 1e-12);
    }

    #[test]
    fn decoupled_cavity_decays() {
        let p = ModelParams { lambda: 0.0, omega: 0.0, ..params(3, Flux::ZERO) };
        let s = SystemState::new(3, C64::new(0.4, -0.2), pseudo_random_hermitian(9, 1), 0.0).unwrap();
        let expect = -C64::new(0.0, 1.0) * C64::new(0.3, -1.1) * s.alpha;
        assert!((cavity_rhs(&s, &p).unwrap() - expect).norm() < 1e-15);
        assert_eq!(density_rhs(&s, &p).unwrap().camax(), 0.0);
    }

    #[test]
    fn single_bond_coherence_feeds_the_cavity() {
        let p = ModelParams { lambda: 1.0, omega: 0.0, lattice_size: 2, ..Default::default() };
        let mut rho = DMatrix::zeros(4, 4);
        rho[(2, 0)] = C64::new(0.5, 0.0);
        rho[(0, 2)] = C64::new(0.5, 0.0);
        let s = SystemState::new(2, C64::new(0.0, 0.0), rho, 0.0).unwrap();
        assert!((cavity_rhs(&s, &p).unwrap() - C64::new(0.0, 0.5)).norm() < 1e-15);
        let diag = SystemState::new(2, C64::new(0.0, 0.0), DMatrix::identity(4, 4), 0.0).unwrap();
        assert_eq!(cavity_rhs(&diag, &p).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn rhs_is_hermitian_and_traceless() {
        for seed in 1..6 {
            let p = params(3, Flux::new(2, 5).unwrap());
            let s = SystemState::new(3, C64::new(0.3, -0.2 * seed as f64), pseudo_random_hermitian(9, seed), 0.0)
                .unwrap();
            let d = density_rhs(&s, &p).unwrap();
            assert!(hermiticity_residual(&d) < 1e-12);
            assert!(d.trace().norm() < 1e-12);
        }
    }

    #[test]
    fn zero_flux_real_input_splits_into_real_and_imaginary_parts() {
        let p = params(3, Flux::ZERO);
        let r = pseudo_random_hermitian(9, 3).map(|z| C64::new(z.re, 0.0));
        let s = SystemState::new(3, C64::new(0.6, 0.0), r, 0.0).unwrap();
        let parts = density_rhs_parts(&s, &p, RhsOptions::default()).unwrap();
        // i·[real symmetric, real symmetric] is purely imaginary
        assert!(parts.coherent.iter().all(|z| z.re.abs() < 1e-15));
        assert!(parts.dissipative.iter().chain(parts.fluctuation.iter()).all(|z| z.im.abs() < 1e-15));
    }

    #[test]
    fn fluctuation_switch_removes_only_the_bilinear_part() {
        let p = params(3, Flux::new(1, 2).unwrap());
        let s = SystemState::new(3, C64::new(0.1, 0.5), pseudo_random_hermitian(9, 9), 0.0).unwrap();
        let on = density_rhs_parts(&s, &p, RhsOptions { fluctuations: true }).unwrap();
        let off = density_rhs_parts(&s, &p, RhsOptions { fluctuations: false }).unwrap();
        assert_eq!(on.coherent, off.coherent);
        assert_eq!(on.dissipative, off.dissipative);
        assert_eq!(off.fluctuation.camax(), 0.0);
        assert!(on.fluctuation.camax() > 1e-3);
    }

    #[test]
    fn mismatched_lattice_is_rejected() {
        let s = SystemState::vacuum(3, C64::new(0.0, 0.0));
        assert!(density_rhs(&s, &params(4, Flux::ZERO)).is_err());
    }
}
