//! Lattice geometry, model parameters and the two hopping vertex functions.
//!
//! Sites are labelled `(m, n)` with `m` the column (x) index and `n` the row
//! (y) index; the flat index is `m * L + n`. The lattice is open: any vertex
//! or density-matrix element that refers to a site outside `[0, L)` is zero.

use core::f64::consts::TAU;

use nalgebra::Complex;
// float methods are inherent whenever std is linked anywhere in the build
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Magnetic flux per plaquette as an exact fraction `p/q`, reduced to lowest
/// terms and folded into `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Flux {
    p: u64,
    q: u64,
}

impl Flux {
    pub const ZERO: Flux = Flux { p: 0, q: 1 };

    /// Builds `p/q`, reducing modulo 1 and by the gcd.
    pub fn new(p: i64, q: i64) -> Result<Flux> {
        if q == 0 {
            return Err(Error::ZeroDenominator);
        }
        let (p, q) = if q < 0 { (-(p as i128), -(q as i128)) } else { (p as i128, q as i128) };
        let p = p.rem_euclid(q);
        let g = gcd(p as u64, q as u64);
        Ok(Flux { p: p as u64 / g, q: q as u64 / g })
    }

    pub fn numer(&self) -> u64 {
        self.p
    }

    pub fn denom(&self) -> u64 {
        self.q
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// `1 - Φ`, folded back into `[0, 1)`.
    pub fn mirror(&self) -> Flux {
        Flux { p: (self.q - self.p) % self.q, q: self.q }
    }

    /// Peierls phase `2π m Φ` picked up by a y-hop in column `m`, reduced
    /// exactly modulo `2π` before conversion to a float.
    pub fn column_phase(&self, m: i64) -> f64 {
        let r = (m as i128 * self.p as i128).rem_euclid(self.q as i128);
        TAU * r as f64 / self.q as f64
    }

    /// `e^{i 2π m Φ}`.
    pub fn column_factor(&self, m: i64) -> C64 {
        let phase = self.column_phase(m);
        C64::new(phase.cos(), phase.sin())
    }

    /// All reduced fractions `p/q` in `[0, 1)` with `q <= q_max`, ordered by value.
    pub fn farey(q_max: u64) -> alloc::vec::Vec<Flux> {
        let mut out = alloc::vec::Vec::new();
        for q in 1..=q_max {
            for p in 0..q {
                if gcd(p, q) == 1 {
                    out.push(Flux { p, q });
                }
            }
        }
        out.sort_by(|a, b| (a.p * b.q).cmp(&(b.p * a.q)));
        out
    }
}

impl core::fmt::Display for Flux {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl PartialOrd for Flux {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Flux {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        ((self.p as u128) * other.q as u128)
            .cmp(&((other.p as u128) * self.q as u128))
            .then(self.q.cmp(&other.q))
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Every physical constant of the model in one record.
///
/// In the dynamics `lambda`, `omega` and `delta` are measured in units of
/// `kappa`'s reciprocal time scale; in the static problem energies are in
/// units of `alpha_mag`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub lambda: f64,
    pub omega: f64,
    pub delta: f64,
    pub kappa: f64,
    pub flux: Flux,
    pub theta: f64,
    pub alpha_mag: f64,
    pub lattice_size: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            lambda: 0.5,
            omega: 0.5,
            delta: 0.5,
            kappa: 1.0,
            flux: Flux::ZERO,
            theta: 0.0,
            alpha_mag: 1.0,
            lattice_size: 4,
        }
    }
}

impl ModelParams {
    /// Static Harper-model parameters with `θ = 0`, `|α| = 1`.
    pub fn harper(lambda: f64, omega: f64, flux: Flux) -> Self {
        ModelParams { lambda, omega, flux, ..Default::default() }
    }

    /// Validates ranges and folds `theta` into `[0, 2π)`.
    pub fn validated(mut self) -> Result<Self> {
        let finite = |name, x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, reason: "must be finite" })
            }
        };
        finite("lambda", self.lambda)?;
        finite("omega", self.omega)?;
        finite("delta", self.delta)?;
        finite("kappa", self.kappa)?;
        finite("theta", self.theta)?;
        finite("alpha_mag", self.alpha_mag)?;
        if self.lambda < 0.0 {
            return Err(Error::InvalidParameter { name: "lambda", reason: "must be >= 0" });
        }
        if self.omega < 0.0 {
            return Err(Error::InvalidParameter { name: "omega", reason: "must be >= 0" });
        }
        if self.kappa < 0.0 {
            return Err(Error::InvalidParameter { name: "kappa", reason: "must be >= 0" });
        }
        if self.alpha_mag < 0.0 {
            return Err(Error::InvalidParameter { name: "alpha_mag", reason: "must be >= 0" });
        }
        if self.lattice_size == 0 {
            return Err(Error::InvalidParameter { name: "lattice_size", reason: "must be positive" });
        }
        self.theta = num_traits::Euclid::rem_euclid(&self.theta, &TAU);
        Ok(self)
    }

    /// As [`validated`](Self::validated), additionally requiring `kappa > 0`.
    pub fn validated_for_dynamics(self) -> Result<Self> {
        let p = self.validated()?;
        if p.kappa <= 0.0 {
            return Err(Error::InvalidParameter { name: "kappa", reason: "must be > 0 for dynamics" });
        }
        Ok(p)
    }

    /// Dissipative prefactor `κ / (Δ² + κ²)`.
    pub fn dissipation_rate(&self) -> f64 {
        let denom = self.delta * self.delta + self.kappa * self.kappa;
        if denom == 0.0 {
            0.0
        } else {
            self.kappa / denom
        }
    }

    pub fn sites(&self) -> usize {
        self.lattice_size * self.lattice_size
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub m: usize,
    pub n: usize,
}

impl Site {
    pub fn new(m: usize, n: usize) -> Self {
        Site { m, n }
    }
}

pub fn site_index(site: Site, l: usize) -> Result<usize> {
    if site.m >= l || site.n >= l {
        return Err(Error::SiteOutOfBounds { m: site.m as i64, n: site.n as i64, l });
    }
    Ok(site.m * l + site.n)
}

pub fn site_from_index(index: usize, l: usize) -> Result<Site> {
    if index >= l * l {
        return Err(Error::IndexOutOfBounds { index, sites: l * l });
    }
    Ok(Site { m: index / l, n: index % l })
}

/// Flat index of `(m, n)` or `None` when the site lies off the lattice.
#[inline]
pub(crate) fn flat(m: i64, n: i64, l: usize) -> Option<usize> {
    let li = l as i64;
    if (0..li).contains(&m) && (0..li).contains(&n) {
        Some(m as usize * l + n as usize)
    } else {
        None
    }
}

fn in_lattice(i: i64, j: i64, l: usize) -> bool {
    flat(i, j, l).is_some()
}

/// `v₁(i j i' j') = λ δ_{i,i'+1} δ_{j,j'} + Ω e^{i2π iΦ} δ_{i,i'} δ_{j,j'+1}`.
///
/// Zero whenever either site lies outside the open lattice.
pub fn vertex_v1(p: &ModelParams, i: i64, j: i64, ip: i64, jp: i64) -> C64 {
    let l = p.lattice_size;
    if !in_lattice(i, j, l) || !in_lattice(ip, jp, l) {
        return C64::new(0.0, 0.0);
    }
    let mut v = C64::new(0.0, 0.0);
    if i == ip + 1 && j == jp {
        v += p.lambda;
    }
    if i == ip && j == jp + 1 {
        v += p.flux.column_factor(i) * p.omega;
    }
    v
}

/// `v₂(i j i' j') = λ δ_{i+1,i'} δ_{j,j'} + Ω e^{-i2π iΦ} δ_{i,i'} δ_{j+1,j'}`.
pub fn vertex_v2(p: &ModelParams, i: i64, j: i64, ip: i64, jp: i64) -> C64 {
    let l = p.lattice_size;
    if !in_lattice(i, j, l) || !in_lattice(ip, jp, l) {
        return C64::new(0.0, 0.0);
    }
    let mut v = C64::new(0.0, 0.0);
    if i + 1 == ip && j == jp {
        v += p.lambda;
    }
    if i == ip && j + 1 == jp {
        v += p.flux.column_factor(i).conj() * p.omega;
    }
    v
}
