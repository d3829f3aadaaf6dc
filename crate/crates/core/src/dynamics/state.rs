use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
// float methods are inherent whenever std is linked anywhere in the build
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::lattice::{flat, site_index, Site, C64};

/// Cavity amplitude plus the single-particle density matrix.
///
/// `rho[(a, b)] = ⟨c†_a c_b⟩` with flat indices `a = m L + n`; the rank-4
/// view `ρ_{i j i' j'}` is available through [`SystemState::rho_at`].
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub alpha: C64,
    pub rho: DMatrix<C64>,
    /// Time in units of `1/κ`.
    pub time: f64,
    l: usize,
}

impl SystemState {
    pub fn new(l: usize, alpha: C64, rho: DMatrix<C64>, time: f64) -> Result<Self> {
        let n = l * l;
        if rho.nrows() != n || rho.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: rho.nrows().max(rho.ncols()) });
        }
        Ok(SystemState { alpha, rho, time, l })
    }

    /// Empty lattice with the given cavity amplitude.
    pub fn vacuum(l: usize, alpha: C64) -> Self {
        SystemState { alpha, rho: DMatrix::zeros(l * l, l * l), time: 0.0, l }
    }

    pub fn lattice_size(&self) -> usize {
        self.l
    }

    /// `ρ_{i j i' j'}`; zero if either site lies off the lattice.
    pub fn rho_at(&self, i: i64, j: i64, ip: i64, jp: i64) -> C64 {
        match (flat(i, j, self.l), flat(ip, jp, self.l)) {
            (Some(a), Some(b)) => self.rho[(a, b)],
            _ => C64::new(0.0, 0.0),
        }
    }

    /// Particle number `Σ_{ij} Re ρ_{ijij}`.
    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.alpha.re.is_finite()
            && self.alpha.im.is_finite()
            && self.rho.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Boosted Gaussian packets that make up the initial Slater determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialStateSpec {
    /// Packet centres, one per atom.
    pub occupied: Vec<Site>,
    /// Plane-wave momentum `(q_x, q_y)` multiplied onto every packet.
    pub boost: (f64, f64),
    /// Gaussian width in lattice sites; `0` gives single-site orbitals.
    pub packet_width: f64,
    pub alpha0: C64,
}

impl Default for InitialStateSpec {
    fn default() -> Self {
        InitialStateSpec::corner_block(2)
    }
}

impl InitialStateSpec {
    /// `b × b` block in the lower-left corner, boost `(π/2, π/2)`, width 0.6, empty cavity.
    pub fn corner_block(b: usize) -> Self {
        let occupied = (0..b).flat_map(|m| (0..b).map(move |n| Site::new(m, n))).collect();
        InitialStateSpec {
            occupied,
            boost: (core::f64::consts::FRAC_PI_2, core::f64::consts::FRAC_PI_2),
            packet_width: 0.6,
            alpha0: C64::new(0.0, 0.0),
        }
    }

    pub fn filling(&self, l: usize) -> f64 {
        self.occupied.len() as f64 / (l * l) as f64
    }
}

/// `ρ = Σ_k |φ_k⟩⟨φ_k|` over Gram–Schmidt-orthonormalised boosted packets.
pub fn build_initial_state(spec: &InitialStateSpec, l: usize) -> Result<SystemState> {
    if l == 0 {
        return Err(Error::InvalidParameter { name: "lattice_size", reason: "must be positive" });
    }
    if !(spec.packet_width >= 0.0 && spec.packet_width.is_finite()) {
        return Err(Error::InvalidParameter { name: "packet_width", reason: "must be finite and >= 0" });
    }
    if !(spec.boost.0.is_finite() && spec.boost.1.is_finite()) {
        return Err(Error::InvalidParameter { name: "boost", reason: "must be finite" });
    }
    let n = l * l;
    if spec.occupied.len() > n {
        return Err(Error::InvalidParameter { name: "occupied", reason: "more atoms than sites" });
    }
    for s in &spec.occupied {
        site_index(*s, l)?;
    }

    let (qx, qy) = spec.boost;
    let w2 = spec.packet_width * spec.packet_width;
    let mut orbitals: Vec<DVector<C64>> = Vec::with_capacity(spec.occupied.len());
    for (k, c) in spec.occupied.iter().enumerate() {
        let mut v = DVector::from_fn(n, |a, _| {
            let (m, nn) = ((a / l) as f64, (a % l) as f64);
            let d2 = (m - c.m as f64).powi(2) + (nn - c.n as f64).powi(2);
            let envelope = if w2 == 0.0 {
                if d2 == 0.0 { 1.0 } else { 0.0 }
            } else {
                (-d2 / (2.0 * w2)).exp()
            };
            let phase = qx * m + qy * nn;
            C64::new(phase.cos(), phase.sin()) * envelope
        });
        let raw = v.norm();
        // two passes keep idempotency at round-off level
        for _ in 0..2 {
            for u in &orbitals {
                let overlap = u.dotc(&v);
                v -= u * overlap;
            }
        }
        let norm = v.norm();
        if norm.is_nan() || norm <= 1e-8 * raw {
            return Err(Error::LinearlyDependentPackets { index: k });
        }
        v /= C64::new(norm, 0.0);
        orbitals.push(v);
    }

    let mut rho = DMatrix::zeros(n, n);
    for u in &orbitals {
        rho += u * u.adjoint();
    }
    Ok(SystemState { alpha: spec.alpha0, rho, time: 0.0, l })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::linalg::hermiticity_residual;

    #[test]
    fn default_state_is_a_pure_slater_determinant() {
        let s = build_initial_state(&InitialStateSpec::default(), 4).unwrap();
        assert!((s.trace() - 4.0).abs() < 1e-12);
        assert!((&s.rho * &s.rho - &s.rho).camax() < 1e-12);
        assert_eq!(hermiticity_residual(&s.rho), 0.0);
        assert_eq!(s.alpha, C64::new(0.0, 0.0));
        assert_eq!(InitialStateSpec::default().filling(4), 0.25);
    }

    #[test]
    fn default_boost_gives_positive_x_coherence() {
        let s = build_initial_state(&InitialStateSpec::default(), 4).unwrap();
        let mut total = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                total += s.rho_at(i + 1, j, i, j).im;
            }
        }
        assert!(total > 0.0, "{total}");
        assert!(s.rho_at(1, 0, 0, 0).norm() > 1e-3);
    }

    #[test]
    fn zero_width_unboosted_packets_are_site_occupations() {
        let spec = InitialStateSpec { boost: (0.0, 0.0), packet_width: 0.0, ..Default::default() };
        let s = build_initial_state(&spec, 4).unwrap();
        for a in 0..16 {
            for b in 0..16 {
                let occupied = a == b && [0, 1, 4, 5].contains(&a);
                let expect = if occupied { 1.0 } else { 0.0 };
                assert_eq!(s.rho[(a, b)], C64::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn duplicate_centres_are_rejected() {
        let spec = InitialStateSpec {
            occupied: vec![Site::new(1, 1), Site::new(1, 1)],
            ..Default::default()
        };
        assert_eq!(build_initial_state(&spec, 4), Err(Error::LinearlyDependentPackets { index: 1 }));
        let spec = InitialStateSpec { occupied: vec![Site::new(4, 0)], ..Default::default() };
        assert!(matches!(build_initial_state(&spec, 4), Err(Error::SiteOutOfBounds { .. })));
    }

    #[test]
    fn rank4_view_is_zero_off_lattice() {
        let s = build_initial_state(&InitialStateSpec::default(), 4).unwrap();
        assert_eq!(s.rho_at(-1, 0, 0, 0), C64::new(0.0, 0.0));
        assert_eq!(s.rho_at(0, 0, 0, 4), C64::new(0.0, 0.0));
        assert_eq!(s.rho_at(0, 1, 1, 0), s.rho[(1, 4)]);
        assert!(SystemState::new(3, C64::new(0.0, 0.0), DMatrix::zeros(16, 16), 0.0).is_err());
    }
}
