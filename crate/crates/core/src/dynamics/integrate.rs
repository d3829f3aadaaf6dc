use nalgebra::DMatrix;
// float methods are inherent whenever std is linked anywhere in the build
#[allow(unused_imports)]
use num_traits::Float;

use super::rhs::{cavity_rhs_with, rhs_parts_with, Hopping, RhsOptions};
use super::state::SystemState;
use crate::error::{Error, Result};
use crate::lattice::{ModelParams, C64};
use crate::observables::{record_with, TrajectoryRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stepper {
    Euler,
    #[default]
    Rk4,
}

/// Precomputed hop operator plus the options shared by every stage.
struct Field<'a> {
    hop: Hopping,
    p: &'a ModelParams,
    opts: RhsOptions,
}

impl Field<'_> {
    fn eval(&self, alpha: C64, rho: &DMatrix<C64>, time: f64) -> Result<(C64, DMatrix<C64>)> {
        let da = cavity_rhs_with(&self.hop, self.p, alpha, rho);
        let drho = rhs_parts_with(&self.hop, self.p, alpha, rho, self.opts).total();
        let finite = da.re.is_finite() && da.im.is_finite() && drho.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return Err(Error::NonFinite { time });
        }
        Ok((da, drho))
    }

    fn step(&self, s: &SystemState, h: f64, stepper: Stepper) -> Result<SystemState> {
        let (a, rho, t) = (s.alpha, &s.rho, s.time);
        let (alpha, rho) = match stepper {
            Stepper::Euler => {
                let (da, dr) = self.eval(a, rho, t)?;
                (a + da * h, rho + dr * C64::new(h, 0.0))
            }
            Stepper::Rk4 => {
                let hc = |x: f64| C64::new(x, 0.0);
                let (k1a, k1r) = self.eval(a, rho, t)?;
                let (k2a, k2r) = self.eval(a + k1a * (h / 2.0), &(rho + &k1r * hc(h / 2.0)), t + h / 2.0)?;
                let (k3a, k3r) = self.eval(a + k2a * (h / 2.0), &(rho + &k2r * hc(h / 2.0)), t + h / 2.0)?;
                let (k4a, k4r) = self.eval(a + k3a * h, &(rho + &k3r * hc(h)), t + h)?;
                let alpha = a + (k1a + k2a * 2.0 + k3a * 2.0 + k4a) * (h / 6.0);
                let incr = k1r + k2r * hc(2.0) + k3r * hc(2.0) + k4r;
                (alpha, rho + incr * hc(h / 6.0))
            }
        };
        let next = SystemState::new(s.lattice_size(), alpha, rho, t + h)?;
        if !next.is_finite() {
            return Err(Error::NonFinite { time: t + h });
        }
        Ok(next)
    }
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter { name: "h", reason: "must be finite and > 0" });
    }
    Ok(())
}

fn check_lattice(s: &SystemState, p: &ModelParams) -> Result<()> {
    if s.lattice_size() != p.lattice_size {
        return Err(Error::DimensionMismatch { expected: p.lattice_size, found: s.lattice_size() });
    }
    Ok(())
}

/// One explicit Euler step of `(α, ρ)`, both derivatives taken at the old state.
pub fn step_euler(s: &SystemState, p: &ModelParams, h: f64) -> Result<SystemState> {
    step(s, p, h, Stepper::Euler, RhsOptions::default())
}

/// One classical fourth-order Runge–Kutta step of `(α, ρ)`.
pub fn step_rk4(s: &SystemState, p: &ModelParams, h: f64) -> Result<SystemState> {
    step(s, p, h, Stepper::Rk4, RhsOptions::default())
}

pub fn step(s: &SystemState, p: &ModelParams, h: f64, stepper: Stepper, opts: RhsOptions) -> Result<SystemState> {
    check_step(h)?;
    check_lattice(s, p)?;
    Field { hop: Hopping::new(p), p, opts }.step(s, h, stepper)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub h: f64,
    pub t_max: f64,
    /// Emit a record every this many steps (the initial state is always emitted).
    pub sample_every: usize,
    pub stepper: Stepper,
    /// Abort once `|trace(ρ) − trace(ρ₀)|` exceeds this.
    pub trace_drift_bound: f64,
    pub rhs: RhsOptions,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            h: 0.01,
            t_max: 100.0,
            sample_every: 100,
            stepper: Stepper::Rk4,
            trace_drift_bound: 1e-3,
            rhs: RhsOptions::default(),
        }
    }
}

impl EvolveOptions {
    pub fn steps(&self) -> usize {
        (self.t_max / self.h).round() as usize
    }
}

/// Integrates from `s0` to `t_max`, handing every sampled record to
/// `observer`. Returns the final state. Records emitted before an error are
/// left with the observer.
pub fn evolve<F>(s0: &SystemState, p: &ModelParams, opts: &EvolveOptions, mut observer: F) -> Result<SystemState>
where
    F: FnMut(&TrajectoryRecord, &SystemState),
{
    check_step(opts.h)?;
    check_lattice(s0, p)?;
    if !(opts.t_max > 0.0 && opts.t_max.is_finite()) {
        return Err(Error::InvalidParameter { name: "t_max", reason: "must be finite and > 0" });
    }
    if opts.sample_every == 0 {
        return Err(Error::InvalidParameter { name: "sample_every", reason: "must be positive" });
    }
    let field = Field { hop: Hopping::new(p), p, opts: opts.rhs };
    let n0 = s0.trace();
    let steps = opts.steps();

    let mut s = s0.clone();
    observer(&record_with(&field.hop, &s, p, opts.rhs)?, &s);
    for k in 1..=steps {
        s = field.step(&s, opts.h, opts.stepper)?;
        // keep the clock on the grid instead of accumulating h
        s.time = s0.time + k as f64 * opts.h;
        let drift = (s.trace() - n0).abs();
        if drift.is_nan() || drift > opts.trace_drift_bound {
            return Err(Error::TraceDrift { time: s.time, drift, bound: opts.trace_drift_bound });
        }
        if k % opts.sample_every == 0 || k == steps {
            observer(&record_with(&field.hop, &s, p, opts.rhs)?, &s);
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_initial_state, InitialStateSpec};
    use crate::lattice::Flux;
    use crate::linalg::hermiticity_residual;
    use alloc::vec::Vec;

    fn reference(flux: Flux) -> ModelParams {
        ModelParams { flux, lattice_size: 4, ..Default::default() }
    }

    fn decoupled(alpha: C64) -> (SystemState, ModelParams) {
        let p = ModelParams { lambda: 0.0, omega: 0.0, delta: 0.0, kappa: 1.0, lattice_size: 3, ..Default::default() };
        (SystemState::vacuum(3, alpha), p)
    }

    #[test]
    fn euler_step_on_pure_decay() {
        let (s, p) = decoupled(C64::new(1.0, 0.0));
        let n = step_euler(&s, &p, 0.1).unwrap();
        assert!((n.alpha - C64::new(0.9, 0.0)).norm() < 1e-15);
        assert_eq!(n.time, 0.1);
    }

    #[test]
    fn zero_field_state_is_unchanged() {
        let (mut s, p) = decoupled(C64::new(0.0, 0.0));
        s.rho = DMatrix::identity(9, 9) * C64::new(0.5, 0.0);
        for next in [step_euler(&s, &p, 0.1).unwrap(), step_rk4(&s, &p, 0.1).unwrap()] {
            assert_eq!(next.rho, s.rho);
            assert_eq!(next.alpha, s.alpha);
            assert_eq!(next.time, 0.1);
        }
    }

    #[test]
    fn rk4_step_matches_closed_form() {
        let p = ModelParams { lambda: 0.0, omega: 0.0, delta: 0.5, kappa: 1.0, lattice_size: 2, ..Default::default() };
        let s = SystemState::vacuum(2, C64::new(1.0, 0.0));
        let n = step_rk4(&s, &p, 0.1).unwrap();
        let z = C64::new(0.0, -1.0) * C64::new(0.5, -1.0) * 0.1;
        // on a linear equation RK4 is exactly the quartic Taylor polynomial
        let taylor = C64::new(1.0, 0.0) + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
        assert!((n.alpha - taylor).norm() < 1e-15);
        // local error |z|⁵/5! ≈ 1.5e-7
        assert!((n.alpha - z.exp()).norm() < 2e-7);
    }

    #[test]
    fn observed_orders_on_decay() {
        let p = ModelParams { lambda: 0.0, omega: 0.0, delta: 0.5, kappa: 1.0, lattice_size: 2, ..Default::default() };
        let err = |stepper, h: f64| {
            let mut s = SystemState::vacuum(2, C64::new(1.0, 0.0));
            let n = (1.0 / h).round() as usize;
            for _ in 0..n {
                s = step(&s, &p, h, stepper, RhsOptions::default()).unwrap();
            }
            (s.alpha - (C64::new(0.0, -1.0) * C64::new(0.5, -1.0)).exp()).norm()
        };
        let order = |stepper| (err(stepper, 0.02) / err(stepper, 0.01)).log2();
        assert!(order(Stepper::Euler) > 0.9);
        assert!(order(Stepper::Rk4) > 3.8);
    }

    #[test]
    fn one_euler_step_keeps_hermiticity() {
        let s = build_initial_state(&InitialStateSpec::default(), 4).unwrap();
        let n = step_euler(&s, &reference(Flux::new(2, 5).unwrap()), 0.1).unwrap();
        assert!(hermiticity_residual(&n.rho) < 1e-12);
    }

    #[test]
    fn evolve_samples_and_tracks_decay() {
        let (s, p) = decoupled(C64::new(1.0, 0.0));
        let opts = EvolveOptions { h: 0.01, t_max: 2.0, sample_every: 50, ..Default::default() };
        let mut seen = Vec::new();
        evolve(&s, &p, &opts, |r, _| seen.push(*r)).unwrap();
        assert_eq!(seen.len(), 5);
        for r in &seen {
            assert!((r.population - (-2.0 * r.time).exp()).abs() < 1e-9);
        }
        assert!((seen[4].time - 2.0).abs() < 1e-12);
    }

    #[test]
    fn evolve_aborts_on_trace_drift() {
        let s = build_initial_state(&InitialStateSpec::default(), 4).unwrap();
        let opts = EvolveOptions { h: 0.01, t_max: 1.0, trace_drift_bound: -1.0, ..Default::default() };
        let mut count = 0;
        let err = evolve(&s, &reference(Flux::ZERO), &opts, |_, _| count += 1).unwrap_err();
        assert!(matches!(err, Error::TraceDrift { .. }));
        assert_eq!(count, 1);
    }

    #[test]
    fn invalid_step_is_rejected() {
        let (s, p) = decoupled(C64::new(1.0, 0.0));
        assert!(step_euler(&s, &p, 0.0).is_err());
        assert!(step_rk4(&s, &p, f64::NAN).is_err());
    }

    #[test]
    fn overflow_reports_nonfinite_with_time() {
        let p = ModelParams { lambda: 1e300, omega: 1e300, lattice_size: 2, ..Default::default() };
        let mut s = SystemState::vacuum(2, C64::new(1e300, 0.0));
        s.rho = DMatrix::from_element(4, 4, C64::new(1e300, 0.0));
        s.time = 3.0;
        assert_eq!(step_euler(&s, &p, 0.1).unwrap_err(), Error::NonFinite { time: 3.0 });
    }
}
