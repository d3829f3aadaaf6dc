//! Run configuration: a TOML file, optionally patched by `section.key=value`
//! overrides, resolved into a fully populated [`RunConfig`].
//!
//! ```toml
//! mode = "evolve"          # optional; must agree with the subcommand
//! seed = 0                 # reserved, the pipeline is deterministic
//! output = "traj.csv"      # optional; --out wins
//!
//! [params]
//! lambda = 0.5
//! omega = 0.5
//! delta = 0.5
//! kappa = 1.0
//! flux = "2/5"             # "p/q", or a decimal with denominator <= 1000
//! theta = 0.0
//! alpha_mag = 1.0
//! lattice_size = 4
//!
//! [grids]                  # butterfly and edges
//! q_max = 30
//! n_kx = 64
//! n_nu = 64
//! min_gap_width = 0.05
//!
//! [edges]
//! l_open = 50
//! n_ky = 200
//! edge_fraction = 0.2
//! edge_threshold = 0.5
//! overlap_min = 0.7
//! select = "left"          # or "right"
//!
//! [dynamics]
//! h = 0.01
//! t_max = 100.0
//! sample_every = 10
//! stepper = "rk4"          # or "euler"
//! trace_drift_bound = 1e-3
//! fluctuations = true
//!
//! [initial]
//! block = 2                # b x b corner block; or occupied = [[0, 0], ...]
//! boost = [1.5707963267948966, 1.5707963267948966]
//! packet_width = 0.6
//! alpha0 = [0.0, 0.0]      # [re, im]
//! ```
//!
//! `params.flux` is required for `edges` and `evolve`, `grids.q_max` for
//! `butterfly`; every other key has the default shown above, and each default
//! that gets used is logged.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use hallcav_core::dynamics::{EvolveOptions, InitialStateSpec, RhsOptions, Stepper};
use hallcav_core::spectrum::{EdgeOptions, EdgeSelect};
use hallcav_core::{Flux, ModelParams, Site, C64};
use serde::{Deserialize, Serialize};
use toml::Spanned;

/// Largest denominator accepted when a flux is given as a decimal.
pub const MAX_DECIMAL_DENOMINATOR: i64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Butterfly,
    Edges,
    Evolve,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Butterfly => "butterfly",
            Mode::Edges => "edges",
            Mode::Evolve => "evolve",
        })
    }
}

/// Where a resolved value came from, for error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Override(String),
    Default,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Override(arg) => write!(f, "override `{arg}`"),
            Origin::Default => f.write_str("default"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{origin}: `{key}` {message}")]
    Invalid { key: String, origin: Origin, message: String },

    #[error("missing required key `{key}` for mode {mode}")]
    Missing { key: &'static str, mode: Mode },

    #[error("malformed config: {0}")]
    Syntax(String),

    #[error("override `{0}` is not of the form section.key=value")]
    BadOverride(String),

    #[error("{origin}: config declares mode {found} but {requested} was requested")]
    ModeMismatch { found: String, requested: Mode, origin: Origin },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamsConfig {
    pub lambda: f64,
    pub omega: f64,
    pub delta: f64,
    pub kappa: f64,
    /// Reduced `"p/q"`.
    pub flux: String,
    pub theta: f64,
    pub alpha_mag: f64,
    pub lattice_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridConfig {
    pub q_max: u64,
    pub n_kx: usize,
    pub n_nu: usize,
    pub min_gap_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeConfig {
    pub l_open: usize,
    pub n_ky: usize,
    pub edge_fraction: f64,
    pub edge_threshold: f64,
    pub overlap_min: f64,
    pub select: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicsConfig {
    pub h: f64,
    pub t_max: f64,
    pub sample_every: usize,
    pub stepper: String,
    pub trace_drift_bound: f64,
    pub fluctuations: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialConfig {
    pub occupied: Vec<[usize; 2]>,
    pub boost: [f64; 2],
    pub packet_width: f64,
    pub alpha0: [f64; 2],
}

/// Fully resolved run description; this is what the JSON sidecar records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub seed: u64,
    pub output: Option<String>,
    pub params: ParamsConfig,
    pub grids: GridConfig,
    pub edges: EdgeConfig,
    pub dynamics: DynamicsConfig,
    pub initial: InitialConfig,
    #[serde(skip)]
    flux: Flux,
}

impl RunConfig {
    pub fn flux(&self) -> Flux {
        self.flux
    }

    pub fn model_params(&self) -> ModelParams {
        let p = &self.params;
        ModelParams {
            lambda: p.lambda,
            omega: p.omega,
            delta: p.delta,
            kappa: p.kappa,
            flux: self.flux,
            theta: p.theta,
            alpha_mag: p.alpha_mag,
            lattice_size: p.lattice_size,
        }
    }

    pub fn edge_options(&self) -> EdgeOptions {
        EdgeOptions {
            edge_fraction: self.edges.edge_fraction,
            edge_threshold: self.edges.edge_threshold,
            overlap_min: self.edges.overlap_min,
            keep_vectors: false,
        }
    }

    pub fn edge_select(&self) -> EdgeSelect {
        if self.edges.select == "right" {
            EdgeSelect::Right
        } else {
            EdgeSelect::Left
        }
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        let d = &self.dynamics;
        EvolveOptions {
            h: d.h,
            t_max: d.t_max,
            sample_every: d.sample_every,
            stepper: if d.stepper == "euler" { Stepper::Euler } else { Stepper::Rk4 },
            trace_drift_bound: d.trace_drift_bound,
            rhs: RhsOptions { fluctuations: d.fluctuations },
        }
    }

    pub fn initial_spec(&self) -> InitialStateSpec {
        let i = &self.initial;
        InitialStateSpec {
            occupied: i.occupied.iter().map(|&[m, n]| Site::new(m, n)).collect(),
            boost: (i.boost[0], i.boost[1]),
            packet_width: i.packet_width,
            alpha0: C64::new(i.alpha0[0], i.alpha0[1]),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum FluxInput {
    Text(String),
    Number(f64),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    lambda: Option<Spanned<f64>>,
    omega: Option<Spanned<f64>>,
    delta: Option<Spanned<f64>>,
    kappa: Option<Spanned<f64>>,
    flux: Option<Spanned<FluxInput>>,
    theta: Option<Spanned<f64>>,
    alpha_mag: Option<Spanned<f64>>,
    lattice_size: Option<Spanned<i64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrids {
    q_max: Option<Spanned<i64>>,
    n_kx: Option<Spanned<i64>>,
    n_nu: Option<Spanned<i64>>,
    min_gap_width: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdges {
    l_open: Option<Spanned<i64>>,
    n_ky: Option<Spanned<i64>>,
    edge_fraction: Option<Spanned<f64>>,
    edge_threshold: Option<Spanned<f64>>,
    overlap_min: Option<Spanned<f64>>,
    select: Option<Spanned<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDynamics {
    h: Option<Spanned<f64>>,
    t_max: Option<Spanned<f64>>,
    sample_every: Option<Spanned<i64>>,
    stepper: Option<Spanned<String>>,
    trace_drift_bound: Option<Spanned<f64>>,
    fluctuations: Option<Spanned<bool>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    block: Option<Spanned<i64>>,
    occupied: Option<Spanned<Vec<[i64; 2]>>>,
    boost: Option<Spanned<[f64; 2]>>,
    packet_width: Option<Spanned<f64>>,
    alpha0: Option<Spanned<[f64; 2]>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    mode: Option<Spanned<String>>,
    seed: Option<Spanned<i64>>,
    output: Option<Spanned<String>>,
    #[serde(default)]
    params: RawParams,
    #[serde(default)]
    grids: RawGrids,
    #[serde(default)]
    edges: RawEdges,
    #[serde(default)]
    dynamics: RawDynamics,
    #[serde(default)]
    initial: RawInitial,
}

enum Source {
    File(String),
    Override(String),
}

/// The config file plus overrides; later layers win.
struct Layers {
    layers: Vec<(Raw, Source)>,
    mode: Mode,
}

impl Layers {
    fn origin(source: &Source, offset: usize) -> Origin {
        match source {
            Source::File(text) => Origin::Line(1 + text[..offset.min(text.len())].matches('\n').count()),
            Source::Override(arg) => Origin::Override(arg.clone()),
        }
    }

    fn pick<T: Clone>(&self, f: impl Fn(&Raw) -> Option<&Spanned<T>>) -> Option<(T, Origin)> {
        self.layers.iter().rev().find_map(|(raw, source)| {
            f(raw).map(|s| (s.get_ref().clone(), Self::origin(source, s.span().start)))
        })
    }

    fn or_default<T: Clone + fmt::Debug>(
        &self,
        key: &str,
        default: T,
        f: impl Fn(&Raw) -> Option<&Spanned<T>>,
    ) -> (T, Origin) {
        self.pick(f).unwrap_or_else(|| {
            let level = if self.reads(key) { log::Level::Info } else { log::Level::Debug };
            log::log!(level, "{key} not set, using default {default:?}");
            (default, Origin::Default)
        })
    }

    /// Whether the current mode uses the section `key` belongs to.
    fn reads(&self, key: &str) -> bool {
        let section = key.split_once('.').map_or("", |(s, _)| s);
        matches!(
            (section, self.mode),
            ("" | "params", _)
                | ("grids", Mode::Butterfly | Mode::Edges)
                | ("edges", Mode::Edges)
                | ("dynamics" | "initial", Mode::Evolve)
        )
    }
}

fn invalid(key: &str, origin: &Origin, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.to_string(), origin: origin.clone(), message: message.into() }
}

fn finite(key: &str, (x, o): (f64, Origin)) -> Result<(f64, Origin), ConfigError> {
    if x.is_finite() {
        Ok((x, o))
    } else {
        Err(invalid(key, &o, "must be finite"))
    }
}

fn non_negative(key: &str, v: (f64, Origin)) -> Result<f64, ConfigError> {
    let (x, o) = finite(key, v)?;
    if x < 0.0 {
        return Err(invalid(key, &o, format!("must be >= 0, got {x}")));
    }
    Ok(x)
}

fn positive(key: &str, v: (f64, Origin)) -> Result<f64, ConfigError> {
    let (x, o) = finite(key, v)?;
    if x <= 0.0 {
        return Err(invalid(key, &o, format!("must be > 0, got {x}")));
    }
    Ok(x)
}

fn count(key: &str, (x, o): (i64, Origin), min: i64) -> Result<usize, ConfigError> {
    if x < min {
        return Err(invalid(key, &o, format!("must be >= {min}, got {x}")));
    }
    Ok(x as usize)
}

fn choice(key: &str, (x, o): (String, Origin), allowed: &[&str]) -> Result<String, ConfigError> {
    if allowed.contains(&x.as_str()) {
        Ok(x)
    } else {
        Err(invalid(key, &o, format!("must be one of {allowed:?}, got {x:?}")))
    }
}

/// Parses `"p/q"` or a decimal into a reduced flux; the second value is a
/// warning when the input was not already in lowest terms within `[0, 1)`.
pub fn parse_flux(text: &str) -> Result<(Flux, Option<String>), String> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| format!("{text:?} is not a fraction p/q"))?;
        let q: i64 = q.trim().parse().map_err(|_| format!("{text:?} is not a fraction p/q"))?;
        if q == 0 {
            return Err(format!("{text:?} has a zero denominator"));
        }
        let flux = Flux::new(p, q).map_err(|e| e.to_string())?;
        let exact = flux.numer() as i64 == p && flux.denom() as i64 == q;
        let warning = (!exact).then(|| format!("flux {p}/{q} reduced to {flux}"));
        return Ok((flux, warning));
    }
    let x: f64 = text.parse().map_err(|_| format!("{text:?} is neither p/q nor a decimal"))?;
    decimal_flux(x)
}

fn decimal_flux(x: f64) -> Result<(Flux, Option<String>), String> {
    if !x.is_finite() {
        return Err(format!("{x} is not finite"));
    }
    for q in 1..=MAX_DECIMAL_DENOMINATOR {
        let p = (x * q as f64).round();
        if (p / q as f64 - x).abs() <= 1e-9 * x.abs().max(1.0) {
            let flux = Flux::new(p as i64, q).map_err(|e| e.to_string())?;
            return Ok((flux, Some(format!("decimal flux {x} read as {flux}"))));
        }
    }
    Err(format!("{x} is not a fraction with denominator <= {MAX_DECIMAL_DENOMINATOR}"))
}

fn parse_layer(text: &str, what: &str) -> Result<Raw, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError::Syntax(format!("{what}: {e}")))
}

/// Turns `section.key=value` into a one-key TOML document. Values that are
/// not valid TOML are taken as bare strings, so `params.flux=2/5` works.
fn override_layer(arg: &str) -> Result<Raw, ConfigError> {
    let (path, value) = arg.split_once('=').ok_or_else(|| ConfigError::BadOverride(arg.to_string()))?;
    let (path, value) = (path.trim(), value.trim());
    if path.is_empty() || path.split('.').count() > 2 || path.split('.').any(str::is_empty) {
        return Err(ConfigError::BadOverride(arg.to_string()));
    }
    let doc = |v: &str| match path.split_once('.') {
        Some((section, key)) => format!("[{section}]\n{key} = {v}\n"),
        None => format!("{path} = {v}\n"),
    };
    let what = format!("override `{arg}`");
    if toml::from_str::<toml::Table>(&doc(value)).is_ok() {
        parse_layer(&doc(value), &what)
    } else {
        let quoted = toml::Value::String(value.to_string()).to_string();
        parse_layer(&doc(&quoted), &what)
    }
}

/// Parses, patches and validates a config for `mode`.
pub fn parse_config(text: &str, mode: Mode, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let mut layers = vec![(parse_layer(text, "config")?, Source::File(text.to_string()))];
    for arg in overrides {
        layers.push((override_layer(arg)?, Source::Override(arg.clone())));
    }
    resolve(&Layers { layers, mode }, mode)
}

fn resolve(l: &Layers, mode: Mode) -> Result<RunConfig, ConfigError> {
    if let Some((found, origin)) = l.pick(|r| r.mode.as_ref()) {
        if found != mode.to_string() {
            return Err(ConfigError::ModeMismatch { found, requested: mode, origin });
        }
    }
    let seed = count("seed", l.or_default("seed", 0, |r| r.seed.as_ref()), 0)? as u64;
    let output = l.pick(|r| r.output.as_ref()).map(|(s, _)| s);

    let flux = match l.pick(|r| r.params.flux.as_ref()) {
        Some((input, origin)) => {
            let parsed = match input {
                FluxInput::Text(t) => parse_flux(&t),
                FluxInput::Number(x) => decimal_flux(x),
            };
            let (flux, warning) = parsed.map_err(|m| invalid("params.flux", &origin, m))?;
            if let Some(w) = warning {
                log::warn!("{origin}: {w}");
            }
            flux
        }
        None if mode == Mode::Butterfly => Flux::ZERO,
        None => return Err(ConfigError::Missing { key: "params.flux", mode }),
    };

    let kappa_key = "params.kappa";
    let kappa_v = l.or_default(kappa_key, 1.0, |r| r.params.kappa.as_ref());
    let kappa = if mode == Mode::Evolve { positive(kappa_key, kappa_v)? } else { non_negative(kappa_key, kappa_v)? };
    let params = ParamsConfig {
        lambda: non_negative("params.lambda", l.or_default("params.lambda", 0.5, |r| r.params.lambda.as_ref()))?,
        omega: non_negative("params.omega", l.or_default("params.omega", 0.5, |r| r.params.omega.as_ref()))?,
        delta: finite("params.delta", l.or_default("params.delta", 0.5, |r| r.params.delta.as_ref()))?.0,
        kappa,
        flux: flux.to_string(),
        theta: finite("params.theta", l.or_default("params.theta", 0.0, |r| r.params.theta.as_ref()))?.0,
        alpha_mag: non_negative(
            "params.alpha_mag",
            l.or_default("params.alpha_mag", 1.0, |r| r.params.alpha_mag.as_ref()),
        )?,
        lattice_size: count(
            "params.lattice_size",
            l.or_default("params.lattice_size", 4, |r| r.params.lattice_size.as_ref()),
            1,
        )?,
    };

    let q_max = match l.pick(|r| r.grids.q_max.as_ref()) {
        Some(v) => count("grids.q_max", v, 1)? as u64,
        None if mode == Mode::Butterfly => return Err(ConfigError::Missing { key: "grids.q_max", mode }),
        None => 30,
    };
    let grids = GridConfig {
        q_max,
        n_kx: count("grids.n_kx", l.or_default("grids.n_kx", 64, |r| r.grids.n_kx.as_ref()), 1)?,
        n_nu: count("grids.n_nu", l.or_default("grids.n_nu", 64, |r| r.grids.n_nu.as_ref()), 1)?,
        min_gap_width: non_negative(
            "grids.min_gap_width",
            l.or_default("grids.min_gap_width", 0.05, |r| r.grids.min_gap_width.as_ref()),
        )?,
    };

    let fraction = |key: &str, v: (f64, Origin)| -> Result<f64, ConfigError> {
        let (x, o) = finite(key, v)?;
        if !(x > 0.0 && x <= 1.0) {
            return Err(invalid(key, &o, format!("must lie in (0, 1], got {x}")));
        }
        Ok(x)
    };
    let edges = EdgeConfig {
        l_open: count("edges.l_open", l.or_default("edges.l_open", 50, |r| r.edges.l_open.as_ref()), 2)?,
        n_ky: count("edges.n_ky", l.or_default("edges.n_ky", 200, |r| r.edges.n_ky.as_ref()), 1)?,
        edge_fraction: fraction(
            "edges.edge_fraction",
            l.or_default("edges.edge_fraction", 0.2, |r| r.edges.edge_fraction.as_ref()),
        )?,
        edge_threshold: fraction(
            "edges.edge_threshold",
            l.or_default("edges.edge_threshold", 0.5, |r| r.edges.edge_threshold.as_ref()),
        )?,
        overlap_min: fraction(
            "edges.overlap_min",
            l.or_default("edges.overlap_min", 0.7, |r| r.edges.overlap_min.as_ref()),
        )?,
        select: choice(
            "edges.select",
            l.or_default("edges.select", "left".to_string(), |r| r.edges.select.as_ref()),
            &["left", "right"],
        )?,
    };

    let dynamics = DynamicsConfig {
        h: positive("dynamics.h", l.or_default("dynamics.h", 0.01, |r| r.dynamics.h.as_ref()))?,
        t_max: positive("dynamics.t_max", l.or_default("dynamics.t_max", 100.0, |r| r.dynamics.t_max.as_ref()))?,
        sample_every: count(
            "dynamics.sample_every",
            l.or_default("dynamics.sample_every", 10, |r| r.dynamics.sample_every.as_ref()),
            1,
        )?,
        stepper: choice(
            "dynamics.stepper",
            l.or_default("dynamics.stepper", "rk4".to_string(), |r| r.dynamics.stepper.as_ref()),
            &["rk4", "euler"],
        )?,
        trace_drift_bound: positive(
            "dynamics.trace_drift_bound",
            l.or_default("dynamics.trace_drift_bound", 1e-3, |r| r.dynamics.trace_drift_bound.as_ref()),
        )?,
        fluctuations: l.or_default("dynamics.fluctuations", true, |r| r.dynamics.fluctuations.as_ref()).0,
    };

    let initial = resolve_initial(l, params.lattice_size)?;

    Ok(RunConfig { mode, seed, output, params, grids, edges, dynamics, initial, flux })
}

fn resolve_initial(l: &Layers, size: usize) -> Result<InitialConfig, ConfigError> {
    let block = l.pick(|r| r.initial.block.as_ref());
    let listed = l.pick(|r| r.initial.occupied.as_ref());
    let occupied: Vec<[usize; 2]> = match (block, listed) {
        (Some(_), Some((_, o))) => {
            return Err(invalid("initial.occupied", &o, "conflicts with initial.block; give one of them"));
        }
        (None, Some((sites, o))) => {
            let mut out = Vec::with_capacity(sites.len());
            for [m, n] in sites {
                if m < 0 || n < 0 || m as usize >= size || n as usize >= size {
                    return Err(invalid(
                        "initial.occupied",
                        &o,
                        format!("site [{m}, {n}] lies outside the {size}x{size} lattice"),
                    ));
                }
                out.push([m as usize, n as usize]);
            }
            out
        }
        (b, None) => {
            let (b, o) = b.unwrap_or_else(|| {
                let level = if l.reads("initial.block") { log::Level::Info } else { log::Level::Debug };
                log::log!(level, "initial.block not set, using default 2");
                (2, Origin::Default)
            });
            if b < 0 || b as usize > size {
                return Err(invalid("initial.block", &o, format!("must lie in [0, {size}], got {b}")));
            }
            let b = b as usize;
            (0..b).flat_map(|m| (0..b).map(move |n| [m, n])).collect()
        }
    };
    let (boost, o) = l.or_default("initial.boost", [FRAC_PI_2, FRAC_PI_2], |r| r.initial.boost.as_ref());
    if !boost.iter().all(|x| x.is_finite()) {
        return Err(invalid("initial.boost", &o, "must be finite"));
    }
    let (alpha0, o) = l.or_default("initial.alpha0", [0.0, 0.0], |r| r.initial.alpha0.as_ref());
    if !alpha0.iter().all(|x| x.is_finite()) {
        return Err(invalid("initial.alpha0", &o, "must be finite"));
    }
    Ok(InitialConfig {
        occupied,
        boost,
        packet_width: non_negative(
            "initial.packet_width",
            l.or_default("initial.packet_width", 0.6, |r| r.initial.packet_width.as_ref()),
        )?,
        alpha0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_are_reduced_with_a_warning() {
        let (f, w) = parse_flux("2/5").unwrap();
        assert_eq!((f.numer(), f.denom()), (2, 5));
        assert!(w.is_none());
        let (f, w) = parse_flux("4/10").unwrap();
        assert_eq!((f.numer(), f.denom()), (2, 5));
        assert!(w.unwrap().contains("reduced to 2/5"));
    }

    #[test]
    fn decimals_become_small_fractions() {
        let (f, _) = parse_flux("0.4").unwrap();
        assert_eq!(f, Flux::new(2, 5).unwrap());
        let (f, _) = parse_flux("0.001").unwrap();
        assert_eq!(f, Flux::new(1, 1000).unwrap());
        assert!(parse_flux("0.1234567").is_err());
    }

    #[test]
    fn malformed_flux_strings_are_rejected() {
        for bad in ["2/0", "two/five", "1/2/3", "", "nan"] {
            assert!(parse_flux(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn line_numbers_point_at_the_value() {
        let text = "[params]\nflux = \"1/3\"\n\nkappa = -1.0\n";
        let err = parse_config(text, Mode::Edges, &[]).unwrap_err();
        assert_eq!(err.to_string(), "line 4: `params.kappa` must be >= 0, got -1");
    }

    #[test]
    fn overrides_take_bare_strings_and_win() {
        let text = "[params]\nflux = \"1/3\"\n";
        let cfg = parse_config(text, Mode::Edges, &["params.flux=2/5".into(), "params.theta=0.3".into()]).unwrap();
        assert_eq!(cfg.params.flux, "2/5");
        assert_eq!(cfg.params.theta, 0.3);
        let err = parse_config(text, Mode::Edges, &["params.kappa=-2".into()]).unwrap_err();
        assert!(err.to_string().starts_with("override `params.kappa=-2`"), "{err}");
        assert!(matches!(override_layer("nokey"), Err(ConfigError::BadOverride(_))));
    }
}
