//! The three workflows. Each writes its CSV files and a JSON sidecar; files
//! written before a failure are kept and the sidecar records the status.

use std::io;
use std::path::{Path, PathBuf};

use hallcav_core::dynamics::{build_initial_state, evolve};
use hallcav_core::spectrum::{bulk_spectrum, edge_spectrum, find_gaps, gap_invariant, EdgeWarning};
use hallcav_core::{Error as CoreError, Flux, ModelParams};
use rayon::prelude::*;

use crate::config::{ConfigError, Mode, RunConfig};
use crate::output::{
    fmt_f64, gaps_path, sidecar_path, write_sidecar, CsvWriter, ABORT_MARKER, BUTTERFLY_HEADER,
    EDGE_BANDS_HEADER, EDGE_GAPS_HEADER, TRAJECTORY_HEADER,
};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("invalid parameters: {0}")]
    Parameters(CoreError),

    #[error("numerical abort: {0}")]
    Numerical(CoreError),

    #[error("{count} gap(s) with ambiguous edge localization; gamma left blank")]
    AmbiguousTopology { count: usize },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Io { .. } => 1,
            RunError::Config(_) | RunError::Parameters(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::AmbiguousTopology { .. } => 4,
        }
    }
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NonFinite { .. } | CoreError::TraceDrift { .. } => RunError::Numerical(e),
            _ => RunError::Parameters(e),
        }
    }
}

/// Files produced by a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub outputs: Vec<PathBuf>,
    pub rows: usize,
}

fn io_at(path: &Path) -> impl FnOnce(io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.to_path_buf(), source }
}

/// Runs `cfg.mode`, writing to `out` and the sidecar next to it.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<RunSummary, RunError> {
    let result = match cfg.mode {
        Mode::Butterfly => run_butterfly(cfg, out),
        Mode::Edges => run_edges(cfg, out),
        Mode::Evolve => run_evolve(cfg, out),
    };
    let (outputs, status) = match (&result, cfg.mode) {
        (Ok(s), _) => (s.outputs.clone(), "ok".to_string()),
        (Err(RunError::Io { .. }), _) => return result,
        (Err(e), Mode::Edges) => (vec![out.to_path_buf(), gaps_path(out)], e.to_string()),
        (Err(e), _) => (vec![out.to_path_buf()], e.to_string()),
    };
    let side = sidecar_path(out);
    write_sidecar(&side, cfg, &outputs, &status).map_err(io_at(&side))?;
    result
}

/// Bulk spectrum over every reduced `p/q < 1` with `q <= q_max`, one row per
/// eigenvalue, sorted by flux then energy. Fluxes are solved in parallel and
/// collected in order, so the file does not depend on the thread count.
pub fn run_butterfly(cfg: &RunConfig, out: &Path) -> Result<RunSummary, RunError> {
    let base = cfg.model_params();
    let (n_kx, n_nu) = (cfg.grids.n_kx, cfg.grids.n_nu);
    let spectra: Vec<(Flux, Vec<f64>)> = Flux::farey(cfg.grids.q_max)
        .into_par_iter()
        .map(|flux| {
            let mut e = bulk_spectrum(&ModelParams { flux, ..base }, n_kx, n_nu)?.energies;
            e.sort_by(f64::total_cmp);
            Ok((flux, e))
        })
        .collect::<Result<_, CoreError>>()?;

    let mut csv = CsvWriter::create(out, BUTTERFLY_HEADER).map_err(io_at(out))?;
    let mut rows = 0;
    for (flux, energies) in &spectra {
        let (p, q) = (flux.numer().to_string(), flux.denom().to_string());
        for &e in energies {
            csv.row(&[p.clone(), q.clone(), fmt_f64(e)]).map_err(io_at(out))?;
            rows += 1;
        }
    }
    csv.finish().map_err(io_at(out))?;
    log::info!("butterfly: {} fluxes, {rows} rows -> {}", spectra.len(), out.display());
    Ok(RunSummary { outputs: vec![out.to_path_buf()], rows })
}

/// Cylinder bands to `out` and bulk gaps with their edge-counted invariants
/// to `<stem>_gaps.csv`. Gaps whose crossings cannot be assigned to an edge
/// get a blank `gamma` and the run ends with [`RunError::AmbiguousTopology`].
pub fn run_edges(cfg: &RunConfig, out: &Path) -> Result<RunSummary, RunError> {
    let p = cfg.model_params();
    let bulk = bulk_spectrum(&p, cfg.grids.n_kx, cfg.grids.n_nu)?;
    let gaps = find_gaps(&bulk, cfg.grids.min_gap_width);
    let edge = edge_spectrum(&p, cfg.edges.l_open, cfg.edges.n_ky, cfg.edge_options())?;
    if let Some(EdgeWarning::NarrowCylinder { l_open, recommended }) = edge.warning {
        log::warn!("cylinder width {l_open} is below {recommended}; edges may not be separated by bulk");
    }

    let mut csv = CsvWriter::create(out, EDGE_BANDS_HEADER).map_err(io_at(out))?;
    let mut rows = 0;
    for (s, &ky) in edge.ky.iter().enumerate() {
        for l in 0..edge.l_open {
            let k = edge.at(s, l);
            csv.row(&[
                fmt_f64(ky),
                l.to_string(),
                fmt_f64(edge.energies[k]),
                fmt_f64(edge.left_weight[k]),
                fmt_f64(edge.right_weight[k]),
                fmt_f64(edge.velocity[k]),
            ])
            .map_err(io_at(out))?;
            rows += 1;
        }
    }
    csv.finish().map_err(io_at(out))?;

    let gp = gaps_path(out);
    let mut csv = CsvWriter::create(&gp, EDGE_GAPS_HEADER).map_err(io_at(&gp))?;
    let mut ambiguous = 0;
    for gap in &gaps {
        let row = match gap_invariant(&edge, gap, cfg.edge_select()) {
            Ok(g) => [
                fmt_f64(g.lower),
                fmt_f64(g.upper),
                g.gamma.map(|x| x.to_string()).unwrap_or_default(),
                g.n_left.to_string(),
                g.n_right.to_string(),
            ],
            Err(CoreError::AmbiguousLocalization { ky }) => {
                log::warn!("gap [{:.4}, {:.4}]: ambiguous crossings at k_y = {ky:?}", gap.lower, gap.upper);
                ambiguous += 1;
                [fmt_f64(gap.lower), fmt_f64(gap.upper), String::new(), String::new(), String::new()]
            }
            Err(e) => return Err(e.into()),
        };
        csv.row(&row).map_err(io_at(&gp))?;
    }
    csv.finish().map_err(io_at(&gp))?;
    log::info!("edges: {rows} band rows, {} gaps -> {}, {}", gaps.len(), out.display(), gp.display());
    if ambiguous > 0 {
        return Err(RunError::AmbiguousTopology { count: ambiguous });
    }
    Ok(RunSummary { outputs: vec![out.to_path_buf(), gp], rows })
}

/// Integrates the coupled cavity/atom equations, one row per sample. On an
/// integrator abort the rows so far are kept and an abort marker row closes
/// the file.
pub fn run_evolve(cfg: &RunConfig, out: &Path) -> Result<RunSummary, RunError> {
    let p = cfg.model_params().validated_for_dynamics()?;
    let s0 = build_initial_state(&cfg.initial_spec(), p.lattice_size)?;
    let opts = cfg.evolve_options();

    let mut csv = CsvWriter::create(out, TRAJECTORY_HEADER).map_err(io_at(out))?;
    let mut rows = 0;
    let mut last_kt = 0.0;
    let mut write_error = None;
    let result = evolve(&s0, &p, &opts, |r, _| {
        if write_error.is_some() {
            return;
        }
        last_kt = p.kappa * r.time;
        let c = &r.currents;
        let fields = [
            last_kt,
            r.alpha.re,
            r.alpha.im,
            r.population,
            r.j_hall,
            r.j_x_total,
            c.co_y,
            c.cl_y,
            c.qu_y,
            r.trace,
            r.herm_residual,
            r.min_eig,
            r.continuity_residual,
        ];
        match csv.row(&fields.map(fmt_f64)) {
            Ok(()) => rows += 1,
            Err(e) => write_error = Some(e),
        }
    });
    if let Some(e) = write_error {
        return Err(io_at(out)(e));
    }
    if let Err(e) = result {
        let e = RunError::from(e);
        if let RunError::Numerical(inner) = &e {
            csv.comment(&format!("{ABORT_MARKER} after kt={}: {inner}", fmt_f64(last_kt))).map_err(io_at(out))?;
        }
        csv.finish().map_err(io_at(out))?;
        return Err(e);
    }
    csv.finish().map_err(io_at(out))?;
    log::info!("evolve: {rows} samples -> {}", out.display());
    Ok(RunSummary { outputs: vec![out.to_path_buf()], rows })
}
