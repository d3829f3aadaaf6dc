//! Deterministic CSV and JSON emission.
//!
//! Floats are written with 12 significant digits in scientific notation
//! (`{:.11e}`), which is platform independent; non-finite values appear as
//! `NaN`, `inf` or `-inf`. Columns are comma-separated with no quoting, and
//! lines end in `\n`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;

pub const BUTTERFLY_HEADER: &str = "phi_p,phi_q,energy";
pub const EDGE_BANDS_HEADER: &str = "ky,band_index,energy,left_weight,right_weight,velocity";
pub const EDGE_GAPS_HEADER: &str = "gap_lower,gap_upper,gamma,n_left,n_right";
pub const TRAJECTORY_HEADER: &str = "kt,re_alpha,im_alpha,population,j_hall,j_x_total,j_co_y,j_cl_y,j_qu_y,trace,herm_residual,min_eig,continuity_residual";

/// Prefix of the row appended when a trajectory is cut short.
pub const ABORT_MARKER: &str = "# aborted";

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        // normalize -0 so that sign noise never reaches the files
        format!("{:.11e}", if x == 0.0 { 0.0 } else { x })
    } else {
        format!("{x}")
    }
}

/// Line-buffered CSV writer with a fixed header.
pub struct CsvWriter {
    out: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &str) -> io::Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{header}")?;
        Ok(CsvWriter { out })
    }

    pub fn row(&mut self, fields: &[String]) -> io::Result<()> {
        writeln!(self.out, "{}", fields.join(","))
    }

    pub fn comment(&mut self, text: &str) -> io::Result<()> {
        writeln!(self.out, "{text}")
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}

/// `out.csv` → `out_gaps.csv`, next to the bands file.
pub fn gaps_path(bands: &Path) -> PathBuf {
    let stem = bands.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = bands.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    bands.with_file_name(format!("{stem}_gaps{ext}"))
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

#[derive(Serialize)]
struct Sidecar<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    outputs: Vec<String>,
    status: &'a str,
}

/// Writes the resolved config, version string, outputs and run status.
pub fn write_sidecar(path: &Path, cfg: &RunConfig, outputs: &[PathBuf], status: &str) -> io::Result<()> {
    let sidecar = Sidecar {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        status,
    };
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, &sidecar)?;
    writeln!(out)?;
    out.flush()
}
