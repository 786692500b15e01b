//! CSV files. Numbers carry 17 significant digits in scientific notation;
//! absent values are empty fields.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

pub const TRACE_HEADER: &[&str] = &["n", "t", "kappa", "fp_residual", "lin_residual", "objective", "wall_ns"];
pub const ADMM_TRACE_HEADER: &[&str] = &["n", "t", "primal_residual", "dual_residual", "objective"];
pub const SUMMARY_HEADER: &[&str] = &[
    "problem",
    "seed",
    "solver",
    "method",
    "status",
    "iterations",
    "final_t",
    "final_residual",
    "final_objective",
    "wall_ns",
];
pub const SWEEP_HEADER: &[&str] = &[
    "problem",
    "method",
    "seed",
    "t",
    "iterations_to_tol",
    "status",
    "final_objective",
    "final_primal_residual",
];
pub const TABLE_HEADER: &[&str] =
    &["problem", "method", "runs", "converged", "mean_iterations", "std_iterations", "mean_std"];
pub const SPECTRUM_HEADER: &[&str] = &["t", "re", "im"];
pub const STEPSIZE_SWEEP_HEADER: &[&str] = &["t", "n_iters", "residual"];
pub const OPTSTEP_HEADER: &[&str] = &["t_opt", "rho_opt"];

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub struct CsvFile {
    path: PathBuf,
    writer: csv::Writer<BufWriter<File>>,
}

impl CsvFile {
    pub fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut writer = csv::Writer::from_writer(BufWriter::new(file));
        writer.write_record(header)?;
        Ok(Self { path, writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).with_context(|| format!("writing {}", self.path.display()))
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.writer.flush().with_context(|| format!("writing {}", self.path.display()))?;
        Ok(self.path)
    }
}
