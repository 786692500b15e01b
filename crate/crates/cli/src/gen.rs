//! `problems gen`: write generated instances to disk.

use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use drsplit::problems::archive::{write_matrix_text, Archive};

use crate::config::{RunConfig, SolverKind};
use crate::problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    /// One binary `.drsp` file.
    #[default]
    Archive,
    /// One text matrix file per block.
    Text,
}

#[derive(Debug, Clone, clap::Args)]
pub struct GenArgs {
    /// Problem name; overrides problem.name.
    #[arg(long)]
    pub name: Option<String>,
    /// Generator family; overrides solver.kind.
    #[arg(long, value_enum)]
    pub kind: Option<SolverKind>,
    /// Dimension override `key=value`; repeatable.
    #[arg(long = "dim", value_parser = parse_dim)]
    pub dims: Vec<(String, f64)>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

fn parse_dim(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v = v.parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

pub fn generate(cfg: &RunConfig, args: &GenArgs, out: &Path) -> Result<u8> {
    let kind = args.kind.unwrap_or(cfg.solver.kind);
    let name = args.name.as_deref().unwrap_or(&cfg.problem.name);
    let mut dims = cfg.problem.dims.clone();
    dims.extend(args.dims.iter().cloned());
    let inst = problem::build(kind, name, &dims, cfg.problem.seed)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let stem = format!("{}_{}", inst.name, inst.seed);
    let mut written: Vec<PathBuf> = Vec::new();
    match args.format {
        Format::Archive => {
            let path = out.join(format!("{stem}.drsp"));
            let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            Archive::from_instance(&inst).write_to(file)?;
            written.push(path);
        }
        Format::Text => {
            let archive = Archive::from_instance(&inst);
            for (block, m) in &archive.blocks {
                let path = out.join(format!("{stem}_{block}.txt"));
                let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                write_matrix_text(m, file)?;
                written.push(path);
            }
        }
    }
    println!("{} fingerprint {:016x}", inst.name, inst.fingerprint());
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(0)
}
