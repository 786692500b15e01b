use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};

use drsplit::operators::operator_norm_power;
use drsplit::problems::{gen_admm_suite, gen_dr_problem, gen_two_block_qp, SuiteDims, SUITE_NAMES};
use drsplit::{Error, Instance};

use crate::config::SolverKind;

/// DR problems come from the monotone-pair generators, ADMM problems from
/// the split-problem suite plus `two_block_qp`.
pub fn build(kind: SolverKind, name: &str, dims: &BTreeMap<String, f64>, seed: u64) -> Result<Instance> {
    let inst = match kind {
        SolverKind::Dr => match gen_dr_problem(name, dims, seed) {
            Err(Error::InvalidName(_)) if name == "two_block_qp" || SUITE_NAMES.contains(&name) => {
                bail!("`{name}` is an ADMM problem; set solver.kind = \"admm\"")
            }
            other => other?,
        },
        SolverKind::Admm if name == "two_block_qp" => {
            let n = integer_dims(dims, &["n"])?.get("n").copied().unwrap_or(12);
            gen_two_block_qp(n, seed)?
        }
        SolverKind::Admm if SUITE_NAMES.contains(&name) => {
            let given = integer_dims(dims, &["rows", "cols", "samples", "features"])?;
            let d = SuiteDims::default();
            let get = |k: &str, default: usize| given.get(k).copied().unwrap_or(default);
            let dims = SuiteDims {
                rows: get("rows", d.rows),
                cols: get("cols", d.cols),
                samples: get("samples", d.samples),
                features: get("features", d.features),
            };
            gen_admm_suite(name, &dims, seed)?
        }
        SolverKind::Admm => bail!("unknown ADMM problem `{name}`; expected two_block_qp or one of {SUITE_NAMES:?}"),
    };
    Ok(inst)
}

fn integer_dims(dims: &BTreeMap<String, f64>, allowed: &[&str]) -> Result<BTreeMap<String, usize>> {
    dims.iter()
        .map(|(k, &v)| {
            if !allowed.contains(&k.as_str()) {
                bail!("unknown dimension `{k}`; expected one of {allowed:?}");
            }
            if !(v >= 1.0 && v.fract() == 0.0) {
                bail!("dimension `{k}` must be a positive integer, got {v}");
            }
            Ok((k.clone(), v as usize))
        })
        .collect()
}

/// `‖B‖` by power iteration, for the Lipschitz stepsize `1/‖B‖`.
pub fn lipschitz_norm(inst: &Instance) -> Result<f64> {
    let (_, b) = inst.pair().context("lipschitz stepsize needs a DR problem")?;
    let m = b.matrix().with_context(|| format!("lipschitz stepsize needs a linear B, `{}` is not", b.label()))?;
    Ok(operator_norm_power(m, 200))
}
