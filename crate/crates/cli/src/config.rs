//! TOML run configuration. Every section and field is optional; see
//! `configs/` at the repository root for annotated examples.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use drsplit::admm::AdmmStop;
use drsplit::stepsize::ConservationSchedule;
use drsplit::{Controller, Form, StopCriterion, StopRule};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub solver: SolverConfig,
    pub stepsize: StepsizeConfig,
    pub stop: StopConfig,
    pub output: OutputConfig,
    pub sweep: SweepConfig,
    pub analyze: AnalyzeConfig,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg = Self::parse(&text).with_context(|| format!("in {}", path.display()))?;
        // Matrix files are relative to the configuration file.
        let base = path.parent().unwrap_or(Path::new(""));
        for m in [&mut cfg.analyze.matrix_a, &mut cfg.analyze.matrix_b].into_iter().flatten() {
            *m = base.join(&*m);
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.stop.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemConfig {
    pub name: String,
    pub seed: u64,
    pub dims: BTreeMap<String, f64>,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self { name: "linear_toy".into(), seed: 0, dims: BTreeMap::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    #[default]
    Dr,
    Admm,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Dr => "dr",
            Self::Admm => "admm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdmmMethodName {
    Vanilla,
    #[default]
    Adaptive,
    Rb,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub kind: SolverKind,
    /// DR form; ignored for ADMM.
    pub form: Form,
    /// ADMM variant; ignored for DR.
    pub method: AdmmMethodName,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { kind: SolverKind::Dr, form: Form::Nonstationary, method: AdmmMethodName::Adaptive }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    Fixed,
    Lipschitz,
    #[default]
    AdaptiveSingleValued,
    AdaptiveMultivalued,
}

impl fmt::Display for ModeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fixed => "fixed",
            Self::Lipschitz => "lipschitz",
            Self::AdaptiveSingleValued => "adaptive_single_valued",
            Self::AdaptiveMultivalued => "adaptive_multivalued",
        })
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepsizeConfig {
    pub mode: ModeName,
    /// Constant stepsize in fixed mode, initial stepsize otherwise.
    pub t: Option<f64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub kappa_min: Option<f64>,
    pub kappa_max: Option<f64>,
    pub schedule: Option<ConservationSchedule<f64>>,
}

impl StepsizeConfig {
    pub fn controller(&self, lipschitz_norm: impl FnOnce() -> Result<f64>) -> Result<Controller> {
        self.controller_for(self.mode, self.t, lipschitz_norm)
    }

    /// Controller of the given mode with this section's bounds and schedule.
    pub fn controller_for(
        &self,
        mode: ModeName,
        t: Option<f64>,
        lipschitz_norm: impl FnOnce() -> Result<f64>,
    ) -> Result<Controller> {
        let mut c = match mode {
            ModeName::Fixed => Controller::fixed(t.unwrap_or(1.0)),
            ModeName::Lipschitz => Controller::lipschitz(lipschitz_norm()?),
            ModeName::AdaptiveSingleValued => Controller::adaptive_single_valued(),
            ModeName::AdaptiveMultivalued => Controller::adaptive_multivalued(),
        };
        let (t_min, t_max) = (self.t_min.unwrap_or(c.t_min), self.t_max.unwrap_or(c.t_max));
        let (k_min, k_max) = (self.kappa_min.unwrap_or(c.kappa_min), self.kappa_max.unwrap_or(c.kappa_max));
        c = c.with_bounds(t_min, t_max).with_kappa_bounds(k_min, k_max);
        if let Some(s) = &self.schedule {
            c = c.with_schedule(s.clone());
        }
        if let (Some(t), ModeName::AdaptiveSingleValued | ModeName::AdaptiveMultivalued) = (t, mode) {
            c = c.with_initial(t);
        }
        c.validate().context("invalid [stepsize] section")?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StopConfig {
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    /// DR only.
    pub criterion: StopCriterion,
}

impl StopConfig {
    fn validate(&self) -> Result<()> {
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                bail!("invalid [stop] section: tol must be positive, got {tol}");
            }
        }
        if self.max_iters == Some(0) {
            bail!("invalid [stop] section: max_iters must be at least 1");
        }
        Ok(())
    }

    pub fn dr_rule(&self) -> StopRule<f64> {
        let d = StopRule::<f64>::default();
        StopRule { max_iters: self.max_iters.unwrap_or(d.max_iters), tol: self.tol.unwrap_or(d.tol), criterion: self.criterion }
    }

    pub fn admm_stop(&self) -> AdmmStop<f64> {
        let d = AdmmStop::<f64>::default();
        AdmmStop { max_iters: self.max_iters.unwrap_or(d.max_iters), tol: self.tol.unwrap_or(d.tol) }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Defaults to `[problem.name]`.
    pub problems: Vec<String>,
    pub seeds: Vec<u64>,
    /// Alternative to `seeds`: `seed_start, seed_start + 1, …`.
    pub seed_start: Option<u64>,
    pub seed_count: Option<u64>,
    /// Method names, optionally pinned to a stepsize as `name@t`.
    pub methods: Vec<String>,
    pub stepsizes: Vec<f64>,
}

impl SweepConfig {
    pub fn seed_list(&self, fallback: u64) -> Result<Vec<u64>> {
        match (self.seed_start, self.seed_count) {
            (None, None) if self.seeds.is_empty() => Ok(vec![fallback]),
            (None, None) => Ok(self.seeds.clone()),
            (start, Some(count)) if self.seeds.is_empty() => {
                let start = start.unwrap_or(0);
                Ok((start..start + count).collect())
            }
            _ => bail!("invalid [sweep] section: give either seeds or seed_count (with optional seed_start)"),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeConfig {
    /// Explicit stepsizes; `spectrum` defaults to `[0.5, 1.5, 5]`, `sweep`
    /// to a log grid over `t_range`.
    pub stepsizes: Vec<f64>,
    pub t_range: Option<[f64; 2]>,
    pub points: usize,
    pub iterations: Vec<usize>,
    pub tol: f64,
    /// Text-format matrices replacing the generated problem.
    pub matrix_a: Option<PathBuf>,
    pub matrix_b: Option<PathBuf>,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        Self {
            stepsizes: Vec::new(),
            t_range: None,
            points: 31,
            iterations: vec![200, 500],
            tol: 1e-6,
            matrix_a: None,
            matrix_b: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        let cfg = RunConfig::parse("").unwrap();
        assert_eq!(cfg.problem.name, "linear_toy");
        assert_eq!(cfg.solver.kind, SolverKind::Dr);
        assert_eq!(cfg.stop.dr_rule(), StopRule::default());
    }

    #[test]
    fn errors_name_the_field() {
        let err = RunConfig::parse("[stepsize]\nt_mn = 1.0\n").unwrap_err();
        assert!(format!("{err:#}").contains("t_mn"));
        let err = RunConfig::parse("[stop]\nmax_iters = \"many\"\n").unwrap_err();
        assert!(format!("{err:#}").contains("max_iters"));
        let cfg = RunConfig::parse("[stepsize]\nt_min = 2.0\nt_max = 1.0\n").unwrap();
        let err = cfg.stepsize.controller(|| Ok(1.0)).unwrap_err();
        assert!(format!("{err:#}").contains("t_min"));
    }

    #[test]
    fn schedule_and_seeds() {
        let cfg = RunConfig::parse(
            "[stepsize]\nschedule = { kind = \"geometric\", base = 0.25, scale_exponent = 10.0 }\n\
             [sweep]\nseed_start = 4\nseed_count = 3\n",
        )
        .unwrap();
        let c = cfg.stepsize.controller(|| Ok(1.0)).unwrap();
        assert_eq!(c.schedule, ConservationSchedule::Geometric { base: 0.25, scale_exponent: 10.0 });
        assert_eq!(cfg.sweep.seed_list(0).unwrap(), vec![4, 5, 6]);
        let both = RunConfig::parse("[sweep]\nseeds = [1]\nseed_count = 2\n").unwrap();
        assert!(both.sweep.seed_list(0).is_err());
    }
}
