//! Run configuration: flags merged over an optional JSON config file,
//! flags winning. Also the shared builders that turn a config into a
//! group and a filtration.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use matchbound_core::{
    build_builtin, group_from_json, sum_element_filtration, verify_vanishing, Filtration,
    FiltrationStep, FpSubspace, Group, GroupAlgebra, GroupSpec, Ideal, Psl2Tower,
};
use num_rational::Ratio;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<String>,
    pub group: Option<String>,
    pub p: Option<u64>,
    pub filtration: Option<String>,
    pub n: Option<u32>,
    pub ambient_order: Option<u128>,
    pub budget_ms: Option<u64>,
    pub seed: Option<u64>,
    pub greedy_trials: Option<u32>,
    pub out: Option<String>,
    pub format: Option<String>,
    pub unamplified: Option<bool>,
}

/// Fully resolved configuration for one command invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub group: String,
    pub p: Option<u64>,
    pub filtration: String,
    pub n: u32,
    pub ambient_order: Option<u128>,
    pub budget_ms: u64,
    pub seed: u64,
    pub greedy_trials: u32,
    pub out: Option<String>,
    pub format: OutputFormat,
    pub unamplified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

/// Deterministic node budget: one thousand search nodes per configured
/// millisecond, so identical configs explore identical trees regardless
/// of machine load.
pub const NODES_PER_MS: u64 = 1000;

pub fn load_file_config(path: &str, command: &str) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {path}: {e}")))?;
    let cfg: FileConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid config {path}: {e}")))?;
    if let Some(cmd) = &cfg.command {
        if cmd != command {
            return Err(CliError::Config(format!(
                "config file names command {cmd:?} but {command:?} was invoked"
            )));
        }
    }
    Ok(cfg)
}

/// Build a group from a spec string: a builtin `family:params`, an
/// optional `^k` direct-power suffix, or a path to a JSON table file.
pub fn build_group(spec: &str) -> Result<Group, CliError> {
    if spec.is_empty() {
        return Err(CliError::Config("--group is required".into()));
    }
    if spec.ends_with(".json") || spec.contains('/') {
        let text = fs::read_to_string(Path::new(spec))
            .map_err(|e| CliError::Config(format!("cannot read group file {spec}: {e}")))?;
        return group_from_json(&text).map_err(|e| CliError::Config(e.to_string()));
    }
    let (base, power) = match spec.split_once('^') {
        Some((b, k)) => {
            let k: u32 = k
                .parse()
                .map_err(|_| CliError::Config(format!("bad power suffix in {spec:?}")))?;
            (b, k)
        }
        None => (spec, 1),
    };
    let group = build_builtin(base).map_err(|e| CliError::Config(e.to_string()))?;
    if power == 1 {
        Ok(group)
    } else {
        group.direct_power(power).map_err(|e| CliError::Config(e.to_string()))
    }
}

pub fn prime_divisors(n: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut m = n as u64;
    let mut d = 2u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// The coefficient prime: explicit, the tower's defining prime when the
/// tower filtration is requested, or the smallest prime dividing |G|.
pub fn resolve_prime(cfg: &RunConfig, group: &Group) -> Result<u64, CliError> {
    match cfg.p {
        Some(p) => {
            if !matchbound_core::is_prime(p) {
                return Err(CliError::Config(format!("{p} is not prime")));
            }
            Ok(p)
        }
        None => {
            if cfg.filtration == "psl2-tower" {
                if let Ok(GroupSpec::Psl2(p)) = cfg.group.parse::<GroupSpec>() {
                    return Ok(p);
                }
            }
            prime_divisors(group.order()).first().copied().ok_or_else(|| {
                CliError::Config("the trivial group admits no coefficient prime".into())
            })
        }
    }
}

#[derive(Debug, Deserialize)]
struct FiltrationFile {
    steps: Vec<FiltrationFileStep>,
}

#[derive(Debug, Deserialize)]
struct FiltrationFileStep {
    alpha: String,
    basis: Vec<Vec<u64>>,
}

pub enum BuiltFiltration {
    Plain(Filtration),
    /// Tower plus its verified filtration, for reports that show dims.
    Tower(Box<Psl2Tower>, Filtration),
}

impl BuiltFiltration {
    pub fn filtration(&self) -> &Filtration {
        match self {
            BuiltFiltration::Plain(f) => f,
            BuiltFiltration::Tower(_, f) => f,
        }
    }
}

/// Build and vanishing-verify the configured filtration.
pub fn build_filtration<'g>(
    cfg: &RunConfig,
    ga: &GroupAlgebra<'g>,
    group_spec: &str,
) -> Result<BuiltFiltration, CliError> {
    match cfg.filtration.as_str() {
        "sum-element" => {
            let f = sum_element_filtration(ga).map_err(CliError::from_bound)?;
            Ok(BuiltFiltration::Plain(f))
        }
        "psl2-tower" => {
            let spec: GroupSpec = group_spec
                .parse()
                .map_err(|_| CliError::Config("psl2-tower needs a psl2:<p> group".into()))?;
            let GroupSpec::Psl2(p) = spec else {
                return Err(CliError::Config(
                    "the psl2-tower filtration applies to psl2:<p> groups only".into(),
                ));
            };
            if p != ga.p() {
                return Err(CliError::Config(format!(
                    "the tower for psl2:{p} lives over F_{p}, but p = {} was configured",
                    ga.p()
                )));
            }
            let tower = matchbound_core::build_tower(p).map_err(CliError::from_psl2)?;
            let f = tower.filtration(ga).map_err(CliError::from_psl2)?;
            Ok(BuiltFiltration::Tower(Box::new(tower), f))
        }
        path => {
            let path = path.strip_prefix('@').unwrap_or(path);
            if !(path.ends_with(".json") || path.contains('/')) {
                return Err(CliError::Config(format!(
                    "unknown filtration {path:?}: expected sum-element, psl2-tower, or a JSON file path"
                )));
            }
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read filtration {path}: {e}")))?;
            let file: FiltrationFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("invalid filtration {path}: {e}")))?;
            let mut steps = Vec::new();
            for s in file.steps {
                let alpha: Ratio<i64> = s
                    .alpha
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad breakpoint {:?}", s.alpha)))?;
                let space = FpSubspace::from_rows(ga.p(), ga.dim(), s.basis)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                steps.push(FiltrationStep {
                    alpha,
                    ideal: Ideal {
                        space,
                        two_sided_verified: false,
                        aut_invariant_verified: false,
                    },
                });
            }
            let f = Filtration::new(ga, steps, false).map_err(CliError::from_bound)?;
            let f = verify_vanishing(ga, f).map_err(CliError::from_bound)?;
            Ok(BuiltFiltration::Plain(f))
        }
    }
}
