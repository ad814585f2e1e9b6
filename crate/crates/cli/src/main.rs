//! Command line front end: build groups and filtrations, verify the
//! vanishing condition, compute matching bounds, search for maximum
//! matchings, and compare bounds against the exact oracle.
//!
//! Exit codes: 0 success, 1 configuration error, 2 verification failure,
//! 3 dominance violation (a found matching exceeded an emitted bound,
//! which indicates an implementation bug, never a disproof).

mod config;
mod output;

use clap::{Args, Parser, Subcommand};

use matchbound_core::{
    bound_from_filtration, greedy_lower_bound, max_matching_exact, soft_bound_density,
    square_zero_density, AlgebraError, BoundError, GroupAlgebra, GroupSpec, Psl2Error,
};

use config::{
    build_filtration, build_group, load_file_config, prime_divisors, resolve_prime,
    BuiltFiltration, FileConfig, OutputFormat, RunConfig, NODES_PER_MS,
};
use output::{
    emit, BoundOutput, CompareOutput, CompareRow, Psl2Output, SearchOutput, VerifyOutput,
    VerifyStep,
};

const DOMINANCE_SLACK: f64 = 1e-9;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Verification(String),
    Dominance(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Dominance(_) => 3,
        }
    }

    fn from_bound(e: BoundError) -> Self {
        match e {
            BoundError::VanishingViolation { .. }
            | BoundError::NotVerified
            | BoundError::HypothesisIncomplete(_)
            | BoundError::NontrivialCenter
            | BoundError::GridCertification { .. } => CliError::Verification(e.to_string()),
            BoundError::Algebra(AlgebraError::NotTwoSided) => {
                CliError::Verification("a supplied step is not a two-sided ideal".into())
            }
            other => CliError::Config(other.to_string()),
        }
    }

    fn from_psl2(e: Psl2Error) -> Self {
        match e {
            Psl2Error::CheckFailed(_)
            | Psl2Error::DensityMismatch { .. }
            | Psl2Error::BadRepresentation(_) => CliError::Verification(e.to_string()),
            Psl2Error::Bound(b) => CliError::from_bound(b),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Verification(m) => write!(f, "verification failure: {m}"),
            CliError::Dominance(m) => write!(f, "dominance violation: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "matchbound",
    version,
    about = "Matching bounds in finite groups from group-algebra ideal filtrations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the matching bound for a group, filtration, and power
    Bound(CommonArgs),
    /// Check a filtration: shape, two-sidedness, vanishing, invariance
    Verify(CommonArgs),
    /// Exact maximum-matching search (or randomized greedy)
    Search(CommonArgs),
    /// Oracle vs every applicable bound, with a dominance check
    Compare(CommonArgs),
    /// Build and fully verify the projective tower for one prime
    Psl2(CommonArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Builtin spec (cyclic:N, dihedral:N, symmetric:N, quaternion,
    /// gl2:P, sl2:P, psl2:P), optional ^K power, or a JSON table file
    #[arg(long)]
    group: Option<String>,
    /// Coefficient field prime; defaults to the smallest prime dividing |G|
    #[arg(long)]
    p: Option<u64>,
    /// sum-element | psl2-tower | path to a JSON filtration file
    #[arg(long)]
    filtration: Option<String>,
    /// Tensor power of the base group (default 1)
    #[arg(long)]
    n: Option<u32>,
    /// Ambient group order for the normal-subgroup bound (default |H|^n)
    #[arg(long)]
    ambient_order: Option<u128>,
    /// Search budget; consumed as a deterministic node count per ms
    #[arg(long)]
    budget_ms: Option<u64>,
    /// Seed for randomized search components
    #[arg(long)]
    seed: Option<u64>,
    /// Run the randomized greedy search with this many trials instead of
    /// the exact search
    #[arg(long)]
    greedy_trials: Option<u32>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<String>,
    /// json | csv | text
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Show the unamplified slice-rank count in text output (n = 1)
    #[arg(long)]
    unamplified: bool,
    /// JSON config file; explicit flags override its fields
    #[arg(long)]
    config: Option<String>,
}

impl CommonArgs {
    fn resolve(self, command: &str) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => load_file_config(path, command)?,
            None => FileConfig::default(),
        };
        let format = match self.format {
            Some(f) => f,
            None => match file.format.as_deref() {
                None => OutputFormat::Text,
                Some("json") => OutputFormat::Json,
                Some("csv") => OutputFormat::Csv,
                Some("text") => OutputFormat::Text,
                Some(other) => {
                    return Err(CliError::Config(format!("unknown format {other:?}")))
                }
            },
        };
        Ok(RunConfig {
            // empty spec is caught by build_group; psl2 runs on --p alone
            group: self.group.or(file.group).unwrap_or_default(),
            p: self.p.or(file.p),
            filtration: self
                .filtration
                .or(file.filtration)
                .unwrap_or_else(|| "sum-element".into()),
            n: self.n.or(file.n).unwrap_or(1),
            ambient_order: self.ambient_order.or(file.ambient_order),
            budget_ms: self.budget_ms.or(file.budget_ms).unwrap_or(2000),
            seed: self.seed.or(file.seed).unwrap_or(0),
            greedy_trials: self.greedy_trials.or(file.greedy_trials).unwrap_or(0),
            out: self.out.or(file.out),
            format,
            unamplified: self.unamplified || file.unamplified.unwrap_or(false),
        })
    }
}

fn main() {
    init_thread_pool();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's usage exit code would collide with the verification code
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            std::process::exit(if is_help { 0 } else { 1 });
        }
    };
    let result = match cli.command {
        Command::Bound(args) => args.resolve("bound").and_then(cmd_bound),
        Command::Verify(args) => args.resolve("verify").and_then(cmd_verify),
        Command::Search(args) => args.resolve("search").and_then(cmd_search),
        Command::Compare(args) => args.resolve("compare").and_then(cmd_compare),
        Command::Psl2(args) => args.resolve("psl2").and_then(cmd_psl2),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.code());
    }
}

fn init_thread_pool() {
    if let Ok(threads) = std::env::var("MATCHBOUND_THREADS") {
        if let Ok(t) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
        }
    }
}

fn cmd_bound(cfg: RunConfig) -> Result<(), CliError> {
    let group = build_group(&cfg.group)?;
    let p = resolve_prime(&cfg, &group)?;
    let ga = GroupAlgebra::new(&group, p).map_err(|e| CliError::Config(e.to_string()))?;
    let built = build_filtration(&cfg, &ga, &cfg.group)?;
    let report = bound_from_filtration(&ga, built.filtration(), cfg.n, cfg.ambient_order)
        .map_err(CliError::from_bound)?;
    let out = BoundOutput {
        filtration: cfg.filtration.clone(),
        report,
        tower_dims: match &built {
            BuiltFiltration::Tower(tower, _) => Some(tower.dims.clone()),
            BuiltFiltration::Plain(_) => None,
        },
    };
    emit(out.render(cfg.format, cfg.unamplified), cfg.out.as_deref())
}

fn cmd_verify(cfg: RunConfig) -> Result<(), CliError> {
    let group = build_group(&cfg.group)?;
    let p = resolve_prime(&cfg, &group)?;
    let ga = GroupAlgebra::new(&group, p).map_err(|e| CliError::Config(e.to_string()))?;
    match build_filtration(&cfg, &ga, &cfg.group) {
        Ok(built) => {
            let f = built.filtration();
            let actors = ga.inner_actors();
            let steps = f
                .steps
                .iter()
                .map(|s| {
                    Ok(VerifyStep {
                        alpha: s.alpha.to_string(),
                        dim: s.ideal.dim(),
                        two_sided: s.ideal.two_sided_verified,
                        inner_invariant: ga
                            .conjugation_invariant(&s.ideal.space, &actors)
                            .map_err(|e| CliError::Config(e.to_string()))?,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let out = VerifyOutput {
                group: group.name().to_string(),
                order: group.order(),
                p,
                filtration: cfg.filtration.clone(),
                ok: true,
                vanishing: "verified".into(),
                aut_invariance_verified: f.aut_invariant_verified,
                steps,
            };
            emit(out.render(cfg.format), cfg.out.as_deref())
        }
        Err(CliError::Verification(msg)) => {
            let out = VerifyOutput {
                group: group.name().to_string(),
                order: group.order(),
                p,
                filtration: cfg.filtration.clone(),
                ok: false,
                vanishing: msg.clone(),
                aut_invariance_verified: false,
                steps: Vec::new(),
            };
            emit(out.render(cfg.format), cfg.out.as_deref())?;
            Err(CliError::Verification(msg))
        }
        Err(other) => Err(other),
    }
}

fn cmd_search(cfg: RunConfig) -> Result<(), CliError> {
    let group = build_group(&cfg.group)?;
    let out = if cfg.greedy_trials > 0 {
        let matching = greedy_lower_bound(&group, cfg.greedy_trials, cfg.seed);
        SearchOutput {
            group: group.name().to_string(),
            order: group.order(),
            mode: format!("greedy x{}", cfg.greedy_trials),
            cardinality: matching.cardinality(),
            exact: false,
            nodes: 0,
            node_budget: 0,
            matching,
        }
    } else {
        let budget = cfg.budget_ms.saturating_mul(NODES_PER_MS);
        let result = max_matching_exact(&group, budget);
        SearchOutput {
            group: group.name().to_string(),
            order: group.order(),
            mode: "exact".into(),
            cardinality: result.matching.cardinality(),
            exact: result.exact,
            nodes: result.nodes,
            node_budget: result.node_budget,
            matching: result.matching,
        }
    };
    emit(out.render(cfg.format), cfg.out.as_deref())
}

fn cmd_compare(cfg: RunConfig) -> Result<(), CliError> {
    let group = build_group(&cfg.group)?;
    if group.order() < 2 {
        return Err(CliError::Config(
            "compare needs a nontrivial finite group".into(),
        ));
    }
    let budget = cfg.budget_ms.saturating_mul(NODES_PER_MS);
    let search = max_matching_exact(&group, budget);
    let m_star = search.matching.cardinality();

    let primes = match cfg.p {
        Some(p) => vec![p],
        None => prime_divisors(group.order()),
    };
    let mut rows = Vec::new();
    for &p in &primes {
        let ga = GroupAlgebra::new(&group, p).map_err(|e| CliError::Config(e.to_string()))?;
        let sub = RunConfig { p: Some(p), filtration: "sum-element".into(), ..cfg.clone() };
        let built = build_filtration(&sub, &ga, &cfg.group)?;
        let report = bound_from_filtration(&ga, built.filtration(), 1, None)
            .map_err(CliError::from_bound)?;
        rows.push(make_row(p, "sum-element", group.order(), &report)?);
    }
    // a projective group also carries its tower bound
    if let Ok(GroupSpec::Psl2(p)) = cfg.group.parse::<GroupSpec>() {
        if p > 3 {
            let ga = GroupAlgebra::new(&group, p).map_err(|e| CliError::Config(e.to_string()))?;
            let sub = RunConfig { p: Some(p), filtration: "psl2-tower".into(), ..cfg.clone() };
            let built = build_filtration(&sub, &ga, &cfg.group)?;
            let report = bound_from_filtration(&ga, built.filtration(), 1, None)
                .map_err(CliError::from_bound)?;
            rows.push(make_row(p, "psl2-tower", group.order(), &report)?);
        }
    }
    rows.sort_by_key(|a| (a.p, a.filtration.clone()));

    let mut dominance_ok = true;
    let mut worst = String::new();
    for r in &rows {
        for (name, bound) in [
            ("soft", r.bound_soft),
            ("main2", r.bound_main2),
            ("filtration", r.bound_filtration),
        ] {
            if m_star as f64 > bound + DOMINANCE_SLACK {
                dominance_ok = false;
                worst = format!(
                    "matching of size {m_star} exceeds the {name} bound {bound} at p = {}",
                    r.p
                );
            }
        }
    }
    let out = CompareOutput {
        group: group.name().to_string(),
        order: group.order(),
        m_star,
        exact: search.exact,
        nodes: search.nodes,
        dominance_ok,
        rows,
    };
    emit(out.render(cfg.format), cfg.out.as_deref())?;
    if dominance_ok {
        Ok(())
    } else {
        Err(CliError::Dominance(worst))
    }
}

fn make_row(
    p: u64,
    kind: &str,
    order: usize,
    report: &matchbound_core::BoundReport,
) -> Result<CompareRow, CliError> {
    let dim_i = report.step_dims.last().map(|s| s.dim).unwrap_or(1);
    let delta_soft = report.soft_delta.unwrap_or_else(|| soft_bound_density(order, dim_i));
    let delta_main2 = square_zero_density(order, dim_i).map_err(CliError::from_bound)?;
    let delta_filtration = report.per_factor_density;
    Ok(CompareRow {
        p,
        filtration: kind.to_string(),
        delta_soft,
        delta_main2,
        delta_filtration,
        bound_soft: order as f64 * delta_soft,
        bound_main2: order as f64 * delta_main2,
        bound_filtration: order as f64 * delta_filtration,
        hypotheses: report.hypotheses.clone(),
    })
}

fn cmd_psl2(cfg: RunConfig) -> Result<(), CliError> {
    let p = match cfg.p {
        Some(p) => p,
        None => match cfg.group.parse::<GroupSpec>() {
            Ok(GroupSpec::Psl2(p)) => p,
            _ => {
                return Err(CliError::Config(
                    "psl2 needs --p or a psl2:<p> group spec".into(),
                ))
            }
        },
    };
    let tower = matchbound_core::build_tower(p).map_err(CliError::from_psl2)?;
    let delta = matchbound_core::delta_from_tower(&tower).map_err(CliError::from_psl2)?;
    let out = Psl2Output {
        p,
        order: tower.psl2.order(),
        gl2_side_verified: tower.gl2_side_verified,
        dims: tower.dims.clone(),
        checks: tower.checks.clone(),
        delta: delta.delta,
        closed_form_lambda: delta.closed_form_lambda,
        filtration_density: delta.filtration_density,
        rate_lambda_star: delta.rate_lambda_star,
        square_zero_reference: delta.square_zero_reference,
        limit_density: delta.limit_density,
    };
    emit(out.render(cfg.format), cfg.out.as_deref())
}
