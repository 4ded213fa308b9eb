//! Command-line surface. Every run produces one deterministic text report:
//! fixed header lines, machine-readable `CHECK`/`SUMMARY` lines, and exact
//! rationals next to 12-digit decimal renderings. Exit codes: 0 all checks
//! pass, 1 at least one check fails, 2 usage or input errors.

use std::collections::BTreeSet;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::{One, Signed};

use crate::criteria::{
    fp_radii, optimize_mu_uniform, radii_report, MuGrid, MuVector, Objective, NEIGHBORHOOD_CAP,
};
use crate::error::{Error, Result};
use crate::io;
use crate::mayer::{mayer_partial_sums, MayerLimits};
use crate::model::{
    build_subset_gas, full_range, make_family, Family, PolymerSubset, PolymerSystem, SubsetGas,
    SubsetGasSpec,
};
use crate::numeric::{ln_rational, parse_rational, ratio, ratio_str, sig12, Rational};
use crate::partition::{z_brute, z_recursive_seeded, ActivityVector, BRUTE_CAP, EXHAUSTIVE_CAP};
use crate::verify::{
    verify_alternating_sign, verify_chain_steps, verify_log_bound, verify_pressure_bound,
    verify_ratio_inequality, CheckStatus, VerificationReport,
};

/// Fractions of the certified radius probed by default: the inequality is
/// exercised where it is nearly tight.
pub const DEFAULT_FRACTIONS: [(i64, i64); 4] = [(1, 2), (9, 10), (99, 100), (1, 1)];

#[derive(Debug, Parser)]
#[command(name = "polygas", version, about = "Exact polymer-gas partition functions, convergence criteria, and inequality checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Partition function over a volume, by two independent methods.
    Z(ZArgs),
    /// Per-polymer convergence radii, with the domination check.
    Radii(RadiiArgs),
    /// Structural inequality checks over a volume.
    Verify(VerifyArgs),
    /// Partial sums of the log-partition series.
    Mayer(MayerArgs),
    /// Finite-volume pressure bound for a subset gas.
    Pressure(PressureArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// System file (`polymers N`, `incompat i j`, `label i ...`).
    #[arg(long, value_name = "FILE")]
    pub system: Option<String>,
    /// Built-in family: `path:N`, `cycle:N`, `complete:N`, or `edgeless:N`.
    #[arg(long, value_name = "KIND:N")]
    pub family: Option<String>,
    /// Subset gas over a site space: `space:N,maxsize:K[,edges:path|cycle|complete|none]`.
    #[arg(long, value_name = "SPEC")]
    pub subsetgas: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Also write the report to this file.
    #[arg(long, value_name = "FILE")]
    pub out: Option<String>,
    /// Seed recorded in the header and used for pivot selection.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ZArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Activities: a file of `w i <rational>` lines, `uniform:<rational>`,
    /// or `radius:<fraction>` of the sharp radius (needs --mu).
    #[arg(long, value_name = "FILE|uniform:R|radius:F")]
    pub activities: Option<String>,
    /// Reference weights: a file of `mu` lines or `uniform:<rational>`.
    #[arg(long, value_name = "FILE|uniform:R")]
    pub mu: Option<String>,
    /// Volume file (whitespace-separated polymer ids); all polymers otherwise.
    #[arg(long, value_name = "FILE")]
    pub lambda: Option<String>,
    /// Enumeration cap for the brute-force method.
    #[arg(long, value_name = "N")]
    pub cap: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RadiiArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Reference weights: a file of `mu` lines or `uniform:<rational>`.
    #[arg(long, value_name = "FILE|uniform:R")]
    pub mu: Option<String>,
    /// Optimize a uniform reference weight instead of taking --mu.
    #[arg(long)]
    pub optimize: bool,
    /// Objective the optimizer maximizes.
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Fp)]
    pub objective: ObjectiveArg,
    /// Optimizer grid `lo:hi:steps`.
    #[arg(long, value_name = "LO:HI:STEPS", default_value = "0:1:101")]
    pub grid: String,
    /// Neighborhood enumeration cap.
    #[arg(long, value_name = "N")]
    pub cap: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Reference weights; uniform 1 otherwise.
    #[arg(long, value_name = "FILE|uniform:R")]
    pub mu: Option<String>,
    /// Volume file; all polymers otherwise.
    #[arg(long, value_name = "FILE")]
    pub lambda: Option<String>,
    /// Fraction of the sharp radius used for the per-pivot chain checks.
    #[arg(long, value_name = "RATIONAL", default_value = "1")]
    pub f: String,
    /// Exhaustive enumeration cap (configuration tables).
    #[arg(long, value_name = "N")]
    pub cap: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MayerArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Activities: a file, `uniform:<rational>`, or `radius:<fraction>`.
    #[arg(long, value_name = "FILE|uniform:R|radius:F")]
    pub activities: Option<String>,
    /// Reference weights, needed only for `radius:` activities.
    #[arg(long, value_name = "FILE|uniform:R")]
    pub mu: Option<String>,
    /// Volume file; all polymers otherwise.
    #[arg(long, value_name = "FILE")]
    pub lambda: Option<String>,
    /// Series truncation order.
    #[arg(long, value_name = "N", default_value_t = 3)]
    pub order: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PressureArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Activities over the gas polymers; `radius:1` otherwise.
    #[arg(long, value_name = "FILE|uniform:R|radius:F")]
    pub activities: Option<String>,
    /// Reference weights; uniform 1/4 otherwise.
    #[arg(long, value_name = "FILE|uniform:R")]
    pub mu: Option<String>,
    /// Site subset file (whitespace-separated site ids); all sites otherwise.
    #[arg(long, value_name = "FILE")]
    pub lambda: Option<String>,
    /// Fraction of the sharp radius for `radius:` activities.
    #[arg(long, value_name = "RATIONAL", default_value = "1")]
    pub f: String,
    /// Neighborhood enumeration cap.
    #[arg(long, value_name = "N")]
    pub cap: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Fp,
    Dobrushin,
}

impl From<ObjectiveArg> for Objective {
    fn from(a: ObjectiveArg) -> Self {
        match a {
            ObjectiveArg::Fp => Objective::FernandezProcacci,
            ObjectiveArg::Dobrushin => Objective::Dobrushin,
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn parse_flag_rational(s: &str, flag: &str) -> Result<Rational> {
    parse_rational(s).ok_or_else(|| usage(format!("{flag} expects a rational, got `{s}`")))
}

fn parse_family_spec(spec: &str) -> Result<PolymerSystem> {
    let (kind, size) = spec
        .split_once(':')
        .ok_or_else(|| usage(format!("--family expects `kind:N`, got `{spec}`")))?;
    let n: usize = size
        .parse()
        .map_err(|_| usage(format!("--family size must be an integer, got `{size}`")))?;
    let family = match kind {
        "path" => Family::Path(n),
        "cycle" => Family::Cycle(n),
        "complete" => Family::Complete(n),
        "edgeless" => Family::Edgeless(n),
        other => return Err(usage(format!("unknown family `{other}`"))),
    };
    make_family(family)
}

fn parse_subsetgas_spec(spec: &str) -> Result<SubsetGasSpec> {
    let mut sites: Option<usize> = None;
    let mut max_size: Option<usize> = None;
    let mut edges = "none";
    for part in spec.split(',') {
        let (key, value) = part
            .split_once(':')
            .ok_or_else(|| usage(format!("--subsetgas part `{part}` is not `key:value`")))?;
        match key {
            "space" => {
                sites = Some(value.parse().map_err(|_| {
                    usage(format!("--subsetgas space must be an integer, got `{value}`"))
                })?)
            }
            "maxsize" => {
                max_size = Some(value.parse().map_err(|_| {
                    usage(format!("--subsetgas maxsize must be an integer, got `{value}`"))
                })?)
            }
            "edges" => edges = value,
            other => return Err(usage(format!("unknown --subsetgas key `{other}`"))),
        }
    }
    let sites = sites.ok_or_else(|| usage("--subsetgas needs `space:N`"))?;
    let max_size = max_size.ok_or_else(|| usage("--subsetgas needs `maxsize:K`"))?;
    let mut out = SubsetGasSpec::new(sites, max_size)?;
    match edges {
        "none" => {}
        "path" => out = out.with_path_edges()?,
        "cycle" => {
            out = out.with_path_edges()?;
            if sites > 2 {
                out.add_edge(sites - 1, 0)?;
            }
        }
        "complete" => {
            for u in 0..sites {
                for v in u + 1..sites {
                    out.add_edge(u, v)?;
                }
            }
        }
        other => return Err(usage(format!("unknown --subsetgas edges `{other}`"))),
    }
    Ok(out)
}

/// System plus a stable one-token description for the report header.
fn resolve_system(source: &SourceArgs) -> Result<(PolymerSystem, String)> {
    match (&source.system, &source.family, &source.subsetgas) {
        (Some(path), None, None) => Ok((io::parse_system_file(path)?, format!("file:{path}"))),
        (None, Some(spec), None) => Ok((parse_family_spec(spec)?, format!("family:{spec}"))),
        (None, None, Some(spec)) => {
            let gas = build_subset_gas(&parse_subsetgas_spec(spec)?)?;
            Ok((gas.system, format!("subsetgas:{spec}")))
        }
        _ => Err(usage("give exactly one of --system, --family, --subsetgas")),
    }
}

/// Subset gas plus description; `--system` names a gas spec file here.
fn resolve_gas(source: &SourceArgs) -> Result<(SubsetGas, String)> {
    match (&source.system, &source.family, &source.subsetgas) {
        (Some(path), None, None) => Ok((
            build_subset_gas(&io::parse_subset_gas_file(path)?)?,
            format!("file:{path}"),
        )),
        (None, None, Some(spec)) => Ok((
            build_subset_gas(&parse_subsetgas_spec(spec)?)?,
            format!("subsetgas:{spec}"),
        )),
        _ => Err(usage("pressure needs --subsetgas or --system <gas spec file>")),
    }
}

fn resolve_mu(
    spec: &Option<String>,
    n: usize,
    default: Option<Rational>,
) -> Result<Option<(MuVector, String)>> {
    match spec {
        Some(s) => {
            if let Some(value) = s.strip_prefix("uniform:") {
                let r = parse_flag_rational(value, "--mu uniform:")?;
                Ok(Some((MuVector::uniform(n, r.clone())?, format!("uniform {}", ratio_str(&r)))))
            } else {
                Ok(Some((io::parse_mu_file(s, n)?, format!("file:{s}"))))
            }
        }
        None => match default {
            Some(r) => Ok(Some((
                MuVector::uniform(n, r.clone())?,
                format!("uniform {}", ratio_str(&r)),
            ))),
            None => Ok(None),
        },
    }
}

fn resolve_activities(
    spec: &Option<String>,
    system: &PolymerSystem,
    mu: Option<&MuVector>,
    cap: usize,
) -> Result<(ActivityVector, String)> {
    let s = spec
        .as_ref()
        .ok_or_else(|| usage("--activities is required (file, uniform:<r>, or radius:<f>)"))?;
    if let Some(value) = s.strip_prefix("uniform:") {
        let r = parse_flag_rational(value, "--activities uniform:")?;
        Ok((
            ActivityVector::uniform(system.len(), r.clone()),
            format!("uniform {}", ratio_str(&r)),
        ))
    } else if let Some(value) = s.strip_prefix("radius:") {
        let f = parse_flag_rational(value, "--activities radius:")?;
        let mu = mu.ok_or_else(|| usage("--activities radius:<f> requires --mu"))?;
        let radii = fp_radii(system, mu, cap)?;
        let values = (0..system.len()).map(|x| &f * radii.get(x)).collect();
        Ok((ActivityVector::from_values(values), format!("radius {}", ratio_str(&f))))
    } else {
        Ok((io::parse_activities_file(s, system.len())?, format!("file:{s}")))
    }
}

fn resolve_volume(spec: &Option<String>, n: usize) -> Result<(PolymerSubset, String)> {
    match spec {
        Some(path) => Ok((io::parse_lambda_file(path, n)?, format!("file:{path}"))),
        None => Ok((full_range(n), "all".to_string())),
    }
}

fn parse_grid(spec: &str) -> Result<MuGrid> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!("--grid expects `lo:hi:steps`, got `{spec}`")));
    }
    let lo = parse_flag_rational(parts[0], "--grid lo")?;
    let hi = parse_flag_rational(parts[1], "--grid hi")?;
    let steps: usize = parts[2]
        .parse()
        .map_err(|_| usage(format!("--grid steps must be an integer, got `{}`", parts[2])))?;
    Ok(MuGrid { lo, hi, steps })
}

fn subset_token(s: &BTreeSet<usize>) -> String {
    let inner: Vec<String> = s.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// `num/den~decimal` token.
fn rd(r: &Rational) -> String {
    format!("{}~{}", ratio_str(r), sig12(crate::numeric::rational_to_f64(r)))
}

struct Report {
    text: String,
}

impl Report {
    fn new(command: &str, seed: u64) -> Self {
        let mut text = String::new();
        text.push_str(&format!("polygas {command}\n"));
        text.push_str(&format!("seed {seed}\n"));
        Report { text }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn checks(&mut self, report: &VerificationReport) {
        self.text.push_str(&report.render_lines());
    }

    fn finish(mut self, checks: &VerificationReport) -> (String, i32) {
        self.text.push_str(&checks.summary_line());
        self.text.push('\n');
        let code = if checks.all_passed() { 0 } else { 1 };
        (self.text, code)
    }
}

fn emit(output: &OutputArgs, text: &str) -> Result<()> {
    if let Some(path) = &output.out {
        io::write_text(Path::new(path), text)?;
    }
    Ok(())
}

fn cmd_z(args: &ZArgs) -> Result<(String, i32)> {
    let (system, desc) = resolve_system(&args.source)?;
    let cap = args.cap.unwrap_or(BRUTE_CAP);
    let mu = resolve_mu(&args.mu, system.len(), None)?;
    let (w, w_desc) =
        resolve_activities(&args.activities, &system, mu.as_ref().map(|m| &m.0), cap)?;
    let (volume, vol_desc) = resolve_volume(&args.lambda, system.len())?;

    let mut report = Report::new("z", args.output.seed);
    report.line(format!("system {desc} polymers={}", system.len()));
    report.line(format!("volume {vol_desc} {}", subset_token(&volume)));
    report.line(format!("activities {w_desc}"));

    let brute = z_brute(&system, &volume, &w, cap)?;
    let recursive = z_recursive_seeded(&system, &volume, &w, args.output.seed)?;
    report.line(format!("Z = {}", rd(&brute)));

    let mut checks = VerificationReport::new();
    checks.push(
        "z-methods-agree",
        format!("n={}", volume.len()),
        if brute == recursive { CheckStatus::Pass } else { CheckStatus::Fail },
        format!("brute={} recursive={}", ratio_str(&brute), ratio_str(&recursive)),
    );
    report.checks(&checks);
    Ok(report.finish(&checks))
}

fn cmd_radii(args: &RadiiArgs) -> Result<(String, i32)> {
    let (system, desc) = resolve_system(&args.source)?;
    let cap = args.cap.unwrap_or(NEIGHBORHOOD_CAP);
    let mut report = Report::new("radii", args.output.seed);
    report.line(format!("system {desc} polymers={}", system.len()));

    let mu = if args.optimize {
        if args.mu.is_some() {
            return Err(usage("--optimize and --mu are mutually exclusive"));
        }
        let grid = parse_grid(&args.grid)?;
        let objective: Objective = args.objective.into();
        let best = optimize_mu_uniform(&system, objective, &grid, 60, cap)?;
        report.line(format!(
            "optimize objective={} grid={}:{}:{}",
            objective.name(),
            ratio_str(&grid.lo),
            ratio_str(&grid.hi),
            grid.steps
        ));
        report.line(format!(
            "optimum mu={} radius={} boundary={}",
            ratio_str(&best.mu),
            rd(&best.radius),
            best.at_upper_boundary
        ));
        let mu = MuVector::uniform(system.len(), best.mu.clone())?;
        report.line(format!("mu uniform {}", ratio_str(&best.mu)));
        mu
    } else {
        let (mu, mu_desc) = resolve_mu(&args.mu, system.len(), None)?
            .ok_or_else(|| usage("radii needs --mu or --optimize"))?;
        report.line(format!("mu {mu_desc}"));
        mu
    };

    let table = radii_report(&system, &mu, cap)?;
    for row in &table.rows {
        report.line(format!(
            "radius x={} mu={} fp={} dobrushin={}",
            row.id,
            ratio_str(&row.mu),
            rd(&row.fp),
            rd(&row.dobrushin)
        ));
    }
    report.line(format!(
        "min fp={} dobrushin={}",
        rd(&table.min_fp),
        rd(&table.min_dobrushin)
    ));

    let mut checks = VerificationReport::new();
    checks.push(
        "domination",
        format!("n={}", system.len()),
        if table.domination_ok { CheckStatus::Pass } else { CheckStatus::Fail },
        format!("pairs={}", system.len()),
    );
    report.checks(&checks);
    Ok(report.finish(&checks))
}

fn cmd_verify(args: &VerifyArgs) -> Result<(String, i32)> {
    let (system, desc) = resolve_system(&args.source)?;
    let cap = args.cap.unwrap_or(EXHAUSTIVE_CAP);
    let f = parse_flag_rational(&args.f, "--f")?;
    if f.is_negative() {
        return Err(usage("--f must be nonnegative"));
    }
    let (mu, mu_desc) = resolve_mu(&args.mu, system.len(), Some(Rational::one()))?
        .expect("default supplied");
    let (volume, vol_desc) = resolve_volume(&args.lambda, system.len())?;

    let mut report = Report::new("verify", args.output.seed);
    report.line(format!("system {desc} polymers={}", system.len()));
    report.line(format!("volume {vol_desc} {}", subset_token(&volume)));
    report.line(format!("mu {mu_desc}"));
    report.line(format!("f {}", ratio_str(&f)));

    let radii = fp_radii(&system, &mu, cap)?;
    let scaled = |g: &Rational| -> ActivityVector {
        ActivityVector::from_values((0..system.len()).map(|x| g * radii.get(x)).collect())
    };

    let mut checks = VerificationReport::new();
    for (num, den) in DEFAULT_FRACTIONS {
        let g = ratio(num, den);
        let label = format!("f={}", ratio_str(&g));
        checks.merge(verify_ratio_inequality(&system, &volume, &scaled(&g), &mu, cap, &label)?);
    }
    for (num, den) in DEFAULT_FRACTIONS {
        let g = ratio(num, den);
        let label = format!("f={}", ratio_str(&g));
        checks.merge(verify_log_bound(&system, &volume, &scaled(&g), &mu, cap, &label)?);
    }
    let p = scaled(&f);
    let label = format!("f={}", ratio_str(&f));
    for &x in &volume {
        checks.merge(verify_chain_steps(&system, &volume, x, &p, &mu, cap, &label)?);
    }
    checks.merge(verify_alternating_sign(&system, 4)?);
    report.checks(&checks);
    Ok(report.finish(&checks))
}

fn cmd_mayer(args: &MayerArgs) -> Result<(String, i32)> {
    let (system, desc) = resolve_system(&args.source)?;
    let mu = resolve_mu(&args.mu, system.len(), None)?;
    let (w, w_desc) =
        resolve_activities(&args.activities, &system, mu.as_ref().map(|m| &m.0), BRUTE_CAP)?;
    let (volume, vol_desc) = resolve_volume(&args.lambda, system.len())?;
    let limits = MayerLimits::default().with_order(args.order);

    let mut report = Report::new("mayer", args.output.seed);
    report.line(format!("system {desc} polymers={}", system.len()));
    report.line(format!("volume {vol_desc} {}", subset_token(&volume)));
    report.line(format!("activities {w_desc}"));
    report.line(format!("order {}", args.order));

    let sums = mayer_partial_sums(&system, &volume, &w, args.order, &limits)?;
    for (i, sum) in sums.iter().enumerate() {
        report.line(format!("order {} sum={}", i + 1, rd(sum)));
    }
    let z = z_recursive_seeded(&system, &volume, &w, args.output.seed)?;
    if z.is_positive() {
        let exact = ln_rational(&z);
        let gap = (exact - crate::numeric::rational_to_f64(sums.last().expect("order >= 1")))
            .abs();
        report.line(format!("logz exact={}", sig12(exact)));
        report.line(format!("gap {}", sig12(gap)));
    } else {
        report.line(format!("logz unavailable Z={}", ratio_str(&z)));
    }
    let checks = VerificationReport::new();
    Ok(report.finish(&checks))
}

fn cmd_pressure(args: &PressureArgs) -> Result<(String, i32)> {
    let (gas, desc) = resolve_gas(&args.source)?;
    let cap = args.cap.unwrap_or(NEIGHBORHOOD_CAP);
    let f = parse_flag_rational(&args.f, "--f")?;
    if f.is_negative() {
        return Err(usage("--f must be nonnegative"));
    }
    let (mu, mu_desc) = resolve_mu(&args.mu, gas.system.len(), Some(ratio(1, 4)))?
        .expect("default supplied");
    let activities_spec = args
        .activities
        .clone()
        .unwrap_or_else(|| format!("radius:{}", ratio_str(&f)));
    let (w, w_desc) = resolve_activities(&Some(activities_spec), &gas.system, Some(&mu), cap)?;
    let sites: BTreeSet<usize> = match &args.lambda {
        Some(path) => io::parse_lambda_file(path, gas.sites)?,
        None => (0..gas.sites).collect(),
    };

    let mut report = Report::new("pressure", args.output.seed);
    report.line(format!("gas {desc} sites={} polymers={}", gas.sites, gas.system.len()));
    report.line(format!("lambda {}", subset_token(&sites)));
    report.line(format!("mu {mu_desc}"));
    report.line(format!("activities {w_desc}"));

    let checks = verify_pressure_bound(&gas, &sites, &w, &mu, cap)?;
    report.checks(&checks);
    Ok(report.finish(&checks))
}

/// Runs one parsed command to a `(report text, exit code)` pair. The caller
/// prints the text; `--out` also writes it to a file.
pub fn run(cli: Cli) -> Result<(String, i32)> {
    let (text, code, output) = match &cli.command {
        Command::Z(args) => {
            let (t, c) = cmd_z(args)?;
            (t, c, args.output.clone())
        }
        Command::Radii(args) => {
            let (t, c) = cmd_radii(args)?;
            (t, c, args.output.clone())
        }
        Command::Verify(args) => {
            let (t, c) = cmd_verify(args)?;
            (t, c, args.output.clone())
        }
        Command::Mayer(args) => {
            let (t, c) = cmd_mayer(args)?;
            (t, c, args.output.clone())
        }
        Command::Pressure(args) => {
            let (t, c) = cmd_pressure(args)?;
            (t, c, args.output.clone())
        }
    };
    emit(&output, &text)?;
    Ok((text, code))
}
