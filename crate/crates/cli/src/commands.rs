//! Argument parsing and the five subcommands.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use hinfcalc::admissibility::{
    admissibility_quadrature, sqrt_admissibility_profile, write_profile_csv, ObservationMatrix, ProfileRow,
};
use hinfcalc::calculus::{basis_vector, construct_ga, semigroup_trajectory, spectral_oracle_ga};
use hinfcalc::library::Family;
use hinfcalc::linops::operator_norm;
use hinfcalc::signals::{laplace_boundary, toeplitz_apply};
use hinfcalc::Error as CoreError;

use crate::config::{parse_eps_list, ExperimentConfig, Oracle};
use crate::search::run_search;
use crate::sweep::{csv_string, run_sweep};
use crate::verify::{run_suite, SuiteOptions};
use crate::{svg, CliError, EXIT_BREACH, EXIT_PASS};

#[derive(Debug, Parser)]
#[command(name = "hinfcalc", version, about = "Toeplitz functional calculus experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct g(A) and write it as JSON.
    Calc(CommonArgs),
    /// Square-root admissibility profile as CSV.
    Admiss(CommonArgs),
    /// Norm sweep over generators, functions and eps, as CSV (+ SVG via --dump).
    Sweep(CommonArgs),
    /// Random search over Blaschke products for the largest log ratio.
    Search(SearchArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Generator ID (e.g. `diag:-1,-2`, `jordan:8`) or JSON matrix file; repeatable.
    #[arg(long = "A", value_name = "ID")]
    pub generators: Vec<String>,
    /// Function ID or expression; repeatable.
    #[arg(long = "g", value_name = "EXPR")]
    pub functions: Vec<String>,
    /// Comma-separated eps values; an empty string means none.
    #[arg(long)]
    pub eps: Option<String>,
    /// Grid samples.
    #[arg(long = "N")]
    pub n_samples: Option<usize>,
    /// Grid horizon.
    #[arg(long = "T")]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Extra artifacts: trajectory dumps for calc, SVG chart for sweep.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    /// none, spectral or quadrature.
    #[arg(long)]
    pub oracle: Option<String>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Blaschke factors per candidate (at most 32).
    #[arg(long)]
    pub factors: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Coarser grids (N = 2^12) with 3x tolerances.
    #[arg(long)]
    pub quick: bool,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if !self.generators.is_empty() {
            cfg.generators = self.generators.clone();
        }
        if !self.functions.is_empty() {
            cfg.functions = self.functions.clone();
        }
        if let Some(eps) = &self.eps {
            cfg.eps = parse_eps_list(eps)?;
        }
        cfg.n_samples = self.n_samples.or(cfg.n_samples);
        cfg.horizon = self.horizon.or(cfg.horizon);
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if self.dump.is_some() {
            cfg.dump = self.dump.clone();
        }
        if let Some(o) = &self.oracle {
            cfg.oracle = o.parse()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: Cli, stdout: &mut impl Write, stderr: &mut impl Write) -> u8 {
    let result = match cli.command {
        Command::Calc(args) => args.resolve().and_then(|c| cmd_calc(&c, stdout)),
        Command::Admiss(args) => args.resolve().and_then(|c| cmd_admiss(&c, stdout)),
        Command::Sweep(args) => args.resolve().and_then(|c| cmd_sweep(&c, stdout, stderr)),
        Command::Search(args) => args.common.resolve().and_then(|mut c| {
            c.factors = args.factors.unwrap_or(c.factors);
            c.iterations = args.iterations.unwrap_or(c.iterations);
            c.validate()?;
            cmd_search(&c, stdout)
        }),
        Command::Verify(args) => args.common.resolve().and_then(|c| cmd_verify(&c, args.quick, stdout)),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn write_output(path: Option<&Path>, text: &str, stdout: &mut impl Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn require_generators(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if cfg.generators.is_empty() {
        return Err(CliError::Invalid("no generator given (use --A)".into()));
    }
    Ok(())
}

/// `g(A)` for every (generator, function) pair. One pair with `--out` writes
/// that file; several pairs treat `--out` as a directory of `calc_<k>.json`.
pub fn cmd_calc(cfg: &ExperimentConfig, stdout: &mut impl Write) -> Result<u8, CliError> {
    require_generators(cfg)?;
    if cfg.oracle == Oracle::Quadrature {
        return Err(CliError::Invalid("the quadrature oracle applies to `admiss`".into()));
    }
    let generators = cfg.generators()?;
    let functions = if cfg.functions.is_empty() {
        vec![("one".to_string(), hinfcalc::library::builtin_function("one")?)]
    } else {
        cfg.functions()?
    };
    let pairs: Vec<_> = generators
        .iter()
        .flat_map(|a| functions.iter().map(move |f| (a, f)))
        .collect();
    if pairs.len() > 1 {
        if let Some(dir) = &cfg.out {
            fs::create_dir_all(dir)?;
        }
    }
    let header = if cfg.oracle == Oracle::Spectral { "k\tgenerator\tg\tresidual\toracle_error" } else { "k\tgenerator\tg\tresidual" };
    writeln!(stdout, "{header}")?;
    for (k, (a, (g_id, g))) in pairs.iter().enumerate() {
        let grid = cfg.grid_for(a)?;
        let result = construct_ga(a, g, &grid)?;
        let mut line = format!("{k}\t{}\t{g_id}\t{:e}", a.label(), result.extraction_residual);
        if cfg.oracle == Oracle::Spectral {
            match spectral_oracle_ga(a, g) {
                Ok(o) => {
                    let err = operator_norm(&(&result.ga - &o))? / operator_norm(&o)?.max(1.0);
                    line += &format!("\t{err:e}");
                }
                Err(CoreError::OracleUnavailable(_)) => line += "\tn/a",
                Err(e) => return Err(e.into()),
            }
        }
        writeln!(stdout, "{line}")?;
        for w in &result.warnings {
            writeln!(stdout, "# warning: {w}")?;
        }
        let json = result.to_json()?;
        match (&cfg.out, pairs.len()) {
            (Some(path), 1) => fs::write(path, json)?,
            (Some(dir), _) => fs::write(dir.join(format!("calc_{k}.json")), json)?,
            (None, _) => writeln!(stdout, "{json}")?,
        }
        if k == 0 {
            if let Some(dir) = &cfg.dump {
                dump_signals(a, g, &grid, dir)?;
            }
        }
    }
    Ok(EXIT_PASS)
}

/// Trajectory `e^{At}e₀`, its boundary transform and its multiplier image.
fn dump_signals(
    a: &hinfcalc::GeneratorMatrix,
    g: &hinfcalc::FuncExpr,
    grid: &hinfcalc::TimeGrid,
    dir: &Path,
) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let traj = semigroup_trajectory(a, &basis_vector(a.dim(), 0), grid)?;
    let mut f = fs::File::create(dir.join("trajectory.csv"))?;
    traj.write_csv(&mut f)?;
    let mut f = fs::File::create(dir.join("spectrum.csv"))?;
    laplace_boundary(&traj).write_csv(&mut f)?;
    let mut f = fs::File::create(dir.join("output.csv"))?;
    toeplitz_apply(g, &traj)?.write_csv(&mut f)?;
    Ok(())
}

/// `(κ, κ*)` of the square roots per generator; with `--oracle quadrature`
/// the quadrature rows are added and must agree to 1e-4.
pub fn cmd_admiss(cfg: &ExperimentConfig, stdout: &mut impl Write) -> Result<u8, CliError> {
    require_generators(cfg)?;
    let mut rows = Vec::new();
    let mut breaches = Vec::new();
    for a in cfg.generators()? {
        let family = crate::config::family_of(&a);
        let profile = sqrt_admissibility_profile(&a)?;
        rows.push(ProfileRow::from_profile(family.clone(), a.dim(), &profile));
        if cfg.oracle == Oracle::Quadrature {
            let adj = a.adjoint()?;
            let q = (
                admissibility_quadrature(&a, &ObservationMatrix::sqrt_minus(&a)?, &cfg.grid_for(&a)?)?,
                admissibility_quadrature(&adj, &ObservationMatrix::sqrt_minus(&adj)?, &cfg.grid_for(&adj)?)?,
            );
            for (g, q) in [(&profile.0, &q.0), (&profile.1, &q.1)] {
                if (g.kappa - q.kappa).abs() > 1e-4 * g.kappa {
                    breaches.push(format!("{}: gramian {} vs quadrature {}", a.label(), g.kappa, q.kappa));
                }
            }
            rows.push(ProfileRow::from_profile(family, a.dim(), &q));
        }
    }
    let mut buf = Vec::new();
    write_profile_csv(&rows, &mut buf)?;
    write_output(cfg.out.as_deref(), &String::from_utf8_lossy(&buf), stdout)?;
    if breaches.is_empty() {
        Ok(EXIT_PASS)
    } else {
        Err(CliError::Breach(breaches.join("; ")))
    }
}

/// Default sweep generators: every family at n ∈ {2, 8, 32}.
pub fn default_sweep_generators() -> Vec<String> {
    Family::ALL
        .iter()
        .flat_map(|f| [2, 8, 32].map(|n| format!("{}:{n}", f.name())))
        .collect()
}

pub fn cmd_sweep(cfg: &ExperimentConfig, stdout: &mut impl Write, stderr: &mut impl Write) -> Result<u8, CliError> {
    let mut cfg = cfg.clone();
    if cfg.generators.is_empty() {
        cfg.generators = default_sweep_generators();
    }
    let outcome = run_sweep(&cfg)?;
    let csv = csv_string(&outcome.records)?;
    write_output(cfg.out.as_deref(), &csv, stdout)?;
    if let Some(path) = &cfg.dump {
        fs::write(path, svg::render_csv(&csv)?)?;
    }
    for w in &outcome.warnings {
        writeln!(stderr, "warning: {w}")?;
    }
    if outcome.passed() {
        Ok(EXIT_PASS)
    } else {
        Err(CliError::Breach(format!(
            "{} row(s) violate the certificate bound: {}",
            outcome.breaches.len(),
            outcome.breaches.join("; ")
        )))
    }
}

/// Search at the first configured generator and eps.
pub fn cmd_search(cfg: &ExperimentConfig, stdout: &mut impl Write) -> Result<u8, CliError> {
    require_generators(cfg)?;
    let a = cfg.generators()?.remove(0);
    let eps = *cfg
        .eps
        .first()
        .ok_or_else(|| CliError::Invalid("search needs an eps value".into()))?;
    let report = run_search(&a, eps, cfg.factors, cfg.iterations, cfg.seed, &cfg.grid_for(&a)?)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Invalid(e.to_string()))? + "\n";
    write_output(cfg.out.as_deref(), &json, stdout)?;
    Ok(EXIT_PASS)
}

pub fn cmd_verify(cfg: &ExperimentConfig, quick: bool, stdout: &mut impl Write) -> Result<u8, CliError> {
    let options = SuiteOptions {
        quick,
        seed: cfg.seed,
        extra_generators: cfg.generators()?,
    };
    let outcomes = run_suite(&options);
    for o in &outcomes {
        writeln!(stdout, "{o}")?;
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    writeln!(stdout, "{} of {} criteria passed", outcomes.len() - failed, outcomes.len())?;
    Ok(if failed == 0 { EXIT_PASS } else { EXIT_BREACH })
}
