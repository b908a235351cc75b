//! Acceptance suite: eleven numbered criteria with closed-form or oracle
//! targets, each reported as one pass/fail line.

use std::fmt;
use std::time::Instant;

use hinfcalc::admissibility::{
    admissibility_gramian, admissibility_quadrature, check_intertwining_on_grid, sqrt_admissibility_profile, ObservationMatrix,
};
use hinfcalc::calculus::{
    construct_ga, fit_analyticity_constants, fit_analyticity_constants_with_omega, hille_phillips_ga,
    spectral_oracle_ga, CertificateEngine,
};
use hinfcalc::funcspec::{sup_norm, Expr};
use hinfcalc::library::{builtin_function, builtin_generator, random_blaschke, reference_functions, Family, REFERENCE_IDS};
use hinfcalc::linops::{identity, matrix_exponential, operator_norm, resolvent};
use hinfcalc::signals::{l2_norm, toeplitz_apply, DEFAULT_SAMPLES};
use hinfcalc::{CMat, FrequencyGrid, FuncExpr, GeneratorMatrix, KernelFunction, TimeGrid, Trajectory};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{default_eps, ExperimentConfig};
use crate::svg;
use crate::sweep::{csv_string, run_sweep, SweepOutcome, SweepRecord, CERTIFICATE_SLACK};

pub const QUICK_SAMPLES: usize = 1 << 12;
pub const QUICK_TOLERANCE_FACTOR: f64 = 3.0;
const REFINEMENT_BASE: usize = 1 << 12;

#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    /// `N = 2¹²` and tolerances relaxed threefold.
    pub quick: bool,
    pub seed: u64,
    /// Additional generators checked in the oracle-equivalence criterion.
    pub extra_generators: Vec<GeneratorMatrix>,
}

impl SuiteOptions {
    pub fn samples(&self) -> usize {
        if self.quick {
            QUICK_SAMPLES
        } else {
            DEFAULT_SAMPLES
        }
    }

    pub fn tol(&self, base: f64) -> f64 {
        if self.quick {
            base * QUICK_TOLERANCE_FACTOR
        } else {
            base
        }
    }

    fn grid(&self, a: &GeneratorMatrix) -> hinfcalc::Result<TimeGrid> {
        TimeGrid::for_abscissa(a.spectral_abscissa(), self.samples())
    }
}

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub index: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2}. {}: {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.index,
            self.title,
            self.detail,
            self.seconds
        )
    }
}

pub const TITLES: [&str; 11] = [
    "toeplitz contractivity",
    "oracle equivalence",
    "calculus axioms",
    "hille-phillips extension",
    "commutation with the semigroup",
    "observation intertwining",
    "admissibility engine",
    "analyticity constant",
    "square-function certificate",
    "boundedness for self-adjoint generators",
    "log-growth probe",
];

/// Runtime budgets in seconds, where one applies.
fn budget(index: usize) -> Option<f64> {
    match index {
        1 => Some(60.0),
        2 => Some(300.0),
        11 => Some(600.0),
        _ => None,
    }
}

type Check = hinfcalc::Result<(bool, String)>;

fn rel_err(a: &CMat, reference: &CMat) -> hinfcalc::Result<f64> {
    Ok(operator_norm(&(a - reference))? / operator_norm(reference)?.max(1.0))
}

fn c64(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Runs the criteria in order, sharing one sweep between 9, 10 and 11.
pub struct Suite {
    options: SuiteOptions,
    sweep: Option<(Result<SweepOutcome, String>, f64)>,
}

impl Suite {
    pub fn new(options: SuiteOptions) -> Self {
        Suite { options, sweep: None }
    }

    pub fn run(&mut self, index: usize) -> CriterionOutcome {
        let start = Instant::now();
        let result = match index {
            1 => self.contractivity(),
            2 => self.oracle_equivalence(),
            3 => self.axioms(),
            4 => self.hille_phillips(),
            5 => self.commutation(),
            6 => self.intertwining(),
            7 => self.admissibility(),
            8 => self.analyticity(),
            9 => self.certificate(),
            10 => self.boundedness(),
            11 => self.log_growth(),
            _ => Ok((false, format!("no criterion {index}"))),
        };
        let mut seconds = start.elapsed().as_secs_f64();
        if index == 11 {
            // The sweep ran under criterion 9; charge it here too.
            seconds += self.sweep.as_ref().map_or(0.0, |s| s.1);
        }
        let (mut passed, mut detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
        if let Some(limit) = budget(index) {
            if seconds > limit {
                passed = false;
                detail += &format!("; exceeded {limit} s budget");
            }
        }
        CriterionOutcome {
            index,
            title: index.checked_sub(1).and_then(|i| TITLES.get(i)).copied().unwrap_or("unknown"),
            passed,
            detail,
            seconds,
        }
    }

    fn contractivity(&self) -> Check {
        let grid = TimeGrid::for_abscissa(-1.0, self.options.samples())?;
        let freq = FrequencyGrid::default();
        let mut rng = ChaCha8Rng::seed_from_u64(self.options.seed ^ 0xc0de);
        let limit = 1.0 + self.options.tol(0.02);
        let trials = 100;
        let mut worst: f64 = 0.0;
        for trial in 0..trials {
            let g = random_function(trial, &mut rng)?;
            let f = random_signal(&grid, &mut rng)?;
            let sup = sup_norm(&g, &freq).value;
            let ratio = l2_norm(&toeplitz_apply(&g, &f)?) / (sup * l2_norm(&f));
            worst = worst.max(ratio);
        }
        Ok((worst <= limit, format!("{trials} pairs, max ‖M_g f‖/(‖g‖∞‖f‖) = {worst:.6} (limit {limit})")))
    }

    fn oracle_equivalence(&self) -> Check {
        let tol = self.options.tol(1e-3);
        let functions = reference_functions()?;
        let mut worst = (0.0, String::new());
        let mut cases = 0;
        let mut generators = Vec::new();
        for family in Family::ALL {
            for n in [2, 8, 32] {
                generators.push(family.build(n)?);
            }
        }
        let mut skipped = Vec::new();
        generators.extend(self.options.extra_generators.iter().cloned());
        for a in &generators {
            let grid = self.options.grid(a)?;
            for (id, g) in &functions {
                let oracle = match spectral_oracle_ga(a, g) {
                    Ok(o) => o,
                    Err(hinfcalc::Error::OracleUnavailable(_)) => {
                        skipped.push(a.label().to_string());
                        break;
                    }
                    Err(e) => return Err(e),
                };
                let err = rel_err(&construct_ga(a, g, &grid)?.ga, &oracle)?;
                cases += 1;
                if err > worst.0 {
                    worst = (err, format!("{} {id}", a.label()));
                }
            }
        }

        // Refinement: the error must fall at every doubling of N. Coarser
        // grids than this under-resolve the stiffest modes, so quick mode
        // uses the same three sizes.
        let base = REFINEMENT_BASE;
        let designated = [("jordan:8", "cayley"), ("laplacian:8", "blaschke5"), ("random:8", "resolvent")];
        let mut monotone = true;
        let mut trail = Vec::new();
        for (a_id, g_id) in designated {
            let a = builtin_generator(a_id)?;
            let g = builtin_function(g_id)?;
            let oracle = spectral_oracle_ga(&a, &g)?;
            let errs = [base, 2 * base, 4 * base]
                .iter()
                .map(|&n| {
                    let grid = TimeGrid::for_abscissa(a.spectral_abscissa(), n)?;
                    rel_err(&construct_ga(&a, &g, &grid)?.ga, &oracle)
                })
                .collect::<hinfcalc::Result<Vec<_>>>()?;
            monotone &= errs.windows(2).all(|w| w[1] < w[0]);
            trail.push(format!("{a_id} {g_id} {:.1e}>{:.1e}>{:.1e}", errs[0], errs[1], errs[2]));
        }
        let mut detail = format!(
            "{cases} cases, max rel err {:.2e} at {} (tol {tol:.0e}); refinement: {}",
            worst.0,
            worst.1,
            trail.join(", ")
        );
        if !skipped.is_empty() {
            detail += &format!("; no oracle for {}", skipped.join(", "));
        }
        Ok((worst.0 <= tol && monotone, detail))
    }

    fn axioms(&self) -> Check {
        let tol = self.options.tol(1e-3);
        let tol_mult = self.options.tol(3e-3);
        let mut identity_oracle: f64 = 0.0;
        let mut identity_built: f64 = 0.0;
        let mut resolvent_err: f64 = 0.0;
        let mut mult_err: f64 = 0.0;
        let one = builtin_function("one")?;
        let pairs = [("cayley", "resolvent"), ("blaschke5", "shift"), ("boxcar", "cayley"), ("resolvent", "resolvent")];
        for family in Family::ALL {
            let a = family.build(8)?;
            let grid = self.options.grid(&a)?;
            let id = identity(8);
            identity_oracle = identity_oracle.max(rel_err(&spectral_oracle_ga(&a, &one)?, &id)?);
            identity_built = identity_built.max(rel_err(&construct_ga(&a, &one, &grid)?.ga, &id)?);
            for r in [0.5, 2.0] {
                let g = FuncExpr::parse(&format!("1/(s-{r})"))?;
                let direct = resolvent(&a, c64(r))?;
                resolvent_err = resolvent_err.max(rel_err(&construct_ga(&a, &g, &grid)?.ga, &direct)?);
            }
            for (f_id, g_id) in pairs {
                let (f, g) = (builtin_function(f_id)?, builtin_function(g_id)?);
                let fg = FuncExpr::from_ast(Expr::mul(f.ast().clone(), g.ast().clone()))?;
                let product = construct_ga(&a, &f, &grid)?.ga * construct_ga(&a, &g, &grid)?.ga;
                mult_err = mult_err.max(rel_err(&construct_ga(&a, &fg, &grid)?.ga, &product)?);
            }
        }
        let passed = identity_oracle <= 1e-8 && identity_built <= tol && resolvent_err <= tol && mult_err <= tol_mult;
        Ok((
            passed,
            format!(
                "identity {identity_oracle:.1e} (oracle) / {identity_built:.1e} (built), resolvent {resolvent_err:.1e}, multiplicativity {mult_err:.1e}"
            ),
        ))
    }

    fn hille_phillips(&self) -> Check {
        let scalar = builtin_generator("diag:-1")?;
        let boxcar = KernelFunction::boxcar(1.0)?;
        let quad = hille_phillips_ga(&scalar, &boxcar)?[(0, 0)];
        let exact = 1.0 - (-1f64).exp();
        let quad_err = (quad - c64(exact)).norm();
        let tol = self.options.tol(1e-3);
        let mut worst: f64 = 0.0;
        let kernels = [boxcar.clone(), KernelFunction::exponential(0.5, 2.0)?];
        for id in ["diag:-1", "diag:-1,-2", "jordan:8", "random:8"] {
            let a = builtin_generator(id)?;
            let grid = self.options.grid(&a)?;
            for h in &kernels {
                let g = h.laplace().expect("builtin kernels carry their transform");
                worst = worst.max(rel_err(&construct_ga(&a, g, &grid)?.ga, &hille_phillips_ga(&a, h)?)?);
            }
        }
        let quad_tol = self.options.tol(1e-6);
        Ok((
            quad_err <= quad_tol && worst <= tol,
            format!("boxcar on A=-1: {:.7} (|err| {quad_err:.1e}); Toeplitz vs quadrature max {worst:.1e}", quad.re),
        ))
    }

    fn commutation(&self) -> Check {
        let tol = self.options.tol(1e-3);
        let mut worst: f64 = 0.0;
        for family in Family::ALL {
            let a = family.build(8)?;
            let grid = self.options.grid(&a)?;
            let semigroups = [0.05, 0.5, 2.0]
                .iter()
                .map(|&t| matrix_exponential(&a, t))
                .collect::<hinfcalc::Result<Vec<_>>>()?;
            for (_, g) in reference_functions()? {
                let ga = construct_ga(&a, &g, &grid)?.ga;
                let scale = operator_norm(&ga)?;
                for e in &semigroups {
                    worst = worst.max(operator_norm(&(&ga * e - e * &ga))? / scale);
                }
            }
        }
        Ok((worst <= tol, format!("max ‖gA·e^(At) − e^(At)·gA‖/‖gA‖ = {worst:.1e}")))
    }

    fn intertwining(&self) -> Check {
        let tol = self.options.tol(1e-2);
        let mut rng = ChaCha8Rng::seed_from_u64(self.options.seed ^ 0x26);
        let random_c = CMat::from_fn(2, 8, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let triples = [
            ("diag:-1,-2", ObservationMatrix::from_real_rows("ones", &[&[1.0, 1.0]])?, "cayley"),
            ("jordan:8", ObservationMatrix::from_real_rows("ones", &[&[1.0; 8]])?, "blaschke5"),
            ("random:8", ObservationMatrix::new("random", random_c)?, "resolvent"),
            ("laplacian:8", ObservationMatrix::from_real_rows("e0", &[&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]])?, "shift"),
        ];
        let mut worst: f64 = 0.0;
        for (a_id, c, g_id) in &triples {
            let a = builtin_generator(a_id)?;
            let r = check_intertwining_on_grid(&a, c, &builtin_function(g_id)?, &self.options.grid(&a)?)?;
            worst = worst.max(r.deviation);
        }
        let cayley = builtin_function("cayley")?;
        let mut kappas = Vec::new();
        let mut finite = true;
        for n in [2, 4, 8, 16, 32, 64, 128] {
            let a = Family::Jordan.build(n)?;
            let row = vec![1.0 / (n as f64).sqrt(); n];
            let c = ObservationMatrix::from_real_rows("mean", &[&row])?;
            let r = check_intertwining_on_grid(&a, &c, &cayley, &self.options.grid(&a)?)?;
            worst = worst.max(r.deviation);
            finite &= r.kappa.is_finite();
            kappas.push(format!("{n}:{:.4}", r.kappa));
        }
        Ok((
            worst <= tol && finite,
            format!("max deviation {worst:.1e} (tol {tol:.0e}); κ(C·gA) for jordan n = {}", kappas.join(" ")),
        ))
    }

    fn admissibility(&self) -> Check {
        let half_root = std::f64::consts::FRAC_1_SQRT_2;
        let tol = self.options.tol(1e-4);
        let scalar = builtin_generator("diag:-1")?;
        let one = ObservationMatrix::from_real_rows("1", &[&[1.0]])?;
        let g_scalar = admissibility_gramian(&scalar, &one)?.kappa;
        let q_scalar = admissibility_quadrature(&scalar, &one, &self.options.grid(&scalar)?)?.kappa;
        let scalar_ok = (g_scalar - half_root).abs() <= tol && (q_scalar - half_root).abs() <= tol;

        let mut rng = ChaCha8Rng::seed_from_u64(self.options.seed ^ 0xad);
        let random_c = CMat::from_fn(2, 8, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let pairs = [
            ("diag:-1,-2", ObservationMatrix::from_real_rows("ones", &[&[1.0, 1.0]])?),
            ("jordan:8", ObservationMatrix::from_real_rows("ones", &[&[1.0; 8]])?),
            ("random:8", ObservationMatrix::new("random", random_c)?),
            ("block:3:-1", ObservationMatrix::from_real_rows("e0", &[&[1.0, 0.0, 0.0]])?),
        ];
        let mut worst_agree: f64 = 0.0;
        for (id, c) in &pairs {
            let a = builtin_generator(id)?;
            let g = admissibility_gramian(&a, c)?.kappa;
            let q = admissibility_quadrature(&a, c, &self.options.grid(&a)?)?.kappa;
            worst_agree = worst_agree.max((g - q).abs() / g);
        }

        let mut worst_profile: f64 = 0.0;
        for family in [Family::Geometric, Family::Laplacian] {
            for n in [1, 2, 4, 8, 16, 32, 64, 128] {
                let (k, ks) = sqrt_admissibility_profile(&family.build(n)?)?;
                worst_profile = worst_profile.max((k.kappa - half_root).abs()).max((ks.kappa - half_root).abs());
            }
        }
        let profile_tol = self.options.tol(1e-8);
        Ok((
            scalar_ok && worst_agree <= tol && worst_profile <= profile_tol,
            format!(
                "scalar κ {g_scalar:.6} (gramian) / {q_scalar:.6} (quadrature); max method gap {worst_agree:.1e}; self-adjoint profile max |κ − 1/√2| {worst_profile:.1e}"
            ),
        ))
    }

    fn analyticity(&self) -> Check {
        let target = (2.0 * std::f64::consts::E).sqrt().recip();
        let tol = self.options.tol(1e-4);
        let mut worst: f64 = 0.0;
        let mut cases = Vec::new();
        for a in [
            Family::Geometric.build(1)?,
            Family::Geometric.build(8)?,
            Family::Geometric.build(32)?,
            builtin_generator("diag:-1,-1")?,
            builtin_generator("diag:-0.5,-3,-40")?,
        ] {
            let fit = fit_analyticity_constants_with_omega(&a, 0.0)?;
            worst = worst.max((fit.m - target).abs());
            cases.push(a.label().to_string());
        }
        let jordan = fit_analyticity_constants(&Family::Jordan.build(8)?)?;
        Ok((
            worst <= tol && jordan.m.is_finite(),
            format!(
                "max |M − (2e)^(-1/2)| = {worst:.1e} over {}; jordan:8 M = {:.4} at ω = {}",
                cases.join(", "),
                jordan.m,
                jordan.omega
            ),
        ))
    }

    /// Acceptance sweep: the stiff and non-normal families up to n = 128,
    /// the random family up to 32, the reference functions and the default eps grid.
    pub fn sweep_config(&self) -> ExperimentConfig {
        let mut generators = Vec::new();
        for family in [Family::Geometric, Family::Laplacian, Family::Jordan] {
            for n in [2, 8, 32, 128] {
                generators.push(format!("{}:{n}", family.name()));
            }
        }
        for n in [2, 8, 32] {
            generators.push(format!("random:{n}"));
        }
        ExperimentConfig {
            generators,
            functions: REFERENCE_IDS.iter().map(|s| s.to_string()).collect(),
            eps: default_eps(),
            n_samples: Some(self.options.samples()),
            seed: self.options.seed,
            ..Default::default()
        }
    }

    fn sweep(&mut self) -> Result<&SweepOutcome, String> {
        if self.sweep.is_none() {
            let start = Instant::now();
            let outcome = run_sweep(&self.sweep_config()).map_err(|e| e.to_string());
            self.sweep = Some((outcome, start.elapsed().as_secs_f64()));
        }
        match &self.sweep {
            Some((Ok(outcome), _)) => Ok(outcome),
            Some((Err(e), _)) => Err(e.clone()),
            None => unreachable!(),
        }
    }

    fn certificate(&mut self) -> Check {
        let engine = CertificateEngine::new(&builtin_generator("diag:-1")?)?;
        let mut scalar_err: f64 = 0.0;
        for eps in default_eps() {
            scalar_err = scalar_err.max((engine.certificate(eps)? - (-2.0 * eps).exp()).abs());
        }
        let outcome = match self.sweep() {
            Ok(o) => o,
            Err(e) => return Ok((false, format!("sweep failed: {e}"))),
        };
        let mut tightest: f64 = 0.0;
        for (r, doubled) in outcome.records.iter().zip(&outcome.doubled_norms) {
            tightest = tightest.max(doubled / (r.sup_norm * r.certificate));
        }
        Ok((
            outcome.passed() && !outcome.records.is_empty() && scalar_err <= 1e-6,
            format!(
                "{} rows, {} violations, max ‖g(A)e^(2Aε)‖/(‖g‖∞·cert) = {tightest:.4} (limit {CERTIFICATE_SLACK}); scalar cert vs e^(-2ε) {scalar_err:.1e}",
                outcome.records.len(),
                outcome.breaches.len()
            ),
        ))
    }

    fn boundedness(&mut self) -> Check {
        let limit = 1.0 + self.options.tol(1e-3);
        let outcome = match self.sweep() {
            Ok(o) => o,
            Err(e) => return Ok((false, format!("sweep failed: {e}"))),
        };
        let rows: Vec<&SweepRecord> = outcome
            .records
            .iter()
            .filter(|r| r.family == "geometric" || r.family == "laplacian")
            .collect();
        let worst = rows.iter().map(|r| r.norm / r.sup_norm).fold(0.0, f64::max);
        let max_n = rows.iter().map(|r| r.n).max().unwrap_or(0);
        Ok((
            !rows.is_empty() && worst <= limit,
            format!("{} self-adjoint rows up to n = {max_n}, max ‖g(A)e^(Aε)‖/‖g‖∞ = {worst:.6} (limit {limit})", rows.len()),
        ))
    }

    fn log_growth(&mut self) -> Check {
        let config = self.sweep_config();
        let outcome = match self.sweep() {
            Ok(o) => o.clone(),
            Err(e) => return Ok((false, format!("sweep failed: {e}"))),
        };
        let rows: Vec<&SweepRecord> = outcome.records.iter().filter(|r| r.family == "jordan").collect();
        let bounded = rows.iter().all(|r| r.log_ratio <= r.certificate * CERTIFICATE_SLACK);
        let jordan_breaches = outcome.breaches.iter().filter(|b| b.starts_with("jordan")).count();
        let peak = rows.iter().map(|r| r.log_ratio).fold(0.0, f64::max);

        // Determinism: a rerun of the small Jordan members must reproduce
        // their rows of the full sweep byte for byte, and the chart with them.
        let rerun_config = ExperimentConfig {
            generators: ["jordan:2", "jordan:8", "jordan:32"].map(String::from).to_vec(),
            ..config
        };
        let expected: Vec<SweepRecord> = outcome
            .records
            .iter()
            .filter(|r| r.family == "jordan" && r.n <= 32)
            .cloned()
            .collect();
        let first = csv_string(&run_sweep(&rerun_config).map_err(to_core)?.records).map_err(to_core)?;
        let second = csv_string(&run_sweep(&rerun_config).map_err(to_core)?.records).map_err(to_core)?;
        let reference = csv_string(&expected).map_err(to_core)?;
        let svg_a = svg::render_csv(&first).map_err(to_core)?;
        let svg_b = svg::render_csv(&second).map_err(to_core)?;
        let deterministic = first == second && first == reference && svg_a == svg_b;
        Ok((
            !rows.is_empty() && bounded && jordan_breaches == 0 && deterministic,
            format!(
                "{} jordan rows, log_ratio ≤ certificate on all: {bounded}, peak log_ratio {peak:.4}; byte-identical CSV/SVG on rerun: {deterministic}",
                rows.len()
            ),
        ))
    }
}

fn to_core(e: crate::CliError) -> hinfcalc::Error {
    match e {
        crate::CliError::Core(e) => e,
        other => hinfcalc::Error::InvalidInput(other.to_string()),
    }
}

/// A random bounded analytic function, cycling through four shapes.
fn random_function(trial: usize, rng: &mut ChaCha8Rng) -> hinfcalc::Result<FuncExpr> {
    let scale = Complex64::from_polar(rng.random_range(0.2..3.0), rng.random_range(0.0..std::f64::consts::TAU));
    let ast = match trial % 4 {
        0 => {
            let k = rng.random_range(1..=6);
            Expr::mul(Expr::Const(scale), random_blaschke(k, rng)?.ast().clone())
        }
        1 => {
            let terms = rng.random_range(1..=3);
            (0..terms)
                .map(|_| {
                    let num = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                    let pole = Complex64::new(rng.random_range(0.1..3.0), rng.random_range(-5.0..5.0));
                    Expr::div(Expr::Const(num), Expr::sub(Expr::Const(pole), Expr::Var))
                })
                .reduce(Expr::add)
                .expect("at least one term")
        }
        2 => {
            let shift = [0.25, 0.5, 1.0, 2.0][rng.random_range(0..4)];
            Expr::mul(Expr::Exp(shift), random_blaschke(2, rng)?.ast().clone())
        }
        _ => {
            let a = rng.random_range(0.1..3.0);
            let b = rng.random_range(0.1..3.0);
            Expr::mul(
                Expr::Const(scale),
                Expr::div(Expr::add(Expr::constant(a), Expr::Var), Expr::sub(Expr::constant(b), Expr::Var)),
            )
        }
    };
    FuncExpr::from_ast(ast)
}

/// A random causal signal: a few damped, possibly oscillating polynomial exponentials.
fn random_signal(grid: &TimeGrid, rng: &mut ChaCha8Rng) -> hinfcalc::Result<Trajectory> {
    let terms: Vec<(Complex64, Complex64, i32)> = (0..rng.random_range(1..=4))
        .map(|_| {
            (
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                Complex64::new(rng.random_range(-4.0..-0.8), rng.random_range(-20.0..20.0)),
                rng.random_range(0..3),
            )
        })
        .collect();
    Trajectory::from_fn(*grid, |t| {
        terms.iter().map(|(c, l, p)| c * (l * t).exp() * t.powi(*p)).sum()
    })
}

/// All eleven criteria in order.
pub fn run_suite(options: &SuiteOptions) -> Vec<CriterionOutcome> {
    let mut suite = Suite::new(options.clone());
    (1..=TITLES.len()).map(|i| suite.run(i)).collect()
}
