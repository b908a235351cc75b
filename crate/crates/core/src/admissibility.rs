//! Admissibility constants of observation matrices, computed from the
//! Gramian and by time-domain quadrature, and the intertwining check for
//! `C·g(A)`.
//!
//! At finite dimension every observation matrix is admissible; what is
//! measured here is the size of the constant and how it grows along a
//! nested family of generators.

use std::fmt;
use std::io::Write;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::calculus::{construct_ga, semigroup_trajectory, CalculusResult};
use crate::error::{Error, Result};
use crate::funcspec::FuncExpr;
use crate::linops::{
    check_finite, lyapunov_gram, matrix_exponential, sqrt_minus_a, CMat, CVec, GeneratorMatrix,
};
use crate::signals::{TimeGrid, ToeplitzMultiplier, HORIZON_TOLERANCE};

pub const RANDOM_PROBES: usize = 8;
pub const POWER_ITERATIONS: usize = 50;
pub const DEFAULT_PROBE_SEED: u64 = 0x5eed;

/// A `p × n` observation matrix `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationMatrix {
    label: String,
    entries: CMat,
}

impl ObservationMatrix {
    pub fn new(label: impl Into<String>, entries: CMat) -> Result<Self> {
        check_finite(&entries)?;
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::invalid("observation matrix must be nonempty"));
        }
        Ok(ObservationMatrix {
            label: label.into(),
            entries,
        })
    }

    pub fn from_real_rows(label: impl Into<String>, rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("ragged observation rows"));
        }
        let m = CMat::from_fn(rows.len(), cols, |i, j| Complex64::new(rows[i][j], 0.0));
        Self::new(label, m)
    }

    pub fn zeros(p: usize, n: usize) -> Result<Self> {
        Self::new("0", CMat::zeros(p, n))
    }

    /// `(−A)^{1/2}`, the square-root observation.
    pub fn sqrt_minus(a: &GeneratorMatrix) -> Result<Self> {
        Self::new(format!("sqrt(-{})", a.label()), sqrt_minus_a(a)?)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        ObservationMatrix {
            label: format!("({alpha})*{}", self.label),
            entries: &self.entries * alpha,
        }
    }

    /// `C·M` for a state-space operator `M`.
    pub fn compose(&self, m: &CMat, label: impl Into<String>) -> Result<Self> {
        if m.nrows() != self.cols() {
            return Err(Error::invalid("operator dimension does not match observation"));
        }
        Self::new(label, &self.entries * m)
    }

    fn check_pair(&self, a: &GeneratorMatrix) -> Result<()> {
        if self.cols() != a.dim() {
            return Err(Error::invalid(format!(
                "observation has {} columns, generator dimension is {}",
                self.cols(),
                a.dim()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdmissibilityMethod {
    Gramian,
    Quadrature,
}

impl fmt::Display for AdmissibilityMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AdmissibilityMethod::Gramian => "gramian",
            AdmissibilityMethod::Quadrature => "quadrature",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub kappa: f64,
    pub method: AdmissibilityMethod,
    pub generator_id: String,
    pub observation_id: String,
    /// Quadrature only: the trajectories had not decayed by the horizon.
    pub horizon_warning: bool,
}

/// `κ = √λmax(X)` with `A*X + XA = −C*C`.
pub fn admissibility_gramian(a: &GeneratorMatrix, c: &ObservationMatrix) -> Result<AdmissibilityReport> {
    c.check_pair(a)?;
    let gram = lyapunov_gram(a, c.entries())?;
    Ok(AdmissibilityReport {
        kappa: gram.lambda_max().max(0.0).sqrt(),
        method: AdmissibilityMethod::Gramian,
        generator_id: a.label().to_string(),
        observation_id: c.label().to_string(),
        horizon_warning: false,
    })
}

/// Discrete output Gramian `G = Σ_k dt·e^{A*t_k}C*Ce^{At_k}` on the grid
/// cells, applied matrix-free: a forward sweep for `y_k = Ce^{At_k}v` and a
/// backward Horner sweep for the adjoint.
struct DiscreteGramian {
    c: CMat,
    step: CMat,
    step_adj: CMat,
    half_adj: CMat,
    half: CMat,
    grid: TimeGrid,
}

impl DiscreteGramian {
    fn new(a: &GeneratorMatrix, c: &ObservationMatrix, grid: &TimeGrid) -> Result<Self> {
        let step = matrix_exponential(a, grid.dt)?;
        let half = matrix_exponential(a, 0.5 * grid.dt)?;
        Ok(DiscreteGramian {
            c: c.entries().clone(),
            step_adj: step.adjoint(),
            step,
            half_adj: half.adjoint(),
            half,
            grid: *grid,
        })
    }

    /// `(‖Ce^{A·}v‖², Gv, tail exceeded)`.
    fn apply(&self, v: &CVec) -> (f64, CVec, bool) {
        let n = self.grid.n_samples;
        let mut x = &self.half * v;
        let mut outputs = Vec::with_capacity(n);
        for _ in 0..n {
            outputs.push(&self.c * &x);
            x = &self.step * x;
        }
        let norms: Vec<f64> = outputs.iter().map(|y| y.norm_squared()).collect();
        let total: f64 = norms.iter().sum();
        let tail: f64 = norms[n - (n / 100).max(1)..].iter().sum();
        let mut acc = CVec::zeros(v.len());
        for y in outputs.iter().rev() {
            acc = &self.step_adj * acc + self.c.adjoint() * y;
        }
        let dt = self.grid.dt;
        let gv = (&self.half_adj * acc) * Complex64::new(dt, 0.0);
        (dt * total, gv, tail.sqrt() > HORIZON_TOLERANCE * total.sqrt())
    }
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> CVec {
    let v = DVector::from_fn(n, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// `κ` from sampled trajectories with the default probe seed.
pub fn admissibility_quadrature(
    a: &GeneratorMatrix,
    c: &ObservationMatrix,
    grid: &TimeGrid,
) -> Result<AdmissibilityReport> {
    admissibility_quadrature_seeded(a, c, grid, DEFAULT_PROBE_SEED)
}

/// Largest output energy over the canonical basis and 8 random unit
/// probes, refined by 50 power-iteration steps on the discrete Gramian.
/// Every candidate is a realized energy, so the result is a lower bound
/// for the discrete constant.
pub fn admissibility_quadrature_seeded(
    a: &GeneratorMatrix,
    c: &ObservationMatrix,
    grid: &TimeGrid,
    seed: u64,
) -> Result<AdmissibilityReport> {
    c.check_pair(a)?;
    let n = a.dim();
    let gram = DiscreteGramian::new(a, c, grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probes: Vec<CVec> = (0..n)
        .map(|j| crate::calculus::basis_vector(n, j))
        .chain((0..RANDOM_PROBES).map(|_| random_unit(n, &mut rng)))
        .collect();

    let mut warning = false;
    let mut best = (f64::NEG_INFINITY, CVec::zeros(n));
    for p in &probes {
        let (energy, gv, w) = gram.apply(p);
        warning |= w;
        if energy > best.0 {
            best = (energy, gv);
        }
    }
    let (mut kappa_sq, mut next) = best;
    for _ in 0..POWER_ITERATIONS {
        let norm = next.norm();
        if norm == 0.0 {
            break;
        }
        let v = next / Complex64::new(norm, 0.0);
        let (energy, gv, w) = gram.apply(&v);
        warning |= w;
        kappa_sq = kappa_sq.max(energy);
        next = gv;
    }
    Ok(AdmissibilityReport {
        kappa: kappa_sq.max(0.0).sqrt(),
        method: AdmissibilityMethod::Quadrature,
        generator_id: a.label().to_string(),
        observation_id: c.label().to_string(),
        horizon_warning: warning,
    })
}

/// Outcome of checking `M_g(Ce^{A·}x0)(t) = C·g(A)·e^{At}x0`.
#[derive(Debug, Clone)]
pub struct IntertwiningReport {
    /// Max over probes of `sup_t ‖lhs − rhs‖`, relative to
    /// `max(sup_t ‖rhs‖, ‖g(A)‖·sup_t ‖Ce^{At}x0‖)`.
    pub deviation: f64,
    /// Admissibility constant of `C·g(A)`.
    pub kappa: f64,
    pub calculus: CalculusResult,
}

pub const INTERTWINING_PROBES: usize = 2;

/// Compare the multiplier applied to observed trajectories against the
/// observed trajectories of `g(A)x0`, for the basis vectors (up to 4) and
/// two random probes.
pub fn check_intertwining_on_grid(
    a: &GeneratorMatrix,
    c: &ObservationMatrix,
    g: &FuncExpr,
    grid: &TimeGrid,
) -> Result<IntertwiningReport> {
    c.check_pair(a)?;
    let calculus = construct_ga(a, g, grid)?;
    check_intertwining(a, c, g, calculus, DEFAULT_PROBE_SEED)
}

/// [`check_intertwining_on_grid`] with an already constructed `g(A)`.
pub fn check_intertwining(
    a: &GeneratorMatrix,
    c: &ObservationMatrix,
    g: &FuncExpr,
    calculus: CalculusResult,
    seed: u64,
) -> Result<IntertwiningReport> {
    c.check_pair(a)?;
    let n = a.dim();
    let grid = calculus.grid;
    let multiplier = ToeplitzMultiplier::new(g, grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probes: Vec<CVec> = (0..n.min(4))
        .map(|j| crate::calculus::basis_vector(n, j))
        .chain((0..INTERTWINING_PROBES).map(|_| random_unit(n, &mut rng)))
        .collect();
    let cg = c.entries() * &calculus.ga;
    let ga_norm = crate::linops::operator_norm(&calculus.ga)?;

    let mut deviation: f64 = 0.0;
    for x0 in &probes {
        let traj = semigroup_trajectory(a, x0, &grid)?;
        let samples = grid.n_samples;
        let observe = |m: &CMat, k: usize| m * DVector::from_column_slice(traj.sample(k));
        let observed: Vec<CVec> = (0..samples).map(|k| observe(c.entries(), k)).collect();
        let mut lhs = vec![vec![Complex64::new(0.0, 0.0); samples]; c.rows()];
        for (r, out) in lhs.iter_mut().enumerate() {
            let channel: Vec<Complex64> = observed.iter().map(|y| y[r]).collect();
            if channel.iter().any(|z| *z != Complex64::new(0.0, 0.0)) {
                *out = multiplier.apply_scalar(&channel);
            }
        }
        let mut diff: f64 = 0.0;
        let mut scale = ga_norm * observed.iter().map(|y| y.norm()).fold(0.0, f64::max);
        for k in 0..samples {
            let rhs = observe(&cg, k);
            let d: f64 = (0..c.rows())
                .map(|r| (lhs[r][k] - rhs[r]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            diff = diff.max(d);
            scale = scale.max(rhs.norm());
        }
        if diff > 0.0 {
            deviation = deviation.max(diff / scale.max(f64::MIN_POSITIVE));
        }
    }
    let composed = c.compose(&calculus.ga, format!("{}*g(A)", c.label()))?;
    let kappa = admissibility_gramian(a, &composed)?.kappa;
    Ok(IntertwiningReport {
        deviation,
        kappa,
        calculus,
    })
}

/// `(κ, κ*)` for `(−A)^{1/2}` under `A` and `(−A*)^{1/2}` under `A*`.
pub fn sqrt_admissibility_profile(a: &GeneratorMatrix) -> Result<(AdmissibilityReport, AdmissibilityReport)> {
    let adj = a.adjoint()?;
    Ok((
        admissibility_gramian(a, &ObservationMatrix::sqrt_minus(a)?)?,
        admissibility_gramian(&adj, &ObservationMatrix::sqrt_minus(&adj)?)?,
    ))
}

/// One `family, n, kappa, kappa_star, method` row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub family: String,
    pub n: usize,
    pub kappa: f64,
    pub kappa_star: f64,
    pub method: AdmissibilityMethod,
}

pub const PROFILE_CSV_HEADER: &str = "family,n,kappa,kappa_star,method";

impl ProfileRow {
    pub fn from_profile(family: impl Into<String>, n: usize, profile: &(AdmissibilityReport, AdmissibilityReport)) -> Self {
        ProfileRow {
            family: family.into(),
            n,
            kappa: profile.0.kappa,
            kappa_star: profile.1.kappa,
            method: profile.0.method,
        }
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{:.12e},{:.12e},{}",
            self.family, self.n, self.kappa, self.kappa_star, self.method
        )
    }
}

pub fn write_profile_csv(rows: &[ProfileRow], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{PROFILE_CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv_line())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::default_grid;
    use crate::funcspec::parse;

    const HALF_ROOT: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn diag(values: &[f64]) -> GeneratorMatrix {
        GeneratorMatrix::diagonal(values).unwrap()
    }

    fn row(label: &str, values: &[f64]) -> ObservationMatrix {
        ObservationMatrix::from_real_rows(label, &[values]).unwrap()
    }

    #[test]
    fn gramian_examples() {
        let scalar = diag(&[-1.0]);
        let k = admissibility_gramian(&scalar, &row("1", &[1.0])).unwrap();
        assert!((k.kappa - HALF_ROOT).abs() < 1e-12);
        assert_eq!(k.method, AdmissibilityMethod::Gramian);
        assert_eq!(admissibility_gramian(&scalar, &ObservationMatrix::zeros(1, 1).unwrap()).unwrap().kappa, 0.0);

        let sa = GeneratorMatrix::from_real_rows(&[&[-3.0, 1.0, 0.0], &[1.0, -2.0, 0.5], &[0.0, 0.5, -1.0]]).unwrap();
        let k = admissibility_gramian(&sa, &ObservationMatrix::sqrt_minus(&sa).unwrap()).unwrap();
        assert!((k.kappa - HALF_ROOT).abs() < 1e-10);
    }

    #[test]
    fn gramian_scales_linearly() {
        let a = GeneratorMatrix::from_real_rows(&[&[-1.0, 3.0], &[0.0, -2.0]]).unwrap();
        let c = row("c", &[1.0, -0.5]);
        let base = admissibility_gramian(&a, &c).unwrap().kappa;
        for alpha in [Complex64::new(2.0, 0.0), Complex64::new(0.0, -3.0), Complex64::new(-0.25, 0.1)] {
            let scaled = admissibility_gramian(&a, &c.scaled(alpha)).unwrap().kappa;
            assert!((scaled - alpha.norm() * base).abs() <= 1e-12 * scaled.max(1.0));
        }
    }

    #[test]
    fn quadrature_examples() {
        let scalar = diag(&[-1.0]);
        let grid = default_grid(&scalar).unwrap();
        let q = admissibility_quadrature(&scalar, &row("1", &[1.0]), &grid).unwrap();
        assert!((q.kappa - HALF_ROOT).abs() <= 1e-4);
        assert!(!q.horizon_warning);
        assert_eq!(q.method.to_string(), "quadrature");

        let d = diag(&[-1.0, -2.0]);
        let c = row("ones", &[1.0, 1.0]);
        let grid = default_grid(&d).unwrap();
        let q = admissibility_quadrature(&d, &c, &grid).unwrap().kappa;
        let g = admissibility_gramian(&d, &c).unwrap().kappa;
        assert!((q - g).abs() <= 1e-4 * g);

        let z = admissibility_quadrature(&d, &ObservationMatrix::zeros(2, 2).unwrap(), &grid).unwrap();
        assert_eq!(z.kappa, 0.0);
    }

    #[test]
    fn quadrature_matches_gramian_on_non_normal_pair() {
        let a = GeneratorMatrix::from_real_rows(&[&[-1.0, 4.0, 0.0], &[0.0, -1.5, 2.0], &[0.0, 0.0, -3.0]]).unwrap();
        let c = ObservationMatrix::from_real_rows("c", &[&[1.0, 0.0, 1.0], &[0.0, 2.0, 0.0]]).unwrap();
        let grid = default_grid(&a).unwrap();
        let q = admissibility_quadrature(&a, &c, &grid).unwrap().kappa;
        let g = admissibility_gramian(&a, &c).unwrap().kappa;
        assert!((q - g).abs() <= 1e-4 * g, "{q} vs {g}");
    }

    #[test]
    fn quadrature_flags_short_horizon() {
        let a = diag(&[-1.0]);
        let grid = TimeGrid::with_horizon(2.0, 1 << 10).unwrap();
        assert!(admissibility_quadrature(&a, &row("1", &[1.0]), &grid).unwrap().horizon_warning);
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let a = diag(&[-1.0, -2.0]);
        assert!(matches!(admissibility_gramian(&a, &row("c", &[1.0])), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn intertwining_examples() {
        let a = diag(&[-1.0, -2.0]);
        let c = row("ones", &[1.0, 1.0]);
        let grid = default_grid(&a).unwrap();

        let one = check_intertwining_on_grid(&a, &c, &parse("1").unwrap(), &grid).unwrap();
        assert!(one.deviation <= 1e-8, "{}", one.deviation);
        let kc = admissibility_gramian(&a, &c).unwrap().kappa;
        assert!((one.kappa - kc).abs() <= 1e-8);

        let cay = check_intertwining_on_grid(&a, &c, &parse("(1+s)/(1-s)").unwrap(), &grid).unwrap();
        assert!(cay.deviation <= 1e-2, "{}", cay.deviation);
        let expected = admissibility_gramian(&a, &row("e", &[0.0, -1.0 / 3.0])).unwrap().kappa;
        assert!((cay.kappa - expected).abs() <= 1e-3 * expected);

        let zero = check_intertwining_on_grid(&a, &ObservationMatrix::zeros(1, 2).unwrap(), &parse("(1+s)/(1-s)").unwrap(), &grid)
            .unwrap();
        assert_eq!(zero.deviation, 0.0);
        assert_eq!(zero.kappa, 0.0);
    }

    #[test]
    fn intertwining_deviation_shrinks_with_refinement() {
        let a = diag(&[-1.0, -2.0]);
        let c = row("ones", &[1.0, 1.0]);
        let g = parse("(1+s)/(1-s)").unwrap();
        // Measured against the exact g(A), the deviation is the discretization
        // error of the multiplier itself.
        let exact = crate::calculus::spectral_oracle_ga(&a, &g).unwrap();
        let deviation = |log_n: u32| {
            let grid = TimeGrid::for_abscissa(-1.0, 1 << log_n).unwrap();
            let mut calc = construct_ga(&a, &g, &grid).unwrap();
            calc.ga = exact.clone();
            check_intertwining(&a, &c, &g, calc, DEFAULT_PROBE_SEED).unwrap().deviation
        };
        let (coarse, mid, fine) = (deviation(12), deviation(13), deviation(14));
        assert!(fine < mid && mid < coarse, "{coarse} {mid} {fine}");
        assert!(fine <= 1e-4);
    }

    #[test]
    fn profile_examples() {
        let (k, ks) = sqrt_admissibility_profile(&diag(&[-1.0])).unwrap();
        assert!((k.kappa - HALF_ROOT).abs() < 1e-12 && (ks.kappa - HALF_ROOT).abs() < 1e-12);
        for n in [2, 5, 17] {
            let values: Vec<f64> = (0..n).map(|k| -(1.0 + k as f64 * 0.7)).collect();
            let (k, ks) = sqrt_admissibility_profile(&diag(&values)).unwrap();
            assert!((k.kappa - HALF_ROOT).abs() <= 1e-8 && (ks.kappa - HALF_ROOT).abs() <= 1e-8);
        }
        let j = GeneratorMatrix::from_real_rows(&[&[-1.0, 1.0], &[0.0, -1.0]]).unwrap();
        let (k, _) = sqrt_admissibility_profile(&j).unwrap();
        assert!(k.kappa.is_finite() && k.kappa > HALF_ROOT);
    }

    #[test]
    fn profile_csv() {
        let p = sqrt_admissibility_profile(&diag(&[-1.0])).unwrap();
        let mut out = Vec::new();
        write_profile_csv(&[ProfileRow::from_profile("diag", 1, &p)], &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("family,n,kappa,kappa_star,method"));
        assert!(lines.next().unwrap().starts_with("diag,1,7.071067811865e-1,7.071067811865e-1,gramian"));
    }
}
