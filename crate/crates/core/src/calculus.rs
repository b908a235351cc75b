//! The functional calculus `g ↦ g(A)`: construction from the Toeplitz
//! multiplier applied to semigroup trajectories, the spectral and
//! Hille–Phillips oracles, and the norm estimates built on top.

use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspec::FuncExpr;
use crate::linops::{
    expm, identity, lyapunov_gram, matrix_exponential, operator_norm, solve_right_upper,
    sqrt_minus_a, CMat, CVec, GeneratorMatrix, GramianMatrix,
};
use crate::signals::{TimeGrid, ToeplitzMultiplier, Trajectory, DEFAULT_SAMPLES, HORIZON_TOLERANCE};

/// Construction fails above this extraction residual.
pub const MAX_EXTRACTION_RESIDUAL: f64 = 0.1;
pub const EXTRACTION_POINTS: usize = 8;
pub const HILLE_PHILLIPS_NODES: usize = 4097;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Default grid for a generator: `2¹⁴` cells covering 30 decay times.
pub fn default_grid(a: &GeneratorMatrix) -> Result<TimeGrid> {
    TimeGrid::for_abscissa(a.spectral_abscissa(), DEFAULT_SAMPLES)
}

/// `t_k ↦ e^{At_k} x0` on the grid cells.
pub fn semigroup_trajectory(a: &GeneratorMatrix, x0: &CVec, grid: &TimeGrid) -> Result<Trajectory> {
    let n = a.dim();
    if x0.len() != n {
        return Err(Error::invalid(format!(
            "initial state has length {}, generator dimension is {n}",
            x0.len()
        )));
    }
    let step = matrix_exponential(a, grid.dt)?;
    let mut x = matrix_exponential(a, 0.5 * grid.dt)? * x0;
    let mut values = Vec::with_capacity(grid.n_samples * n);
    for _ in 0..grid.n_samples {
        values.extend(x.iter().copied());
        x = &step * x;
    }
    Trajectory::from_values(*grid, n, values)
}

/// `g(A)` together with the diagnostics of its extraction.
#[derive(Debug, Clone)]
pub struct CalculusResult {
    pub ga: CMat,
    pub extraction_residual: f64,
    pub grid: TimeGrid,
    pub extraction_times: Vec<f64>,
    pub warnings: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct CalculusResultFile {
    dim: usize,
    #[serde(rename = "gA")]
    ga: Vec<[f64; 2]>,
    residual: f64,
    grid: TimeGrid,
    extraction_times: Vec<f64>,
    warnings: Vec<String>,
}

impl CalculusResult {
    /// `{"dim", "gA": [[re, im], ...] row-major, "residual", "grid", ...}`.
    pub fn to_json(&self) -> Result<String> {
        let n = self.ga.nrows();
        let file = CalculusResultFile {
            dim: n,
            ga: (0..n * n)
                .map(|k| {
                    let z = self.ga[(k / n, k % n)];
                    [z.re, z.im]
                })
                .collect(),
            residual: self.extraction_residual,
            grid: self.grid,
            extraction_times: self.extraction_times.clone(),
            warnings: self.warnings.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CalculusResultFile = serde_json::from_str(text)?;
        let n = file.dim;
        if file.ga.len() != n * n {
            return Err(Error::invalid("gA entry count does not match dim"));
        }
        let grid = TimeGrid::new(file.grid.dt, file.grid.n_samples, file.grid.pad_factor)?;
        Ok(CalculusResult {
            ga: CMat::from_fn(n, n, |i, j| {
                let [re, im] = file.ga[i * n + j];
                Complex64::new(re, im)
            }),
            extraction_residual: file.residual,
            grid,
            extraction_times: file.extraction_times,
            warnings: file.warnings,
        })
    }
}

/// Grid indices where `g(A)` is read off: 8 points spread over
/// `[max(8, k_hi/2), k_hi]` with `k_hi ≈ 2/(ρ·dt)`, so the stiffest mode has
/// decayed by at most `e^{−2}` and transporting back by `e^{−At}` stays
/// well conditioned.
pub fn extraction_indices(grid: &TimeGrid, spectral_radius: f64) -> Vec<usize> {
    let n = grid.n_samples;
    let natural = (2.0 / (spectral_radius * grid.dt)).floor();
    let hi = if natural.is_finite() {
        (natural as usize).clamp(16, n / 8)
    } else {
        n / 8
    };
    let lo = (hi / 2).max(8);
    let m = EXTRACTION_POINTS;
    let mut idx: Vec<usize> = (0..m)
        .map(|i| lo + ((hi - lo) as f64 * i as f64 / (m - 1) as f64).round() as usize)
        .collect();
    idx.dedup();
    idx
}

/// Construct `g(A)` from `M_g(e^{A·}x0)(t) = g(A)e^{At}x0`.
///
/// Works in the Schur basis `A = QTQ*`: the multiplier acts entrywise, so
/// it commutes with the constant unitary `Q`, and the columns of `e^{Tt}`
/// have only `j+1` nonzero rows. Each output sample gives an estimate
/// `Y(t_k)·e^{−Tt_k}`; the estimates are averaged and their spread is the
/// extraction residual.
pub fn construct_ga(a: &GeneratorMatrix, g: &FuncExpr, grid: &TimeGrid) -> Result<CalculusResult> {
    let n = a.dim();
    let schur = a.schur();
    let t = &schur.triangular;
    let upper = |m: CMat| CMat::from_fn(n, n, |i, j| if i <= j { m[(i, j)] } else { ZERO });
    let step = upper(expm(&(t * Complex64::new(grid.dt, 0.0))));
    let start = upper(expm(&(t * Complex64::new(0.5 * grid.dt, 0.0))));
    let multiplier = ToeplitzMultiplier::new(g, *grid)?;
    let indices = extraction_indices(grid, a.spectral_radius());
    let samples = grid.n_samples;
    let tail_start = samples - (samples / 100).max(1);

    struct Column {
        y: Vec<Vec<Complex64>>,
        e: Vec<Vec<Complex64>>,
        horizon_exceeded: bool,
    }

    let columns: Vec<Column> = (0..n)
        .into_par_iter()
        .map_init(Vec::new, |scratch, c| {
            let rows = c + 1;
            let mut signals = vec![Vec::with_capacity(samples); rows];
            let mut x: Vec<Complex64> = (0..rows).map(|r| start[(r, c)]).collect();
            let mut next = vec![ZERO; rows];
            for _ in 0..samples {
                for (sig, v) in signals.iter_mut().zip(&x) {
                    sig.push(*v);
                }
                for r in 0..rows {
                    let mut acc = ZERO;
                    for (q, xq) in x.iter().enumerate().skip(r) {
                        acc += step[(r, q)] * xq;
                    }
                    next[r] = acc;
                }
                std::mem::swap(&mut x, &mut next);
            }
            let energy = |range: std::ops::Range<usize>| -> f64 {
                signals
                    .iter()
                    .map(|s| s[range.clone()].iter().map(|z| z.norm_sqr()).sum::<f64>())
                    .sum()
            };
            let horizon_exceeded =
                energy(tail_start..samples).sqrt() > HORIZON_TOLERANCE * energy(0..samples).sqrt();
            let e = indices
                .iter()
                .map(|&k| signals.iter().map(|s| s[k]).collect())
                .collect();
            let outputs: Vec<Vec<Complex64>> = signals
                .iter()
                .map(|s| {
                    if s.iter().all(|z| *z == ZERO) {
                        vec![ZERO; indices.len()]
                    } else {
                        multiplier.apply_scalar_into(s, scratch);
                        indices.iter().map(|&k| scratch[k]).collect()
                    }
                })
                .collect();
            let y = (0..indices.len())
                .map(|i| outputs.iter().map(|o| o[i]).collect())
                .collect();
            Column {
                y,
                e,
                horizon_exceeded,
            }
        })
        .collect();

    let assemble = |pick: &dyn Fn(&Column) -> &Vec<Complex64>| {
        let mut m = CMat::zeros(n, n);
        for (c, col) in columns.iter().enumerate() {
            for (r, v) in pick(col).iter().enumerate() {
                m[(r, c)] = *v;
            }
        }
        m
    };
    let mut estimates = Vec::with_capacity(indices.len());
    for i in 0..indices.len() {
        let y = assemble(&|col| &col.y[i]);
        let e = assemble(&|col| &col.e[i]);
        let est = solve_right_upper(&e, &y)
            .ok_or_else(|| Error::Singular("semigroup sample is not invertible".into()))?;
        estimates.push(est);
    }
    let mean = estimates.iter().fold(CMat::zeros(n, n), |acc, m| acc + m)
        * Complex64::new(1.0 / estimates.len() as f64, 0.0);
    let scale = operator_norm(&mean)?.max(1e-12);
    let mut residual: f64 = 0.0;
    for est in &estimates {
        residual = residual.max(operator_norm(&(est - &mean))? / scale);
    }
    if !residual.is_finite() || residual > MAX_EXTRACTION_RESIDUAL {
        return Err(Error::ConstructionFailed {
            residual,
            limit: MAX_EXTRACTION_RESIDUAL,
        });
    }

    let mut warnings = Vec::new();
    if columns.iter().any(|c| c.horizon_exceeded) {
        warnings.push(format!(
            "horizon {:.3e} too short: trajectories have not decayed to {HORIZON_TOLERANCE:e}",
            grid.horizon()
        ));
    }
    let resolution = 4.0 * std::f64::consts::PI / (grid.padded_len() as f64 * grid.dt);
    if let Some(p) = g.certification().min_pole_re() {
        if p < resolution {
            warnings.push(format!(
                "pole at distance {p:.3e} from the imaginary axis is below the frequency resolution {resolution:.3e}"
            ));
        }
    }

    Ok(CalculusResult {
        ga: &schur.unitary * mean * schur.unitary.adjoint(),
        extraction_residual: residual,
        grid: *grid,
        extraction_times: indices.iter().map(|&k| grid.time(k)).collect(),
        warnings,
    })
}

/// `V·diag(g(λ_j))·V⁻¹`, available when the eigenbasis condition is at most `10⁶`.
pub fn spectral_oracle_ga(a: &GeneratorMatrix, g: &FuncExpr) -> Result<CMat> {
    let d = a.well_conditioned().ok_or_else(|| {
        Error::OracleUnavailable(format!(
            "eigenvector condition {:.3e} exceeds the spectral-route limit",
            a.eigvec_condition()
        ))
    })?;
    d.try_apply_scalar_fn(|z| g.evaluate(z))
}

/// Integrable kernel `h` supported on `[−T_h, 0]`.
#[derive(Clone)]
pub struct KernelFunction {
    label: String,
    support: f64,
    density: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    laplace: Option<FuncExpr>,
}

impl std::fmt::Debug for KernelFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KernelFunction")
            .field("label", &self.label)
            .field("support", &self.support)
            .field("laplace", &self.laplace.as_ref().map(|g| g.source_text().to_string()))
            .finish()
    }
}

impl KernelFunction {
    pub fn new(
        label: impl Into<String>,
        support: f64,
        density: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        laplace: Option<FuncExpr>,
    ) -> Result<Self> {
        if !(support.is_finite() && support > 0.0) {
            return Err(Error::invalid(format!("kernel support must be positive, got {support}")));
        }
        let k = KernelFunction {
            label: label.into(),
            support,
            density: Arc::new(density),
            laplace,
        };
        if !k.l1_norm().is_finite() {
            return Err(Error::invalid("kernel is not integrable"));
        }
        Ok(k)
    }

    pub fn zero(support: f64) -> Result<Self> {
        Self::new("zero", support, |_| ZERO, Some(FuncExpr::parse("0")?))
    }

    /// `𝟙_{[−w,0]}`, with transform `(e^{ws} − 1)/s`.
    pub fn boxcar(width: f64) -> Result<Self> {
        let g = FuncExpr::parse(&format!("(exp({width:?}*s)-1)/s"))?;
        Self::new(format!("boxcar({width})"), width, |_| Complex64::new(1.0, 0.0), Some(g))
    }

    /// `e^{rτ}` on `[−w, 0]`, with transform `(1 − e^{−rw}e^{ws})/(r − s)`.
    pub fn exponential(rate: f64, width: f64) -> Result<Self> {
        let g = FuncExpr::parse(&format!(
            "(1-{:?}*exp({width:?}*s))/({rate:?}-s)",
            (-rate * width).exp()
        ))?;
        Self::new(
            format!("exponential({rate},{width})"),
            width,
            move |tau| Complex64::new((rate * tau).exp(), 0.0),
            Some(g),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn eval(&self, tau: f64) -> Complex64 {
        if (-self.support..=0.0).contains(&tau) {
            (self.density)(tau)
        } else {
            ZERO
        }
    }

    /// Its Laplace transform as a function expression, when known.
    pub fn laplace(&self) -> Option<&FuncExpr> {
        self.laplace.as_ref()
    }

    /// `∫|h|` by composite Simpson on the default node count.
    pub fn l1_norm(&self) -> f64 {
        simpson_weights(HILLE_PHILLIPS_NODES, self.support)
            .map(|(tau, w)| w * self.eval(tau).norm())
            .sum()
    }
}

/// Nodes `τ_j = −j·step` on `[−T, 0]` with composite Simpson weights.
fn simpson_weights(nodes: usize, support: f64) -> impl Iterator<Item = (f64, f64)> {
    let step = support / (nodes - 1) as f64;
    (0..nodes).map(move |j| {
        let w = if j == 0 || j == nodes - 1 {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        (-(j as f64) * step, w * step / 3.0)
    })
}

/// `∫_{−T_h}^0 h(τ) e^{−Aτ} dτ` by composite Simpson with 4097 nodes.
pub fn hille_phillips_ga(a: &GeneratorMatrix, h: &KernelFunction) -> Result<CMat> {
    hille_phillips_ga_with_nodes(a, h, HILLE_PHILLIPS_NODES)
}

pub fn hille_phillips_ga_with_nodes(a: &GeneratorMatrix, h: &KernelFunction, nodes: usize) -> Result<CMat> {
    if nodes < 3 || nodes.is_multiple_of(2) {
        return Err(Error::invalid(format!("Simpson needs an odd node count ≥ 3, got {nodes}")));
    }
    let step = matrix_exponential(a, h.support / (nodes - 1) as f64)?;
    let mut power = identity(a.dim());
    let mut acc = CMat::zeros(a.dim(), a.dim());
    for (tau, w) in simpson_weights(nodes, h.support) {
        let coeff = h.eval(tau) * w;
        if coeff != ZERO {
            acc += &power * coeff;
        }
        power = &power * &step;
    }
    Ok(acc)
}

/// `‖g(A)·e^{Aε}‖` for an already constructed `g(A)`.
pub fn semigroup_norm(ga: &CMat, a: &GeneratorMatrix, eps: f64) -> Result<f64> {
    operator_norm(&(ga * matrix_exponential(a, eps)?))
}

/// `‖g(A)·e^{Aε}‖` with `g(A)` constructed on the default grid.
pub fn ga_semigroup_norm(a: &GeneratorMatrix, g: &FuncExpr, eps: f64) -> Result<f64> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    let result = construct_ga(a, g, &default_grid(a)?)?;
    semigroup_norm(&result.ga, a, eps)
}

/// Square-function certificate `2·κ*(ε)·κ(ε)` bounding `‖g(A)e^{2Aε}‖ / ‖g‖∞`.
///
/// `κ(ε)² = λmax(e^{A*ε} X e^{Aε})` with `X` the Gramian of `(A, (−A)^{1/2})`,
/// and `κ*` the same quantity for `A*`. The Gramians are solved once and
/// reused for every `ε`.
#[derive(Debug, Clone)]
pub struct CertificateEngine {
    a: GeneratorMatrix,
    a_adj: GeneratorMatrix,
    gram: GramianMatrix,
    gram_adj: GramianMatrix,
}

impl CertificateEngine {
    pub fn new(a: &GeneratorMatrix) -> Result<Self> {
        let a_adj = a.adjoint()?;
        let gram = lyapunov_gram(a, &sqrt_minus_a(a)?)?;
        let gram_adj = lyapunov_gram(&a_adj, &sqrt_minus_a(&a_adj)?)?;
        Ok(CertificateEngine {
            a: a.clone(),
            a_adj,
            gram,
            gram_adj,
        })
    }

    fn shifted_kappa(a: &GeneratorMatrix, gram: &GramianMatrix, eps: f64) -> Result<f64> {
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::invalid(format!("eps must be finite and >= 0, got {eps}")));
        }
        Ok(gram.shifted(&matrix_exponential(a, eps)?).lambda_max().sqrt())
    }

    /// `κ(ε)`, the admissibility constant of `(−A)^{1/2}` observed from time `ε` on.
    pub fn kappa(&self, eps: f64) -> Result<f64> {
        Self::shifted_kappa(&self.a, &self.gram, eps)
    }

    pub fn kappa_star(&self, eps: f64) -> Result<f64> {
        Self::shifted_kappa(&self.a_adj, &self.gram_adj, eps)
    }

    pub fn certificate(&self, eps: f64) -> Result<f64> {
        Ok(2.0 * self.kappa(eps)? * self.kappa_star(eps)?)
    }
}

pub fn doubled_semigroup_certificate(a: &GeneratorMatrix, eps: f64) -> Result<f64> {
    CertificateEngine::new(a)?.certificate(eps)
}

/// Constants of the smoothing estimate `‖(−A)^{1/2}e^{At}‖ ≤ M·t^{−1/2}·e^{−ωt}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticityConstants {
    pub m: f64,
    pub omega: f64,
    /// Time at which the supremum defining `M` is attained.
    pub t_max: f64,
}

const ANALYTICITY_GRID: usize = 600;

/// `M = sup_t √t·e^{ωt}·‖(−A)^{1/2}e^{At}‖` with `ω = |spectral abscissa|/2`.
pub fn fit_analyticity_constants(a: &GeneratorMatrix) -> Result<AnalyticityConstants> {
    fit_analyticity_constants_with_omega(a, 0.5 * a.spectral_abscissa().abs())
}

/// Same supremum for a caller-chosen `ω ∈ [0, |spectral abscissa|)`.
///
/// The supremum is taken over a logarithmic grid and then refined by a
/// golden-section search around the best grid point.
pub fn fit_analyticity_constants_with_omega(a: &GeneratorMatrix, omega: f64) -> Result<AnalyticityConstants> {
    let decay = a.spectral_abscissa().abs();
    if !(omega.is_finite() && omega >= 0.0 && omega < decay) {
        return Err(Error::invalid(format!(
            "omega must lie in [0, {decay:e}), got {omega}"
        )));
    }
    let root = sqrt_minus_a(a)?;
    let profile = |t: f64| -> Result<f64> {
        Ok(t.sqrt() * (omega * t).exp() * operator_norm(&(&root * matrix_exponential(a, t)?))?)
    };
    let t_min = 1e-6 / a.spectral_radius();
    let t_max = 60.0 / (decay - omega);
    let ratio = (t_max / t_min).powf(1.0 / (ANALYTICITY_GRID - 1) as f64);
    let times: Vec<f64> = (0..ANALYTICITY_GRID).map(|i| t_min * ratio.powi(i as i32)).collect();
    let values = times.iter().map(|&t| profile(t)).collect::<Result<Vec<_>>>()?;
    let (best, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });

    // Golden-section search in log t between the neighbours of the best node.
    let mut lo = times[best.saturating_sub(1)].ln();
    let mut hi = times[(best + 1).min(times.len() - 1)].ln();
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = profile(x1.exp())?;
    let mut f2 = profile(x2.exp())?;
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = profile(x2.exp())?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = profile(x1.exp())?;
        }
    }
    let (m, t_at) = [(values[best], times[best]), (f1, x1.exp()), (f2, x2.exp())]
        .into_iter()
        .fold((f64::NEG_INFINITY, 0.0), |acc, p| if p.0 > acc.0 { p } else { acc });
    Ok(AnalyticityConstants {
        m,
        omega,
        t_max: t_at,
    })
}

/// Standard basis vector `e_j` of length `n`.
pub fn basis_vector(n: usize, j: usize) -> CVec {
    DVector::from_fn(n, |i, _| if i == j { Complex64::new(1.0, 0.0) } else { ZERO })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspec::parse;
    use crate::linops::resolvent;
    use crate::signals::l2_norm;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn rel_err(a: &CMat, b: &CMat) -> f64 {
        operator_norm(&(a - b)).unwrap() / operator_norm(b).unwrap().max(1.0)
    }

    fn diag(values: &[f64]) -> GeneratorMatrix {
        GeneratorMatrix::diagonal(values).unwrap()
    }

    fn jordan2() -> GeneratorMatrix {
        GeneratorMatrix::from_real_rows(&[&[-1.0, 1.0], &[0.0, -1.0]]).unwrap()
    }

    #[test]
    fn trajectory_examples() {
        let a = diag(&[-1.0]);
        let grid = default_grid(&a).unwrap();
        let zero = semigroup_trajectory(&a, &CVec::zeros(1), &grid).unwrap();
        assert!(zero.values().iter().all(|z| *z == ZERO));
        let f = semigroup_trajectory(&a, &basis_vector(1, 0), &grid).unwrap();
        for k in [0, 10, 1000] {
            assert!((f.sample(k)[0] - c((-grid.time(k)).exp())).norm() < 1e-12);
        }
        assert!((l2_norm(&f) - 0.5f64.sqrt()).abs() <= 1e-4);
        assert!(!f.horizon_warning());
    }

    #[test]
    fn construction_examples() {
        let a = diag(&[-1.0, -2.0]);
        let grid = default_grid(&a).unwrap();
        let one = construct_ga(&a, &parse("1").unwrap(), &grid).unwrap();
        assert!(rel_err(&one.ga, &identity(2)) <= 1e-3);
        assert!(one.extraction_residual <= 1e-3);

        let cayley = construct_ga(&a, &parse("(1+s)/(1-s)").unwrap(), &grid).unwrap();
        let expected = CMat::from_diagonal(&DVector::from_vec(vec![c(0.0), c(-1.0 / 3.0)]));
        assert!(rel_err(&cayley.ga, &expected) <= 1e-3);

        let res = construct_ga(&a, &parse("(0-1)/(s-1)").unwrap(), &grid).unwrap();
        // (0−1)/(s−1) = (1 − s)⁻¹ evaluated at A is −(A − I)⁻¹.
        let direct = -resolvent(&a, c(1.0)).unwrap();
        assert!(rel_err(&res.ga, &direct) <= 1e-3);
    }

    #[test]
    fn construction_on_a_jordan_block() {
        let a = jordan2();
        let g = parse("1/(2-s)").unwrap();
        let res = construct_ga(&a, &g, &default_grid(&a).unwrap()).unwrap();
        // (2 − A)⁻¹ for A = −I + N: (3I − N)⁻¹ = I/3 + N/9.
        let expected = CMat::from_row_slice(2, 2, &[c(1.0 / 3.0), c(1.0 / 9.0), c(0.0), c(1.0 / 3.0)]);
        assert!(rel_err(&res.ga, &expected) <= 1e-3, "{}", res.ga);
    }

    #[test]
    fn calculus_result_json_round_trip() {
        let a = diag(&[-1.0, -2.0]);
        let res = construct_ga(&a, &parse("1/(1-s)").unwrap(), &default_grid(&a).unwrap()).unwrap();
        let text = res.to_json().unwrap();
        assert!(text.contains("\"gA\"") && text.contains("\"residual\"") && text.contains("\"grid\""));
        let back = CalculusResult::from_json(&text).unwrap();
        assert_eq!(back.ga, res.ga);
        assert_eq!(back.grid, res.grid);
    }

    #[test]
    fn extraction_window_tracks_stiffness() {
        let grid = TimeGrid::for_abscissa(-1.0, DEFAULT_SAMPLES).unwrap();
        let slow = extraction_indices(&grid, 1.0);
        let stiff = extraction_indices(&grid, 64.0);
        assert_eq!(slow.len(), EXTRACTION_POINTS);
        assert!(stiff.iter().all(|&k| (8..=16).contains(&k)));
        assert!(slow.iter().all(|&k| k <= DEFAULT_SAMPLES / 8));
        assert!(slow[0] > stiff[stiff.len() - 1]);
    }

    #[test]
    fn oracle_examples() {
        let a = diag(&[-1.0, -2.0]);
        assert_eq!(spectral_oracle_ga(&a, &parse("1").unwrap()).unwrap(), identity(2));
        let cay = spectral_oracle_ga(&a, &parse("(1+s)/(1-s)").unwrap()).unwrap();
        assert_eq!(cay[(0, 0)], c(0.0));
        assert!((cay[(1, 1)] - c(-1.0 / 3.0)).norm() < 1e-15);

        let b = GeneratorMatrix::from_real_rows(&[&[-1.0, 0.5, 0.0], &[0.2, -2.0, 0.3], &[0.0, -0.4, -0.7]]).unwrap();
        let shift = spectral_oracle_ga(&b, &parse("exp(1*s)").unwrap()).unwrap();
        assert!(rel_err(&shift, &expm(b.entries())) <= 1e-8);

        let defective = GeneratorMatrix::from_real_rows(&[&[-1.0, 1.0], &[0.0, -1.0]]).unwrap();
        assert!(matches!(
            spectral_oracle_ga(&defective, &parse("1").unwrap()),
            Err(Error::OracleUnavailable(_))
        ));
    }

    #[test]
    fn hille_phillips_examples() {
        let a = diag(&[-1.0]);
        let zero = hille_phillips_ga(&a, &KernelFunction::zero(1.0).unwrap()).unwrap();
        assert_eq!(zero, CMat::zeros(1, 1));

        let boxcar = KernelFunction::boxcar(1.0).unwrap();
        let scalar = hille_phillips_ga(&a, &boxcar).unwrap();
        assert!((scalar[(0, 0)] - c(1.0 - (-1f64).exp())).norm() <= 1e-6);

        let d = hille_phillips_ga(&diag(&[-1.0, -2.0]), &boxcar).unwrap();
        assert!((d[(0, 0)] - c(1.0 - (-1f64).exp())).norm() <= 1e-6);
        assert!((d[(1, 1)] - c((1.0 - (-2f64).exp()) / 2.0)).norm() <= 1e-6);
        assert!(d[(0, 1)].norm() <= 1e-15);
    }

    #[test]
    fn hille_phillips_matches_construction() {
        let a = GeneratorMatrix::from_real_rows(&[&[-1.0, 0.4], &[0.0, -3.0]]).unwrap();
        let grid = default_grid(&a).unwrap();
        for kernel in [KernelFunction::boxcar(1.0).unwrap(), KernelFunction::exponential(0.5, 2.0).unwrap()] {
            let quad = hille_phillips_ga(&a, &kernel).unwrap();
            let built = construct_ga(&a, kernel.laplace().unwrap(), &grid).unwrap();
            assert!(rel_err(&built.ga, &quad) <= 1e-3, "{}", kernel.label());
        }
    }

    #[test]
    fn kernel_l1_norm() {
        assert!((KernelFunction::boxcar(2.0).unwrap().l1_norm() - 2.0).abs() < 1e-12);
        let e = KernelFunction::exponential(1.0, 3.0).unwrap();
        assert!((e.l1_norm() - (1.0 - (-3f64).exp())).abs() < 1e-10);
        assert!(KernelFunction::boxcar(-1.0).is_err());
    }

    #[test]
    fn semigroup_norm_examples() {
        let a = diag(&[-1.0, -3.0]);
        let one = ga_semigroup_norm(&a, &parse("1").unwrap(), 0.3).unwrap();
        assert!((one - (-0.3f64).exp()).abs() <= 1e-3);
        let b = ga_semigroup_norm(&a, &parse("blaschke(-1,2)*blaschke(-0.3)").unwrap(), 1e-3).unwrap();
        assert!(b <= 1.0 + 1e-3);
        let far = ga_semigroup_norm(&a, &parse("(1+s)/(1-s)").unwrap(), 30.0).unwrap();
        assert!(far < 1e-12);
    }

    #[test]
    fn certificate_examples() {
        let scalar = diag(&[-1.0]);
        for eps in [0.0, 1e-3, 0.1, 1.0] {
            let cert = doubled_semigroup_certificate(&scalar, eps).unwrap();
            assert!((cert - (-2.0 * eps).exp()).abs() <= 1e-10, "eps={eps}");
        }
        let engine = CertificateEngine::new(&diag(&[-1.0, -2.0])).unwrap();
        assert!((engine.kappa(0.0).unwrap().powi(2) - 0.5).abs() <= 1e-12);
        assert!((engine.certificate(0.0).unwrap() - 1.0).abs() <= 1e-12);

        let herm = GeneratorMatrix::from_real_rows(&[&[-2.0, 0.5], &[0.5, -1.0]]).unwrap();
        let e = CertificateEngine::new(&herm).unwrap();
        for eps in [0.0, 0.05] {
            assert!((e.kappa(eps).unwrap() - e.kappa_star(eps).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn certificate_bounds_the_calculus() {
        let a = GeneratorMatrix::from_real_rows(&[&[-1.0, 2.0], &[0.0, -1.5]]).unwrap();
        let engine = CertificateEngine::new(&a).unwrap();
        let grid = default_grid(&a).unwrap();
        for g in ["(1+s)/(1-s)", "blaschke(-0.2,1)*blaschke(-2)", "exp(1*s)"] {
            let g = parse(g).unwrap();
            let ga = construct_ga(&a, &g, &grid).unwrap().ga;
            for eps in [1e-4, 1e-2, 0.1] {
                let lhs = semigroup_norm(&ga, &a, 2.0 * eps).unwrap();
                assert!(lhs <= engine.certificate(eps).unwrap() * 1.01, "{g} eps={eps}");
            }
        }
    }

    #[test]
    fn analyticity_constant_examples() {
        let target = (2.0 * std::f64::consts::E).sqrt().recip();
        for a in [diag(&[-1.0]), diag(&[-1.0, -4.0, -16.0]), diag(&[-1.0, -1.0])] {
            let fit = fit_analyticity_constants_with_omega(&a, 0.0).unwrap();
            assert!((fit.m - target).abs() <= 1e-4, "{}", fit.m);
        }
        let j = fit_analyticity_constants(&jordan2()).unwrap();
        assert!(j.m.is_finite() && j.m > target);
        assert_eq!(j.omega, 0.5);
        assert!(fit_analyticity_constants_with_omega(&jordan2(), 1.0).is_err());
    }
}
