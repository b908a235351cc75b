//! Random search for Blaschke products with large `‖g(A)e^{Aε}‖` at fixed `(A, ε)`.

use hinfcalc::calculus::{construct_ga, semigroup_norm};
use hinfcalc::{FuncExpr, GeneratorMatrix, TimeGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::MAX_BLASCHKE_FACTORS;
use crate::sweep::log_ratio;
use crate::CliError;

const RE_RANGE: (f64, f64) = (-4.0, -0.05);
const IM_RANGE: (f64, f64) = (-8.0, 8.0);
const STEP: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub generator: String,
    pub eps: f64,
    pub factors: usize,
    pub iterations: usize,
    pub seed: u64,
    pub best_source: String,
    pub best_norm: f64,
    pub best_log_ratio: f64,
    /// Running maximum of `log_ratio` after each candidate.
    pub trajectory: Vec<f64>,
}

fn random_zero(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(RE_RANGE.0..RE_RANGE.1), rng.random_range(IM_RANGE.0..IM_RANGE.1))
}

fn perturb(zeros: &[Complex64], rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    zeros
        .iter()
        .map(|z| {
            let d = Complex64::new(rng.random_range(-STEP..STEP), rng.random_range(-STEP..STEP));
            let w = z + d * (z.re.abs().max(0.1));
            Complex64::new(w.re.clamp(RE_RANGE.0, RE_RANGE.1), w.im.clamp(IM_RANGE.0, IM_RANGE.1))
        })
        .collect()
}

/// Alternate fresh random candidates with perturbations of the incumbent.
/// Blaschke products are unimodular on the imaginary axis, so `‖g‖∞ = 1`
/// and the ratio is `‖g(A)e^{Aε}‖ / (1 + |log ε|)`.
pub fn run_search(
    a: &GeneratorMatrix,
    eps: f64,
    factors: usize,
    iterations: usize,
    seed: u64,
    grid: &TimeGrid,
) -> Result<SearchReport, CliError> {
    if factors > MAX_BLASCHKE_FACTORS {
        return Err(CliError::Invalid(format!("at most {MAX_BLASCHKE_FACTORS} factors, got {factors}")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(CliError::Invalid(format!("eps must be positive, got {eps}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let evaluate = |zeros: &[Complex64]| -> Result<(FuncExpr, f64), CliError> {
        let g = FuncExpr::blaschke_product(zeros)?;
        let ga = construct_ga(a, &g, grid)?.ga;
        Ok((g, semigroup_norm(&ga, a, eps)?))
    };

    let mut best_zeros: Vec<Complex64> = (0..factors).map(|_| random_zero(&mut rng)).collect();
    let (mut best_g, mut best_norm) = evaluate(&best_zeros)?;
    let mut trajectory = vec![log_ratio(best_norm, 1.0, eps)];
    // A constant has nothing to search over.
    let rounds = if factors == 0 { 0 } else { iterations.saturating_sub(1) };
    for i in 0..rounds {
        let zeros = if i % 2 == 0 {
            (0..factors).map(|_| random_zero(&mut rng)).collect()
        } else {
            perturb(&best_zeros, &mut rng)
        };
        let (g, norm) = evaluate(&zeros)?;
        if norm > best_norm {
            (best_zeros, best_g, best_norm) = (zeros, g, norm);
        }
        trajectory.push(log_ratio(best_norm, 1.0, eps));
    }
    Ok(SearchReport {
        generator: a.label().to_string(),
        eps,
        factors,
        iterations: trajectory.len(),
        seed,
        best_source: best_g.source_text().to_string(),
        best_norm,
        best_log_ratio: log_ratio(best_norm, 1.0, eps),
        trajectory,
    })
}
