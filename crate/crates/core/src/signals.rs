//! Sampled causal signals, their boundary Laplace transforms along `iℝ`,
//! the Riesz projection onto `H²`, and the Toeplitz multiplier
//! `M_g f = L⁻¹[Π(g · Lf)]`.
//!
//! Sample `k` sits at the cell midpoint `t_k = (k + ½)·dt`. The transform of
//! a trajectory is the midpoint rule for `∫₀^∞ f(t) e^{−iωt} dt` evaluated on
//! the DFT bins of the zero-padded grid, so Parseval holds exactly and the
//! projection onto causal signals is an orthogonal truncation.
//!
//! Functions of `s` are placed on the bins through the bilinear map
//! `s = (2/dt)·(z−1)/(z+1)`, `z = e^{iω_k dt}`. A function analytic and bounded
//! on the left half-plane stays analytic and bounded on the matching side of
//! the unit circle, so the discrete multiplier is an exact Toeplitz operator
//! and sends a sampled exponential `e^{λt}` to `g(λ̃)·e^{λt}` with
//! `λ̃ = (2/dt)·tanh(λ·dt/2) = λ·(1 + O((λ·dt)²))`.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::funcspec::FuncExpr;

pub const DEFAULT_SAMPLES: usize = 1 << 14;
pub const DEFAULT_PAD: usize = 4;
/// Default horizon in units of the decay time `1/|spectral abscissa|`.
pub const DEFAULT_DECAY_HORIZONS: f64 = 30.0;
/// Tail energy (last 1% of the grid) above this fraction of the total raises the horizon warning.
pub const HORIZON_TOLERANCE: f64 = 1e-8;
/// Alias pairs summed by [`SpectrumSamples::from_fn`].
const ALIAS_TERMS: usize = 256;

/// Uniform time grid with `n_samples` cells of width `dt`, zero-padded to
/// `pad_factor · n_samples` points for the transforms.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TimeGrid {
    pub dt: f64,
    pub n_samples: usize,
    pub pad_factor: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, n_samples: usize, pad_factor: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Grid(format!("dt must be positive, got {dt}")));
        }
        if n_samples < 16 || !n_samples.is_power_of_two() {
            return Err(Error::Grid(format!(
                "sample count must be a power of two ≥ 16, got {n_samples}"
            )));
        }
        if pad_factor < 1 || !(pad_factor * n_samples).is_power_of_two() {
            return Err(Error::Grid(format!(
                "padded length {pad_factor}·{n_samples} is not a power of two"
            )));
        }
        Ok(TimeGrid {
            dt,
            n_samples,
            pad_factor,
        })
    }

    /// Grid of `n_samples` cells spanning the horizon `t_max`.
    pub fn with_horizon(t_max: f64, n_samples: usize) -> Result<Self> {
        Self::new(t_max / n_samples as f64, n_samples, DEFAULT_PAD)
    }

    /// Smallest power-of-two step with `n_samples·dt ≥ 30/|abscissa|`.
    ///
    /// Power-of-two steps make every integer shift `exp(c*s)` land on the lattice.
    pub fn for_abscissa(abscissa: f64, n_samples: usize) -> Result<Self> {
        if !(abscissa < 0.0) {
            return Err(Error::NotStable { abscissa });
        }
        let needed = DEFAULT_DECAY_HORIZONS / (abscissa.abs() * n_samples as f64);
        Self::new(2f64.powi(needed.log2().ceil() as i32), n_samples, DEFAULT_PAD)
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.n_samples as f64
    }

    pub fn padded_len(&self) -> usize {
        self.pad_factor * self.n_samples
    }

    /// Midpoint of cell `k`.
    pub fn time(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_samples).map(|k| self.time(k)).collect()
    }

    /// Angular frequency of DFT bin `k` of the padded grid (standard ordering,
    /// Nyquist bin counted as negative).
    pub fn frequency(&self, k: usize) -> f64 {
        let len = self.padded_len();
        let signed = if k < len / 2 { k as f64 } else { k as f64 - len as f64 };
        2.0 * PI * signed / (len as f64 * self.dt)
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.padded_len()).map(|k| self.frequency(k)).collect()
    }

    /// Boundary frequency paired with bin `k`: the bilinear image
    /// `(2/dt)·tan(ω_k·dt/2)` of the bin's unit-circle point.
    pub fn paired_frequency(&self, k: usize) -> f64 {
        2.0 / self.dt * (0.5 * self.frequency(k) * self.dt).tan()
    }

    /// Phase `e^{−iω_k dt/2}` aligning the DFT with the midpoint lattice.
    fn half_cell_phase(&self, k: usize) -> Complex64 {
        Complex64::from_polar(1.0, -0.5 * self.frequency(k) * self.dt)
    }
}

/// Tail-to-total energy check on one or more scalar channels.
fn horizon_exceeded(grid: &TimeGrid, dim: usize, values: &[Complex64]) -> bool {
    let n = grid.n_samples;
    let tail_start = n - (n / 100).max(1);
    let total: f64 = values.iter().map(|z| z.norm_sqr()).sum();
    let tail: f64 = values[tail_start * dim..].iter().map(|z| z.norm_sqr()).sum();
    tail.sqrt() > HORIZON_TOLERANCE * total.sqrt()
}

/// Causal vector-valued signal sampled on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: TimeGrid,
    dim: usize,
    /// Row-major `n_samples × dim`.
    values: Vec<Complex64>,
    horizon_warning: bool,
}

impl Trajectory {
    pub fn from_values(grid: TimeGrid, dim: usize, values: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("trajectory dimension must be positive"));
        }
        if values.len() != grid.n_samples * dim {
            return Err(Error::invalid(format!(
                "expected {}×{} samples, got {}",
                grid.n_samples,
                dim,
                values.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("trajectory has non-finite samples"));
        }
        let horizon_warning = horizon_exceeded(&grid, dim, &values);
        Ok(Trajectory {
            grid,
            dim,
            values,
            horizon_warning,
        })
    }

    pub fn zeros(grid: TimeGrid, dim: usize) -> Self {
        Trajectory {
            grid,
            dim,
            values: vec![Complex64::new(0.0, 0.0); grid.n_samples * dim],
            horizon_warning: false,
        }
    }

    /// Scalar signal `f(t_k)`.
    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::from_values(grid, 1, grid.times().into_iter().map(f).collect())
    }

    /// Stack scalar channels into one vector signal.
    pub fn from_components(grid: TimeGrid, components: &[Vec<Complex64>]) -> Result<Self> {
        let dim = components.len();
        let mut values = Vec::with_capacity(grid.n_samples * dim);
        for k in 0..grid.n_samples {
            for c in components {
                values.push(*c.get(k).ok_or_else(|| Error::invalid("component too short"))?);
            }
        }
        Self::from_values(grid, dim, values)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn sample(&self, k: usize) -> &[Complex64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn component(&self, i: usize) -> Vec<Complex64> {
        self.values.iter().skip(i).step_by(self.dim).copied().collect()
    }

    pub fn horizon_warning(&self) -> bool {
        self.horizon_warning
    }

    pub fn scale(&self, alpha: Complex64) -> Trajectory {
        Trajectory {
            values: self.values.iter().map(|z| z * alpha).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Trajectory) -> Result<Trajectory> {
        if self.grid != other.grid || self.dim != other.dim {
            return Err(Error::invalid("trajectories live on different grids"));
        }
        Ok(Trajectory {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
            horizon_warning: self.horizon_warning || other.horizon_warning,
            ..self.clone()
        })
    }

    /// CSV with header `t,re_0,im_0,...`.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        write_csv("t", &self.grid.times(), self.dim, &self.values, out)
    }
}

/// `√(dt · Σ‖f_k‖²)`.
pub fn l2_norm(f: &Trajectory) -> f64 {
    (f.grid.dt * f.values.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
}

/// Boundary values of the Laplace transform on the padded DFT bins.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSamples {
    grid: TimeGrid,
    dim: usize,
    /// Row-major `padded_len × dim`.
    values: Vec<Complex64>,
    horizon_warning: bool,
}

impl SpectrumSamples {
    /// Spectrum of the sampled signal whose continuous transform is `F(iω)`.
    ///
    /// Sampling at cell midpoints folds the transform onto the bins as the
    /// alternating alias sum `Σ_m (−1)^m F(i(ω_k + 2πm/dt))`; that sum is
    /// evaluated symmetrically and averaged over its last two partial sums.
    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> Complex64 + Sync) -> Result<Self> {
        let period = 2.0 * PI / grid.dt;
        let values: Vec<Complex64> = (0..grid.padded_len())
            .into_par_iter()
            .map(|k| {
                let w = grid.frequency(k);
                let mut partial = f(w);
                let mut previous = partial;
                for m in 1..=ALIAS_TERMS {
                    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                    previous = partial;
                    partial += (f(w + m as f64 * period) + f(w - m as f64 * period)) * sign;
                }
                0.5 * (partial + previous)
            })
            .collect();
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("spectrum has non-finite samples"));
        }
        Ok(SpectrumSamples {
            grid,
            dim: 1,
            values,
            horizon_warning: false,
        })
    }

    /// Discrete symbol of a certified function on the bins of `grid`.
    pub fn of_function(grid: TimeGrid, g: &FuncExpr) -> Result<Self> {
        let values = grid
            .frequencies()
            .into_iter()
            .map(|w| g.lattice_symbol(w, grid.dt))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectrumSamples {
            grid,
            dim: 1,
            values,
            horizon_warning: false,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.grid.frequencies()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn sample(&self, k: usize) -> &[Complex64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn horizon_warning(&self) -> bool {
        self.horizon_warning
    }

    /// `(Δω/2π) · Σ‖F_k‖²`, equal to the trajectory energy by Parseval.
    pub fn energy(&self) -> f64 {
        let dw = 2.0 * PI / (self.grid.padded_len() as f64 * self.grid.dt);
        dw / (2.0 * PI) * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// Pointwise product with scalar samples on the same grid.
    pub fn multiply(&self, symbol: &SpectrumSamples) -> Result<SpectrumSamples> {
        if symbol.grid != self.grid || symbol.dim != 1 {
            return Err(Error::invalid("symbol must be scalar samples on the same grid"));
        }
        let values = self
            .values
            .chunks(self.dim)
            .zip(&symbol.values)
            .flat_map(|(row, g)| row.iter().map(move |z| z * g))
            .collect();
        Ok(SpectrumSamples {
            values,
            ..self.clone()
        })
    }

    /// CSV with header `omega,re_0,im_0,...` in DFT bin order.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        write_csv("omega", &self.grid.frequencies(), self.dim, &self.values, out)
    }
}

fn write_csv(
    axis: &str,
    abscissae: &[f64],
    dim: usize,
    values: &[Complex64],
    out: &mut impl Write,
) -> std::io::Result<()> {
    write!(out, "{axis}")?;
    for i in 0..dim {
        write!(out, ",re_{i},im_{i}")?;
    }
    writeln!(out)?;
    for (x, row) in abscissae.iter().zip(values.chunks(dim)) {
        write!(out, "{x:e}")?;
        for z in row {
            write!(out, ",{:e},{:e}", z.re, z.im)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Plans {
    fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Plans {
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }
}

/// Apply a scalar transform to every channel of a row-major buffer.
fn per_channel(
    rows: usize,
    dim: usize,
    values: &[Complex64],
    mut f: impl FnMut(&mut Vec<Complex64>),
) -> Vec<Vec<Complex64>> {
    (0..dim)
        .map(|i| {
            let mut buf: Vec<Complex64> = (0..rows).map(|k| values[k * dim + i]).collect();
            f(&mut buf);
            buf
        })
        .collect()
}

fn interleave(channels: Vec<Vec<Complex64>>, rows: usize) -> Vec<Complex64> {
    let dim = channels.len();
    let mut out = Vec::with_capacity(rows * dim);
    for k in 0..rows {
        for c in &channels {
            out.push(c[k]);
        }
    }
    out
}

/// Midpoint-rule Laplace transform on the padded DFT bins:
/// `F_k = dt · e^{−iω_k dt/2} · Σ_j f_j e^{−2πi jk/N'}`.
pub fn laplace_boundary(f: &Trajectory) -> SpectrumSamples {
    let grid = f.grid;
    let len = grid.padded_len();
    let plans = Plans::new(len);
    let channels = per_channel(grid.n_samples, f.dim, &f.values, |buf| {
        buf.resize(len, Complex64::new(0.0, 0.0));
        plans.forward.process(buf);
        for (k, z) in buf.iter_mut().enumerate() {
            *z *= grid.half_cell_phase(k) * grid.dt;
        }
    });
    SpectrumSamples {
        grid,
        dim: f.dim,
        values: interleave(channels, len),
        horizon_warning: f.horizon_warning,
    }
}

/// Padded time samples of the inverse transform; index `j ≥ N'/2` is the negative time `(j − N' + ½)·dt`.
fn inverse_padded(spectrum: &SpectrumSamples, plans: &Plans) -> Vec<Vec<Complex64>> {
    let grid = spectrum.grid;
    let len = grid.padded_len();
    let scale = 1.0 / (len as f64 * grid.dt);
    per_channel(len, spectrum.dim, &spectrum.values, |buf| {
        for (k, z) in buf.iter_mut().enumerate() {
            *z *= grid.half_cell_phase(k).conj() * scale;
        }
        plans.inverse.process(buf);
    })
}

/// Inverse transform restricted to the grid cells `t ≥ 0`.
pub fn inverse_laplace(spectrum: &SpectrumSamples) -> Trajectory {
    let grid = spectrum.grid;
    let plans = Plans::new(grid.padded_len());
    let mut channels = inverse_padded(spectrum, &plans);
    for c in &mut channels {
        c.truncate(grid.n_samples);
    }
    let values = interleave(channels, grid.n_samples);
    let horizon_warning = spectrum.horizon_warning || horizon_exceeded(&grid, spectrum.dim, &values);
    Trajectory {
        grid,
        dim: spectrum.dim,
        values,
        horizon_warning,
    }
}

/// Orthogonal projection onto transforms of causal signals: zero the
/// negative-time half of the padded inverse transform.
pub fn riesz_project(spectrum: &SpectrumSamples) -> SpectrumSamples {
    let grid = spectrum.grid;
    let len = grid.padded_len();
    let plans = Plans::new(len);
    let mut channels = inverse_padded(spectrum, &plans);
    for buf in &mut channels {
        for z in &mut buf[len / 2..] {
            *z = Complex64::new(0.0, 0.0);
        }
        plans.forward.process(buf);
        for (k, z) in buf.iter_mut().enumerate() {
            *z *= grid.half_cell_phase(k) * grid.dt;
        }
    }
    SpectrumSamples {
        values: interleave(channels, len),
        ..spectrum.clone()
    }
}

/// Precomputed Toeplitz multiplier `M_g` on one grid.
///
/// The half-cell phases of the forward and inverse transforms cancel, so a
/// scalar application is a zero-padded circular convolution with the
/// inverse DFT of the lattice symbol (see [`FuncExpr::lattice_symbol`]),
/// truncated to the first `n_samples` cells.
pub struct ToeplitzMultiplier {
    grid: TimeGrid,
    symbol: Vec<Complex64>,
    plans: Plans,
}

impl ToeplitzMultiplier {
    pub fn new(g: &FuncExpr, grid: TimeGrid) -> Result<Self> {
        let len = grid.padded_len();
        let scale = 1.0 / len as f64;
        let symbol = grid
            .frequencies()
            .into_iter()
            .map(|w| g.lattice_symbol(w, grid.dt).map(|z| z * scale))
            .collect::<Result<Vec<_>>>()?;
        Ok(ToeplitzMultiplier {
            grid,
            symbol,
            plans: Plans::new(len),
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Apply to one scalar channel of length `n_samples`; `buf` is scratch of any size.
    pub fn apply_scalar_into(&self, input: &[Complex64], buf: &mut Vec<Complex64>) {
        let len = self.grid.padded_len();
        buf.clear();
        buf.extend_from_slice(input);
        buf.resize(len, Complex64::new(0.0, 0.0));
        self.plans.forward.process(buf);
        for (z, g) in buf.iter_mut().zip(&self.symbol) {
            *z *= g;
        }
        self.plans.inverse.process(buf);
        buf.truncate(input.len());
    }

    pub fn apply_scalar(&self, input: &[Complex64]) -> Vec<Complex64> {
        let mut buf = Vec::with_capacity(self.grid.padded_len());
        self.apply_scalar_into(input, &mut buf);
        buf
    }

    pub fn apply(&self, f: &Trajectory) -> Result<Trajectory> {
        if f.grid != self.grid {
            return Err(Error::invalid("trajectory grid differs from multiplier grid"));
        }
        let n = self.grid.n_samples;
        let channels: Vec<Vec<Complex64>> = (0..f.dim)
            .map(|i| self.apply_scalar(&f.component(i)))
            .collect();
        let values = interleave(channels, n);
        let horizon_warning = f.horizon_warning || horizon_exceeded(&self.grid, f.dim, &values);
        Ok(Trajectory {
            grid: self.grid,
            dim: f.dim,
            values,
            horizon_warning,
        })
    }
}

/// `M_g f`.
pub fn toeplitz_apply(g: &FuncExpr, f: &Trajectory) -> Result<Trajectory> {
    ToeplitzMultiplier::new(g, f.grid)?.apply(f)
}
