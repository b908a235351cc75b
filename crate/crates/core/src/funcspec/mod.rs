//! Expression language for bounded analytic functions on the left half-plane.
//!
//! A [`FuncExpr`] is a parsed expression together with its membership
//! certificate: pole locations (all strictly right of the imaginary axis),
//! removable points, and exponential shift coefficients.

mod ast;
mod certify;
mod parser;

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use ast::Expr;
pub use certify::{certify_hinf, certify_with_margin, Certification, Pole, Violation, DEFAULT_POLE_MARGIN};
pub use parser::parse_expr;

/// Evaluation refuses points this close to a pole.
pub const POLE_PROXIMITY: f64 = 1e-12;
/// Inside this distance of a removable point, values come from a Cauchy mean.
const REMOVABLE_RADIUS: f64 = 1e-4;
const CAUCHY_RADIUS: f64 = 1e-2;
const CAUCHY_NODES: usize = 32;

/// A certified member of the algebra of bounded analytic functions on `Re s < 0`.
#[derive(Debug, Clone)]
pub struct FuncExpr {
    ast: Expr,
    source_text: String,
    certification: Certification,
}

impl FuncExpr {
    /// Parse and certify; certification failures are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let ast = parse_expr(text)?;
        Self::from_ast_with_source(ast, text.to_string())
    }

    pub fn from_ast(ast: Expr) -> Result<Self> {
        let source = ast.to_string();
        Self::from_ast_with_source(ast, source)
    }

    fn from_ast_with_source(ast: Expr, source_text: String) -> Result<Self> {
        let certification = certify_hinf(&ast);
        if let Some(v) = certification.violations.first() {
            return Err(Error::HinfViolation {
                subterm: v.subterm.clone(),
                reason: v.reason.clone(),
            });
        }
        Ok(FuncExpr {
            ast,
            source_text,
            certification,
        })
    }

    /// Finite Blaschke product `Π (s − a_k)/(s + ā_k)`; the empty product is `1`.
    pub fn blaschke_product(zeros: &[Complex64]) -> Result<Self> {
        let ast = zeros
            .iter()
            .map(|&a| Expr::Blaschke(a))
            .reduce(Expr::mul)
            .unwrap_or_else(|| Expr::constant(1.0));
        Self::from_ast(ast)
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn source_text(&self) -> &str {
        &self.source_text
    }

    pub fn certification(&self) -> &Certification {
        &self.certification
    }

    /// `g(s)`.
    pub fn evaluate(&self, s: Complex64) -> Result<Complex64> {
        for pole in &self.certification.poles {
            let d = (s - pole.location).norm();
            if d < POLE_PROXIMITY {
                return Err(Error::PoleProximity {
                    point: s.to_string(),
                    pole: pole.location.to_string(),
                    distance: d,
                });
            }
        }
        if self
            .certification
            .removable
            .iter()
            .any(|z| (s - z).norm() < REMOVABLE_RADIUS)
        {
            return Ok(self.cauchy_mean(s));
        }
        Ok(self.ast.eval_raw(s))
    }

    /// Mean value over a small circle around `s`; exact for analytic `g`.
    fn cauchy_mean(&self, s: Complex64) -> Complex64 {
        let nearest_pole = self
            .certification
            .poles
            .iter()
            .map(|p| (p.location - s).norm())
            .fold(f64::INFINITY, f64::min);
        let radius = CAUCHY_RADIUS.min(nearest_pole / 3.0);
        let sum: Complex64 = (0..CAUCHY_NODES)
            .map(|k| {
                let theta = std::f64::consts::TAU * (k as f64 + 0.5) / CAUCHY_NODES as f64;
                self.ast.eval_raw(s + Complex64::from_polar(radius, theta))
            })
            .sum();
        sum / CAUCHY_NODES as f64
    }

    /// Boundary value `g(iω)`.
    pub fn boundary(&self, omega: f64) -> Result<Complex64> {
        self.evaluate(Complex64::new(0.0, omega))
    }

    /// Discrete symbol on a lattice of step `dt` at the unit-circle point `e^{iω·dt}`.
    ///
    /// The variable `s` is replaced by its bilinear image
    /// `(2/dt)·(z−1)/(z+1) = i·(2/dt)·tan(ω·dt/2)`, which keeps the symbol
    /// analytic inside the disk and bounded by `‖g‖∞`. Factors `exp(c*s)` whose
    /// shift `c` is a whole number of steps become the exact lattice shift
    /// `z^{c/dt}` unless the function has removable points in the closed left
    /// half-plane away from `0` (mixing the two maps there would reopen a
    /// cancelled pole inside the disk).
    pub fn lattice_symbol(&self, omega: f64, dt: f64) -> Result<Complex64> {
        let warped = (2.0 / dt * (0.5 * omega * dt).tan()).clamp(-BILINEAR_CLAMP, BILINEAR_CLAMP);
        let s = Complex64::new(0.0, warped);
        for pole in &self.certification.poles {
            let d = (s - pole.location).norm();
            if d < POLE_PROXIMITY {
                return Err(Error::PoleProximity {
                    point: s.to_string(),
                    pole: pole.location.to_string(),
                    distance: d,
                });
            }
        }
        if self
            .certification
            .removable
            .iter()
            .any(|z| (s - z).norm() < REMOVABLE_RADIUS)
        {
            return Ok(self.cauchy_mean(s));
        }
        let exact_shifts = self
            .certification
            .removable
            .iter()
            .all(|z| z.norm() < REMOVABLE_RADIUS || z.re > 0.0);
        Ok(eval_lattice(&self.ast, s, omega, dt, exact_shifts))
    }
}

/// Beyond this the bilinear frequency is treated as `±i∞`.
const BILINEAR_CLAMP: f64 = 1e10;

fn is_lattice_shift(c: f64, dt: f64) -> bool {
    let steps = c / dt;
    (steps - steps.round()).abs() <= 1e-9 * steps.abs().max(1.0)
}

fn eval_lattice(e: &Expr, s: Complex64, omega: f64, dt: f64, exact_shifts: bool) -> Complex64 {
    let rec = |x: &Expr| eval_lattice(x, s, omega, dt, exact_shifts);
    match e {
        Expr::Const(c) => *c,
        Expr::Var => s,
        Expr::Add(l, r) => rec(l) + rec(r),
        Expr::Sub(l, r) => rec(l) - rec(r),
        Expr::Mul(l, r) => rec(l) * rec(r),
        Expr::Div(l, r) => rec(l) / rec(r),
        Expr::Exp(c) if exact_shifts && is_lattice_shift(*c, dt) => {
            Complex64::from_polar(1.0, c * omega)
        }
        Expr::Exp(c) => (s * *c).exp(),
        Expr::Blaschke(a) => (s - a) / (s + a.conj()),
    }
}

impl fmt::Display for FuncExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source_text)
    }
}

pub fn parse(text: &str) -> Result<FuncExpr> {
    FuncExpr::parse(text)
}

pub fn evaluate(g: &FuncExpr, s: Complex64) -> Result<Complex64> {
    g.evaluate(s)
}

/// Frequencies `{0} ∪ ±logspace(min, max, points)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        FrequencyGrid {
            min: 1e-6,
            max: 1e6,
            points: 4096,
        }
    }
}

impl FrequencyGrid {
    pub fn frequencies(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.points + 1);
        out.push(0.0);
        let (lo, hi) = (self.min.log10(), self.max.log10());
        for k in 0..self.points {
            let t = if self.points == 1 {
                0.0
            } else {
                k as f64 / (self.points - 1) as f64
            };
            let w = 10f64.powf(lo + t * (hi - lo));
            out.push(w);
            out.push(-w);
        }
        out
    }
}

/// Sampled boundary supremum. Always a lower bound of `‖g‖∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupNormEstimate {
    pub value: f64,
    pub grid_points: usize,
    pub is_lower_bound: bool,
}

pub fn sup_norm(g: &FuncExpr, grid: &FrequencyGrid) -> SupNormEstimate {
    let freqs = grid.frequencies();
    let value = freqs
        .iter()
        .filter_map(|&w| g.boundary(w).ok())
        .map(|z| z.norm())
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    SupNormEstimate {
        value,
        grid_points: freqs.len(),
        is_lower_bound: true,
    }
}
