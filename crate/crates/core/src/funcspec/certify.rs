//! Membership certificate for the bounded analytic functions on the left
//! half-plane.
//!
//! Every expression is brought to the normal form
//! `g(s) = Σ_c P_c(s) e^{c s} / Q(s)` with polynomials `P_c`, `Q`. Then `g`
//! is bounded and analytic on `Re s ≤ 0` when every `c ≥ 0`, every `P_c/Q` is
//! proper, and every zero of `Q` in `Re s ≤ δ` is cancelled by the numerator.

use num_complex::Complex64;

use super::ast::Expr;
use crate::linops::{CMat, SchurForm};

/// Default distance poles must keep from the imaginary axis.
pub const DEFAULT_POLE_MARGIN: f64 = 1e-6;

const COEF_TRIM: f64 = 1e-14;
const ROOT_CLUSTER: f64 = 1e-5;
const VANISH_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct Pole {
    pub location: Complex64,
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub subterm: String,
    pub reason: String,
}

/// Outcome of certifying an expression.
#[derive(Debug, Clone, PartialEq)]
pub struct Certification {
    pub margin: f64,
    pub poles: Vec<Pole>,
    /// Zeros of the denominator cancelled by the numerator.
    pub removable: Vec<Complex64>,
    pub exp_coefficients: Vec<f64>,
    pub violations: Vec<Violation>,
}

impl Certification {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn min_pole_re(&self) -> Option<f64> {
        self.poles.iter().map(|p| p.location.re).reduce(f64::min)
    }
}

pub fn certify_hinf(expr: &Expr) -> Certification {
    certify_with_margin(expr, DEFAULT_POLE_MARGIN)
}

pub fn certify_with_margin(expr: &Expr, margin: f64) -> Certification {
    let mut cert = Certification {
        margin,
        poles: Vec::new(),
        removable: Vec::new(),
        exp_coefficients: Vec::new(),
        violations: Vec::new(),
    };

    expr.walk(&mut |node| match node {
        Expr::Exp(c) => {
            cert.exp_coefficients.push(*c);
            if !(*c >= 0.0) {
                cert.violations.push(Violation {
                    subterm: node.to_string(),
                    reason: format!("exp coefficient {c} is negative; e^{{cs}} is unbounded on Re s < 0"),
                });
            }
        }
        Expr::Blaschke(a) => {
            if !(a.re < -margin) {
                cert.violations.push(Violation {
                    subterm: node.to_string(),
                    reason: format!("Blaschke parameter {a} must satisfy Re a < -{margin:e}"),
                });
            }
        }
        _ => {}
    });
    if !cert.violations.is_empty() {
        return cert;
    }

    let form = match normalize(expr) {
        Ok(f) => f,
        Err(v) => {
            cert.violations.push(v);
            return cert;
        }
    };

    let q_degree = form.den.degree();
    for (c, p) in &form.num.terms {
        if p.degree() > q_degree {
            cert.violations.push(Violation {
                subterm: expr.to_string(),
                reason: format!(
                    "unbounded at infinity: numerator degree {} exceeds denominator degree {q_degree} (exp coefficient {c})",
                    p.degree()
                ),
            });
        }
    }

    for (z, multiplicity) in cluster_roots(&form.den.roots()) {
        let vanishing = form.num.vanishing_order(z, multiplicity);
        if vanishing >= multiplicity {
            cert.removable.push(z);
            continue;
        }
        let pole = Pole {
            location: z,
            order: multiplicity - vanishing,
        };
        if z.re <= margin {
            cert.violations.push(Violation {
                subterm: offending_division(expr, z).unwrap_or_else(|| expr.to_string()),
                reason: format!("pole at {z} lies in Re s <= {margin:e}"),
            });
        }
        cert.poles.push(pole);
    }
    cert
}

/// The first division whose divisor vanishes at `z`.
fn offending_division(expr: &Expr, z: Complex64) -> Option<String> {
    let mut found = None;
    expr.walk(&mut |node| {
        if found.is_some() {
            return;
        }
        if let Expr::Div(_, den) = node {
            if let Ok(form) = normalize(den) {
                if let Some(p) = form.num.rational_part() {
                    let scale = p.abs_eval(z).max(f64::MIN_POSITIVE);
                    if p.eval(z).norm() <= 1e-6 * scale {
                        found = Some(node.to_string());
                    }
                }
            }
        }
    });
    found
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Poly(pub Vec<Complex64>);

impl Poly {
    fn constant(c: Complex64) -> Poly {
        Poly(vec![c]).trimmed()
    }

    fn one() -> Poly {
        Poly(vec![Complex64::new(1.0, 0.0)])
    }

    fn trimmed(mut self) -> Poly {
        let scale = self.0.iter().map(|z| z.norm()).fold(0.0, f64::max);
        while let Some(last) = self.0.last() {
            if last.norm() <= COEF_TRIM * scale || last.norm() == 0.0 {
                self.0.pop();
            } else {
                break;
            }
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with `0` for the zero polynomial.
    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let zero = Complex64::new(0.0, 0.0);
        Poly(
            (0..n)
                .map(|i| *self.0.get(i).unwrap_or(&zero) + *other.0.get(i).unwrap_or(&zero))
                .collect(),
        )
        .trimmed()
    }

    fn scale(&self, c: Complex64) -> Poly {
        Poly(self.0.iter().map(|z| z * c).collect()).trimmed()
    }

    fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly(Vec::new());
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).trimmed()
    }

    fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, z)| z * k as f64)
                .collect(),
        )
        .trimmed()
    }

    pub(crate) fn eval(&self, s: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * s + c)
    }

    fn abs_eval(&self, s: Complex64) -> f64 {
        let r = s.norm();
        self.0.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Roots via companion-matrix eigenvalues, Newton-polished.
    pub(crate) fn roots(&self) -> Vec<Complex64> {
        let d = self.degree();
        if self.is_zero() || d == 0 {
            return Vec::new();
        }
        let lead = self.0[d];
        let mut companion = CMat::zeros(d, d);
        for i in 0..d {
            if i + 1 < d {
                companion[(i + 1, i)] = Complex64::new(1.0, 0.0);
            }
            companion[(i, d - 1)] = -self.0[i] / lead;
        }
        let raw = match SchurForm::new(&companion) {
            Ok(s) => s.eigenvalues(),
            Err(_) => return Vec::new(),
        };
        let deriv = self.derivative();
        raw.into_iter()
            .map(|mut z| {
                for _ in 0..3 {
                    let dz = deriv.eval(z);
                    if dz.norm() == 0.0 {
                        break;
                    }
                    let step = self.eval(z) / dz;
                    if !(step.re.is_finite() && step.im.is_finite()) || step.norm() > 1e-3 * z.norm().max(1.0) {
                        break;
                    }
                    z -= step;
                }
                z
            })
            .collect()
    }
}

/// `Σ_c P_c(s) e^{c s}`, terms sorted by `c`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ExpPoly {
    pub terms: Vec<(f64, Poly)>,
}

impl ExpPoly {
    fn single(c: f64, p: Poly) -> ExpPoly {
        ExpPoly {
            terms: vec![(c, p)],
        }
        .cleaned()
    }

    fn cleaned(mut self) -> ExpPoly {
        self.terms.retain(|(_, p)| !p.is_zero());
        self.terms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, Poly)> = Vec::new();
        for (c, p) in self.terms {
            match merged.last_mut() {
                Some((lc, lp)) if *lc == c => *lp = lp.add(&p),
                _ => merged.push((c, p)),
            }
        }
        merged.retain(|(_, p)| !p.is_zero());
        ExpPoly { terms: merged }
    }

    fn add(&self, other: &ExpPoly) -> ExpPoly {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        ExpPoly { terms }.cleaned()
    }

    fn neg(&self) -> ExpPoly {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|(c, p)| (*c, p.scale(Complex64::new(-1.0, 0.0))))
                .collect(),
        }
    }

    fn mul(&self, other: &ExpPoly) -> ExpPoly {
        let mut terms = Vec::new();
        for (c1, p1) in &self.terms {
            for (c2, p2) in &other.terms {
                terms.push((c1 + c2, p1.mul(p2)));
            }
        }
        ExpPoly { terms }.cleaned()
    }

    fn mul_poly(&self, p: &Poly) -> ExpPoly {
        ExpPoly {
            terms: self.terms.iter().map(|(c, q)| (*c, q.mul(p))).collect(),
        }
        .cleaned()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The polynomial if there are no exponential factors.
    fn rational_part(&self) -> Option<Poly> {
        match self.terms.as_slice() {
            [] => Some(Poly(Vec::new())),
            [(c, p)] if *c == 0.0 => Some(p.clone()),
            _ => None,
        }
    }

    fn derivative(&self) -> ExpPoly {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|(c, p)| (*c, p.derivative().add(&p.scale(Complex64::new(*c, 0.0)))))
                .collect(),
        }
        .cleaned()
    }

    fn eval_with_scale(&self, s: Complex64) -> (Complex64, f64) {
        let mut value = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for (c, p) in &self.terms {
            let e = (s * *c).exp();
            value += p.eval(s) * e;
            scale += p.abs_eval(s) * e.norm();
        }
        (value, scale)
    }

    /// Number of leading derivatives (up to `limit`) vanishing at `z`.
    fn vanishing_order(&self, z: Complex64, limit: usize) -> usize {
        let mut current = self.clone();
        let mut order = 0;
        while order < limit {
            let (value, scale) = current.eval_with_scale(z);
            if scale == 0.0 || value.norm() <= VANISH_TOL * scale {
                order += 1;
                current = current.derivative();
            } else {
                break;
            }
        }
        order
    }
}

#[derive(Debug, Clone)]
pub(crate) struct NormalForm {
    pub num: ExpPoly,
    pub den: Poly,
}

pub(crate) fn normalize(expr: &Expr) -> Result<NormalForm, Violation> {
    let one = Poly::one();
    Ok(match expr {
        Expr::Const(c) => NormalForm {
            num: ExpPoly::single(0.0, Poly::constant(*c)),
            den: one,
        },
        Expr::Var => NormalForm {
            num: ExpPoly::single(0.0, Poly(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])),
            den: one,
        },
        Expr::Exp(c) => NormalForm {
            num: ExpPoly::single(*c, one.clone()),
            den: one,
        },
        Expr::Blaschke(a) => NormalForm {
            num: ExpPoly::single(0.0, Poly(vec![-a, Complex64::new(1.0, 0.0)])),
            den: Poly(vec![a.conj(), Complex64::new(1.0, 0.0)]),
        },
        Expr::Add(l, r) | Expr::Sub(l, r) => {
            let l = normalize(l)?;
            let mut r = normalize(r)?;
            if matches!(expr, Expr::Sub(..)) {
                r.num = r.num.neg();
            }
            NormalForm {
                num: l.num.mul_poly(&r.den).add(&r.num.mul_poly(&l.den)),
                den: l.den.mul(&r.den),
            }
        }
        Expr::Mul(l, r) => {
            let l = normalize(l)?;
            let r = normalize(r)?;
            NormalForm {
                num: l.num.mul(&r.num),
                den: l.den.mul(&r.den),
            }
        }
        Expr::Div(l, r) => {
            let l = normalize(l)?;
            let r = normalize(r)?;
            if r.num.is_zero() {
                return Err(Violation {
                    subterm: expr.to_string(),
                    reason: "division by zero".into(),
                });
            }
            let Some(divisor) = r.num.rational_part() else {
                return Err(Violation {
                    subterm: expr.to_string(),
                    reason: "denominator contains exp(); only rational denominators can be certified".into(),
                });
            };
            NormalForm {
                num: l.num.mul_poly(&r.den),
                den: l.den.mul(&divisor),
            }
        }
    })
}

/// Group numerically repeated roots: `(center, multiplicity)`.
fn cluster_roots(roots: &[Complex64]) -> Vec<(Complex64, usize)> {
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for &z in roots {
        let hit = clusters
            .iter_mut()
            .find(|(c, m)| ((*c / *m as f64) - z).norm() <= ROOT_CLUSTER * z.norm().max(1.0));
        match hit {
            Some((sum, m)) => {
                *sum += z;
                *m += 1;
            }
            None => clusters.push((z, 1)),
        }
    }
    clusters
        .into_iter()
        .map(|(sum, m)| (sum / m as f64, m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspec::parser::parse_expr;

    fn cert(text: &str) -> Certification {
        certify_hinf(&parse_expr(text).unwrap())
    }

    #[test]
    fn cayley_passes_with_pole_at_one() {
        let c = cert("(1+s)/(1-s)");
        assert!(c.passed());
        assert_eq!(c.poles.len(), 1);
        assert!((c.poles[0].location - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn left_half_plane_pole_fails_and_names_the_division() {
        let c = cert("2 + 1/(1+s)");
        assert!(!c.passed());
        assert!((c.poles[0].location - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert_eq!(c.violations[0].subterm, "1.0/(1.0+s)");
    }

    #[test]
    fn exp_without_poles_passes() {
        let c = cert("exp(2*s)");
        assert!(c.passed());
        assert!(c.poles.is_empty());
        assert_eq!(c.exp_coefficients, vec![2.0]);
    }

    #[test]
    fn negative_exp_coefficient_fails() {
        let c = cert("exp(-1*s)");
        assert!(!c.passed());
        assert_eq!(c.violations[0].subterm, "exp(-1.0*s)");
    }

    #[test]
    fn boxcar_transform_has_a_removable_point() {
        let c = cert("(exp(1*s)-1)/s");
        assert!(c.passed(), "{c:?}");
        assert!(c.poles.is_empty());
        assert_eq!(c.removable.len(), 1);
        assert!(c.removable[0].norm() < 1e-12);
    }

    #[test]
    fn unbounded_and_degenerate_inputs_fail() {
        assert!(!cert("s").passed());
        assert!(!cert("s*exp(1*s)").passed());
        assert!(!cert("1/(s-s)").passed());
        assert!(!cert("1/(2-exp(1*s))").passed());
        assert!(!cert("1/s").passed());
        assert!(!cert("1/(s*s)").passed());
        assert!(!cert("1/(1e-9-s)").passed(), "pole inside the margin");
        assert!(!cert("blaschke(0.5)").passed());
        assert!(cert("s/(1-s)").passed());
        assert!(cert("(s-1)/(s-1)").passed());
        assert!(cert("1/((1-s)*(1-s))").passed());
    }

    #[test]
    fn double_pole_order() {
        let c = cert("1/((2-s)*(2-s))");
        assert!(c.passed());
        assert_eq!(c.poles.len(), 1);
        assert_eq!(c.poles[0].order, 2);
    }

    #[test]
    fn blaschke_poles_mirror_zeros() {
        let c = cert("blaschke(-1,2)*blaschke(-0.5)");
        assert!(c.passed());
        let mut re: Vec<f64> = c.poles.iter().map(|p| p.location.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] - 0.5).abs() < 1e-12 && (re[1] - 1.0).abs() < 1e-12);
    }
}
