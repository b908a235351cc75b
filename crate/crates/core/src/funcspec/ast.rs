use std::fmt;

use num_complex::Complex64;

/// Syntax tree of a function `g(s)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// `e^{c·s}`
    Exp(f64),
    /// `(s − a)/(s + ā)`
    Blaschke(Complex64),
}

impl Expr {
    pub fn constant(re: f64) -> Expr {
        Expr::Const(Complex64::new(re, 0.0))
    }

    pub fn add(l: Expr, r: Expr) -> Expr {
        Expr::Add(Box::new(l), Box::new(r))
    }

    pub fn sub(l: Expr, r: Expr) -> Expr {
        Expr::Sub(Box::new(l), Box::new(r))
    }

    pub fn mul(l: Expr, r: Expr) -> Expr {
        Expr::Mul(Box::new(l), Box::new(r))
    }

    pub fn div(l: Expr, r: Expr) -> Expr {
        Expr::Div(Box::new(l), Box::new(r))
    }

    /// Plain recursive evaluation; no pole or removable-singularity handling.
    pub fn eval_raw(&self, s: Complex64) -> Complex64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var => s,
            Expr::Add(l, r) => l.eval_raw(s) + r.eval_raw(s),
            Expr::Sub(l, r) => l.eval_raw(s) - r.eval_raw(s),
            Expr::Mul(l, r) => l.eval_raw(s) * r.eval_raw(s),
            Expr::Div(l, r) => l.eval_raw(s) / r.eval_raw(s),
            Expr::Exp(c) => (s * *c).exp(),
            Expr::Blaschke(a) => (s - a) / (s + a.conj()),
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Expr)) {
        visit(self);
        match self {
            Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) | Expr::Div(l, r) => {
                l.walk(visit);
                r.walk(visit);
            }
            _ => {}
        }
    }

    fn is_additive(&self) -> bool {
        matches!(self, Expr::Add(..) | Expr::Sub(..))
    }

    fn is_multiplicative(&self) -> bool {
        matches!(self, Expr::Mul(..) | Expr::Div(..))
    }
}

fn write_real(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    write!(f, "{x:?}")
}

fn write_const(f: &mut fmt::Formatter<'_>, z: Complex64) -> fmt::Result {
    if z.im == 0.0 {
        if z.re.is_sign_negative() {
            write!(f, "(")?;
            write_real(f, z.re)?;
            write!(f, ")")
        } else {
            write_real(f, z.re)
        }
    } else if z.re == 0.0 && !z.re.is_sign_negative() {
        write!(f, "(")?;
        write_real(f, z.im)?;
        write!(f, "i)")
    } else {
        write!(f, "(")?;
        write_real(f, z.re)?;
        write!(f, "{}", if z.im.is_sign_negative() { "-" } else { "+" })?;
        write_real(f, z.im.abs())?;
        write!(f, "i)")
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Canonical source form; reparsing it yields an identical tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(z) => write_const(f, *z),
            Expr::Var => write!(f, "s"),
            Expr::Add(l, r) | Expr::Sub(l, r) => {
                write_operand(f, l, false)?;
                write!(f, "{}", if matches!(self, Expr::Add(..)) { "+" } else { "-" })?;
                write_operand(f, r, r.is_additive())
            }
            Expr::Mul(l, r) | Expr::Div(l, r) => {
                write_operand(f, l, l.is_additive())?;
                write!(f, "{}", if matches!(self, Expr::Mul(..)) { "*" } else { "/" })?;
                write_operand(f, r, r.is_additive() || r.is_multiplicative())
            }
            Expr::Exp(c) => {
                write!(f, "exp(")?;
                write_real(f, *c)?;
                write!(f, "*s)")
            }
            Expr::Blaschke(a) => {
                write!(f, "blaschke(")?;
                write_real(f, a.re)?;
                write!(f, ",")?;
                write_real(f, a.im)?;
                write!(f, ")")
            }
        }
    }
}
