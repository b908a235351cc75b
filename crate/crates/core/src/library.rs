//! Named generator families and reference functions, addressable by string IDs.
//!
//! Generator IDs: `geometric:<n>`, `laplacian:<n>`, `jordan:<n>`,
//! `random:<n>[:<seed>]`, `diag:<v1>,<v2>,...` and `block:<n>:<lambda>`
//! (a single Jordan block). Function IDs: `one`, `cayley`, `resolvent`,
//! `shift`, `boxcar`, `blaschke5`, or any expression source.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::funcspec::FuncExpr;
use crate::linops::{CMat, GeneratorMatrix, SchurForm};

/// Largest `|λ|` in the stiff families; the slowest mode sits at `−1`.
pub const FAMILY_STIFFNESS: f64 = 64.0;
/// Spectral spread of the Jordan-perturbed family: eigenvalues in `[−8, −1]`.
pub const JORDAN_SPREAD: f64 = 7.0;
/// Superdiagonal coupling relative to the eigenvalue gap.
pub const JORDAN_COUPLING: f64 = 3.0;
pub const DEFAULT_FAMILY_SEED: u64 = 20_240_611;
pub const BLASCHKE_SEED: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Diagonal with geometrically spaced spectrum from `−1` to `−64`.
    Geometric,
    /// Shifted, scaled Dirichlet Laplacian: self-adjoint, spectrum in `(−64, −1)`.
    Laplacian,
    /// Diagonal `−1 … −8` plus a superdiagonal: non-normal.
    Jordan,
    /// Complex Gaussian matrix shifted to spectral abscissa `−1`.
    Random,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Geometric, Family::Laplacian, Family::Jordan, Family::Random];

    pub fn name(self) -> &'static str {
        match self {
            Family::Geometric => "geometric",
            Family::Laplacian => "laplacian",
            Family::Jordan => "jordan",
            Family::Random => "random",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::invalid(format!("unknown generator family `{name}`")))
    }

    pub fn is_self_adjoint(self) -> bool {
        matches!(self, Family::Geometric | Family::Laplacian)
    }

    pub fn build(self, n: usize) -> Result<GeneratorMatrix> {
        self.build_seeded(n, DEFAULT_FAMILY_SEED)
    }

    pub fn build_seeded(self, n: usize, seed: u64) -> Result<GeneratorMatrix> {
        if n == 0 {
            return Err(Error::invalid("family dimension must be positive"));
        }
        let label = format!("{}:{n}", self.name());
        let real = |re: f64| Complex64::new(re, 0.0);
        let m = match self {
            Family::Geometric => {
                let q = if n == 1 { 0.0 } else { (FAMILY_STIFFNESS.log2() / (n - 1) as f64).min(1.0) };
                CMat::from_fn(n, n, |i, j| if i == j { real(-(q * i as f64).exp2()) } else { real(0.0) })
            }
            Family::Laplacian => {
                // −I − s·(tridiag(−1, 2, −1) − lowest eigenvalue), so the abscissa is exactly −1.
                let scale = (FAMILY_STIFFNESS - 1.0) / 4.0;
                let lowest = 4.0 * (std::f64::consts::PI / (2.0 * (n + 1) as f64)).sin().powi(2);
                CMat::from_fn(n, n, |i, j| match i.abs_diff(j) {
                    0 => real(-1.0 - scale * (2.0 - lowest)),
                    1 => real(scale),
                    _ => real(0.0),
                })
            }
            Family::Jordan => {
                let gap = if n == 1 { 0.0 } else { JORDAN_SPREAD / (n - 1) as f64 };
                let coupling = if n == 1 { 0.0 } else { JORDAN_COUPLING * gap };
                CMat::from_fn(n, n, |i, j| {
                    if i == j {
                        real(-(1.0 + gap * i as f64))
                    } else if j == i + 1 {
                        real(coupling)
                    } else {
                        real(0.0)
                    }
                })
            }
            Family::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
                let scale = 1.0 / (n as f64).sqrt();
                let mut m = CMat::from_fn(n, n, |_, _| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im) * scale
                });
                let abscissa = SchurForm::new(&m)?
                    .eigenvalues()
                    .iter()
                    .map(|z| z.re)
                    .fold(f64::NEG_INFINITY, f64::max);
                for i in 0..n {
                    m[(i, i)] -= real(abscissa + 1.0);
                }
                m
            }
        };
        GeneratorMatrix::with_label(label, m)
    }
}

/// Parse a generator ID into a matrix.
pub fn builtin_generator(id: &str) -> Result<GeneratorMatrix> {
    let (kind, rest) = id
        .split_once(':')
        .ok_or_else(|| Error::invalid(format!("generator id `{id}` has no `kind:` prefix")))?;
    let parse_f = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::invalid(format!("bad number `{s}` in generator id `{id}`")))
    };
    let parse_n = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::invalid(format!("bad dimension `{s}` in generator id `{id}`")))
    };
    match kind {
        "diag" => {
            let values = rest.split(',').map(parse_f).collect::<Result<Vec<_>>>()?;
            Ok(GeneratorMatrix::diagonal(&values)?.relabel(id))
        }
        "block" => {
            let (n, lambda) = rest
                .split_once(':')
                .ok_or_else(|| Error::invalid(format!("expected block:<n>:<lambda>, got `{id}`")))?;
            let (n, lambda) = (parse_n(n)?, parse_f(lambda)?);
            if n == 0 {
                return Err(Error::invalid("block dimension must be positive"));
            }
            let m = CMat::from_fn(n, n, |i, j| {
                if i == j {
                    Complex64::new(lambda, 0.0)
                } else if j == i + 1 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            GeneratorMatrix::with_label(id, m)
        }
        "random" => match rest.split_once(':') {
            Some((n, seed)) => {
                let seed = seed
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| Error::invalid(format!("bad seed in `{id}`")))?;
                Family::Random.build_seeded(parse_n(n)?, seed)
            }
            None => Family::Random.build(parse_n(rest)?),
        },
        family => Family::from_name(family)?.build(parse_n(rest)?),
    }
}

/// A builtin generator ID, or else a path to a JSON matrix file.
pub fn load_generator(spec: &str) -> Result<GeneratorMatrix> {
    let path = std::path::Path::new(spec);
    if spec.ends_with(".json") || path.is_file() {
        return GeneratorMatrix::from_json_file(path);
    }
    builtin_generator(spec)
}

/// Seeded `k`-factor Blaschke product with zeros in
/// `Re ∈ [−2, −1/4]`, `Im ∈ [−2, 2]`.
pub fn random_blaschke(k: usize, rng: &mut impl Rng) -> Result<FuncExpr> {
    let zeros: Vec<Complex64> = (0..k)
        .map(|_| Complex64::new(rng.random_range(-2.0..-0.25), rng.random_range(-2.0..2.0)))
        .collect();
    FuncExpr::blaschke_product(&zeros)
}

/// The reference function set as `(id, function)` pairs.
pub fn reference_functions() -> Result<Vec<(&'static str, FuncExpr)>> {
    REFERENCE_IDS
        .iter()
        .map(|&id| Ok((id, builtin_function(id)?)))
        .collect()
}

pub const REFERENCE_IDS: [&str; 6] = ["one", "cayley", "resolvent", "shift", "boxcar", "blaschke5"];

/// A reference function by ID, or else the argument parsed as an expression.
pub fn builtin_function(id: &str) -> Result<FuncExpr> {
    match id {
        "one" => FuncExpr::parse("1"),
        "cayley" => FuncExpr::parse("(1+s)/(1-s)"),
        "resolvent" => FuncExpr::parse("1/(1-s)"),
        "shift" => FuncExpr::parse("exp(1*s)"),
        "boxcar" => FuncExpr::parse("(exp(1*s)-1)/s"),
        "blaschke5" => random_blaschke(5, &mut ChaCha8Rng::seed_from_u64(BLASCHKE_SEED)),
        source => FuncExpr::parse(source),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspec::{sup_norm, FrequencyGrid};

    #[test]
    fn families_are_stable_with_unit_margin() {
        for family in Family::ALL {
            for n in [1, 2, 8, 32] {
                let a = family.build(n).unwrap();
                assert_eq!(a.dim(), n);
                assert_eq!(a.label(), format!("{}:{n}", family.name()));
                assert!((a.spectral_abscissa() + 1.0).abs() < 1e-6, "{} {}", family.name(), a.spectral_abscissa());
                if family != Family::Random {
                    assert!(a.spectral_radius() <= FAMILY_STIFFNESS + 1e-9);
                }
                if family.is_self_adjoint() {
                    assert!(a.is_hermitian(1e-14));
                }
            }
        }
    }

    #[test]
    fn geometric_spectrum_is_doubling_at_small_n() {
        let a = Family::Geometric.build(4).unwrap();
        let mut ev: Vec<f64> = a.eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(ev, vec![-1.0, -2.0, -4.0, -8.0]);
    }

    #[test]
    fn jordan_family_is_non_normal_but_diagonalizable() {
        for n in [2, 8, 32] {
            let a = Family::Jordan.build(n).unwrap();
            assert!(!a.is_hermitian(1e-3));
            let cond = a.eigvec_condition();
            assert!(cond > 1.5 && cond <= 1e3, "n={n} cond={cond}");
        }
    }

    #[test]
    fn random_family_is_seeded() {
        let a = Family::Random.build_seeded(6, 1).unwrap();
        assert_eq!(a.entries(), Family::Random.build_seeded(6, 1).unwrap().entries());
        assert_ne!(a.entries(), Family::Random.build_seeded(6, 2).unwrap().entries());
    }

    #[test]
    fn builtin_generator_ids() {
        let d = builtin_generator("diag:-1,-2").unwrap();
        assert_eq!(d.dim(), 2);
        assert_eq!(d.entries()[(1, 1)], Complex64::new(-2.0, 0.0));
        let b = builtin_generator("block:3:-0.5").unwrap();
        assert_eq!(b.entries()[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(builtin_generator("laplacian:5").unwrap().dim(), 5);
        assert_eq!(builtin_generator("random:4:9").unwrap().entries(), Family::Random.build_seeded(4, 9).unwrap().entries());
        for bad in ["diag", "diag:x", "diag:1", "block:2", "block:0:-1", "nope:3", "jordan:-1"] {
            assert!(matches!(builtin_generator(bad), Err(Error::InvalidInput(_) | Error::NotStable { .. })), "{bad}");
        }
    }

    #[test]
    fn generators_load_from_files() {
        let dir = std::env::temp_dir().join(format!("hinfcalc-lib-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let good = dir.join("a.json");
        std::fs::write(&good, r#"{"dim":2,"entries":[[-1,0],[1,0],[0,0],[-2,0]]}"#).unwrap();
        let a = load_generator(good.to_str().unwrap()).unwrap();
        assert_eq!(a.entries()[(0, 1)], Complex64::new(1.0, 0.0));
        let bad = dir.join("b.json");
        std::fs::write(&bad, r#"{"dim":2,"entries":[[-1,0]]}"#).unwrap();
        assert!(matches!(load_generator(bad.to_str().unwrap()), Err(Error::InvalidInput(_))));
        assert!(load_generator(dir.join("missing.json").to_str().unwrap()).is_err());
        assert_eq!(load_generator("diag:-3").unwrap().dim(), 1);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn reference_functions_have_expected_sup_norms() {
        let grid = FrequencyGrid::default();
        let expected = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
        for ((id, g), want) in reference_functions().unwrap().into_iter().zip(expected) {
            let est = sup_norm(&g, &grid);
            assert!((est.value - want).abs() <= 1e-6, "{id}: {}", est.value);
        }
        assert_eq!(builtin_function("1/(2-s)").unwrap().source_text(), "1/(2-s)");
    }

    #[test]
    fn blaschke_zeros_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_blaschke(7, &mut rng).unwrap();
        assert_eq!(g.certification().poles.len(), 7);
        for p in &g.certification().poles {
            assert!((0.25..=2.0).contains(&p.location.re) && p.location.im.abs() <= 2.0);
        }
    }
}
