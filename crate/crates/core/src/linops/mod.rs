//! Dense complex linear algebra for small generator matrices.
//!
//! Everything here works on `nalgebra` dense complex matrices. A
//! [`GeneratorMatrix`] caches its complex Schur form and, when the
//! eigenvector basis is usable, a [`SpectralDecomposition`]; the kernels
//! below pick between the spectral route and a Schur/Padé route based on
//! the eigenvector condition number.

mod expm;
mod io;
mod lyapunov;

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use expm::expm;
pub use io::MatrixFile;
pub use lyapunov::{lyapunov_gram, solve_lyapunov_kronecker, GramianMatrix};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Generators whose spectral abscissa is not below this are rejected.
pub const STABILITY_MARGIN: f64 = 1e-9;
/// Above this eigenvector condition the matrix is flagged non-diagonalizable.
pub const MAX_DECOMPOSITION_CONDITION: f64 = 1e12;
/// Spectral routes (exponential, square root, Lyapunov) are used up to this condition.
pub const SPECTRAL_ROUTE_CONDITION: f64 = 1e6;

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 100_000;

/// Eigendecomposition `A = V diag(λ) V⁻¹`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Complex64>,
    pub right_vectors: CMat,
    pub inverse_vectors: CMat,
    /// `‖V‖·‖V⁻¹‖` in the spectral norm.
    pub condition: f64,
}

impl SpectralDecomposition {
    /// `V diag(f(λ)) V⁻¹`.
    pub fn apply_scalar_fn(&self, f: impl Fn(Complex64) -> Complex64) -> CMat {
        let mut scaled = self.right_vectors.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let fj = f(lambda);
            scaled.column_mut(j).scale_mut_complex(fj);
        }
        scaled * &self.inverse_vectors
    }

    pub fn try_apply_scalar_fn(
        &self,
        f: impl Fn(Complex64) -> Result<Complex64>,
    ) -> Result<CMat> {
        let mut scaled = self.right_vectors.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let fj = f(lambda)?;
            scaled.column_mut(j).scale_mut_complex(fj);
        }
        Ok(scaled * &self.inverse_vectors)
    }
}

trait ScaleComplex {
    fn scale_mut_complex(&mut self, factor: Complex64);
}

impl<S> ScaleComplex for nalgebra::Matrix<Complex64, nalgebra::Dyn, nalgebra::U1, S>
where
    S: nalgebra::StorageMut<Complex64, nalgebra::Dyn, nalgebra::U1>,
{
    fn scale_mut_complex(&mut self, factor: Complex64) {
        for z in self.iter_mut() {
            *z *= factor;
        }
    }
}

/// Complex Schur form `A = Q T Q*` with `Q` unitary and `T` upper triangular.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub unitary: CMat,
    pub triangular: CMat,
}

impl SchurForm {
    /// Hermitian input gets an exactly diagonal triangular factor.
    pub fn new(m: &CMat) -> Result<Self> {
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if (m - m.adjoint()).iter().all(|z| z.norm() <= 1e-14 * scale) {
            let eig = SymmetricEigen::new((m + m.adjoint()) * Complex64::new(0.5, 0.0));
            let triangular = CMat::from_diagonal(&eig.eigenvalues.map(|x| Complex64::new(x, 0.0)));
            return Ok(SchurForm {
                unitary: eig.eigenvectors,
                triangular,
            });
        }
        let schur = Schur::try_new(m.clone(), SCHUR_EPS, SCHUR_MAX_ITER)
            .ok_or_else(|| Error::Conditioning("Schur iteration did not converge".into()))?;
        let (unitary, mut triangular) = schur.unpack();
        let n = triangular.nrows();
        for j in 0..n {
            for i in j + 1..n {
                triangular[(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
        Ok(SchurForm {
            unitary,
            triangular,
        })
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.triangular.diagonal().iter().copied().collect()
    }
}

/// Generator of an exponentially stable matrix semigroup `e^{At}`.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    label: String,
    entries: CMat,
    schur: SchurForm,
    spectral_abscissa: f64,
    decomposition: Option<SpectralDecomposition>,
    eigvec_condition: f64,
}

impl GeneratorMatrix {
    pub fn new(entries: CMat) -> Result<Self> {
        Self::with_label("custom", entries)
    }

    pub fn with_label(label: impl Into<String>, entries: CMat) -> Result<Self> {
        check_finite(&entries)?;
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::invalid(format!(
                "generator must be a non-empty square matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let schur = SchurForm::new(&entries)?;
        let spectral_abscissa = schur
            .eigenvalues()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        if spectral_abscissa >= -STABILITY_MARGIN {
            return Err(Error::NotStable {
                abscissa: spectral_abscissa,
            });
        }
        let (decomposition, eigvec_condition) = match decompose(&entries, &schur) {
            Ok(d) => {
                let c = d.condition;
                (Some(d), c)
            }
            Err(Error::NonDiagonalizable { condition }) => (None, condition),
            Err(e) => return Err(e),
        };
        Ok(GeneratorMatrix {
            label: label.into(),
            entries,
            schur,
            spectral_abscissa,
            decomposition,
            eigvec_condition,
        })
    }

    /// Real diagonal generator `diag(values)`.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let m = CMat::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::with_label(format!("diag:{}", join_f64(values)), m)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let m = CMat::from_fn(n, rows.first().map_or(0, |r| r.len()), |i, j| {
            Complex64::new(rows[i][j], 0.0)
        });
        Self::new(m)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn schur(&self) -> &SchurForm {
        &self.schur
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.schur.eigenvalues()
    }

    pub fn spectral_abscissa(&self) -> f64 {
        self.spectral_abscissa
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvector condition number (`inf` when the matrix is defective).
    pub fn eigvec_condition(&self) -> f64 {
        self.eigvec_condition
    }

    pub fn decomposition(&self) -> Option<&SpectralDecomposition> {
        self.decomposition.as_ref()
    }

    /// Decomposition usable for the spectral routes, if any.
    pub fn well_conditioned(&self) -> Option<&SpectralDecomposition> {
        self.decomposition
            .as_ref()
            .filter(|d| d.condition <= SPECTRAL_ROUTE_CONDITION)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let diff = (&self.entries - self.entries.adjoint()).norm();
        diff <= tol * self.entries.norm().max(f64::MIN_POSITIVE)
    }

    /// The generator `A*` of the adjoint semigroup.
    pub fn adjoint(&self) -> Result<GeneratorMatrix> {
        Self::with_label(format!("{}*", self.label), self.entries.adjoint())
    }
}

fn join_f64(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn check_finite(m: &CMat) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid("matrix has non-finite entries"))
    }
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Eigenvectors of an upper triangular matrix by back substitution.
fn triangular_eigenvectors(t: &CMat) -> CMat {
    let n = t.nrows();
    let tnorm = t.norm().max(f64::MIN_POSITIVE);
    let smin = f64::EPSILON * tnorm;
    let mut v = CMat::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        v[(k, k)] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut sum = Complex64::new(0.0, 0.0);
            for j in i + 1..=k {
                sum += t[(i, j)] * v[(j, k)];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < smin {
                d = Complex64::new(smin, 0.0);
            }
            v[(i, k)] = -sum / d;
        }
        let norm = v.column(k).norm();
        if norm.is_finite() && norm > 0.0 {
            v.column_mut(k).unscale_mut(norm);
        }
    }
    v
}

fn decompose(a: &CMat, schur: &SchurForm) -> Result<SpectralDecomposition> {
    let n = a.nrows();
    let v = &schur.unitary * triangular_eigenvectors(&schur.triangular);
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonDiagonalizable {
            condition: f64::INFINITY,
        });
    }
    let vinv = match v.clone().try_inverse() {
        Some(m) => m,
        None => {
            return Err(Error::NonDiagonalizable {
                condition: f64::INFINITY,
            })
        }
    };
    let condition = spectral_norm(&v) * spectral_norm(&vinv);
    if !condition.is_finite() || condition > MAX_DECOMPOSITION_CONDITION {
        return Err(Error::NonDiagonalizable {
            condition: if condition.is_finite() {
                condition
            } else {
                f64::INFINITY
            },
        });
    }
    let eigenvalues = schur.eigenvalues();
    let decomposition = SpectralDecomposition {
        eigenvalues,
        right_vectors: v,
        inverse_vectors: vinv,
        condition,
    };
    let rebuilt = decomposition.apply_scalar_fn(|z| z);
    if (&rebuilt - a).norm() > 1e-8 * a.norm().max(1e-300) * (n as f64).sqrt() {
        return Err(Error::NonDiagonalizable { condition });
    }
    Ok(decomposition)
}

/// Largest singular value.
fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Spectral norm `‖M‖₂` (largest singular value).
pub fn operator_norm(m: &CMat) -> Result<f64> {
    check_finite(m)?;
    Ok(spectral_norm(m))
}

pub fn spectral_abscissa(a: &GeneratorMatrix) -> f64 {
    a.spectral_abscissa()
}

pub fn spectral_decompose(a: &GeneratorMatrix) -> Result<SpectralDecomposition> {
    a.decomposition()
        .cloned()
        .ok_or(Error::NonDiagonalizable {
            condition: a.eigvec_condition(),
        })
}

/// `e^{At}` for `t ≥ 0`.
///
/// Uses the eigendecomposition when its condition is at most
/// [`SPECTRAL_ROUTE_CONDITION`], scaling and squaring otherwise.
pub fn matrix_exponential(a: &GeneratorMatrix, t: f64) -> Result<CMat> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid(format!("time must be finite and >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(identity(a.dim()));
    }
    match a.well_conditioned() {
        Some(d) => Ok(d.apply_scalar_fn(|z| (z * t).exp())),
        None => Ok(expm(&(a.entries() * Complex64::new(t, 0.0)))),
    }
}

/// Principal square root of `−A`.
pub fn sqrt_minus_a(a: &GeneratorMatrix) -> Result<CMat> {
    for lambda in a.eigenvalues() {
        let mu = -lambda;
        if mu.re <= 0.0 && mu.im.abs() <= 1e-14 * mu.norm().max(1.0) {
            return Err(Error::Branch(format!("{mu}")));
        }
    }
    match a.well_conditioned() {
        Some(d) => Ok(d.apply_scalar_fn(|z| (-z).sqrt())),
        None => {
            let schur = a.schur();
            let r = sqrt_upper_triangular(&(-&schur.triangular));
            Ok(&schur.unitary * r * schur.unitary.adjoint())
        }
    }
}

/// Principal square root of an upper triangular matrix (Björck–Hammarling).
pub fn sqrt_upper_triangular(t: &CMat) -> CMat {
    let n = t.nrows();
    let mut r = CMat::zeros(n, n);
    for j in 0..n {
        r[(j, j)] = t[(j, j)].sqrt();
        for i in (0..j).rev() {
            let mut s = t[(i, j)];
            for k in i + 1..j {
                s -= r[(i, k)] * r[(k, j)];
            }
            r[(i, j)] = s / (r[(i, i)] + r[(j, j)]);
        }
    }
    r
}

/// Resolvent `(A − rI)⁻¹` for `Re r > 0`.
pub fn resolvent(a: &GeneratorMatrix, r: Complex64) -> Result<CMat> {
    if !(r.re.is_finite() && r.im.is_finite()) {
        return Err(Error::invalid("resolvent point must be finite"));
    }
    let n = a.dim();
    let shifted = a.entries() - identity(n) * r;
    let inv = shifted
        .clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Singular(format!("A - ({r})I is singular")))?;
    let residual = (&shifted * &inv - identity(n)).norm();
    if !residual.is_finite() || residual > 1e-6 {
        return Err(Error::Singular(format!(
            "A - ({r})I inverse residual {residual:e}"
        )));
    }
    Ok(inv)
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn hermitian_lambda_max(m: &CMat) -> f64 {
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(sym).eigenvalues.max()
}

pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(sym).eigenvalues.iter().copied().collect()
}

/// Solve `X T = Y` for upper triangular `T`.
pub fn solve_right_upper(t: &CMat, y: &CMat) -> Option<CMat> {
    // X T = Y  <=>  Tᵀ Xᵀ = Yᵀ with Tᵀ lower triangular.
    let tt = t.transpose();
    let xt = tt.solve_lower_triangular(&y.transpose())?;
    Some(xt.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn jordan2() -> GeneratorMatrix {
        GeneratorMatrix::from_real_rows(&[&[-1.0, 1.0], &[0.0, -1.0]]).unwrap()
    }

    fn random_stable(n: usize, seed: u64) -> GeneratorMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = CMat::from_fn(n, n, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let abscissa = SchurForm::new(&g)
            .unwrap()
            .eigenvalues()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        GeneratorMatrix::new(g - identity(n) * c(abscissa + 1.0)).unwrap()
    }

    /// Truncated Taylor series, used only as an oracle for small-norm arguments.
    fn taylor_exp(m: &CMat) -> CMat {
        let n = m.nrows();
        let mut term = identity(n);
        let mut sum = identity(n);
        for k in 1..60 {
            term = &term * m / c(k as f64);
            sum += &term;
        }
        sum
    }

    #[test]
    fn exponential_at_zero_is_identity() {
        let a = random_stable(5, 3);
        assert_eq!(matrix_exponential(&a, 0.0).unwrap(), identity(5));
    }

    #[test]
    fn exponential_of_diagonal() {
        let a = GeneratorMatrix::diagonal(&[-1.0, -2.0]).unwrap();
        let e = matrix_exponential(&a, 1.0).unwrap();
        assert_relative_eq!(e[(0, 0)].re, (-1.0f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(e[(1, 1)].re, (-2.0f64).exp(), max_relative = 1e-14);
        assert!(e[(0, 1)].norm() < 1e-16);
    }

    #[test]
    fn exponential_of_jordan_block_matches_series() {
        let a = jordan2();
        assert!(a.decomposition().is_none(), "Jordan block must be flagged");
        for &t in &[0.1, 1.0, 2.5] {
            let e = matrix_exponential(&a, t).unwrap();
            let oracle = taylor_exp(&(a.entries() * c(t)));
            let closed = CMat::from_row_slice(
                2,
                2,
                &[c(1.0), c(t), c(0.0), c(1.0)],
            ) * c((-t).exp());
            assert!((&e - &oracle).norm() < 1e-13, "t={t}");
            assert!((&e - &closed).norm() < 1e-13, "t={t}");
        }
    }

    #[test]
    fn exponential_rejects_negative_time() {
        let a = jordan2();
        assert!(matches!(
            matrix_exponential(&a, -1.0),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn semigroup_law_holds() {
        for (seed, a) in [(1u64, random_stable(6, 11)), (2, jordan2())] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..5 {
                let t = rng.random::<f64>() * 3.0;
                let s = rng.random::<f64>() * 3.0;
                let lhs = matrix_exponential(&a, t + s).unwrap();
                let rhs = matrix_exponential(&a, t).unwrap() * matrix_exponential(&a, s).unwrap();
                assert!((&lhs - &rhs).norm() <= 1e-9 * lhs.norm());
            }
        }
    }

    #[test]
    fn sqrt_examples() {
        let d = GeneratorMatrix::diagonal(&[-1.0, -4.0]).unwrap();
        let r = sqrt_minus_a(&d).unwrap();
        assert!((r[(0, 0)] - c(1.0)).norm() < 1e-14);
        assert!((r[(1, 1)] - c(2.0)).norm() < 1e-14);

        let minus_i = GeneratorMatrix::diagonal(&[-1.0, -1.0, -1.0]).unwrap();
        assert!((sqrt_minus_a(&minus_i).unwrap() - identity(3)).norm() < 1e-14);

        let r = sqrt_minus_a(&jordan2()).unwrap();
        let expected = CMat::from_row_slice(2, 2, &[c(1.0), c(-0.5), c(0.0), c(1.0)]);
        assert!((&r - &expected).norm() < 1e-12);
        assert!((&r * &r + jordan2().entries()).norm() < 1e-12);
    }

    #[test]
    fn sqrt_squares_back_with_principal_branch() {
        for seed in 0..5 {
            let a = random_stable(7, 100 + seed);
            let r = sqrt_minus_a(&a).unwrap();
            let err = (&r * &r + a.entries()).norm() / a.entries().norm();
            assert!(err < 1e-8, "seed {seed}: {err:e}");
            for z in SchurForm::new(&r).unwrap().eigenvalues() {
                assert!(z.re > 0.0);
            }
        }
    }

    #[test]
    fn resolvent_examples() {
        let a = GeneratorMatrix::diagonal(&[-1.0]).unwrap();
        assert!((resolvent(&a, c(1.0)).unwrap()[(0, 0)] - c(-0.5)).norm() < 1e-15);
        let a = GeneratorMatrix::diagonal(&[-1.0, -2.0]).unwrap();
        let r = resolvent(&a, c(1.0)).unwrap();
        assert!((r[(0, 0)] - c(-0.5)).norm() < 1e-15);
        assert!((r[(1, 1)] - c(-1.0 / 3.0)).norm() < 1e-15);

        let a = random_stable(8, 5);
        let r = resolvent(&a, Complex64::new(2.0, 1.0)).unwrap();
        let shifted = a.entries() - identity(8) * Complex64::new(2.0, 1.0);
        assert!((shifted * r - identity(8)).norm() < 1e-10 * 8f64.sqrt());
    }

    #[test]
    fn operator_norm_examples() {
        let m = CMat::from_row_slice(2, 2, &[c(3.0), c(0.0), c(0.0), c(-4.0)]);
        assert_relative_eq!(operator_norm(&m).unwrap(), 4.0, max_relative = 1e-12);
        let m = CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert_relative_eq!(operator_norm(&m).unwrap(), 1.0, max_relative = 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = CMat::from_fn(16, 16, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let oracle = hermitian_lambda_max(&(m.adjoint() * &m)).sqrt();
        assert_relative_eq!(operator_norm(&m).unwrap(), oracle, max_relative = 1e-10);

        let mut bad = m.clone();
        bad[(0, 0)] = Complex64::new(f64::NAN, 0.0);
        assert!(operator_norm(&bad).is_err());
    }

    #[test]
    fn operator_norm_is_submultiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let m = CMat::from_fn(6, 6, |_, _| Complex64::new(rng.random(), rng.random()));
            let n = CMat::from_fn(6, 6, |_, _| Complex64::new(rng.random(), -rng.random::<f64>()));
            let lhs = operator_norm(&(&m * &n)).unwrap();
            let rhs = operator_norm(&m).unwrap() * operator_norm(&n).unwrap();
            assert!(lhs <= rhs + 1e-9);
        }
    }

    #[test]
    fn abscissa_and_decomposition() {
        let a = GeneratorMatrix::diagonal(&[-1.0, -2.0]).unwrap();
        assert_relative_eq!(spectral_abscissa(&a), -1.0, max_relative = 1e-14);
        assert_relative_eq!(spectral_abscissa(&jordan2()), -1.0, max_relative = 1e-12);
        assert!(matches!(
            spectral_decompose(&jordan2()),
            Err(Error::NonDiagonalizable { .. })
        ));

        // Hermitian negative definite: real spectrum, unitary eigenvectors.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = CMat::from_fn(6, 6, |_, _| Complex64::new(rng.random(), rng.random()));
        let h = -(&b * b.adjoint()) - identity(6);
        let a = GeneratorMatrix::new(h.clone()).unwrap();
        let d = spectral_decompose(&a).unwrap();
        assert!(d.condition < 1.0 + 1e-8);
        let oracle = hermitian_eigenvalues(&h);
        for z in &d.eigenvalues {
            assert!(z.im.abs() < 1e-10);
            assert!(oracle.iter().any(|&o| (o - z.re).abs() < 1e-9 * o.abs()));
        }
        let rebuilt = d.apply_scalar_fn(|z| z);
        assert!((rebuilt - &h).norm() <= 1e-8 * h.norm());
    }

    #[test]
    fn stability_gate() {
        assert!(matches!(
            GeneratorMatrix::diagonal(&[-1.0, 0.0]),
            Err(Error::NotStable { .. })
        ));
        assert!(matches!(
            GeneratorMatrix::diagonal(&[-1.0, -1e-10]),
            Err(Error::NotStable { .. })
        ));
        assert!(GeneratorMatrix::diagonal(&[f64::NAN]).is_err());
        assert!(GeneratorMatrix::new(CMat::zeros(2, 3)).is_err());
    }

    #[test]
    fn exponential_decay_bound_fits() {
        let a = random_stable(6, 77);
        let half = a.spectral_abscissa() / 2.0;
        let ts: Vec<f64> = (0..200).map(|k| k as f64 * 0.1).collect();
        let norms: Vec<f64> = ts
            .iter()
            .map(|&t| operator_norm(&matrix_exponential(&a, t).unwrap()).unwrap())
            .collect();
        let kappa = ts
            .iter()
            .zip(&norms)
            .map(|(&t, &n)| n / (half * t).exp())
            .fold(0.0, f64::max);
        assert!(kappa.is_finite() && kappa >= 1.0);
        // Decay is strict beyond the transient.
        assert!(norms[199] < 1e-3);
    }
}
