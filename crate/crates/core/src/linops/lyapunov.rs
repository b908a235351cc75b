use num_complex::Complex64;

use super::{check_finite, hermitian_eigenvalues, hermitian_lambda_max, CMat, CVec, GeneratorMatrix};
use crate::error::{Error, Result};

const RESIDUAL_TOL: f64 = 1e-8;
const DEGENERATE_SUM: f64 = 1e-12;

/// Observability Gramian `X = ∫₀^∞ e^{A*t} C*C e^{At} dt`, the solution of
/// `A*X + XA = −C*C`.
#[derive(Debug, Clone)]
pub struct GramianMatrix {
    pub entries: CMat,
}

impl GramianMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `⟨Xx, x⟩`, which equals `∫₀^∞ ‖Ce^{At}x‖² dt`.
    pub fn quadratic_form(&self, x: &CVec) -> f64 {
        x.dotc(&(&self.entries * x)).re
    }

    pub fn lambda_max(&self) -> f64 {
        hermitian_lambda_max(&self.entries).max(0.0)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    /// `‖A*X + XA + C*C‖` (Frobenius).
    pub fn residual(&self, a: &GeneratorMatrix, c: &CMat) -> f64 {
        let ad = a.entries().adjoint();
        let r = &ad * &self.entries + &self.entries * a.entries() + c.adjoint() * c;
        r.norm()
    }

    /// The Gramian of the same pair observed from time `ε` on:
    /// `e^{A*ε} X e^{Aε}`.
    pub fn shifted(&self, semigroup_at_eps: &CMat) -> GramianMatrix {
        GramianMatrix {
            entries: semigroup_at_eps.adjoint() * &self.entries * semigroup_at_eps,
        }
    }
}

/// Solve `A*X + XA = −C*C` for the observability Gramian of `(A, C)`.
pub fn lyapunov_gram(a: &GeneratorMatrix, c: &CMat) -> Result<GramianMatrix> {
    check_finite(c)?;
    let n = a.dim();
    if c.ncols() != n {
        return Err(Error::invalid(format!(
            "observation matrix has {} columns, generator dimension is {n}",
            c.ncols()
        )));
    }
    let w = c.adjoint() * c;
    let wnorm = w.norm();
    if wnorm == 0.0 {
        return Ok(GramianMatrix {
            entries: CMat::zeros(n, n),
        });
    }
    let tol = RESIDUAL_TOL * wnorm;

    let mut best: Option<(f64, GramianMatrix)> = None;
    if a.well_conditioned().is_some() {
        let x = spectral_solve(a, &w)?;
        let res = x.residual(a, c);
        if res <= tol {
            return Ok(x);
        }
        best = Some((res, x));
    }
    let x = schur_solve(a, &w)?;
    let res = x.residual(a, c);
    if res <= tol {
        return Ok(x);
    }
    if let Some((r, _)) = &best {
        if *r < res {
            return Err(Error::Conditioning(format!(
                "Lyapunov residual {r:e} exceeds {tol:e}"
            )));
        }
    }
    Err(Error::Conditioning(format!(
        "Lyapunov residual {res:e} exceeds {tol:e}"
    )))
}

fn symmetrize(x: CMat) -> CMat {
    (&x + x.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `X = V⁻* Y V⁻¹` with `Y_jk = −(V* W V)_jk / (λ̄_j + λ_k)`.
fn spectral_solve(a: &GeneratorMatrix, w: &CMat) -> Result<GramianMatrix> {
    let d = a
        .well_conditioned()
        .ok_or_else(|| Error::Conditioning("no usable eigendecomposition".into()))?;
    let v = &d.right_vectors;
    let mut y = v.adjoint() * w * v;
    let n = a.dim();
    for j in 0..n {
        for k in 0..n {
            let denom = d.eigenvalues[j].conj() + d.eigenvalues[k];
            if denom.norm() < DEGENERATE_SUM {
                return Err(Error::Conditioning(format!(
                    "eigenvalue sum |conj(l_{j}) + l_{k}| = {:e}",
                    denom.norm()
                )));
            }
            y[(j, k)] = -y[(j, k)] / denom;
        }
    }
    let vinv = &d.inverse_vectors;
    let x = vinv.adjoint() * y * vinv;
    Ok(GramianMatrix {
        entries: symmetrize(x),
    })
}

/// Bartels–Stewart on the complex Schur form.
fn schur_solve(a: &GeneratorMatrix, w: &CMat) -> Result<GramianMatrix> {
    let schur = a.schur();
    let q = &schur.unitary;
    let t = &schur.triangular;
    let f = q.adjoint() * w * q;
    let n = a.dim();
    let mut y = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut rhs = -f[(i, j)];
            for k in 0..i {
                rhs -= t[(k, i)].conj() * y[(k, j)];
            }
            for k in 0..j {
                rhs -= y[(i, k)] * t[(k, j)];
            }
            let denom = t[(i, i)].conj() + t[(j, j)];
            if denom.norm() < DEGENERATE_SUM {
                return Err(Error::Conditioning(format!(
                    "eigenvalue sum {:e} in Schur solve",
                    denom.norm()
                )));
            }
            y[(i, j)] = rhs / denom;
        }
    }
    Ok(GramianMatrix {
        entries: symmetrize(q * y * q.adjoint()),
    })
}

/// Dense Kronecker-product solve of `A*X + XA = −C*C`; O(n⁶), for cross-checks at small n.
pub fn solve_lyapunov_kronecker(a: &GeneratorMatrix, c: &CMat) -> Result<GramianMatrix> {
    let n = a.dim();
    let ad = a.entries().adjoint();
    let at = a.entries().transpose();
    let nn = n * n;
    let mut k = CMat::zeros(nn, nn);
    // Column-major vec: vec(A*X) = (I ⊗ A*) vec X, vec(XA) = (Aᵀ ⊗ I) vec X.
    for bj in 0..n {
        for i in 0..n {
            for j in 0..n {
                k[(bj * n + i, bj * n + j)] += ad[(i, j)];
            }
        }
    }
    for bi in 0..n {
        for bj in 0..n {
            let coef = at[(bi, bj)];
            for i in 0..n {
                k[(bi * n + i, bj * n + i)] += coef;
            }
        }
    }
    let w = c.adjoint() * c;
    let rhs = CVec::from_iterator(nn, w.iter().map(|z| -z));
    let sol = k
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("Kronecker Lyapunov system".into()))?;
    let x = CMat::from_column_slice(n, n, sol.as_slice());
    Ok(GramianMatrix {
        entries: symmetrize(x),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{identity, matrix_exponential, SchurForm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn scalar_gramian() {
        let a = GeneratorMatrix::diagonal(&[-1.0]).unwrap();
        let x = lyapunov_gram(&a, &CMat::from_element(1, 1, c(1.0))).unwrap();
        assert!((x.entries[(0, 0)] - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn diagonal_gramian_componentwise() {
        let a = GeneratorMatrix::diagonal(&[-1.0, -2.0]).unwrap();
        let cm = CMat::from_row_slice(1, 2, &[c(1.0), c(1.0)]);
        let x = lyapunov_gram(&a, &cm).unwrap();
        let expected = CMat::from_row_slice(2, 2, &[c(0.5), c(1.0 / 3.0), c(1.0 / 3.0), c(0.25)]);
        assert!((&x.entries - expected).norm() < 1e-14);
    }

    #[test]
    fn zero_observation_gives_zero() {
        let a = GeneratorMatrix::from_real_rows(&[&[-1.0, 1.0], &[0.0, -1.0]]).unwrap();
        let x = lyapunov_gram(&a, &CMat::zeros(3, 2)).unwrap();
        assert_eq!(x.entries, CMat::zeros(2, 2));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = GeneratorMatrix::diagonal(&[-1.0, -2.0]).unwrap();
        assert!(lyapunov_gram(&a, &CMat::zeros(1, 3)).is_err());
    }

    fn random_case(n: usize, seed: u64, jordan: bool) -> (GeneratorMatrix, CMat) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = CMat::from_fn(n, n, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        if jordan {
            g = CMat::from_fn(n, n, |i, j| {
                if i == j {
                    c(-1.0)
                } else if j == i + 1 {
                    c(1.0)
                } else {
                    c(0.0)
                }
            });
        } else {
            let abscissa = SchurForm::new(&g)
                .unwrap()
                .eigenvalues()
                .iter()
                .map(|z| z.re)
                .fold(f64::NEG_INFINITY, f64::max);
            g -= identity(n) * c(abscissa + 0.5);
        }
        let cm = CMat::from_fn(2, n, |_, _| Complex64::new(rng.random(), rng.random()));
        (GeneratorMatrix::new(g).unwrap(), cm)
    }

    #[test]
    fn residual_and_hermitian_psd() {
        for (seed, jordan) in [(1, false), (2, false), (3, true)] {
            let (a, cm) = random_case(6, seed, jordan);
            let x = lyapunov_gram(&a, &cm).unwrap();
            let wn = (cm.adjoint() * &cm).norm();
            assert!(x.residual(&a, &cm) <= 1e-8 * wn);
            assert!((&x.entries - x.entries.adjoint()).norm() <= 1e-10 * x.entries.norm());
            let lmax = x.lambda_max();
            assert!(x.eigenvalues().iter().all(|&l| l >= -1e-10 * lmax));
        }
    }

    #[test]
    fn matches_kronecker_oracle() {
        for (seed, jordan) in [(5, false), (6, true)] {
            let (a, cm) = random_case(5, seed, jordan);
            let x = lyapunov_gram(&a, &cm).unwrap();
            let k = solve_lyapunov_kronecker(&a, &cm).unwrap();
            assert!((&x.entries - &k.entries).norm() <= 1e-10 * k.entries.norm());
        }
    }

    #[test]
    fn quadratic_form_matches_time_quadrature() {
        let (a, cm) = random_case(4, 8, false);
        let x = lyapunov_gram(&a, &cm).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let v = CVec::from_fn(4, |_, _| Complex64::new(rng.random(), rng.random()));
        // Composite Simpson on [0, 60] with a fine step.
        let steps = 60_000;
        let h = 60.0 / steps as f64;
        let phi = matrix_exponential(&a, h).unwrap();
        let mut y = v.clone();
        let mut integral = 0.0;
        for k in 0..=steps {
            let w = if k == 0 || k == steps {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            integral += w * (&cm * &y).norm_squared();
            y = &phi * y;
        }
        integral *= h / 3.0;
        let q = x.quadratic_form(&v);
        assert!((q - integral).abs() <= 1e-6 * q, "{q} vs {integral}");
    }
}
