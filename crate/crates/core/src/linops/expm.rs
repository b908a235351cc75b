use num_complex::Complex64;

use super::CMat;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

fn one_norm(m: &CMat) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Matrix exponential by scaling and squaring with the degree-13 Padé approximant.
pub fn expm(m: &CMat) -> CMat {
    let n = m.nrows();
    let norm = one_norm(m);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = m * real(0.5f64.powi(squarings));
    let b = &PADE13;
    let ident = CMat::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * real(b[13]) + &a4 * real(b[11]) + &a2 * real(b[9]))
        + &a6 * real(b[7])
        + &a4 * real(b[5])
        + &a2 * real(b[3])
        + &ident * real(b[1]);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * real(b[12]) + &a4 * real(b[10]) + &a2 * real(b[8]))
        + &a6 * real(b[6])
        + &a4 * real(b[4])
        + &a2 * real(b[2])
        + &ident * real(b[0]);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).unwrap_or_else(|| CMat::from_element(n, n, real(f64::NAN)));
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_and_nilpotent() {
        let m = CMat::from_element(1, 1, Complex64::new(-3.0, 2.0));
        let e = expm(&m);
        assert!((e[(0, 0)] - Complex64::new(-3.0, 2.0).exp()).norm() < 1e-15);

        // e^{N} = I + N for N² = 0.
        let mut n = CMat::zeros(3, 3);
        n[(0, 2)] = real(7.0);
        let e = expm(&n);
        assert!((e[(0, 2)] - real(7.0)).norm() < 1e-13);
        assert!((e[(0, 0)] - real(1.0)).norm() < 1e-15);
    }

    #[test]
    fn large_norm_uses_squaring() {
        let m = CMat::from_row_slice(2, 2, &[real(-40.0), real(30.0), real(0.0), real(-50.0)]);
        let e = expm(&m);
        // Closed form for triangular 2x2 with distinct diagonal.
        let (a, d, b) = (-40.0f64, -50.0f64, 30.0);
        let off = b * (a.exp() - d.exp()) / (a - d);
        assert!((e[(0, 0)].re - a.exp()).abs() < 1e-14 * a.exp().max(1e-300) + 1e-30);
        assert!((e[(0, 1)].re - off).abs() <= 1e-12 * off.abs());
    }
}
