//! Small dense linear algebra: symmetric positive definite solves and the
//! spectral radius of nonnegative matrices.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Pivots at or below `PIVOT_RTOL * max|a_ii|` are treated as singular.
pub const PIVOT_RTOL: f64 = 1e-13;

const SYMMETRY_RTOL: f64 = 1e-8;

/// Solution of an SPD system together with the smallest LDL' pivot met.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdSolution<T> {
    pub x: T,
    pub min_pivot: f64,
}

/// LDL' factorization of a symmetric matrix (unit lower L stored below the
/// diagonal, D on the diagonal).
struct Ldl {
    lower: DMatrix<f64>,
    d: DVector<f64>,
    min_pivot: f64,
}

fn check_symmetric(a: &DMatrix<f64>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::invalid(format!("matrix is {}x{}, not square", a.nrows(), a.ncols())));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    for i in 0..a.nrows() {
        for j in 0..i {
            if (a[(i, j)] - a[(j, i)]).abs() > SYMMETRY_RTOL * scale {
                return Err(Error::invalid(format!("matrix not symmetric at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

fn factor(a: &DMatrix<f64>, context: &str) -> Result<Ldl> {
    check_symmetric(a)?;
    let n = a.nrows();
    let max_diag = (0..n).fold(0.0f64, |m, i| m.max(a[(i, i)].abs()));
    let threshold = PIVOT_RTOL * max_diag;
    let mut lower = DMatrix::<f64>::identity(n, n);
    let mut d = DVector::<f64>::zeros(n);
    let mut min_pivot = f64::INFINITY;
    for j in 0..n {
        let mut dj = a[(j, j)];
        for k in 0..j {
            dj -= lower[(j, k)] * lower[(j, k)] * d[k];
        }
        min_pivot = min_pivot.min(dj);
        if dj <= threshold || n == 0 {
            return Err(Error::Singular {
                pivot: dj,
                context: context.to_string(),
            });
        }
        d[j] = dj;
        for i in j + 1..n {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= lower[(i, k)] * lower[(j, k)] * d[k];
            }
            lower[(i, j)] = v / dj;
        }
    }
    Ok(Ldl { lower, d, min_pivot })
}

impl Ldl {
    fn solve_in_place(&self, b: &mut DMatrix<f64>) {
        let n = self.d.len();
        for c in 0..b.ncols() {
            for i in 0..n {
                let mut v = b[(i, c)];
                for k in 0..i {
                    v -= self.lower[(i, k)] * b[(k, c)];
                }
                b[(i, c)] = v;
            }
            for i in 0..n {
                b[(i, c)] /= self.d[i];
            }
            for i in (0..n).rev() {
                let mut v = b[(i, c)];
                for k in i + 1..n {
                    v -= self.lower[(k, i)] * b[(k, c)];
                }
                b[(i, c)] = v;
            }
        }
    }
}

/// Solves `a x = b` for symmetric positive definite `a`.
pub fn solve_spd(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<SpdSolution<DMatrix<f64>>> {
    if b.nrows() != a.nrows() {
        return Err(Error::invalid(format!(
            "right-hand side has {} rows, matrix has {}",
            b.nrows(),
            a.nrows()
        )));
    }
    let f = factor(a, "solve_spd")?;
    let mut x = b.clone();
    f.solve_in_place(&mut x);
    Ok(SpdSolution {
        x,
        min_pivot: f.min_pivot,
    })
}

/// Vector right-hand side version of [`solve_spd`].
pub fn solve_spd_vec(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<SpdSolution<DVector<f64>>> {
    let m = DMatrix::from_column_slice(b.len(), 1, b.as_slice());
    let s = solve_spd(a, &m)?;
    Ok(SpdSolution {
        x: DVector::from_column_slice(s.x.as_slice()),
        min_pivot: s.min_pivot,
    })
}

/// Inverse of an SPD matrix, labelled with `context` in singular errors.
pub fn inverse_spd(a: &DMatrix<f64>, context: &str) -> Result<SpdSolution<DMatrix<f64>>> {
    let f = factor(a, context)?;
    let mut x = DMatrix::<f64>::identity(a.nrows(), a.nrows());
    f.solve_in_place(&mut x);
    // symmetrize rounding noise
    let x = (&x + x.transpose()) * 0.5;
    Ok(SpdSolution {
        x,
        min_pivot: f.min_pivot,
    })
}

/// Quadratic form `b' a^-1 b` for SPD `a`.
pub fn spd_quadratic_form(a: &DMatrix<f64>, b: &DVector<f64>, context: &str) -> Result<SpdSolution<f64>> {
    let f = factor(a, context)?;
    let mut x = DMatrix::from_column_slice(b.len(), 1, b.as_slice());
    f.solve_in_place(&mut x);
    let q = b.iter().zip(x.iter()).map(|(u, v)| u * v).sum();
    Ok(SpdSolution {
        x: q,
        min_pivot: f.min_pivot,
    })
}

/// Adds `lambda` to every diagonal entry.
pub fn ridge(a: &DMatrix<f64>, lambda: f64) -> DMatrix<f64> {
    let mut r = a.clone();
    for i in 0..r.nrows() {
        r[(i, i)] += lambda;
    }
    r
}

const POWER_MAX_ITER: usize = 200_000;
const POWER_RTOL: f64 = 1e-14;

/// Largest eigenvalue modulus of a nonnegative square matrix.
///
/// Power iteration on `a + I` from the all-ones vector: for nonnegative `a`
/// the Perron root of `a + I` is `rho(a) + 1` and strictly dominates every
/// other eigenvalue modulus, so the iteration converges even for periodic
/// or reducible `a`.
pub fn spectral_radius(a: &DMatrix<f64>) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::invalid("spectral_radius needs a square matrix"));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("spectral_radius needs finite entries"));
    }
    if a.iter().any(|v| *v < 0.0) {
        return Err(Error::invalid(
            "spectral_radius works on nonnegative matrices; pass Abs(A) or use spectral_radius_bound",
        ));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(0.0);
    }
    let shifted = a + DMatrix::<f64>::identity(n, n);
    let mut x = DVector::<f64>::from_element(n, 1.0);
    let mut lambda = f64::NAN;
    let mut stable = 0;
    for _ in 0..POWER_MAX_ITER {
        let y = &shifted * &x;
        let norm = y.amax();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Numeric("power iteration produced a degenerate vector".into()));
        }
        if (norm - lambda).abs() <= POWER_RTOL * norm {
            stable += 1;
            if stable >= 3 {
                return Ok((norm - 1.0).max(0.0));
            }
        } else {
            stable = 0;
        }
        lambda = norm;
        x = y / norm;
    }
    Err(Error::NonConvergence {
        iterations: POWER_MAX_ITER,
        message: "spectral radius power iteration".into(),
        best_point: vec![lambda - 1.0],
        best_value: lambda - 1.0,
    })
}

/// Spectral radius of an arbitrary real square matrix through Gelfand's
/// formula `rho = lim ||A^k||^(1/k)`, evaluated at k = 2^40 by repeated
/// squaring with renormalization. The estimate approaches rho from above.
pub fn spectral_radius_bound(a: &DMatrix<f64>) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::invalid("spectral_radius_bound needs a square matrix"));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(0.0);
    }
    let mut m = a.clone();
    let mut log_scale = 0.0f64; // log of the factor divided out of A^k
    let mut k = 1.0f64;
    for _ in 0..40 {
        let norm = m.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        if !norm.is_finite() {
            return Err(Error::Numeric("overflow in Gelfand iteration".into()));
        }
        log_scale += norm.ln();
        m /= norm;
        m = &m * &m;
        log_scale *= 2.0;
        k *= 2.0;
    }
    let norm = m.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(((log_scale + norm.ln()) / k).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_solve() {
        let a = DMatrix::<f64>::identity(3, 3);
        let b = DVector::from_vec(vec![1.0, -2.0, 3.5]);
        let s = solve_spd_vec(&a, &b).unwrap();
        assert_eq!(s.x, b);
        assert_eq!(s.min_pivot, 1.0);
    }

    #[test]
    fn diagonal_solve() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let s = solve_spd_vec(&a, &DVector::from_vec(vec![2.0, 4.0])).unwrap();
        assert!((s.x[0] - 1.0).abs() < 1e-15 && (s.x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_hand_inverse() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let s = solve_spd_vec(&a, &DVector::from_vec(vec![1.0, 1.0])).unwrap();
        assert!((s.x[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.x[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.min_pivot - 1.5).abs() < 1e-15);
    }

    #[test]
    fn singular_reports_pivot() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        match solve_spd_vec(&a, &DVector::from_vec(vec![1.0, 1.0])) {
            Err(Error::Singular { pivot, .. }) => assert!(pivot.abs() < 1e-15),
            other => panic!("expected singular error, got {other:?}"),
        }
        let ind = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(inverse_spd(&ind, "x"), Err(Error::Singular { .. })));
    }

    #[test]
    fn asymmetric_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]);
        assert!(matches!(solve_spd_vec(&a, &DVector::from_vec(vec![1.0, 1.0])), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn spectral_radius_examples() {
        let d = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.9]);
        assert!((spectral_radius(&d).unwrap() - 0.9).abs() < 1e-10);
        let one = DMatrix::from_row_slice(1, 1, &[0.99]);
        assert!((spectral_radius(&one).unwrap() - 0.99).abs() < 1e-12);
        // lambda^2 = 0.5 lambda + 0.3
        let c = DMatrix::from_row_slice(2, 2, &[0.5, 0.3, 1.0, 0.0]);
        let root = (0.5 + (0.25f64 + 1.2).sqrt()) / 2.0;
        assert!((root - 0.852_080).abs() < 1e-6);
        assert!((spectral_radius(&c).unwrap() - root).abs() < 1e-8 * root);
        assert_eq!(spectral_radius(&DMatrix::zeros(3, 3)).unwrap(), 0.0);
        // periodic permutation matrix
        let perm = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!((spectral_radius(&perm).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gelfand_bound_on_signed_companion() {
        // 1 - 1.2 z + 0.35 z^2 has roots 2 and 1/0.7 -> companion eigenvalues 0.5, 0.7
        let c = DMatrix::from_row_slice(2, 2, &[1.2, -0.35, 1.0, 0.0]);
        let r = spectral_radius_bound(&c).unwrap();
        assert!((r - 0.7).abs() < 1e-9, "{r}");
    }

    fn spd_strategy() -> impl Strategy<Value = (DMatrix<f64>, DVector<f64>)> {
        (1usize..=50).prop_flat_map(|n| {
            (
                proptest::collection::vec(-1.0..1.0f64, n * n),
                proptest::collection::vec(-10.0..10.0f64, n),
            )
                .prop_map(move |(m, x)| {
                    let g = DMatrix::from_vec(n, n, m);
                    let a = &g * g.transpose() + DMatrix::<f64>::identity(n, n) * (n as f64 * 0.1);
                    (a, DVector::from_vec(x))
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn spd_round_trip((a, x) in spd_strategy()) {
            let b = &a * &x;
            let s = solve_spd_vec(&a, &b).unwrap();
            let err = (&s.x - &x).norm() / x.norm().max(1e-300);
            prop_assert!(err < 1e-8, "relative error {err}");
        }
    }
}
