//! Dense linear algebra on vectorised 3×3 operators.
//!
//! Vectorisation is column-stacking: `vec(ρ)[i + 3j] = ρ[(i, j)]`, so that
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};
use crate::operators::{Mat3, C64};

pub type Mat9 = SMatrix<C64, 9, 9>;
pub type Vec9 = SVector<C64, 9>;

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

pub fn vec(m: &Mat3) -> Vec9 {
    // nalgebra storage is column-major, which is exactly column stacking.
    Vec9::from_column_slice(m.as_slice())
}

pub fn unvec(v: &Vec9) -> Mat3 {
    Mat3::from_column_slice(v.as_slice())
}

/// Kronecker product A ⊗ B.
pub fn kron(a: &Mat3, b: &Mat3) -> Mat9 {
    let mut out = Mat9::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let aij = a[(i, j)];
            for k in 0..3 {
                for l in 0..3 {
                    out[(3 * i + k, 3 * j + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Superoperator of ρ ↦ A ρ.
pub fn left(a: &Mat3) -> Mat9 {
    kron(&Mat3::identity(), a)
}

/// Superoperator of ρ ↦ ρ B.
pub fn right(b: &Mat3) -> Mat9 {
    kron(&b.transpose(), &Mat3::identity())
}

/// Row vector `t` with `t · vec(X) = Tr(A X)`.
pub fn trace_functional(a: &Mat3) -> Vec9 {
    // Tr(A X) = Σ_ij A_ji X_ij = vec(Aᵀ) · vec(X)
    vec(&a.transpose())
}

pub fn norm1(m: &Mat9) -> f64 {
    (0..9).map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a [6/6] Padé approximant.
///
/// The matrix is scaled until ‖A/2^s‖₁ ≤ 1/2, where the Padé truncation error
/// is below 1e-17.
pub fn expm(a: &Mat9) -> Result<Mat9> {
    let norm = norm1(a);
    if !norm.is_finite() {
        return Err(Error::Numeric("expm: non-finite matrix".into()));
    }
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a * C64::new(0.5f64.powi(s), 0.0);

    // Padé [6/6] coefficients c_k = (2q−k)! q! / ((2q)! k! (q−k)!)
    const Q: usize = 6;
    let mut coeff = [0.0f64; Q + 1];
    coeff[0] = 1.0;
    for k in 1..=Q {
        coeff[k] = coeff[k - 1] * ((Q + 1 - k) as f64) / ((k * (2 * Q + 1 - k)) as f64);
    }
    let mut num = Mat9::identity();
    let mut den = Mat9::identity();
    let mut power = Mat9::identity();
    for (k, &c) in coeff.iter().enumerate().skip(1) {
        power *= scaled;
        let term = power * C64::new(c, 0.0);
        num += term;
        if k % 2 == 0 {
            den += term;
        } else {
            den -= term;
        }
    }
    let lu = den.lu();
    let mut r = lu
        .solve(&num)
        .ok_or_else(|| Error::Numeric("expm: singular Padé denominator".into()))?;
    for _ in 0..s {
        r = r * r;
    }
    Ok(r)
}

/// Eigendecomposition A = V diag(λ) V⁻¹ of a general complex 9×9 matrix.
#[derive(Debug, Clone)]
pub struct Eigen9 {
    pub values: [C64; 9],
    /// Right eigenvectors as unit-norm columns.
    pub vectors: Mat9,
    pub inverse: Mat9,
    /// ‖V‖₁‖V⁻¹‖₁ for the unit-column eigenvector matrix.
    pub condition: f64,
}

impl Eigen9 {
    /// Computes the decomposition from a complex Schur form A = Q T Q†.
    ///
    /// Eigenvectors of the triangular factor are obtained by back
    /// substitution; near-zero pivots are perturbed as in LAPACK `trevc`.
    pub fn new(a: &Mat9) -> Result<Self> {
        let schur = nalgebra::Schur::try_new(*a, 1e-15, 10_000)
            .ok_or_else(|| Error::Numeric("Schur iteration did not converge".into()))?;
        let (q, t) = schur.unpack();
        let scale = norm1(&t).max(f64::MIN_POSITIVE);
        let small = scale * f64::EPSILON;

        let mut values = [ZERO; 9];
        let mut y = Mat9::zeros();
        for k in 0..9 {
            let lambda = t[(k, k)];
            values[k] = lambda;
            y[(k, k)] = ONE;
            for j in (0..k).rev() {
                let mut acc = ZERO;
                for m in (j + 1)..=k {
                    acc += t[(j, m)] * y[(m, k)];
                }
                let mut pivot = t[(j, j)] - lambda;
                if pivot.norm() < small {
                    pivot = C64::new(small, 0.0);
                }
                y[(j, k)] = -acc / pivot;
            }
        }
        let mut vectors = q * y;
        for k in 0..9 {
            let n = vectors.column(k).norm();
            if !(n > 0.0) || !n.is_finite() {
                return Err(Error::Numeric("degenerate eigenvector".into()));
            }
            vectors.column_mut(k).scale_mut(1.0 / n);
        }
        let inverse = vectors
            .try_inverse()
            .ok_or_else(|| Error::Numeric("eigenvector matrix is singular".into()))?;
        let condition = norm1(&vectors) * norm1(&inverse);
        if !condition.is_finite() {
            return Err(Error::Numeric("eigenvector matrix is singular".into()));
        }
        Ok(Eigen9 { values, vectors, inverse, condition })
    }

    /// V diag(f(λ)) V⁻¹ applied to `x`.
    pub fn apply_fn(&self, x: &Vec9, f: impl Fn(C64) -> C64) -> Vec9 {
        let mut c = self.inverse * x;
        for (ck, &lk) in c.iter_mut().zip(self.values.iter()) {
            *ck *= f(lk);
        }
        self.vectors * c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Mat9 {
        Mat9::from_fn(|i, j| {
            let x = (i * 9 + j) as f64;
            C64::new((x * 0.37).sin(), (x * 0.91).cos() * 0.5) - if i == j { C64::new(2.0, 0.0) } else { ZERO }
        })
    }

    #[test]
    fn vec_roundtrip_and_kron_identity() {
        let a = Mat3::from_fn(|i, j| C64::new(i as f64 + 1.0, j as f64 - 0.5));
        let b = Mat3::from_fn(|i, j| C64::new((i * j) as f64, 1.0));
        let x = Mat3::from_fn(|i, j| C64::new(0.1 * i as f64, -0.3 * j as f64 + 0.2));
        assert_eq!(unvec(&vec(&x)), x);
        assert_eq!(vec(&x)[1 + 3 * 2], x[(1, 2)]);
        let lhs = vec(&(a * x * b));
        let rhs = kron(&b.transpose(), &a) * vec(&x);
        assert!((lhs - rhs).norm() < 1e-12);
        assert!((left(&a) * vec(&x) - vec(&(a * x))).norm() < 1e-12);
        assert!((right(&b) * vec(&x) - vec(&(x * b))).norm() < 1e-12);
        let t = trace_functional(&a);
        assert!(((t.transpose() * vec(&x))[0] - (a * x).trace()).norm() < 1e-12);
    }

    #[test]
    fn expm_of_diagonal() {
        let mut d = Mat9::zeros();
        for k in 0..9 {
            d[(k, k)] = C64::new(-(k as f64), 3.0 * k as f64);
        }
        let e = expm(&d).unwrap();
        for k in 0..9 {
            assert!((e[(k, k)] - d[(k, k)].exp()).norm() < 1e-13);
        }
    }

    #[test]
    fn expm_group_property() {
        let a = sample() * C64::new(1.7, 0.0);
        let e1 = expm(&a).unwrap();
        let e2 = expm(&(a * C64::new(2.0, 0.0))).unwrap();
        assert!((e1 * e1 - e2).norm() / e2.norm() < 1e-12);
    }

    #[test]
    fn eigen_reconstructs_and_agrees_with_expm() {
        let a = sample();
        let eig = Eigen9::new(&a).unwrap();
        for k in 0..9 {
            let v = eig.vectors.column(k);
            assert!((a * v - v * eig.values[k]).norm() < 1e-10);
        }
        let x = Vec9::from_fn(|i, _| C64::new(i as f64, 1.0));
        let via_eig = eig.apply_fn(&x, |l| (l * 0.8).exp());
        let via_expm = expm(&(a * C64::new(0.8, 0.0))).unwrap() * x;
        assert!((via_eig - via_expm).norm() < 1e-10 * via_expm.norm());
    }
}
