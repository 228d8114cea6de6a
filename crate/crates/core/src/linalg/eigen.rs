//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies a real Givens rotation to the resulting real
//! symmetric 2x2 block. Sweeps visit pivots in row-major order so results are
//! reproducible bit for bit.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::ComplexMatrix;
use crate::error::{shape, Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition<T: Real> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> EigenDecomposition<T> {
    /// `V f(Λ) V^dagger`.
    pub fn apply_fn(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let v = &self.eigenvectors;
        let n = v.rows();
        let fl: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * v[(j, k)].conj() * fl[k]).sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.apply_fn(|l| l)
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex<T>> {
        self.eigenvectors.column(k)
    }
}

/// Hermitian eigendecomposition. Only the upper triangle is trusted up to the
/// Hermiticity of the input; callers should pass Hermitian matrices.
pub fn eigh<T: Real>(m: &ComplexMatrix<T>) -> Result<EigenDecomposition<T>> {
    if !m.is_square() {
        return Err(shape("eigendecomposition of a non-square matrix"));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::<T>::identity(n);
    let scale = a.frobenius_norm();
    if n <= 1 || scale.is_zero() {
        let eigenvalues = (0..n).map(|i| a[(i, i)].re).collect();
        return Ok(EigenDecomposition {
            eigenvalues,
            eigenvectors: v,
        });
    }
    let eps = T::epsilon();
    let target = eps * scale * T::count(n);
    let negligible = eps * scale * T::lit(1e-3);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::Numerical {
                msg: format!("Jacobi eigensolver did not converge for n = {n}"),
                iterations: sweeps,
                residual: off.to_f64().unwrap_or(f64::NAN) / scale.to_f64().unwrap_or(1.0),
            });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q, negligible);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| {
        diag[i]
            .partial_cmp(&diag[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, ascending.
pub fn eigvalsh<T: Real>(m: &ComplexMatrix<T>) -> Result<Vec<T>> {
    eigh(m).map(|e| e.eigenvalues)
}

fn off_diagonal_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate<T: Real>(
    a: &mut ComplexMatrix<T>,
    v: &mut ComplexMatrix<T>,
    p: usize,
    q: usize,
    negligible: T,
) {
    let apq = a[(p, q)];
    let g = apq.norm();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if g <= negligible {
        a[(p, q)] = Complex::zero();
        a[(q, p)] = Complex::zero();
        return;
    }
    let phase = apq / g; // e^{i phi}
    let two = T::lit(2.0);
    let theta = (aqq - app) / (two * g);
    let t = if theta >= T::zero() {
        T::one() / (theta + (theta * theta + T::one()).sqrt())
    } else {
        -T::one() / (-theta + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    // G = diag(1, e^{-i phi}) R, R = [[c, s], [-s, c]].
    let gpp = Complex::new(c, T::zero());
    let gpq = Complex::new(s, T::zero());
    let gqp = phase.conj() * (-s);
    let gqq = phase.conj() * c;

    let n = a.rows();
    // A <- A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * gpp + akq * gqp;
        a[(k, q)] = akp * gpq + akq * gqq;
    }
    // A <- G^dagger A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
        a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
}
