//! Tensor-product bookkeeping: Kronecker products, partial traces, partial
//! transposes and subsystem permutations over a [`Factorization`].
//!
//! Factors are listed left to right in `kron` order, so subsystem 0 carries
//! the most significant digit of a flat index.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use crate::error::{shape, Error, Result};
use crate::scalar::Real;

/// Default cap on the row (and column) count produced by [`kron`].
pub const DEFAULT_KRON_CAP: usize = 4096;

/// Ordered subsystem dimensions of a composite Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factorization(Vec<usize>);

impl Factorization {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(shape(format!("invalid subsystem dimensions {dims:?}")));
        }
        Ok(Self(dims))
    }

    /// Panics on a zero dimension.
    pub fn single(d: usize) -> Self {
        assert!(d > 0, "zero-dimensional factor");
        Self(vec![d])
    }

    /// Panics on a zero dimension.
    pub fn bipartite(a: usize, b: usize) -> Self {
        assert!(a > 0 && b > 0, "zero-dimensional factor");
        Self(vec![a, b])
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn concat(&self, other: &Self) -> Self {
        Self(self.0.iter().chain(&other.0).copied().collect())
    }

    /// Checks that the factorization annotates an `n x n` operator.
    pub fn check_square(&self, rows: usize, cols: usize) -> Result<()> {
        if rows != cols {
            return Err(shape(format!("operator is {rows}x{cols}, expected square")));
        }
        if self.total() != rows {
            return Err(shape(format!(
                "factorization {:?} has total dimension {} but operator has {rows}",
                self.0,
                self.total()
            )));
        }
        Ok(())
    }

    /// Product of the dimensions of the listed subsystems.
    pub fn dim_of(&self, subsystems: &[usize]) -> usize {
        subsystems.iter().map(|&s| self.0[s]).product()
    }

    /// Factorization that groups the listed subsystems into two parties.
    pub fn group(&self, left: &[usize]) -> Result<(Vec<usize>, Self)> {
        let right = self.complement(left)?;
        let order: Vec<usize> = left.iter().chain(&right).copied().collect();
        Ok((order, Self(vec![self.dim_of(left), self.dim_of(&right)])))
    }

    fn complement(&self, subset: &[usize]) -> Result<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        for &s in subset {
            if s >= self.0.len() || seen[s] {
                return Err(shape(format!(
                    "subsystem index set {subset:?} invalid for {} factors",
                    self.0.len()
                )));
            }
            seen[s] = true;
        }
        Ok((0..self.0.len()).filter(|&i| !seen[i]).collect())
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.0.len()];
        for k in (0..self.0.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.0[k + 1];
        }
        strides
    }

    /// Flat-index map for reordering factors: entry `i` is the old flat index of
    /// new flat index `i`, where new factor `k` is old factor `order[k]`.
    fn permutation_map(&self, order: &[usize]) -> Result<(Vec<usize>, Self)> {
        let n = self.0.len();
        let mut seen = vec![false; n];
        if order.len() != n
            || order
                .iter()
                .any(|&o| o >= n || std::mem::replace(&mut seen[o], true))
        {
            return Err(shape(format!(
                "{order:?} is not a permutation of {n} factors"
            )));
        }
        let new = Self(order.iter().map(|&o| self.0[o]).collect());
        let old_strides = self.strides();
        let total = self.total();
        let mut map = Vec::with_capacity(total);
        let mut digits = vec![0usize; n];
        for _ in 0..total {
            map.push(
                digits
                    .iter()
                    .zip(order)
                    .map(|(&d, &o)| d * old_strides[o])
                    .sum(),
            );
            for k in (0..n).rev() {
                digits[k] += 1;
                if digits[k] < new.0[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        Ok((map, new))
    }
}

/// Kronecker product with the default size cap.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    kron_with_cap(a, b, DEFAULT_KRON_CAP)
}

pub fn kron_with_cap<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    cap: usize,
) -> Result<ComplexMatrix<T>> {
    let rows = a.rows().checked_mul(b.rows()).unwrap_or(usize::MAX);
    let cols = a.cols().checked_mul(b.cols()).unwrap_or(usize::MAX);
    if rows > cap || cols > cap {
        return Err(Error::Size {
            dim: rows.max(cols),
            cap,
        });
    }
    let (br, bc) = (b.rows(), b.cols());
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    }))
}

/// Kronecker product of vectors.
pub fn kron_vec<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

/// Reorders tensor factors: new factor `k` is old factor `order[k]`.
pub fn permute_subsystems<T: Real>(
    m: &ComplexMatrix<T>,
    f: &Factorization,
    order: &[usize],
) -> Result<(ComplexMatrix<T>, Factorization)> {
    f.check_square(m.rows(), m.cols())?;
    let (map, new) = f.permutation_map(order)?;
    let n = map.len();
    Ok((
        ComplexMatrix::from_fn(n, n, |i, j| m[(map[i], map[j])]),
        new,
    ))
}

pub fn permute_vector<T: Real>(
    v: &[Complex<T>],
    f: &Factorization,
    order: &[usize],
) -> Result<(Vec<Complex<T>>, Factorization)> {
    if v.len() != f.total() {
        return Err(shape("vector length does not match factorization"));
    }
    let (map, new) = f.permutation_map(order)?;
    Ok((map.iter().map(|&o| v[o]).collect(), new))
}

/// Traces out the listed subsystems; the result lives on the kept factors in
/// their original order.
pub fn partial_trace<T: Real>(
    m: &ComplexMatrix<T>,
    f: &Factorization,
    traced: &[usize],
) -> Result<(ComplexMatrix<T>, Factorization)> {
    f.check_square(m.rows(), m.cols())?;
    let kept = f.complement(traced)?;
    if kept.is_empty() {
        let t = m.trace();
        return Ok((
            ComplexMatrix::from_fn(1, 1, |_, _| t),
            Factorization(vec![1]),
        ));
    }
    let order: Vec<usize> = kept.iter().chain(traced).copied().collect();
    let (p, _) = permute_subsystems(m, f, &order)?;
    let dk = f.dim_of(&kept);
    let dt = f.dim_of(traced);
    let out = ComplexMatrix::from_fn(dk, dk, |i, j| {
        (0..dt).map(|t| p[(i * dt + t, j * dt + t)]).sum()
    });
    Ok((out, Factorization(kept.iter().map(|&k| f.0[k]).collect())))
}

/// Reduced density operator of a pure state on the listed kept subsystems,
/// computed directly from the amplitudes.
pub fn reduced_from_vector<T: Real>(
    v: &[Complex<T>],
    f: &Factorization,
    kept: &[usize],
) -> Result<ComplexMatrix<T>> {
    let traced = f.complement(kept)?;
    let order: Vec<usize> = kept.iter().chain(&traced).copied().collect();
    let (p, _) = permute_vector(v, f, &order)?;
    let dk = f.dim_of(kept);
    let dt = f.dim_of(&traced);
    Ok(reduce_bipartite_vector(&p, dk, dt))
}

/// `Tr_B |v><v|` for `v` in `C^{da} ⊗ C^{db}`.
pub fn reduce_bipartite_vector<T: Real>(
    v: &[Complex<T>],
    da: usize,
    db: usize,
) -> ComplexMatrix<T> {
    debug_assert_eq!(v.len(), da * db);
    let mut out = ComplexMatrix::zeros(da, da);
    for i in 0..da {
        let vi = &v[i * db..(i + 1) * db];
        for j in i..da {
            let vj = &v[j * db..(j + 1) * db];
            let s: Complex<T> = vi.iter().zip(vj).map(|(a, b)| *a * b.conj()).sum();
            out[(i, j)] = s;
            out[(j, i)] = s.conj();
        }
    }
    out
}

/// Transposes the given subsystem.
pub fn partial_transpose<T: Real>(
    m: &ComplexMatrix<T>,
    f: &Factorization,
    transposed: usize,
) -> Result<ComplexMatrix<T>> {
    f.check_square(m.rows(), m.cols())?;
    if transposed >= f.len() {
        return Err(shape(format!(
            "subsystem {transposed} out of range for {} factors",
            f.len()
        )));
    }
    let stride = f.strides()[transposed];
    let d = f.0[transposed];
    let n = m.rows();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let di = (i / stride) % d;
        let dj = (j / stride) % d;
        let ii = i - di * stride + dj * stride;
        let jj = j - dj * stride + di * stride;
        m[(ii, jj)]
    }))
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    Ok(super::eigen::eigvalsh(m)?
        .into_iter()
        .map(|l| l.abs())
        .sum())
}
