use num_complex::Complex;
use num_traits::Zero;

use crate::error::{shape, validation, Result};
use crate::linalg::{
    eigh, kron, kron_vec, partial_trace, partial_transpose, permute_subsystems, permute_vector,
    reduced_from_vector, vector_norm, EigenDecomposition, Factorization,
};
use crate::{CMatrix, C64};

/// Tolerance for Hermiticity, positivity and unit trace of density matrices.
pub const STATE_TOL: f64 = 1e-10;
/// Tolerance for unit norm of pure states.
pub const NORM_TOL: f64 = 1e-12;

/// Positive semidefinite, unit-trace operator on a factorized space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: CMatrix,
    fact: Factorization,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and trace. The stored operator is the
    /// Hermitian part of `op`.
    pub fn new(op: CMatrix, fact: Factorization) -> Result<Self> {
        fact.check_square(op.rows(), op.cols())?;
        let defect = op.hermiticity_defect();
        if defect > STATE_TOL {
            return Err(validation(format!(
                "operator not Hermitian (defect {defect:e})"
            )));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(validation(format!("trace {tr} differs from 1")));
        }
        let op = op.hermitian_part();
        let min = eigh(&op)?.eigenvalues.first().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(validation(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { op, fact })
    }

    /// Skips validation; for operators that are states by construction.
    pub(crate) fn new_unchecked(op: CMatrix, fact: Factorization) -> Self {
        debug_assert_eq!(op.rows(), fact.total());
        Self {
            op: op.hermitian_part(),
            fact,
        }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self::new_unchecked(CMatrix::outer(psi.amplitudes()), psi.fact().clone())
    }

    pub fn maximally_mixed(fact: Factorization) -> Self {
        let d = fact.total();
        Self::new_unchecked(CMatrix::identity(d).scale(1.0 / d as f64), fact)
    }

    /// Normalised projector onto the span of orthonormal columns.
    pub fn normalized_projector(columns: &CMatrix, fact: Factorization) -> Result<Self> {
        fact.check_square(columns.rows(), columns.rows())?;
        let p = columns.matmul(&columns.adjoint())?;
        Self::new(p.scale(1.0 / columns.cols() as f64), fact)
    }

    pub fn op(&self) -> &CMatrix {
        &self.op
    }

    pub fn fact(&self) -> &Factorization {
        &self.fact
    }

    pub fn dim(&self) -> usize {
        self.op.rows()
    }

    pub fn eigen(&self) -> Result<EigenDecomposition<f64>> {
        eigh(&self.op)
    }

    pub fn purity(&self) -> f64 {
        self.op.data().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Reduced state on the complement of `traced`.
    pub fn partial_trace(&self, traced: &[usize]) -> Result<Self> {
        let (op, fact) = partial_trace(&self.op, &self.fact, traced)?;
        Ok(Self::new_unchecked(op, fact))
    }

    pub fn partial_transpose(&self, subsystem: usize) -> Result<CMatrix> {
        partial_transpose(&self.op, &self.fact, subsystem)
    }

    /// Reorders tensor factors (new factor `k` is old factor `order[k]`).
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let (op, fact) = permute_subsystems(&self.op, &self.fact, order)?;
        Ok(Self { op, fact })
    }

    /// Regroups the factors into a bipartition `left | rest`.
    pub fn bipartition(&self, left: &[usize]) -> Result<Self> {
        let (order, grouped) = self.fact.group(left)?;
        let (op, _) = permute_subsystems(&self.op, &self.fact, &order)?;
        Ok(Self { op, fact: grouped })
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            op: kron(&self.op, &other.op)?,
            fact: self.fact.concat(&other.fact),
        })
    }

    /// `p * self + (1 - p) * other`.
    pub fn mix(&self, p: f64, other: &Self) -> Result<Self> {
        if self.fact != other.fact {
            return Err(shape("mixing states on different spaces"));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(validation(format!("mixing weight {p} outside [0, 1]")));
        }
        let mut op = self.op.scale(p);
        op.add_scaled(1.0 - p, &other.op);
        Ok(Self {
            op,
            fact: self.fact.clone(),
        })
    }

    /// Same operator with a different factorization of the same total dimension.
    pub fn with_fact(&self, fact: Factorization) -> Result<Self> {
        fact.check_square(self.dim(), self.dim())?;
        Ok(Self {
            op: self.op.clone(),
            fact,
        })
    }

    /// Numerical rank at the given eigenvalue threshold.
    pub fn rank(&self, threshold: f64) -> Result<usize> {
        Ok(self
            .eigen()?
            .eigenvalues
            .iter()
            .filter(|&&l| l > threshold)
            .count())
    }
}

/// Unit vector on a factorized space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
    fact: Factorization,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>, fact: Factorization) -> Result<Self> {
        if amplitudes.len() != fact.total() {
            return Err(shape(format!(
                "{} amplitudes for total dimension {}",
                amplitudes.len(),
                fact.total()
            )));
        }
        let n = vector_norm(&amplitudes);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(validation(format!("state norm {n} differs from 1")));
        }
        Ok(Self { amplitudes, fact })
    }

    /// Normalises a nonzero vector.
    pub fn normalized(mut amplitudes: Vec<C64>, fact: Factorization) -> Result<Self> {
        let n = vector_norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(validation("cannot normalise a zero vector"));
        }
        for a in &mut amplitudes {
            *a /= n;
        }
        Self::new(amplitudes, fact)
    }

    pub fn basis(index: usize, fact: Factorization) -> Result<Self> {
        let mut v = vec![C64::zero(); fact.total()];
        *v.get_mut(index)
            .ok_or_else(|| shape("basis index out of range"))? = Complex::new(1.0, 0.0);
        Self::new(v, fact)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn fact(&self) -> &Factorization {
        &self.fact
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
            fact: self.fact.concat(&other.fact),
        }
    }

    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let (amplitudes, fact) = permute_vector(&self.amplitudes, &self.fact, order)?;
        Ok(Self { amplitudes, fact })
    }

    pub fn reduced(&self, kept: &[usize]) -> Result<DensityMatrix> {
        let op = reduced_from_vector(&self.amplitudes, &self.fact, kept)?;
        let fact = Factorization::new(kept.iter().map(|&k| self.fact.dims()[k]).collect())?;
        Ok(DensityMatrix::new_unchecked(op, fact))
    }

    pub fn with_fact(&self, fact: Factorization) -> Result<Self> {
        Self::new(self.amplitudes.clone(), fact)
    }
}

/// Probability-weighted list of pure states on one space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureEnsemble {
    members: Vec<(f64, PureState)>,
}

impl PureEnsemble {
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| validation("empty ensemble"))?
            .1
            .fact()
            .clone();
        if members.iter().any(|(_, s)| *s.fact() != first) {
            return Err(shape("ensemble members live on different spaces"));
        }
        if members.iter().any(|(p, _)| !(*p >= 0.0)) {
            return Err(validation("negative ensemble probability"));
        }
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(validation(format!("probabilities sum to {total}")));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn fact(&self) -> &Factorization {
        self.members[0].1.fact()
    }

    pub fn average(&self) -> DensityMatrix {
        let d = self.fact().total();
        let mut op = CMatrix::zeros(d, d);
        for (p, s) in &self.members {
            op.add_scaled(*p, &CMatrix::outer(s.amplitudes()));
        }
        DensityMatrix::new_unchecked(op, self.fact().clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        Complex::new(x, 0.0)
    }

    #[test]
    fn density_validation() {
        let f = Factorization::single(2);
        assert!(DensityMatrix::new(CMatrix::identity(2).scale(0.5), f.clone()).is_ok());
        assert!(DensityMatrix::new(CMatrix::identity(2), f.clone()).is_err());
        assert!(DensityMatrix::new(CMatrix::diag_real(&[1.5, -0.5]), f.clone()).is_err());
        let mut nonherm = CMatrix::identity(2).scale(0.5);
        nonherm[(0, 1)] = c(0.1);
        assert!(DensityMatrix::new(nonherm, f).is_err());
    }

    #[test]
    fn pure_state_norm() {
        let f = Factorization::single(2);
        assert!(PureState::new(vec![c(1.0), c(1.0)], f.clone()).is_err());
        let s = PureState::normalized(vec![c(1.0), c(1.0)], f.clone()).unwrap();
        assert!((vector_norm(s.amplitudes()) - 1.0).abs() < 1e-15);
        assert!(PureState::normalized(vec![c(0.0), c(0.0)], f).is_err());
    }

    #[test]
    fn ensemble_checks() {
        let f = Factorization::single(2);
        let s0 = PureState::basis(0, f.clone()).unwrap();
        let s1 = PureState::basis(1, f.clone()).unwrap();
        let e = PureEnsemble::new(vec![(0.5, s0.clone()), (0.5, s1)]).unwrap();
        assert!(
            e.average()
                .op()
                .max_abs_diff(&CMatrix::identity(2).scale(0.5))
                < 1e-15
        );
        assert!(PureEnsemble::new(vec![(0.7, s0.clone())]).is_err());
        let other = PureState::basis(0, Factorization::single(3)).unwrap();
        assert!(PureEnsemble::new(vec![(0.5, s0), (0.5, other)]).is_err());
    }

    #[test]
    fn reduced_of_product() {
        let a = PureState::normalized(vec![c(1.0), c(2.0)], Factorization::single(2)).unwrap();
        let b =
            PureState::normalized(vec![c(1.0), c(0.0), c(-1.0)], Factorization::single(3)).unwrap();
        let ab = a.tensor(&b);
        let ra = ab.reduced(&[0]).unwrap();
        assert!(ra.op().max_abs_diff(DensityMatrix::from_pure(&a).op()) < 1e-15);
        let swapped = ab.permute(&[1, 0]).unwrap();
        assert_eq!(swapped.fact().dims(), &[3, 2]);
        assert_eq!(swapped, b.tensor(&a));
    }
}
