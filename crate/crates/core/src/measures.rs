//! Entropies and entanglement functionals, all in bits.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, trace_norm, Factorization};
use crate::optim::{self, OptSettings, SphereResult};
use crate::quantum::{DensityMatrix, KrausChannel, PureEnsemble, PureState};
use crate::scalar::Real;
use crate::CMatrix;

/// Eigenvalues below this are treated as exact zeros in entropies.
pub const EIGEN_CLIP: f64 = 1e-12;
/// Negative eigenvalues down to `-NEGATIVE_TOL` are clipped, larger ones rejected.
pub const NEGATIVE_TOL: f64 = 1e-10;

/// An information quantity measured in bits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bits(pub f64);

impl Bits {
    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

impl Add for Bits {
    type Output = Bits;
    fn add(self, rhs: Bits) -> Bits {
        Bits(self.0 + rhs.0)
    }
}

impl Sub for Bits {
    type Output = Bits;
    fn sub(self, rhs: Bits) -> Bits {
        Bits(self.0 - rhs.0)
    }
}

impl Mul<Bits> for f64 {
    type Output = Bits;
    fn mul(self, rhs: Bits) -> Bits {
        Bits(self * rhs.0)
    }
}

/// `-Σ x log2 x` over entries above [`EIGEN_CLIP`]; no validation.
pub fn entropy_bits<T: Real>(values: &[T]) -> T {
    let clip = T::lit(EIGEN_CLIP);
    values
        .iter()
        .filter(|&&x| x > clip)
        .map(|&x| -x * x.log2())
        .sum()
}

/// Binary entropy `h(x)`.
pub fn binary_entropy<T: Real>(x: T) -> T {
    entropy_bits(&[x, T::one() - x])
}

/// Shannon entropy of a probability vector.
pub fn shannon_entropy(p: &[f64]) -> Result<Bits> {
    if let Some(&bad) = p.iter().find(|&&x| x < -1e-12 || !x.is_finite()) {
        return Err(Error::Domain(format!("invalid probability {bad}")));
    }
    let total: f64 = p.iter().map(|x| x.max(0.0)).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("probabilities sum to {total}")));
    }
    let q: Vec<f64> = p.iter().map(|x| x.max(0.0) / total).collect();
    Ok(Bits(entropy_bits(&q)))
}

/// Entropy of a Hermitian operator's spectrum with the clipping rules above.
pub(crate) fn spectrum_entropy(op: &CMatrix) -> Result<f64> {
    let eig = eigvalsh(op)?;
    if let Some(&min) = eig.first() {
        if min < -NEGATIVE_TOL {
            return Err(Error::Domain(format!("negative eigenvalue {min:e}")));
        }
    }
    Ok(entropy_bits(&eig))
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<Bits> {
    spectrum_entropy(rho.op()).map(Bits)
}

/// `S(Σ p_i T(π_i)) − Σ p_i S(T(π_i))`.
pub fn holevo_information(e: &PureEnsemble, t: &KrausChannel) -> Result<Bits> {
    if e.fact().total() != t.in_dim() {
        return Err(Error::Shape(format!(
            "ensemble dimension {} but channel input {}",
            e.fact().total(),
            t.in_dim()
        )));
    }
    let d = t.out_dim();
    let mut avg = CMatrix::zeros(d, d);
    let mut avg_entropy = 0.0;
    for (p, s) in e.members() {
        let out = t.apply_pure(s.amplitudes())?;
        avg_entropy += p * spectrum_entropy(&out)?;
        avg.add_scaled(*p, &out);
    }
    Ok(Bits((spectrum_entropy(&avg)? - avg_entropy).max(0.0)))
}

/// Entropy of entanglement across the cut `cut | rest`.
pub fn pure_entanglement(psi: &PureState, cut: &[usize]) -> Result<Bits> {
    check_cut(psi.fact(), cut)?;
    let reduced = psi.reduced(cut)?;
    spectrum_entropy(reduced.op()).map(Bits)
}

/// `log2 ||ρ^Γ||_1` for the bipartition `cut | rest`.
pub fn log_negativity(rho: &DensityMatrix, cut: &[usize]) -> Result<Bits> {
    check_cut(rho.fact(), cut)?;
    let grouped = rho.bipartition(cut)?;
    let norm = trace_norm(&grouped.partial_transpose(1)?)?;
    Ok(Bits(norm.log2().max(0.0)))
}

/// Trace norm of the partial transpose across `cut | rest`.
pub fn partial_transpose_norm(rho: &DensityMatrix, cut: &[usize]) -> Result<f64> {
    check_cut(rho.fact(), cut)?;
    let grouped = rho.bipartition(cut)?;
    trace_norm(&grouped.partial_transpose(1)?)
}

pub(crate) fn check_cut(f: &Factorization, cut: &[usize]) -> Result<()> {
    if f.len() < 2 || cut.is_empty() || cut.len() >= f.len() {
        return Err(Error::Shape(format!(
            "cut {cut:?} is not a bipartition of {} factors",
            f.len()
        )));
    }
    f.group(cut).map(|_| ())
}

/// Multi-start local search for the minimal output entropy `S_min(T)`.
///
/// The value is an upper bound; it is nonincreasing in `restarts` because
/// restart `i` always uses the seed derived from `(seed, i)`.
pub fn min_output_entropy(t: &KrausChannel, settings: &OptSettings) -> Result<Bits> {
    let r = min_output_entropy_search(t, settings)?;
    if !r.converged {
        return Err(Error::NotConverged {
            best: r.value,
            iterations: r.iterations,
        });
    }
    Ok(Bits(r.value))
}

/// Same search, returning the minimiser and convergence flag.
pub fn min_output_entropy_search(t: &KrausChannel, settings: &OptSettings) -> Result<SphereResult> {
    optim::minimize_output_entropy(t, settings)
}
