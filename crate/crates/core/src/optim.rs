//! Shared machinery for the multi-start local searches: settings, Hermitian
//! logarithms, restart merging and the unit-sphere minimiser used for output
//! entropies.

use rayon::prelude::*;

use crate::error::Result;
use crate::linalg::{eigh, inner, vector_norm};
use crate::measures::EIGEN_CLIP;
use crate::quantum::{derive_seed, haar_vector, rng_from_seed, KrausChannel};
use crate::{CMatrix, C64};

/// Eigenvalue floor inside matrix logarithms.
pub const LOG_FLOOR: f64 = 1e-30;

pub const DEFAULT_RESTARTS: usize = 32;
pub const DEFAULT_EOF_RESTARTS: usize = 64;
pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 2000;

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACK: usize = 50;
/// Consecutive iterations gaining less than `tol` before a search stops.
pub(crate) const STALL_ITERS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptSettings {
    pub restarts: usize,
    pub seed: u64,
    /// Stop once several consecutive iterations improve the objective by less
    /// than this.
    pub tol: f64,
    /// Iteration budget per restart.
    pub max_iter: usize,
}

impl Default for OptSettings {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl OptSettings {
    pub fn new(restarts: usize, seed: u64) -> Self {
        Self {
            restarts,
            seed,
            ..Self::default()
        }
    }

    /// Defaults for the convex-roof search.
    pub fn eof() -> Self {
        Self::new(DEFAULT_EOF_RESTARTS, 0)
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    /// Seed for restart `index`; independent of the number of restarts.
    pub fn restart_seed(&self, index: usize) -> u64 {
        derive_seed(self.seed, index as u64)
    }
}

/// Entropy in bits and natural logarithm (floored) of a PSD matrix, from one
/// eigendecomposition.
pub(crate) fn entropy_and_log(m: &CMatrix) -> Result<(f64, CMatrix)> {
    let eig = eigh(m)?;
    let s = crate::measures::entropy_bits(&eig.eigenvalues);
    let log = eig.apply_fn(|l| l.max(LOG_FLOOR).ln());
    Ok((s, log))
}

/// Natural matrix logarithm with eigenvalues floored at [`LOG_FLOOR`].
pub fn herm_log(m: &CMatrix) -> Result<CMatrix> {
    Ok(eigh(m)?.apply_fn(|l| l.max(LOG_FLOOR).ln()))
}

/// Entropy in bits of a PSD matrix without validation.
pub(crate) fn entropy_of(m: &CMatrix) -> Result<f64> {
    Ok(crate::measures::entropy_bits(&crate::linalg::eigvalsh(m)?))
}

/// Runs `restarts` independent searches and keeps the best one; ties go to
/// the lowest restart index so the result does not depend on scheduling.
pub(crate) fn multistart<R, F, B>(restarts: usize, run: F, better: B) -> Result<R>
where
    R: Send,
    F: Fn(usize) -> Result<R> + Sync + Send,
    B: Fn(&R, &R) -> bool,
{
    let results: Vec<Result<R>> = (0..restarts.max(1)).into_par_iter().map(run).collect();
    let mut best: Option<R> = None;
    for r in results {
        let r = r?;
        best = match best {
            Some(b) if !better(&r, &b) => Some(b),
            _ => Some(r),
        };
    }
    Ok(best.expect("at least one restart"))
}

pub(crate) fn normalize(v: &mut [C64]) {
    let n = vector_norm(v);
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
}

/// Outcome of a search over unit vectors.
#[derive(Debug, Clone)]
pub struct SphereResult {
    pub value: f64,
    pub point: Vec<C64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Minimises a smooth function over unit vectors by projected gradient
/// descent with Armijo backtracking. `grad` returns the objective and its
/// Euclidean gradient (w.r.t. the real inner product `Re<x, y>`).
///
/// When the analytic gradient fails to produce descent, a central
/// finite-difference gradient is tried before giving up.
pub(crate) fn sphere_descent<F>(
    start: Vec<C64>,
    settings: &OptSettings,
    grad: F,
) -> Result<SphereResult>
where
    F: Fn(&[C64]) -> Result<(f64, Vec<C64>)>,
{
    let mut x = start;
    normalize(&mut x);
    let (mut f, mut g) = grad(&x)?;
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;
    let mut used_fd = false;
    let mut stall = 0;
    while iterations < settings.max_iter {
        iterations += 1;
        let d = tangent(&x, &g);
        let dn2: f64 = d.iter().map(|z| z.norm_sqr()).sum();
        if dn2 < 1e-24 {
            converged = true;
            break;
        }
        match line_search(&x, &d, dn2, f, step, |y| grad(y).map(|r| r.0))? {
            Some((y, fy, t)) => {
                let gain = f - fy;
                x = y;
                step = (t * 2.0).min(1e6);
                let (fy2, gy) = grad(&x)?;
                f = fy2;
                g = gy;
                used_fd = false;
                stall = if gain < settings.tol { stall + 1 } else { 0 };
                if stall >= STALL_ITERS {
                    converged = true;
                    break;
                }
            }
            None if !used_fd => {
                g = fd_gradient(&x, |y| grad(y).map(|r| r.0))?;
                used_fd = true;
                step = 1.0;
            }
            None => {
                converged = true;
                break;
            }
        }
    }
    Ok(SphereResult {
        value: f,
        point: x,
        converged,
        iterations,
    })
}

/// `g − Re<x, g> x`: the gradient component tangent to the sphere at unit `x`.
fn tangent(x: &[C64], g: &[C64]) -> Vec<C64> {
    let r = inner(x, g).re;
    g.iter().zip(x).map(|(gi, xi)| gi - xi * r).collect()
}

/// Backtracking along `−d` with normalisation as retraction. Returns the new
/// point, its value and the accepted step.
fn line_search<F>(
    x: &[C64],
    d: &[C64],
    dn2: f64,
    f0: f64,
    mut t: f64,
    f: F,
) -> Result<Option<(Vec<C64>, f64, f64)>>
where
    F: Fn(&[C64]) -> Result<f64>,
{
    for _ in 0..MAX_BACKTRACK {
        let mut y: Vec<C64> = x.iter().zip(d).map(|(xi, di)| xi - di * t).collect();
        normalize(&mut y);
        let fy = f(&y)?;
        if fy.is_finite() && fy <= f0 - ARMIJO * t * dn2 {
            return Ok(Some((y, fy, t)));
        }
        t *= 0.5;
    }
    Ok(None)
}

/// Central differences in the `2n` real coordinates of `x`.
pub(crate) fn fd_gradient<F>(x: &[C64], f: F) -> Result<Vec<C64>>
where
    F: Fn(&[C64]) -> Result<f64>,
{
    let h = 1e-6;
    let mut y = x.to_vec();
    let mut g = vec![C64::new(0.0, 0.0); x.len()];
    for i in 0..x.len() {
        for (unit, slot) in [(C64::new(h, 0.0), 0), (C64::new(0.0, h), 1)] {
            y[i] = x[i] + unit;
            let fp = f(&y)?;
            y[i] = x[i] - unit;
            let fm = f(&y)?;
            y[i] = x[i];
            let di = (fp - fm) / (2.0 * h);
            if slot == 0 {
                g[i].re = di;
            } else {
                g[i].im = di;
            }
        }
    }
    Ok(g)
}

/// Output entropy `S(T(ψψ†))` of the normalised `ψ` and its gradient
/// `2 T*(−log ρ / ln 2) ψ`.
pub(crate) fn output_entropy_grad(t: &KrausChannel, psi: &[C64]) -> Result<(f64, Vec<C64>)> {
    let mut x = psi.to_vec();
    normalize(&mut x);
    let rho = t.apply_pure(&x)?;
    let (s, log) = entropy_and_log(&rho)?;
    let h = t.apply_adjoint(&log.scale(-2.0 / std::f64::consts::LN_2))?;
    Ok((s, h.mul_vec(&x)?))
}

/// Multi-start minimum of the output entropy over pure inputs.
pub fn minimize_output_entropy(t: &KrausChannel, settings: &OptSettings) -> Result<SphereResult> {
    multistart(
        settings.restarts,
        |i| {
            let mut rng = rng_from_seed(settings.restart_seed(i));
            let start = haar_vector(t.in_dim(), &mut rng);
            let mut r = sphere_descent(start, settings, |x| output_entropy_grad(t, x))?;
            r.value = r.value.max(0.0);
            if r.value < EIGEN_CLIP {
                r.value = 0.0;
            }
            Ok(r)
        },
        |a, b| a.value < b.value,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Factorization;
    use crate::quantum::DensityMatrix;

    #[test]
    fn identity_channel_has_zero_min_entropy() {
        let r =
            minimize_output_entropy(&KrausChannel::identity(3), &OptSettings::new(2, 1)).unwrap();
        assert!(r.value < 1e-9);
        assert!(r.converged);
    }

    #[test]
    fn constant_channel_entropy() {
        let sigma = DensityMatrix::maximally_mixed(Factorization::single(2));
        let t = KrausChannel::constant(3, &sigma).unwrap();
        let r = minimize_output_entropy(&t, &OptSettings::new(2, 1)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = rng_from_seed(9);
        let ops: Vec<CMatrix> = {
            let u = crate::quantum::haar_isometry(6, 2, &mut rng);
            (0..3)
                .map(|k| CMatrix::from_fn(2, 2, |r, c| u[(2 * k + r, c)]))
                .collect()
        };
        let t = KrausChannel::new(ops).unwrap();
        let x = haar_vector(2, &mut rng);
        let (_, g) = output_entropy_grad(&t, &x).unwrap();
        let fd = fd_gradient(&x, |y| output_entropy_grad(&t, y).map(|r| r.0)).unwrap();
        let dt = tangent(&x, &g);
        let ft = tangent(&x, &fd);
        for (a, b) in dt.iter().zip(&ft) {
            assert!((a - b).norm() < 1e-5, "{a} vs {b}");
        }
    }

    #[test]
    fn multistart_prefers_lowest_index_on_ties() {
        let r = multistart(5, |i| Ok((i, 1.0)), |a: &(usize, f64), b| a.1 < b.1).unwrap();
        assert_eq!(r.0, 0);
    }
}
