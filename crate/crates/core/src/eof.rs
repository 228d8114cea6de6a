//! Entanglement of formation: the two-qubit closed form, a convex-roof
//! minimiser over decompositions, and minimal entanglement in a subspace.
//!
//! Size-`m` decompositions of a rank-`r` state `ρ = Σ_k w_k w_k†` are exactly
//! `ψ̃_i = Σ_k V_ik w_k` for `V` an `m x r` matrix with orthonormal columns, so
//! the search runs on that Stiefel manifold.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{eigh, inner, orthonormalize_columns, Factorization};
use crate::measures::{binary_entropy, check_cut, entropy_bits, pure_entanglement, Bits};
use crate::optim::{self, entropy_and_log, multistart, OptSettings, SphereResult, STALL_ITERS};
use crate::quantum::{
    channel_from_subspace, haar_isometry, rng_from_seed, DensityMatrix, PureEnsemble, PureState,
    SubspaceBasis,
};
use crate::{CMatrix, C64};

/// Eigenvalues above this count towards the rank.
pub const RANK_THRESHOLD: f64 = 1e-10;
/// Ensemble members lighter than this are dropped from results.
pub const PRUNE: f64 = 1e-12;

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACK: usize = 50;

#[derive(Debug, Clone)]
pub struct EofResult {
    pub value: Bits,
    pub ensemble: PureEnsemble,
    pub converged: bool,
    pub iterations: usize,
}

/// Wootters' closed form for a state on `C^2 ⊗ C^2`.
pub fn eof_wootters(rho: &DensityMatrix) -> Result<Bits> {
    Ok(Bits(concurrence_to_eof(concurrence(rho)?)))
}

/// Two-qubit concurrence `max(0, λ1 − λ2 − λ3 − λ4)`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.fact().dims() != [2, 2] {
        return Err(Error::Shape(format!(
            "Wootters formula needs a 2x2 system, got {:?}",
            rho.fact().dims()
        )));
    }
    let yy = sigma_yy();
    let tilde = yy.matmul(&rho.op().conj())?.matmul(&yy)?;
    let sqrt_rho = eigh(rho.op())?.apply_fn(|l| l.max(0.0).sqrt());
    let r = sqrt_rho.matmul(&tilde)?.matmul(&sqrt_rho)?;
    let mut l: Vec<f64> = eigh(&r)?
        .eigenvalues
        .iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

pub fn concurrence_to_eof(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0)
}

fn sigma_yy() -> CMatrix {
    // σ_y ⊗ σ_y is real: anti-diagonal (-1, 1, 1, -1).
    let mut m = CMatrix::zeros(4, 4);
    for (i, s) in [-1.0, 1.0, 1.0, -1.0].into_iter().enumerate() {
        m[(i, 3 - i)] = Complex::new(s, 0.0);
    }
    m
}

/// Upper bound on `E_f(ρ)` across `cut | rest` by multi-start descent over
/// decompositions with `ensemble_size` members (default `rank²`).
pub fn eof_convex_roof(
    rho: &DensityMatrix,
    cut: &[usize],
    ensemble_size: Option<usize>,
    settings: &OptSettings,
) -> Result<EofResult> {
    check_cut(rho.fact(), cut)?;
    let (order, grouped) = rho.fact().group(cut)?;
    let g = rho.bipartition(cut)?;
    let (da, db) = (grouped.dims()[0], grouped.dims()[1]);
    let eig = eigh(g.op())?;
    let weights: Vec<Vec<C64>> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &l)| l > RANK_THRESHOLD)
        .map(|(k, &l)| {
            eig.eigenvector(k)
                .into_iter()
                .map(|z| z * l.sqrt())
                .collect()
        })
        .collect();
    let r = weights.len();
    if r == 0 {
        return Err(Error::Validation(
            "state has no eigenvalue above the rank threshold".into(),
        ));
    }
    let m = ensemble_size.unwrap_or(r * r);
    if m < r {
        return Err(Error::Parameter(format!(
            "ensemble size {m} below rank {r}"
        )));
    }
    let problem = Roof { w: weights, da, db };
    let back = Restore::new(rho.fact(), &order);

    if r == 1 {
        let v = CMatrix::from_fn(1, 1, |_, _| Complex::new(1.0, 0.0));
        let state = problem.evaluate(&v)?;
        return Ok(EofResult {
            value: Bits(state.value),
            ensemble: problem.ensemble(&v, &back)?,
            converged: true,
            iterations: 0,
        });
    }

    let best = multistart(
        settings.restarts,
        |i| {
            let mut rng = rng_from_seed(settings.restart_seed(i));
            let start = haar_isometry(m, r, &mut rng);
            problem.descend(start, settings)
        },
        |a, b| a.value < b.value,
    )?;
    Ok(EofResult {
        value: Bits(best.value.max(0.0)),
        ensemble: problem.ensemble(&best.v, &back)?,
        converged: best.converged,
        iterations: best.iterations,
    })
}

/// Maps bipartitioned amplitudes back to the caller's factor order.
struct Restore {
    permuted: Factorization,
    inverse: Vec<usize>,
}

impl Restore {
    fn new(f: &Factorization, order: &[usize]) -> Self {
        let permuted = Factorization::new(order.iter().map(|&o| f.dims()[o]).collect())
            .expect("permuted dims are positive");
        let mut inverse = vec![0; order.len()];
        for (k, &o) in order.iter().enumerate() {
            inverse[o] = k;
        }
        Self { permuted, inverse }
    }

    fn apply(&self, amplitudes: Vec<C64>) -> Result<PureState> {
        PureState::normalized(amplitudes, self.permuted.clone())?.permute(&self.inverse)
    }
}

struct Roof {
    w: Vec<Vec<C64>>,
    da: usize,
    db: usize,
}

struct RoofPoint {
    value: f64,
    v: CMatrix,
    converged: bool,
    iterations: usize,
}

struct Evaluation {
    value: f64,
    /// Euclidean gradient `2E`, same shape as `V`.
    grad: Option<CMatrix>,
}

impl Roof {
    fn members(&self, v: &CMatrix) -> Vec<Vec<C64>> {
        let n = self.da * self.db;
        (0..v.rows())
            .map(|i| {
                let mut psi = vec![C64::new(0.0, 0.0); n];
                for (k, wk) in self.w.iter().enumerate() {
                    let c = v[(i, k)];
                    if c.norm_sqr() == 0.0 {
                        continue;
                    }
                    for (p, x) in psi.iter_mut().zip(wk) {
                        *p += c * x;
                    }
                }
                psi
            })
            .collect()
    }

    /// Reduced operator on the smaller party.
    fn reduce(&self, psi: &[C64]) -> CMatrix {
        if self.da <= self.db {
            crate::linalg::reduce_bipartite_vector(psi, self.da, self.db)
        } else {
            let (da, db) = (self.da, self.db);
            let mut out = CMatrix::zeros(db, db);
            for j in 0..db {
                for l in j..db {
                    let s: C64 = (0..da)
                        .map(|a| psi[a * db + j] * psi[a * db + l].conj())
                        .sum();
                    out[(j, l)] = s;
                    out[(l, j)] = s.conj();
                }
            }
            out
        }
    }

    /// `(G ⊗ I) ψ` or `(I ⊗ G) ψ` depending on the reduced side.
    fn lift(&self, g: &CMatrix, psi: &[C64]) -> Vec<C64> {
        let (da, db) = (self.da, self.db);
        let mut out = vec![C64::new(0.0, 0.0); psi.len()];
        if da <= db {
            for a in 0..da {
                for a2 in 0..da {
                    let c = g[(a, a2)];
                    if c.norm_sqr() == 0.0 {
                        continue;
                    }
                    for b in 0..db {
                        out[a * db + b] += c * psi[a2 * db + b];
                    }
                }
            }
        } else {
            for a in 0..da {
                for b in 0..db {
                    out[a * db + b] = (0..db).map(|b2| g[(b, b2)] * psi[a * db + b2]).sum();
                }
            }
        }
        out
    }

    fn evaluate(&self, v: &CMatrix) -> Result<Evaluation> {
        self.eval_inner(v, false)
    }

    fn eval_inner(&self, v: &CMatrix, with_grad: bool) -> Result<Evaluation> {
        let members = self.members(v);
        let mut value = 0.0;
        let mut grad = with_grad.then(|| CMatrix::zeros(v.rows(), v.cols()));
        for (i, psi) in members.iter().enumerate() {
            let red = self.reduce(psi);
            let p = red.trace().re;
            if p < 1e-14 {
                continue;
            }
            if let Some(grad) = grad.as_mut() {
                let (s, log) = entropy_and_log(&red.scale(1.0 / p))?;
                value += p * s;
                let g = log.scale(-2.0 / std::f64::consts::LN_2);
                let phi = self.lift(&g, psi);
                for (k, wk) in self.w.iter().enumerate() {
                    grad[(i, k)] = inner(wk, &phi);
                }
            } else {
                let eig = crate::linalg::eigvalsh(&red.scale(1.0 / p))?;
                value += p * entropy_bits(&eig);
            }
        }
        Ok(Evaluation { value, grad })
    }

    fn descend(&self, start: CMatrix, settings: &OptSettings) -> Result<RoofPoint> {
        let mut v = start;
        let mut cur = self.eval_inner(&v, true)?;
        let mut step = 1.0;
        let mut converged = false;
        let mut iterations = 0;
        let mut stall = 0;
        while iterations < settings.max_iter {
            iterations += 1;
            let g = cur.grad.as_ref().expect("gradient requested");
            let d = stiefel_project(&v, g)?;
            let dn2 = d.frobenius_norm().powi(2);
            if dn2 < 1e-24 {
                converged = true;
                break;
            }
            let mut t = step;
            let mut accepted = None;
            for _ in 0..MAX_BACKTRACK {
                let mut trial = v.clone();
                trial.add_scaled(-t, &d);
                let trial = orthonormalize_columns(&trial);
                let e = self.evaluate(&trial)?;
                if e.value <= cur.value - ARMIJO * t * dn2 {
                    accepted = Some((trial, e.value));
                    break;
                }
                t *= 0.5;
            }
            let Some((next, value)) = accepted else {
                converged = true;
                break;
            };
            let gain = cur.value - value;
            v = next;
            step = (t * 2.0).min(1e6);
            cur = self.eval_inner(&v, true)?;
            stall = if gain < settings.tol { stall + 1 } else { 0 };
            if stall >= STALL_ITERS {
                converged = true;
                break;
            }
        }
        Ok(RoofPoint {
            value: cur.value,
            v,
            converged,
            iterations,
        })
    }

    fn ensemble(&self, v: &CMatrix, back: &Restore) -> Result<PureEnsemble> {
        let mut members = Vec::new();
        for psi in self.members(v) {
            let p: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            if p >= PRUNE {
                members.push((p, back.apply(psi)?));
            }
        }
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        PureEnsemble::new(members.into_iter().map(|(p, s)| (p / total, s)).collect())
    }
}

/// Riemannian gradient on the Stiefel manifold: `G − V herm(V† G)`.
fn stiefel_project(v: &CMatrix, g: &CMatrix) -> Result<CMatrix> {
    let vg = v.adjoint_mul(g)?.hermitian_part();
    g.try_sub(&v.matmul(&vg)?)
}

/// Minimal entanglement over unit vectors of a subspace.
#[derive(Debug, Clone)]
pub struct SubspaceMinimum {
    pub value: Bits,
    pub state: PureState,
    pub converged: bool,
    pub iterations: usize,
}

/// Upper bound on `min { E(ψ) : ψ ∈ K }`, searching over subspace coordinates.
pub fn min_subspace_entanglement(
    k: &SubspaceBasis,
    settings: &OptSettings,
) -> Result<SubspaceMinimum> {
    let t = channel_from_subspace(k, 1)?;
    let SphereResult {
        value,
        point,
        converged,
        iterations,
    } = optim::minimize_output_entropy(&t, settings)?;
    Ok(SubspaceMinimum {
        value: Bits(value),
        state: k.embed(&point)?,
        converged,
        iterations,
    })
}

/// `E_f` of the maximally mixed state on `K`, valid when the caller knows the
/// state is covariant under a group acting transitively on `K`: then it equals
/// the minimal entanglement in `K`.
pub fn eof_symmetric(k: &SubspaceBasis, settings: &OptSettings) -> Result<Bits> {
    min_subspace_entanglement(k, settings).map(|r| r.value)
}

/// Weighted entanglement of an ensemble across `cut`.
pub fn ensemble_entanglement(e: &PureEnsemble, cut: &[usize]) -> Result<Bits> {
    let mut total = 0.0;
    for (p, s) in e.members() {
        total += p * pure_entanglement(s, cut)?.0;
    }
    Ok(Bits(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random_density;

    fn bell() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        let psi = PureState::new(
            vec![C64::new(h, 0.0), z, z, C64::new(h, 0.0)],
            Factorization::bipartite(2, 2),
        )
        .unwrap();
        DensityMatrix::from_pure(&psi)
    }

    #[test]
    fn wootters_known_values() {
        assert!((eof_wootters(&bell()).unwrap().0 - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(Factorization::bipartite(2, 2));
        assert!(eof_wootters(&mixed).unwrap().0.abs() < 1e-12);
        let wrong = DensityMatrix::maximally_mixed(Factorization::single(4));
        assert!(matches!(eof_wootters(&wrong), Err(Error::Shape(_))));
    }

    #[test]
    fn pure_input_is_exact() {
        let r = eof_convex_roof(&bell(), &[0], None, &OptSettings::new(2, 0)).unwrap();
        assert_eq!(r.ensemble.len(), 1);
        assert!((r.value.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_small_ensemble() {
        let rho = random_density(&Factorization::bipartite(2, 2), 3, 4).unwrap();
        let e = eof_convex_roof(&rho, &[0], Some(2), &OptSettings::new(1, 0));
        assert!(matches!(e, Err(Error::Parameter(_))));
    }

    #[test]
    fn roof_gradient_matches_finite_differences() {
        let rho = random_density(&Factorization::bipartite(2, 3), 3, 8).unwrap();
        let eig = eigh(rho.op()).unwrap();
        let w: Vec<Vec<C64>> = (0..6)
            .rev()
            .filter(|&k| eig.eigenvalues[k] > RANK_THRESHOLD)
            .map(|k| {
                eig.eigenvector(k)
                    .into_iter()
                    .map(|z| z * eig.eigenvalues[k].sqrt())
                    .collect()
            })
            .collect();
        for (da, db) in [(2, 3)] {
            let roof = Roof {
                w: w.clone(),
                da,
                db,
            };
            let mut rng = rng_from_seed(1);
            let v = haar_isometry(5, 3, &mut rng);
            let e = roof.eval_inner(&v, true).unwrap();
            let g = e.grad.unwrap();
            let h = 1e-6;
            for idx in [(0, 0), (2, 1), (4, 2)] {
                for unit in [C64::new(h, 0.0), C64::new(0.0, h)] {
                    let mut vp = v.clone();
                    vp[idx] += unit;
                    let mut vm = v.clone();
                    vm[idx] -= unit;
                    let fd = (roof.evaluate(&vp).unwrap().value
                        - roof.evaluate(&vm).unwrap().value)
                        / (2.0 * h);
                    let an = (g[idx].conj() * unit).re / h;
                    assert!((fd - an).abs() < 1e-5, "{fd} vs {an}");
                }
            }
        }
    }

    #[test]
    fn larger_side_reduction_agrees() {
        let rho = random_density(&Factorization::bipartite(3, 2), 2, 5).unwrap();
        let swapped = rho.permute(&[1, 0]).unwrap();
        let s = OptSettings::new(4, 3);
        let a = eof_convex_roof(&rho, &[0], None, &s).unwrap().value.0;
        let b = eof_convex_roof(&swapped, &[0], None, &s).unwrap().value.0;
        assert!((a - b).abs() < 1e-4, "{a} vs {b}");
    }
}
