//! Holevo capacity by alternating optimisation, its dilation form, and the
//! capacity under a single linear cost constraint.

use crate::eof::{eof_convex_roof, min_subspace_entanglement, EofResult};
use crate::error::{Error, Result};
use crate::linalg::{eigh, inner, Factorization};
use crate::measures::{holevo_information, Bits};
use crate::optim::{entropy_and_log, entropy_of, multistart, normalize, OptSettings, STALL_ITERS};
use crate::quantum::{
    haar_vector, rng_from_seed, DensityMatrix, KrausChannel, PureEnsemble, PureState, SubspaceBasis,
};
use crate::{CMatrix, C64};

/// Members lighter than this are dropped from the reported ensemble.
pub const PRUNE: f64 = 1e-12;
/// Stationarity target of the probability step.
pub const P_STEP_TOL: f64 = 1e-9;

const P_STEP_MAX_ITER: usize = 200;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACK: usize = 40;
const LN2: f64 = std::f64::consts::LN_2;

#[derive(Debug, Clone)]
pub struct CapacityResult {
    pub value: Bits,
    pub ensemble: PureEnsemble,
    /// `ω(T) = Σ p_i T(π_i)`.
    pub optimal_output: DensityMatrix,
    pub converged: bool,
    pub iterations: usize,
}

/// Average-cost constraint `Σ p_i Tr(π_i A) ≤ α`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostConstraint {
    cost_op: CMatrix,
    threshold: f64,
}

impl CostConstraint {
    pub fn new(cost_op: CMatrix, threshold: f64) -> Result<Self> {
        if !cost_op.is_square() {
            return Err(Error::Shape("cost operator must be square".into()));
        }
        if !cost_op.is_hermitian(1e-10) {
            return Err(Error::Validation("cost operator is not Hermitian".into()));
        }
        if !threshold.is_finite() {
            return Err(Error::Validation(format!(
                "threshold {threshold} is not finite"
            )));
        }
        Ok(Self { cost_op, threshold })
    }

    pub fn cost_op(&self) -> &CMatrix {
        &self.cost_op
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    fn cost(&self, psi: &[C64]) -> f64 {
        inner(psi, &self.cost_op.mul_vec(psi).expect("checked dimension")).re
    }
}

/// Lower bound on `C(T)` over ensembles of at most `max_ensemble` pure states
/// (default `out_dim²`).
pub fn holevo_capacity(
    t: &KrausChannel,
    max_ensemble: Option<usize>,
    settings: &OptSettings,
) -> Result<CapacityResult> {
    optimize(t, None, max_ensemble, settings)
}

/// Lower bound on the capacity with the average input cost bounded by `α`.
pub fn constrained_capacity(
    t: &KrausChannel,
    c: &CostConstraint,
    max_ensemble: Option<usize>,
    settings: &OptSettings,
) -> Result<CapacityResult> {
    if c.cost_op.rows() != t.in_dim() {
        return Err(Error::Shape(format!(
            "cost operator is {0}x{0} but channel input has dimension {1}",
            c.cost_op.rows(),
            t.in_dim()
        )));
    }
    let lmin = eigh(&c.cost_op)?.eigenvalues[0];
    if c.threshold < lmin - 1e-12 {
        return Err(Error::Infeasible(format!(
            "threshold {} below the smallest cost eigenvalue {lmin}",
            c.threshold
        )));
    }
    optimize(t, Some(c), max_ensemble, settings)
}

fn optimize(
    t: &KrausChannel,
    constraint: Option<&CostConstraint>,
    max_ensemble: Option<usize>,
    settings: &OptSettings,
) -> Result<CapacityResult> {
    let m = max_ensemble.unwrap_or(t.out_dim() * t.out_dim()).max(1);
    let ground = match constraint {
        Some(c) => Some(eigh(&c.cost_op)?.eigenvector(0)),
        None => None,
    };
    let best = multistart(
        settings.restarts,
        |i| {
            let mut rng = rng_from_seed(settings.restart_seed(i));
            let mut states: Vec<Vec<C64>> =
                (0..m).map(|_| haar_vector(t.in_dim(), &mut rng)).collect();
            if let Some(g) = &ground {
                states[0] = g.clone();
            }
            let mut s = Search::new(t, constraint, states)?;
            s.run(settings)?;
            Ok(s)
        },
        |a, b| a.chi > b.chi,
    )?;
    best.finish()
}

/// One restart of the alternating search.
struct Search<'a> {
    t: &'a KrausChannel,
    constraint: Option<&'a CostConstraint>,
    states: Vec<Vec<C64>>,
    p: Vec<f64>,
    outputs: Vec<CMatrix>,
    entropies: Vec<f64>,
    chi: f64,
    converged: bool,
    iterations: usize,
}

impl<'a> Search<'a> {
    fn new(
        t: &'a KrausChannel,
        constraint: Option<&'a CostConstraint>,
        states: Vec<Vec<C64>>,
    ) -> Result<Self> {
        let m = states.len();
        let outputs = states
            .iter()
            .map(|s| t.apply_pure(s))
            .collect::<Result<Vec<_>>>()?;
        let entropies = outputs.iter().map(entropy_of).collect::<Result<Vec<_>>>()?;
        let mut s = Self {
            t,
            constraint,
            states,
            p: vec![1.0 / m as f64; m],
            outputs,
            entropies,
            chi: 0.0,
            converged: false,
            iterations: 0,
        };
        if let Some(c) = constraint {
            let costs = s.costs(&s.states);
            s.p = project_feasible(&s.p, &costs, c.threshold)
                .ok_or_else(|| Error::Infeasible("no feasible initial distribution".into()))?;
        }
        s.chi = s.chi_at(&s.p, &s.outputs, &s.entropies)?;
        Ok(s)
    }

    fn costs(&self, states: &[Vec<C64>]) -> Vec<f64> {
        match self.constraint {
            Some(c) => states.iter().map(|s| c.cost(s)).collect(),
            None => vec![0.0; states.len()],
        }
    }

    fn average(p: &[f64], outputs: &[CMatrix]) -> CMatrix {
        let d = outputs[0].rows();
        let mut w = CMatrix::zeros(d, d);
        for (pi, o) in p.iter().zip(outputs) {
            if *pi > 0.0 {
                w.add_scaled(*pi, o);
            }
        }
        w
    }

    fn chi_at(&self, p: &[f64], outputs: &[CMatrix], entropies: &[f64]) -> Result<f64> {
        let avg: f64 = p.iter().zip(entropies).map(|(a, b)| a * b).sum();
        Ok(entropy_of(&Self::average(p, outputs))? - avg)
    }

    fn project(&self, y: &[f64], costs: &[f64]) -> Option<Vec<f64>> {
        match self.constraint {
            Some(c) => project_feasible(y, costs, c.threshold),
            None => Some(project_simplex(y)),
        }
    }

    /// Maximises χ over `p` with the states fixed (a concave problem).
    fn probability_step(&mut self) -> Result<()> {
        let costs = self.costs(&self.states);
        let mut step = 1.0;
        for _ in 0..P_STEP_MAX_ITER {
            let (_, log_w) = entropy_and_log(&Self::average(&self.p, &self.outputs))?;
            let g: Vec<f64> = self
                .outputs
                .iter()
                .zip(&self.entropies)
                .map(|(o, s)| (-trace_product(o, &log_w) - 1.0) / LN2 - s)
                .collect();
            let unit: Vec<f64> = self.p.iter().zip(&g).map(|(p, g)| p + g).collect();
            let Some(target) = self.project(&unit, &costs) else {
                break;
            };
            let stationarity = dist(&target, &self.p);
            if stationarity <= P_STEP_TOL {
                break;
            }
            let mut t = step;
            let mut moved = false;
            for _ in 0..MAX_BACKTRACK {
                let y: Vec<f64> = self.p.iter().zip(&g).map(|(p, g)| p + t * g).collect();
                let Some(q) = self.project(&y, &costs) else {
                    break;
                };
                let chi = self.chi_at(&q, &self.outputs, &self.entropies)?;
                let lin: f64 = q
                    .iter()
                    .zip(&self.p)
                    .zip(&g)
                    .map(|((q, p), g)| (q - p) * g)
                    .sum();
                if chi >= self.chi + ARMIJO * lin && chi >= self.chi {
                    self.p = q;
                    self.chi = chi;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if !moved {
                break;
            }
            step = (t * 2.0).min(1e6);
        }
        Ok(())
    }

    /// One Armijo ascent step on all member states at fixed weights.
    fn state_step(&mut self, step: &mut f64) -> Result<f64> {
        let (_, log_w) = entropy_and_log(&Self::average(&self.p, &self.outputs))?;
        let mut dirs = Vec::with_capacity(self.states.len());
        for (psi, out) in self.states.iter().zip(&self.outputs) {
            let (_, log_o) = entropy_and_log(out)?;
            let h = self
                .t
                .apply_adjoint(&log_o.try_sub(&log_w)?)?
                .scale(1.0 / LN2);
            dirs.push(tangent(psi, &h.mul_vec(psi)?));
        }
        if let Some(c) = self.constraint {
            let costs = self.costs(&self.states);
            let total: f64 = costs.iter().zip(&self.p).map(|(c, p)| c * p).sum();
            if total >= c.threshold - 1e-9 {
                remove_cost_ascent(&mut dirs, &self.states, &self.p, c)?;
            }
        }
        let slope: f64 = self
            .p
            .iter()
            .zip(&dirs)
            .map(|(p, d)| 2.0 * p * d.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        if slope < 1e-20 {
            return Ok(0.0);
        }
        let mut t = *step;
        for _ in 0..MAX_BACKTRACK {
            let trial: Vec<Vec<C64>> = self
                .states
                .iter()
                .zip(&dirs)
                .map(|(s, d)| {
                    let mut v: Vec<C64> = s.iter().zip(d).map(|(a, b)| a + b * t).collect();
                    normalize(&mut v);
                    v
                })
                .collect();
            let outputs = trial
                .iter()
                .map(|s| self.t.apply_pure(s))
                .collect::<Result<Vec<_>>>()?;
            let entropies = outputs.iter().map(entropy_of).collect::<Result<Vec<_>>>()?;
            let p = match self.constraint {
                Some(_) => self.project(&self.p, &self.costs(&trial)),
                None => Some(self.p.clone()),
            };
            if let Some(p) = p {
                let chi = self.chi_at(&p, &outputs, &entropies)?;
                if chi >= self.chi + ARMIJO * t * slope {
                    let gain = chi - self.chi;
                    self.states = trial;
                    self.outputs = outputs;
                    self.entropies = entropies;
                    self.p = p;
                    self.chi = chi;
                    *step = (t * 2.0).min(1e6);
                    return Ok(gain);
                }
            }
            t *= 0.5;
        }
        Ok(0.0)
    }

    fn run(&mut self, settings: &OptSettings) -> Result<()> {
        let mut step = 1.0;
        let mut stall = 0;
        while self.iterations < settings.max_iter {
            self.iterations += 1;
            let before = self.chi;
            self.probability_step()?;
            self.state_step(&mut step)?;
            let gain = self.chi - before;
            stall = if gain < settings.tol { stall + 1 } else { 0 };
            if stall >= STALL_ITERS {
                self.converged = true;
                break;
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<CapacityResult> {
        let fact = Factorization::single(self.t.in_dim());
        let mut members = Vec::new();
        for (p, s) in self.p.iter().zip(self.states) {
            if *p >= PRUNE {
                members.push((*p, PureState::normalized(s, fact.clone())?));
            }
        }
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        let ensemble =
            PureEnsemble::new(members.into_iter().map(|(p, s)| (p / total, s)).collect())?;
        let value = holevo_information(&ensemble, self.t)?;
        let omega = self.t.apply(&ensemble.average())?;
        Ok(CapacityResult {
            value,
            ensemble,
            optimal_output: omega,
            converged: self.converged,
            iterations: self.iterations,
        })
    }
}

fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    s
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn tangent(x: &[C64], g: &[C64]) -> Vec<C64> {
    let r = inner(x, g).re;
    g.iter().zip(x).map(|(gi, xi)| gi - xi * r).collect()
}

/// Removes the first-order increase of the average cost from the ascent
/// direction, so an active constraint is not pushed outward.
fn remove_cost_ascent(
    dirs: &mut [Vec<C64>],
    states: &[Vec<C64>],
    p: &[f64],
    c: &CostConstraint,
) -> Result<()> {
    let grads: Vec<Vec<C64>> = states
        .iter()
        .map(|s| Ok(tangent(s, &c.cost_op.mul_vec(s)?)))
        .collect::<Result<_>>()?;
    let rate = |d: &[Vec<C64>]| -> f64 {
        p.iter()
            .zip(d)
            .zip(&grads)
            .map(|((p, d), g)| 2.0 * p * inner(g, d).re)
            .sum()
    };
    let up = rate(dirs);
    let norm = rate(&grads);
    if up > 0.0 && norm > 1e-300 {
        let mu = up / norm;
        for (d, g) in dirs.iter_mut().zip(&grads) {
            for (a, b) in d.iter_mut().zip(g) {
                *a -= b * mu;
            }
        }
    }
    Ok(())
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &v) in u.iter().enumerate() {
        cum += v;
        let th = (cum - 1.0) / (k + 1) as f64;
        if v - th > 0.0 {
            theta = th;
        }
    }
    y.iter().map(|&v| (v - theta).max(0.0)).collect()
}

/// Projection onto `{p in simplex : c·p ≤ α}`, or `None` when that set is empty.
///
/// The solution is `Proj_simplex(y − μc)` for the smallest `μ ≥ 0` meeting
/// the constraint, found by bisection.
pub fn project_feasible(y: &[f64], c: &[f64], alpha: f64) -> Option<Vec<f64>> {
    let cmin = c.iter().copied().fold(f64::INFINITY, f64::min);
    if cmin > alpha + 1e-12 {
        return None;
    }
    let cost = |p: &[f64]| p.iter().zip(c).map(|(a, b)| a * b).sum::<f64>();
    let at = |mu: f64| -> Vec<f64> {
        let shifted: Vec<f64> = y.iter().zip(c).map(|(y, c)| y - mu * c).collect();
        project_simplex(&shifted)
    };
    let p0 = at(0.0);
    if cost(&p0) <= alpha {
        return Some(p0);
    }
    let mut hi = 1.0;
    let mut p_hi = at(hi);
    let mut doublings = 0;
    while cost(&p_hi) > alpha {
        hi *= 2.0;
        p_hi = at(hi);
        doublings += 1;
        if doublings > 200 {
            // Only the cheapest members can be kept; α sits at the minimum cost.
            let support: Vec<usize> = (0..c.len()).filter(|&i| c[i] <= cmin + 1e-12).collect();
            let mut p = vec![0.0; c.len()];
            for &i in &support {
                p[i] = 1.0 / support.len() as f64;
            }
            return Some(p);
        }
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let p = at(mid);
        if cost(&p) > alpha {
            lo = mid;
        } else {
            hi = mid;
            p_hi = p;
        }
        if hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
    }
    Some(p_hi)
}

/// The dilation form of the capacity evaluated at the optimal ensemble.
#[derive(Debug, Clone)]
pub struct DilationCapacity {
    pub value: Bits,
    /// Average of the dilated optimal ensemble on environment ⊗ output.
    pub witness: DensityMatrix,
    /// Entropy of the output marginal of the witness.
    pub entropy_term: Bits,
    /// Entanglement of formation of the witness across environment | output.
    pub eof_term: Bits,
    pub capacity: CapacityResult,
    pub eof: EofResult,
}

/// `S(Tr_env ρ) − E_f(ρ)` for `ρ` the dilated average of the optimal input
/// ensemble.
pub fn capacity_via_dilation(t: &KrausChannel, settings: &OptSettings) -> Result<DilationCapacity> {
    let capacity = holevo_capacity(t, None, settings)?;
    let dil = t.stinespring()?;
    let witness = dil.dilate(&capacity.ensemble.average())?;
    let entropy_term = Bits(entropy_of(witness.partial_trace(&[0])?.op())?);
    let eof = eof_convex_roof(&witness, &[0], None, settings)?;
    Ok(DilationCapacity {
        value: Bits(entropy_term.0 - eof.value.0),
        witness,
        entropy_term,
        eof_term: eof.value,
        capacity,
        eof,
    })
}

/// `log2 d_out − min_{ψ ∈ K} E(ψ)`, the capacity of the channel tracing out
/// factor `traced` of the subspace, valid when that channel is irreducibly
/// covariant.
pub fn covariant_capacity(
    k: &SubspaceBasis,
    traced: usize,
    settings: &OptSettings,
) -> Result<Bits> {
    let dims = k.fact().dims();
    if dims.len() != 2 || traced > 1 {
        return Err(Error::Shape(
            "covariant capacity needs a bipartite subspace".into(),
        ));
    }
    let out = dims[1 - traced] as f64;
    let e = min_subspace_entanglement(k, settings)?;
    Ok(Bits(out.log2() - e.value.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.2, 0.2, 0.2]);
        for x in &p {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(project_simplex(&[5.0, 0.0]), vec![1.0, 0.0]);
        let q = project_simplex(&[0.9, 0.6, -0.4]);
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((q[0] - 0.65).abs() < 1e-12 && (q[1] - 0.35).abs() < 1e-12 && q[2] == 0.0);
    }

    #[test]
    fn feasible_projection_meets_the_constraint() {
        let c = [0.0, 1.0, 1.0];
        let p = project_feasible(&[0.1, 0.5, 0.4], &c, 0.3).unwrap();
        let cost: f64 = p.iter().zip(&c).map(|(a, b)| a * b).sum();
        assert!((cost - 0.3).abs() < 1e-9);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(project_feasible(&[0.5, 0.5], &[1.0, 2.0], 0.5).is_none());
        let edge = project_feasible(&[0.5, 0.5], &[0.0, 1.0], 0.0).unwrap();
        assert!(edge[1] < 1e-9);
    }

    #[test]
    fn identity_and_constant_channels() {
        let s = OptSettings::new(2, 1);
        let r = holevo_capacity(&KrausChannel::identity(2), None, &s).unwrap();
        assert!((r.value.0 - 1.0).abs() < 1e-6, "{}", r.value);
        let sigma = DensityMatrix::maximally_mixed(Factorization::single(2));
        let t = KrausChannel::constant(2, &sigma).unwrap();
        let r = holevo_capacity(&t, None, &s).unwrap();
        assert!(r.value.0.abs() < 1e-9);
    }

    #[test]
    fn infeasible_threshold() {
        let t = KrausChannel::identity(2);
        let a = CMatrix::diag_real(&[1.0, 2.0]);
        let c = CostConstraint::new(a, 0.5).unwrap();
        let r = constrained_capacity(&t, &c, None, &OptSettings::new(1, 0));
        assert!(matches!(r, Err(Error::Infeasible(_))));
    }
}
