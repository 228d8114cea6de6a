//! Random search for violations of `E_f(ρ) ≥ E_f(ρ_12) + E_f(ρ_1'2')` on
//! `(C^2 ⊗ C^2) ⊗ (C^2 ⊗ C^2)`.
//!
//! Factors are ordered `1, 2, 1', 2'`; the joint entanglement is taken across
//! `1 1' | 2 2'`. The joint value is an upper bound from the convex-roof search
//! and the marginals are exact, so any reported candidate is either a genuine
//! counterexample or an optimiser failure and needs inspection.

use rayon::prelude::*;
use serde::Serialize;

use crate::eof::{eof_convex_roof, eof_wootters};
use crate::error::Result;
use crate::linalg::Factorization;
use crate::optim::OptSettings;
use crate::quantum::{derive_seed, haar_random_pure, random_density, DensityMatrix};

/// Amount by which the bound must undercut the marginal sum to be reported.
pub const VIOLATION_MARGIN: f64 = 1e-4;
/// Cut `1 1' | 2 2'` in the factor order `1, 2, 1', 2'`.
pub const JOINT_CUT: [usize; 2] = [0, 2];

pub fn four_qubit_fact() -> Factorization {
    Factorization::new(vec![2, 2, 2, 2]).expect("positive dims")
}

#[derive(Debug, Clone, Serialize)]
pub struct SuperaddSample {
    pub index: usize,
    pub seed: u64,
    pub rank: usize,
    /// Upper bound on the joint `E_f`.
    pub upper: f64,
    /// `E_f(ρ_12) + E_f(ρ_1'2')`, exact.
    pub marginal_sum: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    pub sample: SuperaddSample,
    pub dims: Vec<usize>,
    /// Row-major `[re, im]` entries of the state.
    pub matrix: Vec<[f64; 2]>,
}

/// Evaluates both sides for one state on the `1, 2, 1', 2'` factorization.
pub fn superadd_sides(rho: &DensityMatrix, settings: &OptSettings) -> Result<(f64, f64)> {
    let upper = eof_convex_roof(rho, &JOINT_CUT, None, settings)?.value.0;
    let left = eof_wootters(&rho.partial_trace(&[2, 3])?)?.0;
    let right = eof_wootters(&rho.partial_trace(&[0, 1])?)?.0;
    Ok((upper, left + right))
}

/// Sample `i` is pure for even `i` and rank two for odd `i`.
pub fn superadd_sample(index: usize, seed: u64) -> Result<(u64, usize, DensityMatrix)> {
    let f = four_qubit_fact();
    let s = derive_seed(seed, index as u64);
    if index % 2 == 0 {
        Ok((s, 1, DensityMatrix::from_pure(&haar_random_pure(&f, s))))
    } else {
        Ok((s, 2, random_density(&f, 2, s)?))
    }
}

/// Returns the samples whose upper bound undercuts the marginal sum by more
/// than [`VIOLATION_MARGIN`]; expected to be empty.
pub fn superadditivity_search(
    samples: usize,
    seed: u64,
    settings: &OptSettings,
) -> Result<Vec<Candidate>> {
    let found: Vec<Option<Candidate>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let (s, rank, rho) = superadd_sample(i, seed)?;
            let opt = settings.with_seed(derive_seed(s, 1));
            let (upper, marginal_sum) = superadd_sides(&rho, &opt)?;
            if upper + VIOLATION_MARGIN < marginal_sum {
                Ok(Some(Candidate {
                    sample: SuperaddSample {
                        index: i,
                        seed: s,
                        rank,
                        upper,
                        marginal_sum,
                    },
                    dims: rho.fact().dims().to_vec(),
                    matrix: rho.op().data().iter().map(|z| [z.re, z.im]).collect(),
                }))
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random_density;

    #[test]
    fn product_states_are_additive() {
        let f = Factorization::bipartite(2, 2);
        let a = random_density(&f, 1, 21).unwrap();
        let b = random_density(&f, 1, 22).unwrap();
        let rho = a.tensor(&b).unwrap();
        let (u, w) = superadd_sides(&rho, &OptSettings::new(2, 0)).unwrap();
        assert!((u - w).abs() < 1e-6, "{u} vs {w}");
    }

    #[test]
    fn small_search_is_empty() {
        assert!(superadditivity_search(6, 5, &OptSettings::new(2, 0))
            .unwrap()
            .is_empty());
    }
}
