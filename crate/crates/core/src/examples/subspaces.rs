//! Subspaces whose partial traces give covariant channels on `C^3`.

use crate::error::{Error, Result};
use crate::linalg::Factorization;
use crate::quantum::{KrausChannel, SubspaceBasis};
use crate::{CMatrix, C64};

fn basis_vector(dim: usize, entries: &[(usize, f64)]) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); dim];
    for &(i, x) in entries {
        v[i] += C64::new(x, 0.0);
    }
    v
}

/// `c |j>_s` with the environment padded to `env` coordinates.
fn vdc_vectors(env: usize, c: f64) -> Vec<Vec<C64>> {
    let h = 0.5 * c;
    let r = std::f64::consts::SQRT_2 * 0.5 * c;
    let at = |a: usize, b: usize| a * env + b;
    vec![
        basis_vector(3 * env, &[(at(1, 2), h), (at(2, 1), h), (at(0, 3), r)]),
        basis_vector(3 * env, &[(at(2, 0), h), (at(0, 2), h), (at(1, 4), r)]),
        basis_vector(3 * env, &[(at(0, 1), h), (at(1, 0), h), (at(2, 5), r)]),
    ]
}

/// The three-dimensional subspace of `C^3 ⊗ C^6`; tracing out `C^6` gives
/// `ρ ↦ (I + ρ^T)/4`.
pub fn vdc_subspace() -> SubspaceBasis {
    SubspaceBasis::from_vectors(&vdc_vectors(6, 1.0), Factorization::bipartite(3, 6))
        .expect("orthonormal")
}

/// `c|j>_s ⊕ s|j>_t` in `C^3 ⊗ (C^6 ⊕ C^9)` with `|c|² = weight`, where
/// `|j>_t = |Φ_3> ⊗ |j>` occupies environment coordinates `6 + 3a + j`.
/// Tracing out the environment gives `p I/3 + (1 − p) ρ^T` with
/// `p = 1 − weight/4`.
pub fn vdc_family(weight: f64) -> Result<SubspaceBasis> {
    if !(0.0..=1.0).contains(&weight) {
        return Err(Error::Domain(format!("weight {weight} outside [0, 1]")));
    }
    let env = 15;
    let s = (1.0 - weight).sqrt() / 3f64.sqrt();
    let mut vs = vdc_vectors(env, weight.sqrt());
    for (j, v) in vs.iter_mut().enumerate() {
        for a in 0..3 {
            v[a * env + 6 + 3 * a + j] += C64::new(s, 0.0);
        }
    }
    SubspaceBasis::from_vectors(&vs, Factorization::bipartite(3, env))
}

/// Depolarizing weight `p` of the channel induced by `vdc_family(weight)`.
pub fn vdc_weight_to_p(weight: f64) -> f64 {
    1.0 - weight / 4.0
}

/// Channel of the VDC family (environment traced out).
pub fn vdc_channel(weight: f64) -> Result<KrausChannel> {
    vdc_family(weight)?.channel(1)
}

/// `p I/3 + (1 − p) ρ^T`.
pub fn transpose_depolarizing(p: f64, rho: &CMatrix) -> CMatrix {
    let mut out = rho.transpose().scale(1.0 - p);
    out.add_scaled(p / rho.rows() as f64, &CMatrix::identity(rho.rows()));
    out
}

/// The antisymmetric subspace of `C^3 ⊗ C^3`.
pub fn antisym_subspace() -> SubspaceBasis {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let at = |a: usize, b: usize| a * 3 + b;
    let vs = vec![
        basis_vector(9, &[(at(1, 2), h), (at(2, 1), -h)]),
        basis_vector(9, &[(at(2, 0), h), (at(0, 2), -h)]),
        basis_vector(9, &[(at(0, 1), h), (at(1, 0), -h)]),
    ];
    SubspaceBasis::from_vectors(&vs, Factorization::bipartite(3, 3)).expect("orthonormal")
}

/// Channel of the antisymmetric subspace with the first factor traced out.
pub fn antisym_channel() -> KrausChannel {
    antisym_subspace().channel(0).expect("bipartite subspace")
}

/// `(3/2)(I/3) − (1/2) ρ^T`.
pub fn antisym_formula(rho: &CMatrix) -> CMatrix {
    let mut out = rho.transpose().scale(-0.5);
    out.add_scaled(0.5, &CMatrix::identity(rho.rows()));
    out
}
