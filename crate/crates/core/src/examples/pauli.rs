//! Unital qubit channels `ρ ↦ Σ_s p_s σ_s ρ σ_s` and their optimal states.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Factorization;
use crate::measures::{binary_entropy, Bits};
use crate::quantum::{DensityMatrix, KrausChannel, PureState};
use crate::{CMatrix, C64};

/// Slack allowed on the probability constraints and the admissibility test.
pub const PARAM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliParams {
    pub p0: f64,
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl PauliParams {
    pub fn new(p0: f64, px: f64, py: f64, pz: f64) -> Result<Self> {
        let p = [p0, px, py, pz];
        if p.iter().any(|x| !x.is_finite() || *x < -PARAM_TOL) {
            return Err(Error::Validation(format!("invalid Pauli weights {p:?}")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > PARAM_TOL {
            return Err(Error::Validation(format!("Pauli weights sum to {total}")));
        }
        let [p0, px, py, pz] = p.map(|x| x.max(0.0));
        Ok(Self { p0, px, py, pz })
    }

    /// The symmetric point `(1/2, 1/6, 1/6, 1/6)`.
    pub fn worked_point() -> Self {
        Self::new(0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0).expect("valid weights")
    }

    pub fn weights(&self) -> [f64; 4] {
        [self.p0, self.px, self.py, self.pz]
    }

    /// Slack of the ordering condition `p0+pz−px−py ≥ |p0+py−px−pz|, |p0+px−py−pz|`;
    /// nonnegative iff admissible.
    pub fn admissibility_margin(&self) -> f64 {
        let lhs = self.p0 + self.pz - self.px - self.py;
        let a = (self.p0 + self.py - self.px - self.pz).abs();
        let b = (self.p0 + self.px - self.py - self.pz).abs();
        lhs - a.max(b)
    }

    pub fn admissible(&self) -> bool {
        self.admissibility_margin() >= -PARAM_TOL
    }

    pub fn on_boundary(&self) -> bool {
        self.admissibility_margin().abs() <= PARAM_TOL
    }
}

pub fn pauli_matrices() -> [CMatrix; 4] {
    let c = |re: f64, im: f64| Complex::new(re, im);
    let m = |v: [C64; 4]| CMatrix::from_vec(2, 2, v.to_vec()).expect("2x2");
    [
        CMatrix::identity(2),
        m([c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        m([c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        m([c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
    ]
}

/// Kraus operators `√p_s σ_s`, all four kept even when a weight vanishes.
pub fn pauli_channel(p: &PauliParams) -> KrausChannel {
    let ops = pauli_matrices()
        .iter()
        .zip(p.weights())
        .map(|(s, w)| s.scale(w.sqrt()))
        .collect();
    KrausChannel::new(ops).expect("Pauli weights sum to one")
}

#[derive(Debug, Clone)]
pub struct PauliStates {
    pub psi_t: PureState,
    pub psi_t_perp: PureState,
    /// Equal mixture of the two.
    pub rho_t: DensityMatrix,
}

/// The images of `|0>` and `|1>` under the dilation, on output `C^2` ⊗
/// environment `C^4` (environment basis `0, x, y, z`).
pub fn pauli_states(p: &PauliParams) -> PauliStates {
    let fact = Factorization::bipartite(2, 4);
    let [s0, sx, sy, sz] = p.weights().map(f64::sqrt);
    let idx = |o: usize, e: usize| o * 4 + e;
    let mut a = vec![C64::new(0.0, 0.0); 8];
    a[idx(0, 0)] = C64::new(s0, 0.0);
    a[idx(1, 1)] = C64::new(sx, 0.0);
    a[idx(1, 2)] = C64::new(0.0, sy);
    a[idx(0, 3)] = C64::new(sz, 0.0);
    let mut b = vec![C64::new(0.0, 0.0); 8];
    b[idx(1, 0)] = C64::new(s0, 0.0);
    b[idx(0, 1)] = C64::new(sx, 0.0);
    b[idx(0, 2)] = C64::new(0.0, -sy);
    b[idx(1, 3)] = C64::new(-sz, 0.0);
    let psi_t = PureState::normalized(a, fact.clone()).expect("unit vector");
    let psi_t_perp = PureState::normalized(b, fact).expect("unit vector");
    let rho_t = rho_t_mixture(&psi_t, &psi_t_perp, 0.5);
    PauliStates {
        psi_t,
        psi_t_perp,
        rho_t,
    }
}

/// `s |ψ_T><ψ_T| + (1 − s) |ψ_T^⊥><ψ_T^⊥|`.
pub fn rho_t_mixture(psi: &PureState, perp: &PureState, s: f64) -> DensityMatrix {
    DensityMatrix::from_pure(psi)
        .mix(s, &DensityMatrix::from_pure(perp))
        .expect("same space")
}

/// `H(p0 + pz, 1 − p0 − pz)` without the admissibility check.
pub fn pauli_ec_unchecked(p: &PauliParams) -> Bits {
    Bits(binary_entropy((p.p0 + p.pz).clamp(0.0, 1.0)))
}

/// Entanglement cost (= E_f) of any mixture of `ψ_T` and `ψ_T^⊥`.
pub fn pauli_ec_closed_form(p: &PauliParams) -> Result<Bits> {
    if !p.admissible() {
        return Err(Error::Domain(format!(
            "weights {:?} violate the ordering condition",
            p.weights()
        )));
    }
    Ok(pauli_ec_unchecked(p))
}
