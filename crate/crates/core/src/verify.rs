//! The reproduction checks run by `verify-paper` and the acceptance tests.
//!
//! Each criterion returns a [`Outcome`] rather than panicking, so a failure
//! in one check never hides the others. Restart counts are kept small: the
//! searches are multi-start and a handful of restarts already reaches the
//! known optima on these instances.

use std::fmt;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::capacity::{
    capacity_via_dilation, constrained_capacity, holevo_capacity, CostConstraint,
};
use crate::eof::{eof_convex_roof, eof_wootters, min_subspace_entanglement};
use crate::error::Result;
use crate::examples::*;
use crate::linalg::Factorization;
use crate::measures::{
    binary_entropy, partial_transpose_norm, pure_entanglement, von_neumann_entropy,
};
use crate::optim::OptSettings;
use crate::quantum::{
    derive_seed, haar_vector, random_density, rng_from_seed, DensityMatrix, KrausChannel, PureState,
};
use crate::CMatrix;

/// `H(1/3, 2/3)`, the entanglement cost at the worked point.
pub const EC_WORKED: f64 = 0.918_295_834_054_489_6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Everything except the tensor-power check; a shorter superadditivity run.
    Quick,
    Full,
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub skipped: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match (self.skipped, self.passed) {
            (true, _) => "SKIP",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        };
        write!(
            f,
            "{tag} [{:>2}] {} ({:.1}s): {}",
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

pub const CRITERIA: [(u8, &str); 11] = [
    (1, "convex roof vs Wootters on random two-qubit states"),
    (2, "qubit Pauli channel entanglement cost"),
    (3, "partial-transpose quartic consistency"),
    (4, "capacity closed forms"),
    (5, "capacity through the dilation"),
    (6, "depolarizing output entropy"),
    (7, "subspace channels"),
    (8, "gap region"),
    (9, "cost-constrained capacity sweep"),
    (10, "tensor-power additivity witness"),
    (11, "superadditivity search"),
];

/// Collects named sub-checks; the criterion passes iff all of them do.
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, msg: impl Into<String>) {
        if !ok {
            self.failures.push(msg.into());
        }
    }

    fn close(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let err = (got - want).abs();
        self.check(
            err <= tol,
            format!("{label}: {got} vs {want} (|err| {err:.2e} > {tol:e})"),
        );
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }

    fn finish(self, id: u8, elapsed: Duration) -> Outcome {
        let passed = self.failures.is_empty();
        let detail = if passed {
            self.notes.join("; ")
        } else {
            self.failures.join("; ")
        };
        outcome(id, passed, false, detail, elapsed)
    }
}

fn outcome(id: u8, passed: bool, skipped: bool, detail: String, elapsed: Duration) -> Outcome {
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map_or("unknown", |c| c.1);
    Outcome {
        id,
        name,
        passed,
        skipped,
        detail,
        elapsed,
    }
}

/// Runs every criterion in order.
pub fn run_all(level: Level, seed: u64) -> Vec<Outcome> {
    CRITERIA
        .iter()
        .map(|&(id, _)| run(id, level, seed))
        .collect()
}

/// Runs one criterion; unknown ids fail.
pub fn run(id: u8, level: Level, seed: u64) -> Outcome {
    let start = Instant::now();
    let seed = derive_seed(seed, id as u64);
    let body: Result<Checks> = match id {
        1 => c1_wootters(seed),
        2 => c2_pauli_eof(seed),
        3 => c3_quartic(seed),
        4 => c4_capacities(seed),
        5 => c5_dilation(seed),
        6 => c6_depolarizing(),
        7 => c7_subspaces(seed),
        8 => c8_gap(seed),
        9 => c9_constrained(seed),
        10 if level == Level::Quick => {
            return outcome(id, true, true, "full level only".into(), start.elapsed())
        }
        10 => c10_tensor_power(seed),
        11 => c11_superadd(seed, level),
        _ => {
            return outcome(
                id,
                false,
                false,
                "no such criterion".into(),
                start.elapsed(),
            )
        }
    };
    match body {
        Ok(c) => c.finish(id, start.elapsed()),
        Err(e) => outcome(id, false, false, format!("error: {e}"), start.elapsed()),
    }
}

/// Uniform on the probability simplex, rejected until admissible with a
/// margin (boundary points make the optimiser's job degenerate).
pub fn random_admissible_pauli<R: Rng + ?Sized>(rng: &mut R) -> PauliParams {
    loop {
        let e: [f64; 4] = std::array::from_fn(|_| rng.sample(Exp1));
        let s: f64 = e.iter().sum();
        let p = PauliParams::new(e[0] / s, e[1] / s, e[2] / s, e[3] / s).expect("simplex point");
        if p.admissibility_margin() > 1e-3 {
            return p;
        }
    }
}

fn c1_wootters(seed: u64) -> Result<Checks> {
    let mut c = Checks::new();
    let f = Factorization::bipartite(2, 2);
    let settings = OptSettings::new(8, seed);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..200 {
        let rho = random_density(&f, 1 + i % 4, derive_seed(seed, i as u64))?;
        let roof = eof_convex_roof(
            &rho,
            &[0],
            None,
            &settings.with_seed(derive_seed(seed, 1000 + i as u64)),
        )?;
        let diff = roof.value.0 - eof_wootters(&rho)?.0;
        lo = lo.min(diff);
        hi = hi.max(diff);
        c.check(
            (-1e-6..=1e-3).contains(&diff),
            format!("state {i}: roof − oracle = {diff:e}"),
        );
    }
    c.note(format!("200 states, roof − oracle in [{lo:.1e}, {hi:.1e}]"));
    Ok(c)
}

fn c2_pauli_eof(seed: u64) -> Result<Checks> {
    let mut c = Checks::new();
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let p = random_admissible_pauli(&mut rng);
        let ec = pauli_ec_closed_form(&p)?.0;
        let st = pauli_states(&p);
        let roof = eof_convex_roof(
            &st.rho_t,
            &[0],
            None,
            &OptSettings::new(4, derive_seed(seed, i)),
        )?;
        worst = worst.max((roof.value.0 - ec).abs());
        c.close(
            &format!("E_f(ρ_T) at {:?}", p.weights()),
            roof.value.0,
            ec,
            1e-3,
        );
        c.close("E(ψ_T)", pure_entanglement(&st.psi_t, &[0])?.0, ec, 1e-10);
        c.close(
            "E(ψ_T^⊥)",
            pure_entanglement(&st.psi_t_perp, &[0])?.0,
            ec,
            1e-10,
        );
    }
    c.note(format!("20 points, worst |E_f − H| = {worst:.1e}"));
    Ok(c)
}

fn c3_quartic(seed: u64) -> Result<Checks> {
    let mut c = Checks::new();
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = random_admissible_pauli(&mut rng);
        let r = gap_consistency_check(&p)?;
        worst = worst.max(r.max_spectrum_deviation);
        c.check(r.passed, r.diagnostic);
    }

    let sixth = Ratio::new(1i64, 6);
    let coeffs = gap_polynomial_generic(Ratio::new(1i64, 2), sixth, sixth, sixth);
    let want = [
        Ratio::from_integer(1),
        Ratio::from_integer(-1),
        Ratio::from_integer(0),
        Ratio::new(5, 27),
        Ratio::new(-1, 27),
    ];
    c.check(coeffs == want, format!("exact coefficients {coeffs:?}"));

    let w = PauliParams::worked_point();
    let exact_norm = (2.0 + 13f64.sqrt()) / 3.0;
    let rho = pauli_states(&w).rho_t;
    c.close("‖ρ_T^Γ‖₁ (quartic)", gap_trace_norm(&w)?, exact_norm, 1e-9);
    c.close(
        "‖ρ_T^Γ‖₁ (direct)",
        partial_transpose_norm(&rho, &[0])?,
        exact_norm,
        1e-9,
    );
    let logneg = gap_condition(&w)?.logneg.0;
    c.close("log-negativity", logneg, exact_norm.log2(), 1e-6);
    c.check(logneg < 0.918296, format!("no gap: {logneg} ≥ 0.918296"));
    c.note(format!(
        "50 points, worst spectrum deviation {worst:.1e}; worked point ‖ρ^Γ‖₁ = {exact_norm:.9}, log2 = {logneg:.6} < {EC_WORKED:.6}"
    ));
    Ok(c)
}

fn c4_capacities(seed: u64) -> Result<Checks> {
    let mut c = Checks::new();
    let s = OptSettings::new(4, seed);
    let l3 = 3f64.log2();
    let cases: Vec<(&str, KrausChannel, f64, f64)> = vec![
        (
            "qubit depolarizing λ=1/3",
            depolarizing_channel(&DepolarizingParams::new(2, 1.0 / 3.0)?),
            1.0 - EC_WORKED,
            1e-4,
        ),
        ("VDC", vdc_channel(1.0)?, l3 - 1.5, 1e-4),
        ("antisymmetric", antisym_channel(), l3 - 1.0, 1e-4),
        ("identity 2", KrausChannel::identity(2), 1.0, 1e-6),
        ("identity 3", KrausChannel::identity(3), l3, 1e-6),
        ("identity 4", KrausChannel::identity(4), 2.0, 1e-6),
    ];
    for (name, t, want, tol) in cases {
        let got = holevo_capacity(&t, None, &s)?.value.0;
        c.close(name, got, want, tol);
        c.note(format!("{name} {got:.6}"));
    }
    Ok(c)
}

/// The channels shipped with the examples module.
pub fn bundled_channels() -> Result<Vec<(String, KrausChannel)>> {
    Ok(vec![
        (
            "pauli worked point".into(),
            pauli_channel(&PauliParams::worked_point()),
        ),
        (
            "pauli (0.7,0.1,0.05,0.15)".into(),
            pauli_channel(&PauliParams::new(0.7, 0.1, 0.05, 0.15)?),
        ),
        (
            "depolarizing d=3 λ=0.5".into(),
            depolarizing_channel(&DepolarizingParams::new(3, 0.5)?),
        ),
        ("VDC".into(), vdc_channel(1.0)?),
        ("VDC weight 0.5".into(), vdc_channel(0.5)?),
        ("antisymmetric".into(), antisym_channel()),
        ("identity 2".into(), KrausChannel::identity(2)),
        ("identity 3".into(), KrausChannel::identity(3)),
    ])
}

fn c5_dilation(seed: u64) -> Result<Checks> {
    let mut c = Checks::new();
    let s = OptSettings::new(4, seed);
    let mut worst = 0.0f64;
    for (name, t) in bundled_channels()? {
        let d = capacity_via_dilation(&t, &s)?;
        let gap = (d.value.0 - d.capacity.value.0).abs();
        worst = worst.max(gap);
        c.close(&name, d.value.0, d.capacity.value.0, 2e-3);
    }
    c.note(format!("worst |dilation − direct| = {worst:.1e}"));
    Ok(c)
}

fn c6_depolarizing() -> Result<Checks> {
    let mut c = Checks::new();
    let mut worst = 0.0f64;
    for d in 2..=5 {
        for lambda in [0.2, 0.5, 0.9] {
            let p = DepolarizingParams::new(d, lambda)?;
            let t = depolarizing_channel(&p);
            let ket = PureState::basis(0, Factorization::single(d))?;
            let out = t.apply(&DensityMatrix::from_pure(&ket))?;
            let direct = von_neumann_entropy(&out)?.0;
            let formula = depolarizing_smin(&p).0;
            worst = worst.max((direct - formula).abs());
            c.close(&format!("d={d} λ={lambda}"), direct, formula, 1e-10);
        }
    }
    c.note(format!("12 cases, worst deviation {worst:.1e}"));
    Ok(c)
}

fn c7_subspaces(seed: u64) -> Result<Checks> {
    let mut c = Checks::new();
    let f = Factorization::single(3);
    let vdc = vdc_subspace().channel(1)?;
    let anti = antisym_channel();
    for i in 0..10 {
        let rho = random_density(&f, 1 + i % 3, derive_seed(seed, i as u64))?;
        let a = vdc
            .apply_op(rho.op())?
            .max_abs_diff(&transpose_depolarizing(0.75, rho.op()));
        let b = anti
            .apply_op(rho.op())?
            .max_abs_diff(&antisym_formula(rho.op()));
        c.check(a <= 1e-12, format!("VDC channel entrywise error {a:e}"));
        c.check(
            b <= 1e-12,
            format!("antisymmetric channel entrywise error {b:e}"),
        );
    }
    let s = OptSettings::new(4, seed);
    let mv = min_subspace_entanglement(&vdc_subspace(), &s)?.value.0;
    let ma = min_subspace_entanglement(&antisym_subspace(), &s)?.value.0;
    c.close("min entanglement in VDC subspace", mv, 1.5, 1e-4);
    c.close("min entanglement in antisymmetric subspace", ma, 1.0, 1e-6);

    let k = antisym_subspace();
    let mut rng = rng_from_seed(derive_seed(seed, 99));
    let values = (0..100)
        .map(|_| pure_entanglement(&k.embed(&haar_vector(3, &mut rng))?, &[0]).map(|b| b.0))
        .collect::<Result<Vec<_>>>()?;
    let mean = values.iter().sum::<f64>() / 100.0;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 100.0).sqrt();
    c.check(
        sd < 1e-8,
        format!("antisymmetric entanglement varies: st. dev. {sd:e}"),
    );
    c.note(format!(
        "min E: VDC {mv:.6}, antisymmetric {ma:.6}; antisymmetric st. dev. {sd:.1e}"
    ));
    Ok(c)
}

fn c8_gap(seed: u64) -> Result<Checks> {
    let mut c = Checks::new();
    let w = gap_condition(&PauliParams::worked_point())?;
    c.check(w.gap, "no gap at the worked point");
    let mut rng = rng_from_seed(seed);
    let mut min_f = f64::INFINITY;
    for _ in 0..20 {
        let (a, b): (f64, f64) = (rng.random_range(0.0..0.5), rng.random_range(0.0..0.5));
        if (a - 0.25).abs() < 1e-6 || (b - 0.25).abs() < 1e-6 {
            continue;
        }
        let p = PauliParams::new(a, b, 0.5 - b, 0.5 - a)?;
        let r = gap_condition(&p)?;
        min_f = min_f.min(r.f_threshold);
        c.check(r.gap, format!("no gap at {:?}", p.weights()));
    }
    let render = || -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        write_gap_csv(&gap_region_scan(0.05)?, &mut buf)?;
        Ok(buf)
    };
    let (first, second) = (render()?, render()?);
    c.check(first == second, "gap CSV differs between runs");
    c.note(format!(
        "worked point f = {:.4e}; 20 mixtures, min f = {min_f:.3e}; CSV {} bytes, identical",
        w.f_threshold,
        first.len()
    ));
    Ok(c)
}

fn c9_constrained(seed: u64) -> Result<Checks> {
    let mut c = Checks::new();
    let t = depolarizing_channel(&DepolarizingParams::new(2, 1.0 / 3.0)?);
    let a = CMatrix::diag_real(&[0.0, 1.0]);
    let s = OptSettings::new(4, seed);
    let alphas: Vec<f64> = (0..=10).map(|k| k as f64 * 0.05).collect();
    let values = alphas
        .iter()
        .map(|&alpha| {
            constrained_capacity(&t, &CostConstraint::new(a.clone(), alpha)?, None, &s)
                .map(|r| r.value.0)
        })
        .collect::<Result<Vec<_>>>()?;
    for (k, w) in values.windows(2).enumerate() {
        c.check(
            w[1] >= w[0] - 1e-3,
            format!("decrease at α = {}: {} → {}", alphas[k + 1], w[0], w[1]),
        );
    }
    for (k, w) in values.windows(3).enumerate() {
        let mid = (w[0] + w[2]) / 2.0;
        c.check(
            w[1] >= mid - 1e-3,
            format!("not concave at α = {}: {} < {mid}", alphas[k + 1], w[1]),
        );
    }
    let free = holevo_capacity(&t, None, &s)?.value.0;
    c.close("C(0.5) vs unconstrained", values[10], free, 1e-3);
    let lam: f64 = 1.0 / 3.0;
    let closed = |alpha: f64| {
        binary_entropy((1.0 + lam * (1.0 - 2.0 * alpha)) / 2.0) - binary_entropy((1.0 + lam) / 2.0)
    };
    let worst = alphas
        .iter()
        .zip(&values)
        .map(|(&al, v)| (v - closed(al)).abs())
        .fold(0.0, f64::max);
    c.note(format!(
        "C(0) = {:.6}, C(0.5) = {:.6}, unconstrained {free:.6}; worst deviation from h((1+λ(1−2α))/2) − h((1+λ)/2): {worst:.1e}",
        values[0], values[10]
    ));
    Ok(c)
}

fn c10_tensor_power(seed: u64) -> Result<Checks> {
    let mut c = Checks::new();
    let rho = pauli_states(&PauliParams::worked_point()).rho_t;
    let pair = rho.tensor(&rho)?;
    let r = eof_convex_roof(&pair, &[0, 2], None, &OptSettings::new(4, seed))?;
    c.close("E_f(ρ_T ⊗ ρ_T)", r.value.0, 2.0 * EC_WORKED, 3e-3);
    c.note(format!(
        "{:.6} vs 2·H(1/3) = {:.6}",
        r.value.0,
        2.0 * EC_WORKED
    ));
    Ok(c)
}

/// Sample counts for the superadditivity search at each level.
pub fn superadd_samples(level: Level) -> usize {
    match level {
        Level::Quick => 1000,
        Level::Full => 10_000,
    }
}

fn c11_superadd(seed: u64, level: Level) -> Result<Checks> {
    let mut c = Checks::new();
    let n = superadd_samples(level);
    let found = superadditivity_search(n, seed, &OptSettings::new(2, 0))?;
    for cand in &found {
        c.check(
            false,
            format!(
                "sample {} (seed {}): bound {} < marginal sum {}",
                cand.sample.index, cand.sample.seed, cand.sample.upper, cand.sample.marginal_sum
            ),
        );
    }
    c.note(format!("{n} samples, no candidates"));
    Ok(c)
}
