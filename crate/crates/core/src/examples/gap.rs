//! Log-negativity versus entanglement cost for the optimal Pauli-channel
//! states, through the quartic `f` whose roots (halved) are the eigenvalues
//! of the partial transpose of `ρ_T`.

use std::io::Write;

use num_traits::Num;
use rayon::prelude::*;
use serde::Serialize;

use super::pauli::{pauli_ec_unchecked, pauli_states, PauliParams};
use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, poly_eval, real_poly_roots, trace_norm};
use crate::measures::Bits;
use crate::C64;

/// Imaginary parts below this count as real roots.
const REAL_ROOT_TOL: f64 = 1e-8;

/// `[1, −1, 0, 4 e3, −16 p0 px py pz]`, highest degree first, where `e3` is
/// the third elementary symmetric polynomial of the weights. Exact for
/// rational scalars.
pub fn gap_polynomial_generic<T: Num + Copy>(p0: T, px: T, py: T, pz: T) -> [T; 5] {
    let four = T::one() + T::one() + T::one() + T::one();
    let e3 = p0 * px * py + p0 * px * pz + p0 * py * pz + px * py * pz;
    [
        T::one(),
        T::zero() - T::one(),
        T::zero(),
        four * e3,
        T::zero() - four * four * p0 * px * py * pz,
    ]
}

pub fn gap_polynomial(p: &PauliParams) -> [f64; 5] {
    gap_polynomial_generic(p.p0, p.px, p.py, p.pz)
}

/// Eigenvalues of `ρ_T^Γ` predicted by the quartic: the roots of `f(2z)`,
/// each listed twice, ascending.
pub fn predicted_spectrum(p: &PauliParams) -> Result<Vec<f64>> {
    let roots = real_poly_roots(&gap_polynomial(p))?;
    if let Some(r) = roots.iter().find(|r| r.im.abs() > REAL_ROOT_TOL) {
        return Err(Error::Numerical {
            msg: format!("quartic has a complex root {r}"),
            iterations: 0,
            residual: r.im.abs(),
        });
    }
    let mut z: Vec<f64> = roots.iter().flat_map(|r| [r.re / 2.0; 2]).collect();
    z.sort_by(f64::total_cmp);
    Ok(z)
}

/// `1 − 4 z0` for `z0` the negative root of `f(2z)`, or 1 when there is none.
pub fn gap_trace_norm(p: &PauliParams) -> Result<f64> {
    let roots = real_poly_roots(&gap_polynomial(p))?;
    let negative: Vec<f64> = roots
        .iter()
        .filter(|r| r.im.abs() <= REAL_ROOT_TOL && r.re < -1e-14)
        .map(|r| r.re)
        .collect();
    match negative.as_slice() {
        [] => Ok(1.0),
        [r] => Ok(1.0 - 2.0 * r),
        many => Err(Error::Numerical {
            msg: format!("expected one negative root, found {many:?}"),
            iterations: 0,
            residual: 0.0,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapRecord {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
    pub p0: f64,
    pub admissible: bool,
    /// `H(p0 + pz, 1 − p0 − pz)`; only the entanglement cost when admissible.
    pub ec: Bits,
    pub logneg: Bits,
    /// `f(−(2^ec − 1)/2)`.
    pub f_threshold: f64,
    /// `f_threshold > 0`, equivalently `logneg < ec`.
    pub gap: bool,
}

pub fn gap_condition(p: &PauliParams) -> Result<GapRecord> {
    let ec = pauli_ec_unchecked(p);
    let norm = gap_trace_norm(p)?;
    let x = -(ec.0.exp2() - 1.0) / 2.0;
    let f_threshold = poly_eval(&gap_polynomial(p), C64::new(x, 0.0)).re;
    Ok(GapRecord {
        px: p.px,
        py: p.py,
        pz: p.pz,
        p0: p.p0,
        admissible: p.admissible(),
        ec,
        logneg: Bits(norm.log2().max(0.0)),
        f_threshold,
        gap: f_threshold > 0.0,
    })
}

/// Every grid point `(px, py, pz)` with `p0 = 1 − px − py − pz ≥ 0`, in
/// lexicographic order. Inadmissible points are kept with `admissible = false`.
pub fn gap_region_scan(grid_step: f64) -> Result<Vec<GapRecord>> {
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return Err(Error::Parameter(format!(
            "grid step {grid_step} outside (0, 0.1]"
        )));
    }
    let n = (1.0 / grid_step + 1e-9).floor() as usize;
    let mut points = Vec::new();
    for i in 0..=n {
        for j in 0..=n - i {
            for k in 0..=n - i - j {
                points.push((i, j, k));
            }
        }
    }
    points
        .par_iter()
        .map(|&(i, j, k)| {
            let (px, py, pz) = (
                i as f64 * grid_step,
                j as f64 * grid_step,
                k as f64 * grid_step,
            );
            let p0 = (1.0 - px - py - pz).max(0.0);
            let p = PauliParams::new(p0, px, py, pz)?;
            gap_condition(&p)
        })
        .collect()
}

pub const CSV_HEADER: [&str; 9] = [
    "px",
    "py",
    "pz",
    "p0",
    "admissible",
    "ec_bits",
    "logneg_bits",
    "f_threshold",
    "gap",
];

/// Nine significant digits in fixed notation, scientific for tiny values.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-6..=9).contains(&mag) {
        return format!("{x:.8e}");
    }
    let decimals = (8 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn write_gap_csv<W: Write>(records: &[GapRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Validation(format!("csv output failed: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in records {
        w.write_record([
            format_sig9(r.px),
            format_sig9(r.py),
            format_sig9(r.pz),
            format_sig9(r.p0),
            r.admissible.to_string(),
            format_sig9(r.ec.0),
            format_sig9(r.logneg.0),
            format_sig9(r.f_threshold),
            r.gap.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Validation(format!("csv output failed: {e}")))?;
    Ok(())
}

/// Direct eigendecomposition of `ρ_T^Γ` compared with the quartic.
#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    pub params: PauliParams,
    pub direct_spectrum: Vec<f64>,
    pub predicted_spectrum: Vec<f64>,
    pub max_spectrum_deviation: f64,
    pub trace_norm_direct: f64,
    pub trace_norm_polynomial: f64,
    pub passed: bool,
    pub diagnostic: String,
}

pub const SPECTRUM_TOL: f64 = 1e-8;
pub const NORM_TOL: f64 = 1e-9;

pub fn gap_consistency_check(p: &PauliParams) -> Result<ConsistencyReport> {
    let rho = pauli_states(p).rho_t;
    let pt = rho.partial_transpose(1)?;
    let direct_spectrum = eigvalsh(&pt)?;
    let trace_norm_direct = trace_norm(&pt)?;
    let (predicted, trace_norm_polynomial) = match (predicted_spectrum(p), gap_trace_norm(p)) {
        (Ok(s), Ok(n)) => (s, n),
        (Err(e), _) | (_, Err(e)) => {
            return Ok(ConsistencyReport {
                params: *p,
                direct_spectrum,
                predicted_spectrum: Vec::new(),
                max_spectrum_deviation: f64::INFINITY,
                trace_norm_direct,
                trace_norm_polynomial: f64::NAN,
                passed: false,
                diagnostic: format!("quartic roots unavailable: {e}"),
            })
        }
    };
    let max_spectrum_deviation = direct_spectrum
        .iter()
        .zip(&predicted)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let norm_gap = (trace_norm_direct - trace_norm_polynomial).abs();
    let mut problems = Vec::new();
    if max_spectrum_deviation > SPECTRUM_TOL {
        problems.push(format!(
            "spectrum deviates by {max_spectrum_deviation:e}: direct {direct_spectrum:?}, quartic {predicted:?}"
        ));
    }
    if norm_gap > NORM_TOL {
        problems.push(format!(
            "trace norm {trace_norm_direct} vs 1 - 4 z0 = {trace_norm_polynomial}"
        ));
    }
    Ok(ConsistencyReport {
        params: *p,
        direct_spectrum,
        predicted_spectrum: predicted,
        max_spectrum_deviation,
        trace_norm_direct,
        trace_norm_polynomial,
        passed: problems.is_empty(),
        diagnostic: if problems.is_empty() {
            "ok".into()
        } else {
            problems.join("; ")
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn exact_coefficients_at_worked_point() {
        let r = |n: i64, d: i64| Ratio::new(n, d);
        let f = gap_polynomial_generic(r(1, 2), r(1, 6), r(1, 6), r(1, 6));
        assert_eq!(f, [r(1, 1), r(-1, 1), r(0, 1), r(5, 27), r(-1, 27)]);
    }

    #[test]
    fn worked_point_norm_and_gap() {
        let p = PauliParams::worked_point();
        let n = gap_trace_norm(&p).unwrap();
        assert!((n - (2.0 + 13f64.sqrt()) / 3.0).abs() < 1e-12);
        let g = gap_condition(&p).unwrap();
        assert!(g.gap && g.admissible);
        assert!((g.f_threshold - 0.0078).abs() < 5e-4);
    }

    #[test]
    fn identity_weights_have_no_gap() {
        let p = PauliParams::new(1.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(gap_trace_norm(&p).unwrap(), 1.0);
        let g = gap_condition(&p).unwrap();
        assert!(!g.gap);
        assert_eq!(g.logneg, Bits(0.0));
        assert_eq!(gap_polynomial(&p), [1.0, -1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn consistency_at_worked_point() {
        let r = gap_consistency_check(&PauliParams::worked_point()).unwrap();
        assert!(r.passed, "{}", r.diagnostic);
        let s = 13f64.sqrt();
        let expect = [(1.0 - s) / 12.0, 1.0 / 6.0, 1.0 / 6.0, (1.0 + s) / 12.0];
        let mut want: Vec<f64> = expect.iter().flat_map(|x| [*x; 2]).collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in r.direct_spectrum.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(format_sig9(0.15), "0.150000000");
        assert_eq!(format_sig9(1.0), "1.00000000");
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(-0.0078125), "-0.00781250000");
        assert_eq!(format_sig9(1.5e-9), "1.50000000e-9");
    }

    #[test]
    fn scan_rejects_bad_step() {
        assert!(gap_region_scan(0.0).is_err());
        assert!(gap_region_scan(0.2).is_err());
    }
}
