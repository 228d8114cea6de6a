//! The `d`-dimensional depolarizing channel via the Weyl (shift/clock) basis.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{binary_entropy, Bits};
use crate::quantum::KrausChannel;
use crate::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepolarizingParams {
    pub d: usize,
    pub lambda: f64,
}

impl DepolarizingParams {
    pub fn new(d: usize, lambda: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("dimension {d} below 2")));
        }
        let lo = -1.0 / ((d * d - 1) as f64);
        if !lambda.is_finite() || lambda < lo - 1e-12 || lambda > 1.0 + 1e-12 {
            return Err(Error::Domain(format!("lambda {lambda} outside [{lo}, 1]")));
        }
        Ok(Self {
            d,
            lambda: lambda.clamp(lo, 1.0),
        })
    }

    /// Weight of the identity Kraus operator, `λ + (1 − λ)/d²`.
    pub fn p0(&self) -> f64 {
        let d2 = (self.d * self.d) as f64;
        (self.lambda + (1.0 - self.lambda) / d2).clamp(0.0, 1.0)
    }
}

/// `X^a Z^b` with `X|k> = |k+1>` and `Z|k> = ω^k |k>`.
pub fn weyl_operator(d: usize, a: usize, b: usize) -> CMatrix {
    let w = 2.0 * std::f64::consts::PI / d as f64;
    let mut m = CMatrix::zeros(d, d);
    for k in 0..d {
        m[((k + a) % d, k)] = Complex::from_polar(1.0, w * ((b * k) % d) as f64);
    }
    m
}

pub fn depolarizing_channel(p: &DepolarizingParams) -> KrausChannel {
    let d = p.d;
    let p0 = p.p0();
    let rest = ((1.0 - p0) / ((d * d - 1) as f64)).sqrt();
    let mut ops = vec![CMatrix::identity(d).scale(p0.sqrt())];
    for a in 0..d {
        for b in 0..d {
            if (a, b) != (0, 0) {
                ops.push(weyl_operator(d, a, b).scale(rest));
            }
        }
    }
    KrausChannel::new(ops).expect("Weyl basis is trace preserving")
}

/// Closed form of the output entropy on any pure input.
pub fn depolarizing_smin(p: &DepolarizingParams) -> Bits {
    let d = p.d as f64;
    let q = ((1.0 - 1.0 / d) * (1.0 - p.lambda)).clamp(0.0, 1.0);
    Bits(binary_entropy(q) + q * (d - 1.0).log2())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weyl_operators_are_orthogonal() {
        let d = 3;
        let ops: Vec<CMatrix> = (0..d)
            .flat_map(|a| (0..d).map(move |b| weyl_operator(d, a, b)))
            .collect();
        for (i, x) in ops.iter().enumerate() {
            for (j, y) in ops.iter().enumerate() {
                let t = x.adjoint_mul(y).unwrap().trace();
                let expect = if i == j { d as f64 } else { 0.0 };
                assert!((t - Complex::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn domain() {
        assert!(DepolarizingParams::new(1, 0.5).is_err());
        assert!(DepolarizingParams::new(2, 1.5).is_err());
        assert!(DepolarizingParams::new(2, -0.5).is_err());
        assert!(DepolarizingParams::new(2, -1.0 / 3.0).is_ok());
    }

    #[test]
    fn smin_endpoints() {
        assert_eq!(
            depolarizing_smin(&DepolarizingParams::new(3, 1.0).unwrap()),
            Bits(0.0)
        );
        let s = depolarizing_smin(&DepolarizingParams::new(4, 0.0).unwrap()).0;
        assert!((s - 2.0).abs() < 1e-12);
        let q = depolarizing_smin(&DepolarizingParams::new(2, 1.0 / 3.0).unwrap()).0;
        assert!((q - 0.918296).abs() < 1e-6);
    }
}
