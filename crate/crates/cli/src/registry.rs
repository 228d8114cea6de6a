//! Named example channels and states, e.g. `pauli:1/2,1/6,1/6,1/6`.

use qcap::examples::*;
use qcap::linalg::Factorization;
use qcap::quantum::{DensityMatrix, KrausChannel, PureState};
use qcap::C64;

use crate::CliError;

/// Parses `a`, `a.b`, or `n/d`.
pub fn parse_number(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let bad = || CliError::input(format!("cannot parse number `{s}`"));
    let x = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            n / d
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if !x.is_finite() {
        return Err(bad());
    }
    Ok(x)
}

fn split(name: &str) -> (&str, Vec<&str>) {
    match name.split_once(':') {
        Some((head, args)) => (head, args.split(',').collect()),
        None => (name, Vec::new()),
    }
}

fn numbers(args: &[&str], want: usize, name: &str) -> Result<Vec<f64>, CliError> {
    if args.len() != want {
        return Err(CliError::input(format!(
            "`{name}` takes {want} parameter(s)"
        )));
    }
    args.iter().map(|a| parse_number(a)).collect()
}

fn dimension(x: f64) -> Result<usize, CliError> {
    if x.fract() != 0.0 || !(1.0..=64.0).contains(&x) {
        return Err(CliError::input(format!(
            "dimension {x} must be an integer in 1..=64"
        )));
    }
    Ok(x as usize)
}

fn pauli(args: &[&str], name: &str) -> Result<PauliParams, CliError> {
    let p = numbers(args, 4, name)?;
    Ok(PauliParams::new(p[0], p[1], p[2], p[3])?)
}

pub const CHANNEL_NAMES: &str =
    "identity:d, pauli:p0,px,py,pz, depol:d,lambda, vdc, vdc:weight, antisym";
pub const STATE_NAMES: &str = "rho_T:p0,px,py,pz, bell, antisym-mixed";

pub fn channel(name: &str) -> Result<KrausChannel, CliError> {
    let (head, args) = split(name);
    match head {
        "identity" => Ok(KrausChannel::identity(dimension(
            numbers(&args, 1, head)?[0],
        )?)),
        "pauli" => Ok(pauli_channel(&pauli(&args, head)?)),
        "depol" => {
            let p = numbers(&args, 2, head)?;
            Ok(depolarizing_channel(&DepolarizingParams::new(
                dimension(p[0])?,
                p[1],
            )?))
        }
        "vdc" if args.is_empty() => Ok(vdc_channel(1.0)?),
        "vdc" => Ok(vdc_channel(numbers(&args, 1, head)?[0])?),
        "antisym" if args.is_empty() => Ok(antisym_channel()),
        _ => Err(CliError::input(format!(
            "unknown channel `{name}`; known: {CHANNEL_NAMES}"
        ))),
    }
}

pub fn state(name: &str) -> Result<DensityMatrix, CliError> {
    let (head, args) = split(name);
    match head {
        "rho_T" => Ok(pauli_states(&pauli(&args, head)?).rho_t),
        "bell" if args.is_empty() => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let z = C64::new(0.0, 0.0);
            let phi = PureState::new(
                vec![C64::new(h, 0.0), z, z, C64::new(h, 0.0)],
                Factorization::bipartite(2, 2),
            )?;
            Ok(DensityMatrix::from_pure(&phi))
        }
        "antisym-mixed" if args.is_empty() => Ok(antisym_subspace().maximally_mixed()?),
        _ => Err(CliError::input(format!(
            "unknown state `{name}`; known: {STATE_NAMES}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_fractions() {
        assert_eq!(parse_number("1/4").unwrap(), 0.25);
        assert_eq!(parse_number(" 0.5 ").unwrap(), 0.5);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("x").is_err());
    }

    #[test]
    fn registry_lookups() {
        assert_eq!(channel("identity:3").unwrap().in_dim(), 3);
        assert_eq!(
            channel("pauli:1/2,1/6,1/6,1/6").unwrap().kraus_ops().len(),
            4
        );
        assert_eq!(channel("depol:3,0.5").unwrap().out_dim(), 3);
        assert_eq!(channel("vdc:0.5").unwrap().in_dim(), 3);
        assert!(channel("pauli:1,1,1,1").is_err());
        assert!(channel("identity:2.5").is_err());
        assert!(channel("nope").is_err());
        assert_eq!(state("bell").unwrap().fact().dims(), &[2, 2]);
        assert_eq!(state("antisym-mixed").unwrap().fact().dims(), &[3, 3]);
        assert_eq!(
            state("rho_T:1/2,1/6,1/6,1/6").unwrap().fact().dims(),
            &[2, 4]
        );
    }
}
