//! Seeded sampling of Haar-random states and isometries.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::state::{DensityMatrix, PureState};
use crate::error::{Error, Result};
use crate::linalg::{orthonormalize_columns, reduce_bipartite_vector, vector_norm, Factorization};
use crate::{CMatrix, C64};

/// Deterministic generator for a seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent child seed (splitmix64 finaliser of `seed` and `index`).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard complex Gaussian vector.
pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect()
}

/// Haar-distributed unit vector.
pub fn haar_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let mut v = gaussian_vector(n, rng);
        let nrm = vector_norm(&v);
        if nrm > 1e-300 {
            for z in &mut v {
                *z /= nrm;
            }
            return v;
        }
    }
}

/// Haar-distributed `rows x cols` isometry (`cols <= rows`).
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_vec(rows, cols, gaussian_vector(rows * cols, rng)).expect("sized buffer");
    orthonormalize_columns(&g)
}

pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    haar_isometry(d, d, rng)
}

pub fn haar_random_pure(f: &Factorization, seed: u64) -> PureState {
    let mut rng = rng_from_seed(seed);
    PureState::normalized(haar_vector(f.total(), &mut rng), f.clone()).expect("unit vector")
}

/// Induced-measure random state: partial trace of a Haar pure state on
/// system ⊗ ancilla with ancilla dimension `rank`.
pub fn random_density(f: &Factorization, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let mut rng = rng_from_seed(seed);
    random_density_with(f, rank, &mut rng)
}

pub fn random_density_with<R: Rng + ?Sized>(
    f: &Factorization,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let d = f.total();
    if rank == 0 || rank > d {
        return Err(Error::Parameter(format!("rank {rank} not in 1..={d}")));
    }
    let v = haar_vector(d * rank, rng);
    let op = reduce_bipartite_vector(&v, d, rank);
    Ok(DensityMatrix::new_unchecked(op, f.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_is_pure() {
        let rho = random_density(&Factorization::bipartite(2, 3), 1, 7).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic() {
        let f = Factorization::single(4);
        assert_eq!(haar_random_pure(&f, 11), haar_random_pure(&f, 11));
        assert_eq!(
            random_density(&f, 2, 5).unwrap(),
            random_density(&f, 2, 5).unwrap()
        );
        assert_ne!(haar_random_pure(&f, 11), haar_random_pure(&f, 12));
    }

    #[test]
    fn rank_out_of_range() {
        let f = Factorization::single(2);
        assert!(matches!(random_density(&f, 3, 0), Err(Error::Parameter(_))));
        assert!(random_density(&f, 0, 0).is_err());
    }

    #[test]
    fn mean_qubit_density_is_maximally_mixed() {
        let f = Factorization::single(2);
        let mut rng = rng_from_seed(2024);
        let n = 10_000;
        let mut acc = CMatrix::zeros(2, 2);
        for _ in 0..n {
            let rho = random_density_with(&f, 2, &mut rng).unwrap();
            acc.add_scaled(1.0 / n as f64, rho.op());
        }
        assert!(acc.max_abs_diff(&CMatrix::identity(2).scale(0.5)) < 0.02);
    }

    #[test]
    fn isometry_is_orthonormal() {
        let mut rng = rng_from_seed(3);
        let v = haar_isometry(9, 4, &mut rng);
        let g = v.adjoint_mul(&v).unwrap();
        assert!(g.max_abs_diff(&CMatrix::identity(4)) < 1e-13);
    }
}
