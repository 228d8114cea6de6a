#![allow(dead_code)]

use qcap::linalg::Factorization;
use qcap::quantum::{haar_isometry, rng_from_seed, KrausChannel};
use qcap::{CMatrix, C64};
use rand::Rng;

/// Kraus operators cut from a Haar isometry `C^d → C^{k·o}`; `k` is raised
/// until the isometry exists.
pub fn random_channel(d: usize, o: usize, k: usize, seed: u64) -> KrausChannel {
    let k = k.max(d.div_ceil(o));
    let mut rng = rng_from_seed(seed);
    let v = haar_isometry(k * o, d, &mut rng);
    let ops = (0..k)
        .map(|j| CMatrix::from_fn(o, d, |r, c| v[(j * o + r, c)]))
        .collect();
    KrausChannel::new(ops).unwrap()
}

/// Random Hermitian matrix with Gaussian-ish entries.
pub fn random_hermitian(n: usize, seed: u64) -> CMatrix {
    let mut rng = rng_from_seed(seed);
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..n {
            let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

pub fn bi(a: usize, b: usize) -> Factorization {
    Factorization::bipartite(a, b)
}
