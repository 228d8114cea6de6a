mod common;

use common::{bi, random_channel};
use proptest::prelude::*;
use qcap::examples::{pauli_states, rho_t_mixture, PauliParams};
use qcap::linalg::{kron, Factorization};
use qcap::measures::{
    holevo_information, partial_transpose_norm, pure_entanglement, von_neumann_entropy,
};
use qcap::quantum::{
    haar_random_pure, haar_unitary, random_density, rng_from_seed, DensityMatrix, PureEnsemble,
    PureState,
};
use qcap::verify::random_admissible_pauli;

fn entropy(rho: &DensityMatrix) -> f64 {
    von_neumann_entropy(rho).unwrap().0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn subadditivity(seed in any::<u64>(), da in 2usize..4, db in 2usize..4, rank in 1usize..7) {
        let rho = random_density(&bi(da, db), rank.min(da * db), seed).unwrap();
        let a = rho.partial_trace(&[1]).unwrap();
        let b = rho.partial_trace(&[0]).unwrap();
        prop_assert!(entropy(&rho) <= entropy(&a) + entropy(&b) + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn concavity(seed in any::<u64>(), p in 0.0f64..=1.0, d in 2usize..5) {
        let f = Factorization::single(d);
        let rho = random_density(&f, 1 + seed as usize % d, seed).unwrap();
        let sigma = random_density(&f, d, seed ^ 0xabc).unwrap();
        let mix = rho.mix(p, &sigma).unwrap();
        prop_assert!(entropy(&mix) >= p * entropy(&rho) + (1.0 - p) * entropy(&sigma) - 1e-9);
    }

    #[test]
    fn holevo_bounded_by_output_entropy(seed in any::<u64>(), m in 1usize..6) {
        let t = random_channel(3, 2, 3, seed);
        let f = Factorization::single(3);
        let members = (0..m)
            .map(|i| (1.0 / m as f64, haar_random_pure(&f, seed.wrapping_add(i as u64))))
            .collect();
        let e = PureEnsemble::new(members).unwrap();
        let chi = holevo_information(&e, &t).unwrap().0;
        let avg = t.apply(&e.average()).unwrap();
        prop_assert!(chi >= 0.0);
        prop_assert!(chi <= entropy(&avg) + 1e-10);
    }

    #[test]
    fn pure_entanglement_invariances(seed in any::<u64>(), da in 2usize..4, db in 2usize..5) {
        let psi = haar_random_pure(&bi(da, db), seed);
        let e = pure_entanglement(&psi, &[0]).unwrap().0;
        let swapped = psi.permute(&[1, 0]).unwrap();
        prop_assert!((pure_entanglement(&swapped, &[1]).unwrap().0 - e).abs() < 1e-10);
        prop_assert!((pure_entanglement(&swapped, &[0]).unwrap().0 - e).abs() < 1e-10);
        let mut rng = rng_from_seed(seed ^ 7);
        let u = kron(&haar_unitary(da, &mut rng), &haar_unitary(db, &mut rng)).unwrap();
        let moved = PureState::new(u.mul_vec(psi.amplitudes()).unwrap(), bi(da, db)).unwrap();
        prop_assert!((pure_entanglement(&moved, &[0]).unwrap().0 - e).abs() < 1e-10);
    }

    #[test]
    fn negativity_strictly_convex_on_pauli_family(seed in any::<u64>(), s in 0.01f64..0.99) {
        let p = random_admissible_pauli(&mut rng_from_seed(seed));
        let st = pauli_states(&p);
        let norm = |r: &DensityMatrix| partial_transpose_norm(r, &[0]).unwrap();
        let mix = rho_t_mixture(&st.psi_t, &st.psi_t_perp, s);
        let a = norm(&DensityMatrix::from_pure(&st.psi_t));
        let b = norm(&DensityMatrix::from_pure(&st.psi_t_perp));
        prop_assert!(norm(&mix) < s * a + (1.0 - s) * b - 1e-12);
    }
}

#[test]
fn worked_point_is_in_the_family() {
    let st = pauli_states(&PauliParams::worked_point());
    assert!(partial_transpose_norm(&st.rho_t, &[0]).unwrap() > 1.0);
}
