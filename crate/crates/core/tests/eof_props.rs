mod common;

use common::bi;
use proptest::prelude::*;
use qcap::eof::{eof_convex_roof, eof_wootters};
use qcap::examples::{pauli_ec_closed_form, pauli_states, superadd_sides, PauliParams};
use qcap::linalg::Factorization;
use qcap::measures::min_output_entropy_search;
use qcap::optim::OptSettings;
use qcap::quantum::{random_density, rng_from_seed};
use qcap::verify::random_admissible_pauli;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn roof_never_undercuts_wootters(seed in any::<u64>(), rank in 1usize..5) {
        let rho = random_density(&bi(2, 2), rank, seed).unwrap();
        let roof = eof_convex_roof(&rho, &[0], None, &OptSettings::new(2, seed)).unwrap().value.0;
        prop_assert!(roof >= eof_wootters(&rho).unwrap().0 - 1e-6);
    }

    #[test]
    fn discarding_a_product_side(seed in any::<u64>(), rank in 1usize..3) {
        // ρ_12 ⊗ (a ⊗ b): the primed marginal is separable.
        let rho = random_density(&bi(2, 2), rank, seed).unwrap();
        let q = Factorization::single(2);
        let a = random_density(&q, 1 + seed as usize % 2, seed ^ 3).unwrap();
        let b = random_density(&q, 1, seed ^ 5).unwrap();
        let joint = rho.tensor(&a.tensor(&b).unwrap()).unwrap();
        let (upper, marginal_sum) = superadd_sides(&joint, &OptSettings::new(2, seed)).unwrap();
        prop_assert!(upper >= marginal_sum - 1e-6, "{upper} < {marginal_sum}");
    }

    #[test]
    fn roof_convexity(seed in any::<u64>(), p in 0.05f64..0.95) {
        let f = bi(2, 3);
        let s = OptSettings::new(4, seed);
        let rho = random_density(&f, 2, seed).unwrap();
        let sigma = random_density(&f, 2, seed ^ 9).unwrap();
        let mix = rho.mix(p, &sigma).unwrap();
        let e = |r| eof_convex_roof(r, &[0], None, &s).unwrap().value.0;
        prop_assert!(e(&mix) <= p * e(&rho) + (1.0 - p) * e(&sigma) + 1e-4);
    }

    #[test]
    fn restarts_never_hurt(seed in any::<u64>()) {
        let t = common::random_channel(3, 3, 2, seed);
        let few = min_output_entropy_search(&t, &OptSettings::new(2, seed)).unwrap().value;
        let more = min_output_entropy_search(&t, &OptSettings::new(5, seed)).unwrap().value;
        prop_assert!(more <= few);
        let rho = random_density(&bi(2, 2), 3, seed).unwrap();
        let r2 = eof_convex_roof(&rho, &[0], None, &OptSettings::new(2, seed)).unwrap().value.0;
        let r4 = eof_convex_roof(&rho, &[0], None, &OptSettings::new(4, seed)).unwrap().value.0;
        prop_assert!(r4 <= r2);
    }
}

#[test]
fn pauli_tensor_powers_stay_below_the_cost() {
    let mut rng = rng_from_seed(17);
    for i in 0..3 {
        let p = if i == 0 {
            PauliParams::worked_point()
        } else {
            random_admissible_pauli(&mut rng)
        };
        let ec = pauli_ec_closed_form(&p).unwrap().0;
        let rho = pauli_states(&p).rho_t;
        let one = eof_convex_roof(&rho, &[0], None, &OptSettings::new(4, i))
            .unwrap()
            .value
            .0;
        assert!(one <= ec + 1e-3);
        let pair = rho.tensor(&rho).unwrap();
        let two = eof_convex_roof(&pair, &[0, 2], None, &OptSettings::new(2, i))
            .unwrap()
            .value
            .0;
        assert!(two <= 2.0 * ec + 1e-3, "{two} vs {}", 2.0 * ec);
    }
}

/// `E_f(σ ⊗ σ) = 2` for `σ` maximally mixed on the antisymmetric subspace of
/// `C^3 ⊗ C^3`, on an 81-dimensional space with rank 9.
#[test]
fn antisymmetric_pair_is_additive() {
    let sigma = qcap::examples::antisym_subspace()
        .maximally_mixed()
        .unwrap();
    let pair = sigma.tensor(&sigma).unwrap();
    let r = eof_convex_roof(&pair, &[0, 2], None, &OptSettings::new(2, 0)).unwrap();
    assert!((r.value.0 - 2.0).abs() < 1e-2);
}
