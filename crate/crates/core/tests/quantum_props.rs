mod common;

use common::random_channel;
use proptest::prelude::*;
use qcap::linalg::{eigvalsh, Factorization};
use qcap::quantum::{channel_from_subspace, random_density, stinespring_from_kraus};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dilation_reproduces_channel(seed in any::<u64>(), d in 2usize..4, o in 2usize..4, k in 1usize..5) {
        let t = random_channel(d, o, k, seed);
        let dil = stinespring_from_kraus(&t).unwrap();
        prop_assert!(dil.isometry_defect() < 1e-10);
        for i in 0..100u64 {
            let rho = random_density(&Factorization::single(d), 1 + (i as usize) % d, seed ^ i).unwrap();
            let direct = t.apply(&rho).unwrap();
            let via = dil.output(&rho).unwrap();
            prop_assert!(via.op().max_abs_diff(direct.op()) <= 1e-10);
        }
    }

    #[test]
    fn image_subspace_round_trip(seed in any::<u64>(), d in 2usize..4, o in 2usize..4, k in 1usize..4) {
        let t = random_channel(d, o, k, seed);
        let dil = stinespring_from_kraus(&t).unwrap();
        let back = channel_from_subspace(&dil.image_basis, 0).unwrap();
        for i in 0..10u64 {
            let rho = random_density(&Factorization::single(d), d, seed.wrapping_add(i)).unwrap();
            let a = t.apply_op(rho.op()).unwrap();
            let b = back.apply_op(rho.op()).unwrap();
            prop_assert!(a.max_abs_diff(&b) <= 1e-10);
        }
    }

    #[test]
    fn choi_is_a_state(seed in any::<u64>(), d in 2usize..4, o in 2usize..4, k in 1usize..5) {
        let choi = random_channel(d, o, k, seed).choi_matrix().unwrap();
        prop_assert!((choi.op().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(eigvalsh(choi.op()).unwrap()[0] >= -1e-10);
    }
}
