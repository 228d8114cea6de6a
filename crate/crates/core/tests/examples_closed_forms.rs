use proptest::prelude::*;
use qcap::capacity::{covariant_capacity, holevo_capacity};
use qcap::eof::ensemble_entanglement;
use qcap::examples::*;
use qcap::linalg::Factorization;
use qcap::measures::{log_negativity, pure_entanglement};
use qcap::optim::OptSettings;
use qcap::quantum::{random_density, rng_from_seed, PureEnsemble};
use qcap::verify::random_admissible_pauli;

#[test]
fn polynomial_gap_flag_matches_direct_negativity() {
    let mut checked = 0;
    for r in gap_region_scan(0.05)
        .unwrap()
        .iter()
        .filter(|r| r.admissible)
    {
        let p = PauliParams::new(r.p0, r.px, r.py, r.pz).unwrap();
        let direct = log_negativity(&pauli_states(&p).rho_t, &[0]).unwrap().0;
        let margin = r.ec.0 - direct;
        if margin.abs() > 1e-9 {
            assert_eq!(r.gap, margin > 0.0, "{r:?} direct {direct}");
            checked += 1;
        }
    }
    assert!(checked > 50);
}

#[test]
fn scan_is_deterministic_and_flags_inadmissible_rows() {
    let render = || {
        let mut buf = Vec::new();
        write_gap_csv(&gap_region_scan(0.1).unwrap(), &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    };
    let a = render();
    assert_eq!(a, render());
    assert!(a.lines().skip(1).any(|l| l.contains(",false,")));
    assert_eq!(a.lines().count(), 1 + 286);
}

#[test]
fn worked_point_neighbourhood_has_a_gap() {
    let rows = gap_region_scan(0.05).unwrap();
    let r = rows
        .iter()
        .find(|r| {
            (r.px - 0.15).abs() < 1e-9 && (r.py - 0.15).abs() < 1e-9 && (r.pz - 0.15).abs() < 1e-9
        })
        .unwrap();
    assert!(r.admissible && r.gap);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn vdc_family_mapping(seed in any::<u64>(), w in 0.0f64..=1.0) {
        let t = vdc_channel(w).unwrap();
        let rho = random_density(&Factorization::single(3), 1 + seed as usize % 3, seed).unwrap();
        let want = transpose_depolarizing(vdc_weight_to_p(w), rho.op());
        prop_assert!(t.apply_op(rho.op()).unwrap().max_abs_diff(&want) <= 1e-10);
    }

    #[test]
    fn optimal_pauli_states(seed in any::<u64>(), s in 0.0f64..=1.0) {
        let p = random_admissible_pauli(&mut rng_from_seed(seed));
        let ec = pauli_ec_closed_form(&p).unwrap().0;
        let st = pauli_states(&p);
        for psi in [&st.psi_t, &st.psi_t_perp] {
            prop_assert!((pure_entanglement(psi, &[0]).unwrap().0 - ec).abs() < 1e-10);
            // Output-first and environment-first orderings agree.
            let swapped = psi.permute(&[1, 0]).unwrap();
            prop_assert!((pure_entanglement(&swapped, &[0]).unwrap().0 - ec).abs() < 1e-10);
        }
        let e = PureEnsemble::new(vec![(s, st.psi_t.clone()), (1.0 - s, st.psi_t_perp.clone())]).unwrap();
        prop_assert!((ensemble_entanglement(&e, &[0]).unwrap().0 - ec).abs() < 1e-10);
    }
}

#[test]
fn depolarizing_capacity_closed_form() {
    for d in 2..=3 {
        for lambda in [0.2, 0.5, 0.9] {
            let p = DepolarizingParams::new(d, lambda).unwrap();
            let c =
                holevo_capacity(&depolarizing_channel(&p), None, &OptSettings::new(3, 1)).unwrap();
            let want = (d as f64).log2() - depolarizing_smin(&p).0;
            assert!(
                (c.value.0 - want).abs() < 1e-6,
                "d={d} λ={lambda}: {} vs {want}",
                c.value.0
            );
        }
    }
}

#[test]
fn covariant_capacities() {
    let s = OptSettings::new(4, 0);
    let l3 = 3f64.log2();
    assert!((covariant_capacity(&vdc_subspace(), 1, &s).unwrap().0 - (l3 - 1.5)).abs() < 1e-4);
    assert!((covariant_capacity(&antisym_subspace(), 0, &s).unwrap().0 - (l3 - 1.0)).abs() < 1e-6);
}
