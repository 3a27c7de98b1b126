use bscount::efimov::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn jacobi_coefficients_are_orthogonal(masses in prop::collection::vec(0.01f64..100.0, 3..8)) {
        let c = jacobi_pair_coeffs(&masses).unwrap();
        prop_assert!(c.orthogonality_defect() <= 1e-12);
        prop_assert!(c.a11() <= 0.0 && c.a12() > 0.0);
        prop_assert!((c.a11() * c.a11() + c.a12() * c.a12() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn equal_masses_give_sixty_degree_rotation() {
    let c = jacobi_pair_coeffs(&[1.0, 1.0, 1.0]).unwrap();
    assert!((c.a11() + 0.5).abs() < 1e-15);
    assert!((c.a12() - 0.75f64.sqrt()).abs() < 1e-15);
}

#[test]
fn unitary_spectrum_is_geometric() {
    let model = SeparableModel::at_unitarity(1.0, 50.0, 256).unwrap();
    let opts = ScanOptions {
        rel_tol: 1e-9,
        ..Default::default()
    };
    let s = efimov_spectrum(&model, &opts).unwrap();
    assert!(s.energies.len() >= 4);
    let (_, ratio) = s0_oracle();
    let tail = &s.ratios[s.ratios.len() - 3..];
    for r in tail {
        assert!((r / ratio - 1.0).abs() < 0.01, "{r} vs {ratio}");
    }
    let cmp = cutoff_stability(&model, &opts, &s.energies).unwrap();
    assert!(cmp.shallow_ratios_stable(2, 0.02), "{:?}", cmp.ratio_shift);
    assert!(cmp.stable_levels(0.02).iter().rev().take(3).all(|&b| b));
}

#[test]
fn trimer_lies_below_dimer() {
    let m = SeparableModel::at_unitarity(1.0, 50.0, 192).unwrap();
    let m = m.with_lambda(1.05 * m.lambda);
    let ed = m.dimer_energy().unwrap();
    assert!(trimer_count(&m, ed * (1.0 + 1e-6)).unwrap() >= 1);
}

#[test]
fn far_from_unitarity_nothing_binds() {
    let m = SeparableModel::at_unitarity(1.0, 50.0, 192).unwrap();
    for f in [0.05, 0.1, 0.3] {
        let opts = ScanOptions {
            rel_tol: 1e-6,
            ..Default::default()
        };
        assert!(trimer_levels(&m.with_lambda(f * m.lambda), &opts).unwrap().is_empty());
    }
}

#[test]
fn detuned_coupling_has_finitely_many_levels() {
    let m = SeparableModel::at_unitarity(1.0, 50.0, 192).unwrap();
    let m = m.with_lambda(0.9 * m.lambda);
    let counts: Vec<usize> = [-1e-6, -1e-10, -1e-14, -1e-18]
        .iter()
        .map(|&e| trimer_count(&m, e).unwrap())
        .collect();
    assert!(counts.windows(2).all(|w| w[0] == w[1]), "{counts:?}");
}

#[test]
fn two_body_bs_count_tracks_dimer() {
    let m = SeparableModel::at_unitarity(1.0, 50.0, 256).unwrap();
    for f in [0.5, 0.9, 1.2, 2.0] {
        let mf = m.with_lambda(f * m.lambda);
        let eps = 1e-6;
        let expected = mf.dimer_energy().map_or(0, |e| usize::from(e < -eps));
        assert_eq!(two_body_count(&mf, eps).unwrap(), expected, "λ/λ_u = {f}");
    }
}
