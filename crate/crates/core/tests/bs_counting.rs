mod common;

use bscount::bsengine::{
    bs_operator, bs_operator_at_zero, count_bs, count_direct, critical_coupling, mu_max, BsProblem,
};
use bscount::linop::{count_evs, Relation, SymOperator};
use bscount::sample::{
    instance_seed, random_bs_problem, rng, with_spectrum, InstanceOptions, PerturbationSign, DEFAULT_SEED,
};
use proptest::prelude::*;

fn corpus(sign: PerturbationSign, zero_mode: bool) -> impl Iterator<Item = BsProblem> {
    let opts = InstanceOptions {
        sign,
        zero_mode,
        ..Default::default()
    };
    (0..500).map(move |i| random_bs_problem(&mut rng(instance_seed(DEFAULT_SEED, i)), &opts))
}

#[test]
fn equality_on_seeded_corpus() {
    for sign in [PerturbationSign::NonPositive, PerturbationSign::Indefinite] {
        for (i, p) in corpus(sign, false).enumerate() {
            assert_eq!(count_bs(&p).unwrap(), count_direct(&p), "instance {i} ({sign:?})");
        }
    }
}

#[test]
fn inequality_with_kernel_in_a() {
    for (i, p) in corpus(PerturbationSign::Indefinite, true).enumerate() {
        assert!(p.a().min_eigenvalue().abs() < 1e-9);
        assert!(count_bs(&p).unwrap() >= count_direct(&p), "instance {i}");
    }
}

#[test]
fn direct_count_matches_jacobi_scan() {
    for p in corpus(PerturbationSign::Indefinite, false).take(100) {
        let eigs = common::jacobi_eigenvalues(p.hamiltonian().matrix());
        let scan = eigs.iter().filter(|&&x| x < -p.epsilon()).count();
        assert_eq!(count_direct(&p), scan);
    }
}

#[test]
fn operator_matches_generalized_eigenproblem() {
    // K(ε) is similar to the pencil −B x = μ (A + ε) x.
    for p in corpus(PerturbationSign::Indefinite, false).take(100) {
        let k = bs_operator(&p).unwrap().eigenvalues();
        let shifted = p.a().shifted(p.epsilon());
        let oracle = common::pencil_eigenvalues(shifted.matrix(), p.b().matrix());
        let scale = 1.0 + k.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (x, y) in k.iter().zip(&oracle) {
            assert!((x - y).abs() <= 1e-8 * scale, "{x} vs {y}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mu_nonincreasing_in_epsilon(seed in any::<u64>()) {
        let p = random_bs_problem(&mut rng(seed), &InstanceOptions::default());
        let mus: Vec<f64> = (0..10)
            .map(|k| mu_max(&p.with_epsilon(0.01 * 2f64.powi(k)).unwrap()).unwrap())
            .collect();
        for w in mus.windows(2) {
            if w[0] > 0.0 {
                prop_assert!(w[1] < w[0]);
            } else {
                prop_assert!(w[1] <= w[0] + 1e-12);
            }
        }
    }

    #[test]
    fn ground_state_monotone_in_coupling(seed in any::<u64>()) {
        let p = random_bs_problem(&mut rng(seed), &InstanceOptions::default());
        let e: Vec<f64> = (0..10)
            .map(|k| (p.a() + &p.b().scaled(0.3 * k as f64)).min_eigenvalue())
            .collect();
        // −inf spec grows as λ grows when B ⪯ 0.
        for w in e.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-10);
        }
    }

    #[test]
    fn bounded_case_at_zero_energy(seed in any::<u64>(), alpha in 0.05f64..1.0) {
        let mut r = rng(seed);
        let p = random_bs_problem(&mut r, &InstanceOptions { sign: PerturbationSign::Indefinite, ..Default::default() });
        let a = p.a().shifted(alpha);
        let h = &a + p.b();
        let guard = 100.0 * h.guard_band();
        prop_assume!(h.eigenvalues().iter().all(|x| x.abs() > guard));
        let k0 = bs_operator_at_zero(&a, p.b()).unwrap();
        prop_assume!(k0.eigenvalues().iter().all(|x| (x - 1.0).abs() > 100.0 * k0.guard_band()));
        prop_assert_eq!(count_evs(&k0, Relation::Greater, 1.0), count_evs(&h, Relation::Less, 0.0));
    }

    #[test]
    fn critical_coupling_scales_inversely(seed in any::<u64>(), c in 0.2f64..5.0) {
        let mut r = rng(seed);
        let n = rand::Rng::random_range(&mut r, 2..10usize);
        let spec: Vec<f64> = (0..n).map(|_| 0.5 + 4.5 * rand::Rng::random::<f64>(&mut r)).collect();
        let a = with_spectrum(&mut r, &spec);
        let p = random_bs_problem(&mut r, &InstanceOptions { min_dim: n, max_dim: n, ..Default::default() });
        let b = p.b();
        let one = critical_coupling(&a, b, 1e-10).unwrap();
        let scaled = critical_coupling(&a, &b.scaled(c), 1e-10).unwrap();
        prop_assert!((scaled.lambda_star * c / one.lambda_star - 1.0).abs() < 1e-6);
        // Independent value: λ* = 1/μ_top of the pencil (−B, A).
        let oracle = 1.0 / common::pencil_eigenvalues(a.matrix(), b.matrix()).last().unwrap();
        prop_assert!((one.lambda_star / oracle - 1.0).abs() < 1e-6);
    }
}

#[test]
fn critical_coupling_two_by_two() {
    // min eig(A + λB) = (1 − λ − √(1 + λ²))/2 is negative for every λ > 0,
    // so λ* sits where it crosses the guard band.
    let a = SymOperator::from_diagonal(&[0.0, 1.0]);
    let b = SymOperator::from_row_slice(2, &[-0.5, -0.5, -0.5, -0.5]).unwrap();
    let r = critical_coupling(&a, &b, 1e-12).unwrap();
    let lam = r.lambda_star;
    let min_eig = (1.0 - lam - (1.0 + lam * lam).sqrt()) / 2.0;
    let guard = 1e-10 * (1.0 + (&a + &b.scaled(lam)).frobenius_norm());
    assert!(min_eig.abs() <= 2.0 * guard, "λ* = {lam}, min eig = {min_eig}");
}
