use bscount::iterbs::{inv_sqrt_one_minus, iterate, r_operator, random_iterbs_instance};
use bscount::linop::{count_evs, rank_one_projection, Relation};
use bscount::sample::{instance_seed, random_unit_vector, rng};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn count_constant_across_stages() {
    for i in 0..200 {
        let mut r = rng(instance_seed(0x17E2, i));
        let n = r.random_range(6..=16);
        let steps = r.random_range(1..=3);
        let (k, plan) = random_iterbs_instance(&mut r, n, steps);
        let base = count_evs(&k, Relation::Greater, 1.0);
        let stages = iterate(&k, &plan).unwrap();
        assert_eq!(stages.len(), steps + 1);
        for s in &stages {
            assert_eq!(s.count_above_one, base, "instance {i} stage {}", s.k);
            assert!(
                s.consistency_residual <= 1e-8,
                "instance {i}: {}",
                s.consistency_residual
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn r_algebra(seed in any::<u64>(), n in 2usize..12, mu in 0.01f64..0.99) {
        let mut r = rng(seed);
        let p = rank_one_projection(&random_unit_vector(&mut r, n)).unwrap();
        let rr = r_operator(&p, mu).unwrap();
        let pr = p.matrix() * rr.matrix();
        let rp = rr.matrix() * p.matrix();
        prop_assert!((&pr - rr.matrix()).norm() <= 1e-12);
        prop_assert!((&rp - rr.matrix()).norm() <= 1e-12);
        // S² (1 − μP) = 1.
        let s = inv_sqrt_one_minus(&p, mu).unwrap();
        let one_minus = p.scaled(-mu).shifted(1.0);
        let prod = s.matrix() * s.matrix() * one_minus.matrix();
        prop_assert!((prod - nalgebra::DMatrix::<f64>::identity(n, n)).norm() <= 1e-10);
    }

    #[test]
    fn weights_at_or_above_one_are_refused(seed in any::<u64>(), mu in 1.0f64..3.0) {
        let p = rank_one_projection(&random_unit_vector(&mut rng(seed), 4)).unwrap();
        prop_assert!(r_operator(&p, mu).is_err());
    }
}
