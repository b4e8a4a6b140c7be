use proptest::prelude::*;
use qlearn::bloch::{
    bloch_to_state, functional_eval, generator_basis, rank_k_functional, state_to_bloch,
    EffectFunctional,
};
use qlearn::ensembles::{
    ginibre_mixed_state, haar_pure_state, random_effect, rotated_orthonormal_family, EffectMode,
    RngSeed,
};
use qlearn::matrix::hs_inner;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    #[test]
    fn state_bloch_round_trip(seed in any::<u64>(), di in 0usize..4, rank in 1usize..=8) {
        let d = [2, 3, 4, 8][di];
        let mut rng = RngSeed::new(seed).rng();
        let rho = ginibre_mixed_state(d, rank.min(d), &mut rng).unwrap();
        let r = state_to_bloch(&rho).unwrap();
        let back = bloch_to_state(&r).unwrap();
        prop_assert!(back.is_state);
        prop_assert!(back.matrix.max_abs_diff(rho.matrix()).unwrap() <= 1e-10);
    }

    #[test]
    fn pure_states_have_unit_bloch_vectors(seed in any::<u64>(), d in 2usize..=8) {
        let rho = haar_pure_state(d, &mut RngSeed::new(seed).rng()).unwrap();
        let r = state_to_bloch(&rho).unwrap();
        prop_assert!((r.norm() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn functional_matches_the_trace(seed in any::<u64>(), d in 2usize..=6) {
        let mut rng = RngSeed::new(seed).rng();
        let e = random_effect(d, EffectMode::RankMixture, &mut rng).unwrap();
        let rho = ginibre_mixed_state(d, 1 + seed as usize % d, &mut rng).unwrap();
        let f = EffectFunctional::from_matrix(e.matrix()).unwrap();
        let r = state_to_bloch(&rho).unwrap();
        let direct = hs_inner(e.matrix(), rho.matrix()).unwrap();
        prop_assert!((functional_eval(&f, &r).unwrap() - direct).abs() <= 1e-10);
        prop_assert!(f.to_matrix().max_abs_diff(e.matrix()).unwrap() <= 1e-10);

        // M = (Tr M / d) I + ½ Σ Tr(MΛᵢ) Λᵢ
        let basis = generator_basis::<f64>(d).unwrap();
        let (t, c) = basis.decompose(e.matrix()).unwrap();
        let half: Vec<f64> = c.iter().map(|x| 0.5 * x).collect();
        let back = basis.combine(t / d as f64, &half).unwrap();
        prop_assert!(back.max_abs_diff(e.matrix()).unwrap() <= 1e-10);
        for (g, ci) in basis.generators().iter().zip(&c) {
            prop_assert!((hs_inner(g, e.matrix()).unwrap() - ci).abs() <= 1e-10);
        }
    }
}

/// `‖n_(k)‖² = (d−k)/(k(d−1))`, from the Bloch overlaps `aᵢ·aⱼ = −1/(d−1)`.
#[test]
fn centroid_norm_formula_for_all_ranks() {
    for d in 2..=8usize {
        let family = rotated_orthonormal_family(d, &mut RngSeed::new(d as u64).rng()).unwrap();
        let vecs: Vec<_> = family.iter().map(|s| state_to_bloch(s).unwrap()).collect();
        for k in 1..=d {
            let len = vecs[0].r.len();
            let mut c = vec![0.0; len];
            for v in &vecs[..k] {
                for (a, x) in c.iter_mut().zip(&v.r) {
                    *a += x / k as f64;
                }
            }
            let norm_sq: f64 = c.iter().map(|x| x * x).sum();
            let (df, kf) = (d as f64, k as f64);
            assert!((norm_sq - (df - kf) / (kf * (df - 1.0))).abs() < 1e-10, "d {d} k {k}");

            // the rank-k functional evaluates the projector
            let f = rank_k_functional(d, &vecs[..k]).unwrap();
            for i in 0..d {
                let v = functional_eval(&f, &vecs[i]).unwrap();
                let want = if i < k { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-9, "d {d} k {k} i {i}: {v}");
            }
        }
    }
}
