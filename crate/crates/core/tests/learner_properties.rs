use proptest::prelude::*;
use qlearn::bloch::generator_basis;
use qlearn::ensembles::{
    make_training_set, random_effect, EffectMode, LabelRegime, RngSeed, StateEnsemble,
};
use qlearn::learners::{
    empirical_risk, erm_effect, erm_state, is_monotone, risk_gradient, LearnerConfig, Loss,
};
use qlearn::matrix::hs_inner;
use qlearn::{Effect, HermitianMatrix, State};

fn haar_states(d: usize, n: usize, seed: RngSeed) -> Vec<HermitianMatrix> {
    StateEnsemble::HaarPure
        .sample(d, n, &mut seed.rng())
        .unwrap()
        .into_iter()
        .map(State::into_matrix)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// Central differences along every generator direction (and the identity).
    #[test]
    fn gradient_matches_finite_differences(seed in any::<u64>(), d in 2usize..=4, n in 1usize..20, sigma in 0.0f64..0.3) {
        let s = RngSeed::new(seed);
        let mut rng = s.child(0).rng();
        let target = random_effect(d, EffectMode::EigenClip, &mut rng).unwrap();
        let x = random_effect(d, EffectMode::RankMixture, &mut rng).unwrap().into_matrix();
        let data = make_training_set(
            target.matrix(),
            haar_states(d, n, s.child(1)),
            LabelRegime::NoisyGaussian { sigma },
            s.child(2),
        )
        .unwrap();
        let g = risk_gradient(&x, &data, Loss::Square).unwrap();
        let basis = generator_basis::<f64>(d).unwrap();
        let mut dirs: Vec<HermitianMatrix> = basis.generators().to_vec();
        dirs.push(HermitianMatrix::identity(d));
        let h = 1e-5;
        for dir in dirs {
            let plus = empirical_risk(&x.add_scaled(h, &dir).unwrap(), &data, Loss::Square).unwrap();
            let minus = empirical_risk(&x.add_scaled(-h, &dir).unwrap(), &data, Loss::Square).unwrap();
            let fd = (plus - minus) / (2.0 * h);
            let an = hs_inner(&g, &dir).unwrap();
            prop_assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "{fd} vs {an}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn iterates_stay_feasible_and_risk_decreases(seed in any::<u64>(), d in 2usize..=4, n in 2usize..30) {
        let s = RngSeed::new(seed);
        let mut rng = s.child(0).rng();
        let target = random_effect(d, EffectMode::HaarProjector(1), &mut rng).unwrap();
        let data = make_training_set(target.matrix(), haar_states(d, n, s.child(1)), LabelRegime::Bernoulli, s.child(2)).unwrap();
        for k in 1..=6 {
            let cfg = LearnerConfig { max_iters: k, ..LearnerConfig::default() };
            let fit = erm_effect(&data, &cfg).unwrap();
            prop_assert!(Effect::new(fit.estimate.clone()).is_ok());
        }
        let fit = erm_effect(&data, &LearnerConfig { max_iters: 2000, ..LearnerConfig::default() }).unwrap();
        prop_assert!(is_monotone(&fit.risk_trace, 1e-12));

        // the state learner on rank-one effect data
        let rho = StateEnsemble::HaarPure.sample(d, 1, &mut rng).unwrap().remove(0);
        let effects: Vec<HermitianMatrix> = (0..n)
            .map(|_| random_effect(d, EffectMode::EigenClip, &mut rng).unwrap().into_matrix())
            .collect();
        let data = make_training_set(rho.matrix(), effects, LabelRegime::Exact, s.child(3)).unwrap();
        for k in [1, 3, 500] {
            let fit = erm_state(&data, &LearnerConfig { max_iters: k, ..LearnerConfig::default() }).unwrap();
            prop_assert!(State::new(fit.estimate.clone()).is_ok());
            prop_assert!(is_monotone(&fit.risk_trace, 1e-12));
        }
    }
}
