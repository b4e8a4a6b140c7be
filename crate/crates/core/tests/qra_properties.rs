use proptest::prelude::*;
use qlearn::ensembles::{random_effect, EffectMode, RngSeed};
use qlearn::qra::{
    build_qra_2_1, build_qra_3_1, fat_to_qra_bound, qra_impossibility_probe, QraBound,
    TwoOutcomePovm,
};
use qlearn::HermitianMatrix;

fn complete(p: &TwoOutcomePovm) -> f64 {
    let d = p.e0.dim();
    p.e0.add_scaled(1.0, &p.e1)
        .unwrap()
        .max_abs_diff(&HermitianMatrix::identity(d))
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn decoders_from_effects_are_complete(seed in any::<u64>(), d in 2usize..=8, mode in 0usize..3) {
        let m = [EffectMode::EigenClip, EffectMode::RankMixture, EffectMode::HaarProjector(seed as usize % (d + 1))][mode];
        let e = random_effect(d, m, &mut RngSeed::new(seed).rng()).unwrap();
        let p = TwoOutcomePovm::from_effect(&e);
        prop_assert!(complete(&p) <= 1e-12);
        prop_assert!(complete(&p.swapped()) <= 1e-12);
    }

    #[test]
    fn entropy_bound_never_grows_with_epsilon(a in 0.001f64..0.499, b in 0.001f64..0.499, m in 1usize..4) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let n = |e| match fat_to_qra_bound(e, m).unwrap() {
            QraBound::Finite(n) => n,
            QraBound::Unbounded => usize::MAX,
        };
        prop_assert!(n(lo) >= n(hi));
    }
}

#[test]
fn constructed_and_searched_decoders_are_complete() {
    for code in [build_qra_2_1().unwrap(), build_qra_3_1().unwrap()] {
        assert!(code.decoders.iter().all(|p| complete(p) <= 1e-12));
    }
    for n in 1..=4 {
        let r = qra_impossibility_probe(n, 1, 20, RngSeed::new(n as u64)).unwrap();
        assert!(r.best_code.decoders.iter().all(|p| complete(p) <= 1e-10));
    }
}
