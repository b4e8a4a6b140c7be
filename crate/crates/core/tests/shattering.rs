use qlearn::bloch::bloch_to_state;
use qlearn::complexity::{
    certify_shattering, fat_lower_bound_search, mendelson_criterion, separability_check,
    FeasibilityConfig, FeasibilityMethod, HypothesisClass, MendelsonVerdict, SearchStrategy,
    ShatteringOutcome, Witnesses,
};
use qlearn::ensembles::{haar_pure_state, orthonormal_state_family, RngSeed};
use qlearn::matrix::hs_inner;
use qlearn::{BlochVector, HermitianMatrix, State};

fn qubit(r: [f64; 3]) -> HermitianMatrix {
    bloch_to_state(&BlochVector::new(2, r.to_vec()).unwrap())
        .unwrap()
        .matrix
}

fn basis(d: usize) -> Vec<HermitianMatrix> {
    orthonormal_state_family(d)
        .unwrap()
        .into_iter()
        .map(State::into_matrix)
        .collect()
}

fn certify(
    pts: &[HermitianMatrix],
    eps: f64,
    w: Witnesses,
    class: HypothesisClass,
) -> ShatteringOutcome {
    certify_shattering(pts, eps, &w, class, &FeasibilityConfig::default()).unwrap()
}

/// Margins recomputed here from the stored matrices, not taken from the solver.
fn check_certificate(out: &ShatteringOutcome, eps: f64) {
    let cert = out.certificate().unwrap_or_else(|| panic!("not certified: {out:?}"));
    for (mask, e) in cert.subset_effects.iter().enumerate() {
        assert!(cert.class.contains(e, 1e-10).unwrap());
        for (i, x) in cert.points.iter().enumerate() {
            let v = hs_inner(e, x).unwrap();
            if mask >> i & 1 == 1 {
                assert!(v >= cert.witnesses[i] + eps - 1e-9, "mask {mask} point {i}: {v}");
            } else {
                assert!(v <= cert.witnesses[i] - eps + 1e-9, "mask {mask} point {i}: {v}");
            }
        }
    }
}

#[test]
fn qubit_triple_is_shattered_just_below_the_optimum() {
    let pts = vec![
        qubit([1.0, 0.0, 0.0]),
        qubit([0.0, 1.0, 0.0]),
        qubit([0.0, 0.0, 1.0]),
    ];
    let eps = 1.0 / (2.0 * 3f64.sqrt()) - 1e-6;
    let out = certify(&pts, eps, Witnesses::Level(0.5), HypothesisClass::EffectSpace);
    check_certificate(&out, eps);
    // and not above it
    let out = certify(&pts, eps + 2e-6, Witnesses::Level(0.5), HypothesisClass::EffectSpace);
    assert!(matches!(out, ShatteringOutcome::Infeasible { .. }), "{out:?}");
}

#[test]
fn rank_two_pair_in_four_dimensions() {
    let pts = basis(4)[..2].to_vec();
    for eps in [0.499, 0.5 - 1e-6] {
        let out = certify(&pts, eps, Witnesses::Level(0.5), HypothesisClass::RankK { k: 2 });
        check_certificate(&out, eps);
    }
}

#[test]
fn orthonormal_states_at_045() {
    for d in 2..=4 {
        let out = certify(&basis(d), 0.45, Witnesses::Level(0.5), HypothesisClass::EffectSpace);
        check_certificate(&out, 0.45);
    }
}

#[test]
fn certification_is_monotone_in_epsilon() {
    let pts = vec![qubit([0.0, 0.0, -1.0]), qubit([-1.0, 0.0, 0.0])];
    let top = 1.0 / (2.0 * 2f64.sqrt()) - 1e-6;
    for k in 0..6 {
        let eps = top * (1.0 - k as f64 / 6.0);
        let out = certify(&pts, eps, Witnesses::Level(0.5), HypothesisClass::EffectSpace);
        check_certificate(&out, eps);
    }
}

#[test]
fn level_witnesses_certify_whenever_per_point_ones_do() {
    let mut rng = RngSeed::new(31).rng();
    for trial in 0..6 {
        let pts: Vec<HermitianMatrix> = (0..3)
            .map(|_| haar_pure_state(2, &mut rng).unwrap().into_matrix())
            .collect();
        let alpha: Vec<f64> = (0..3).map(|i| 0.4 + 0.1 * ((trial + i) % 3) as f64).collect();
        let eps = 0.05;
        let per_point = certify(
            &pts,
            eps,
            Witnesses::PerPoint(alpha),
            HypothesisClass::EffectSpace,
        );
        if per_point.is_certified() {
            let level = certify(&pts, eps, Witnesses::Level(0.5), HypothesisClass::EffectSpace);
            check_certificate(&level, eps);
        }
    }
}

#[test]
fn both_solvers_agree_on_easy_instances() {
    let pts = basis(3);
    for method in [
        FeasibilityMethod::AlternatingProjections,
        FeasibilityMethod::InteriorPoint,
    ] {
        let cfg = FeasibilityConfig {
            method,
            ..FeasibilityConfig::default()
        };
        let out = certify_shattering(
            &pts,
            0.4,
            &Witnesses::Level(0.5),
            HypothesisClass::EffectSpace,
            &cfg,
        )
        .unwrap();
        check_certificate(&out, 0.4);
    }
}

#[test]
fn four_qubit_states_are_not_shattered_at_the_triple_scale() {
    let r = fat_lower_bound_search(
        2,
        1.0 / (2.0 * 3f64.sqrt()) - 1e-6,
        HypothesisClass::EffectSpace,
        4,
        &SearchStrategy::all(),
        RngSeed::new(7),
        &FeasibilityConfig::default(),
    )
    .unwrap();
    assert_eq!(r.best_n, 3);
    assert_eq!(r.strategy, Some(SearchStrategy::Mub2));
}

#[test]
fn fat_search_finds_orthonormal_sets() {
    let r = fat_lower_bound_search(
        4,
        0.45,
        HypothesisClass::EffectSpace,
        4,
        &SearchStrategy::all(),
        RngSeed::new(1),
        &FeasibilityConfig::default(),
    )
    .unwrap();
    assert!(r.best_n >= 4);
    let r = fat_lower_bound_search(
        2,
        1.0 / (2.0 * 2f64.sqrt()) - 1e-6,
        HypothesisClass::EffectSpace,
        2,
        &SearchStrategy::all(),
        RngSeed::new(1),
        &FeasibilityConfig::default(),
    )
    .unwrap();
    assert_eq!(r.best_n, 2);
}

#[test]
fn separability_examples() {
    let cfg = FeasibilityConfig::default();
    let pair = vec![qubit([0.0, 0.0, -1.0]), qubit([-1.0, 0.0, 0.0])];
    assert!(separability_check(&pair, 1.0 / 2f64.sqrt(), &cfg).unwrap().separable);
    assert!(separability_check(&basis(3), 0.9, &cfg).unwrap().separable);
    assert!(separability_check(&basis(3), 1.2, &cfg).unwrap().separable == false);
}

#[test]
fn mendelson_examples() {
    match mendelson_criterion(&basis(4), 0.99, 100, RngSeed::new(0)).unwrap() {
        MendelsonVerdict::ConsistentWithShattering { min_ratio, .. } => {
            assert!((min_ratio - 1.0).abs() < 1e-12)
        }
        other => panic!("{other:?}"),
    }
    // x, y and their average are linearly dependent
    let a = qubit([1.0, 0.0, 0.0]);
    let b = qubit([0.0, 1.0, 0.0]);
    let c = a.scale(0.5).add_scaled(0.5, &b).unwrap();
    let pts = vec![a, b, c];
    match mendelson_criterion(&pts, 0.01, 0, RngSeed::new(0)).unwrap() {
        MendelsonVerdict::Refuted { coefficients, lhs, rhs } => {
            let mut m = HermitianMatrix::zeros(2);
            for (x, &w) in pts.iter().zip(&coefficients) {
                m.axpy(w, x).unwrap();
            }
            let norm: f64 = m.eig().unwrap().eigenvalues.iter().map(|l| l.abs()).sum();
            let l1: f64 = coefficients.iter().map(|w| w.abs()).sum();
            assert!((norm - rhs).abs() < 1e-12);
            assert!(0.01 * l1 > norm && (lhs - 0.01 * l1).abs() < 1e-15);
        }
        other => panic!("{other:?}"),
    }
}
