use cvnn::classifier::{classifier_grid, classify, detect_holomorphy, detect_polyharmonic, detect_polynomial, ClassifierConfig, Holomorphy, Verdict};
use cvnn::complexcore::ExceptionalSet;
use cvnn::{find_activation, make_grid, C64};

const FAST: [&str; 8] = ["ratio", "rho_c", "sigmoid_split", "sin", "tanh", "abs2", "poly_zzbar", "conj_sin"];

fn disc() -> cvnn::Grid {
    make_grid(&[C64::new(0.0, 0.0)], 1.0, 9, &ExceptionalSet::empty()).unwrap()
}

#[test]
fn polyharmonic_orders() {
    let grid = disc();
    let re = detect_polyharmonic(&find_activation("real_part").unwrap(), 4, &grid, 1e-4).unwrap();
    assert_eq!(re.order, Some(1));
    let abs2 = detect_polyharmonic(&find_activation("abs2").unwrap(), 4, &grid, 1e-4).unwrap();
    assert_eq!((abs2.found, abs2.order), (true, Some(2)));
    assert!(abs2.residuals[0] > 0.1);
    let cfg = ClassifierConfig::default();
    let ratio = find_activation("ratio").unwrap();
    let (rgrid, _) = classifier_grid(&ratio, &cfg).unwrap();
    let r = detect_polyharmonic(&ratio, 4, &rgrid, cfg.tol).unwrap();
    assert!(!r.found);
    assert_eq!(r.residuals.len(), 4);
}

#[test]
fn holomorphy_classes() {
    let cfg = ClassifierConfig::default();
    for (name, want) in [("tanh", Holomorphy::Holomorphic), ("conj_sin", Holomorphy::Antiholomorphic), ("sigmoid_split", Holomorphy::Neither)] {
        let sigma = find_activation(name).unwrap();
        let (grid, _) = classifier_grid(&sigma, &cfg).unwrap();
        assert_eq!(detect_holomorphy(&sigma, &grid, cfg.tol).unwrap(), want, "{name}");
    }
}

#[test]
fn polynomial_degrees_and_test_agreement() {
    let grid = disc();
    for (name, want) in [("poly_zzbar", Some(1)), ("abs2", Some(2)), ("ratio", None), ("sin", None)] {
        let p = detect_polynomial(&find_activation(name).unwrap(), 4, &grid, 1e-4).unwrap();
        assert_eq!(p.degree, want, "{name}");
        assert_eq!(p.derivative_degree, p.fit_degree, "{name}");
    }
}

#[test]
fn verdict_examples() {
    let cfg = ClassifierConfig::default();
    let tanh = classify(&find_activation("tanh").unwrap(), &cfg).unwrap();
    assert_eq!((tanh.shallow_universal, tanh.deep_universal), (Verdict::No, Verdict::No));
    assert!(tanh.holomorphic && !tanh.antiholomorphic);
    let rho = classify(&find_activation("rho_c").unwrap(), &cfg).unwrap();
    assert_eq!((rho.shallow_universal, rho.deep_universal), (Verdict::Yes, Verdict::Yes));
    let e48 = classify(&find_activation("example_4_8").unwrap(), &cfg).unwrap();
    assert_eq!(e48.shallow_universal, Verdict::No);
    assert_eq!(e48.deep_universal, Verdict::Yes);
    assert!(e48.ae_equal_but_discontinuous);
}

#[test]
fn report_invariants_on_fast_subset() {
    let cfg = ClassifierConfig::default();
    for name in FAST {
        let sigma = find_activation(name).unwrap();
        let r = classify(&sigma, &cfg).unwrap();
        if r.holomorphic && r.antiholomorphic {
            assert!(r.polynomial_degree.is_some_and(|d| d <= 1), "{name}");
        }
        if r.shallow_universal == Verdict::Yes {
            assert_eq!(r.deep_universal, Verdict::Yes, "{name}");
        }
        assert_eq!(r.config_echo.library_version, cvnn::VERSION);
        assert!(!r.evidence.is_empty());
        assert_eq!(r.to_json(), classify(&sigma, &cfg).unwrap().to_json(), "{name}");
    }
}

#[test]
fn bounded_nonconstant_entries_are_not_polyharmonic() {
    let cfg = ClassifierConfig::default();
    for name in ["ratio", "sigmoid_split"] {
        let r = classify(&find_activation(name).unwrap(), &cfg).unwrap();
        assert_eq!(r.polyharmonic_order, None, "{name}");
    }
}

#[test]
fn tighter_tolerance_never_flips_yes_to_no() {
    let loose = ClassifierConfig::default();
    let tight = ClassifierConfig { tol: loose.tol / 10.0, ..loose.clone() };
    for name in FAST {
        let sigma = find_activation(name).unwrap();
        let a = classify(&sigma, &loose).unwrap();
        let b = classify(&sigma, &tight).unwrap();
        for (x, y) in [(a.shallow_universal, b.shallow_universal), (a.deep_universal, b.deep_universal)] {
            assert!(!(x == Verdict::Yes && y == Verdict::No), "{name}: {x:?} -> {y:?}");
        }
    }
}

#[test]
fn unbounded_activation_is_indeterminate() {
    let r = classify(&find_activation("arctan_principal").unwrap(), &ClassifierConfig::default()).unwrap();
    assert_eq!(r.shallow_universal, Verdict::Indeterminate);
    assert_eq!(r.deep_universal, Verdict::Indeterminate);
}
