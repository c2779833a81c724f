use cvnn::complexcore::{seeded_rng, ExceptionalSet};
use cvnn::constructor::Domain;
use cvnn::targets::Target;
use cvnn::verify::{
    check_network_invariant, error_floor_experiment, holomorphy_of_best_fit, random_network, InvariantConfig, InvariantKind,
};
use cvnn::{find_activation, make_grid, Error, Grid, C64};

fn grid() -> Grid {
    make_grid(&[C64::new(0.0, 0.0)], 1.0, 9, &ExceptionalSet::empty()).unwrap()
}

fn unit_domain() -> Domain {
    Domain::disc(C64::new(0.0, 0.0), 1.0)
}

#[test]
fn invariant_names_round_trip() {
    for kind in [InvariantKind::DbarVanishes, InvariantKind::DVanishes, InvariantKind::LaplacianPowerVanishes(3)] {
        assert_eq!(kind.to_string().parse::<InvariantKind>().unwrap(), kind);
    }
    assert!("laplacian_power_vanishes(0)".parse::<InvariantKind>().is_err());
    assert!("nonsense".parse::<InvariantKind>().is_err());
}

#[test]
fn random_networks_have_requested_shape() {
    let net = random_network(&mut seeded_rng(0), 2, 3, 4, 2.0).unwrap();
    assert_eq!(net.input_dim(), 2);
    assert_eq!(net.widths(), vec![4, 4, 4]);
    assert_eq!(net, random_network(&mut seeded_rng(0), 2, 3, 4, 2.0).unwrap());
}

#[test]
fn holomorphic_compositions() {
    let sin = find_activation("sin").unwrap();
    let r = check_network_invariant(&sin, 2, InvariantKind::DbarVanishes, &grid(), 10, 0).unwrap();
    assert!(r.max_residual <= 1e-5 && r.max_residual >= 0.0, "{}", r.max_residual);
    assert_eq!(r.networks_tested, 10);
    let conj = find_activation("conj_sin").unwrap();
    let even = check_network_invariant(&conj, 2, InvariantKind::DbarVanishes, &grid(), 10, 0).unwrap();
    assert!(even.max_residual <= 1e-5, "{}", even.max_residual);
    let odd = check_network_invariant(&conj, 1, InvariantKind::DVanishes, &grid(), 10, 0).unwrap();
    assert!(odd.max_residual <= 1e-5, "{}", odd.max_residual);
    let broken = check_network_invariant(&conj, 1, InvariantKind::DbarVanishes, &grid(), 10, 0).unwrap();
    assert!(broken.max_residual > 1e-2, "{}", broken.max_residual);
}

#[test]
fn polynomial_compositions() {
    let pz = find_activation("poly_zzbar").unwrap();
    let r = check_network_invariant(&pz, 2, InvariantKind::LaplacianPowerVanishes(2), &grid(), 10, 0).unwrap();
    assert!(r.max_residual <= 1e-4, "{}", r.max_residual);
    let abs2 = find_activation("abs2").unwrap();
    let r3 = check_network_invariant(&abs2, 1, InvariantKind::LaplacianPowerVanishes(3), &grid(), 10, 0).unwrap();
    assert!(r3.max_residual <= 1e-4, "{}", r3.max_residual);
    let r1 = check_network_invariant(&abs2, 1, InvariantKind::LaplacianPowerVanishes(1), &grid(), 10, 0).unwrap();
    assert!(r1.max_residual > 0.1, "{}", r1.max_residual);
}

#[test]
fn invariant_reports_are_reproducible() {
    let tanh = find_activation("tanh").unwrap();
    let run = || check_network_invariant(&tanh, 2, InvariantKind::DbarVanishes, &grid(), 5, 42).unwrap();
    let a = run();
    assert_eq!(a.to_json(), run().to_json());
    assert_eq!(a.config_echo, InvariantConfig::default());
    assert!(a.to_json().contains("\"dbar_vanishes\""));
}

#[test]
fn invariant_preconditions() {
    let sin = find_activation("sin").unwrap();
    let plane = make_grid(&[C64::new(0.0, 0.0), C64::new(0.0, 0.0)], 1.0, 3, &ExceptionalSet::empty()).unwrap();
    assert!(matches!(
        check_network_invariant(&sin, 1, InvariantKind::DbarVanishes, &plane, 1, 0),
        Err(Error::DimensionMismatch { .. })
    ));
    assert!(check_network_invariant(&sin, 1, InvariantKind::DbarVanishes, &grid(), 0, 0).is_err());
}

#[test]
fn floor_tables() {
    let ratio = find_activation("ratio").unwrap();
    let cone = Target::parse("cone").unwrap();
    let table = error_floor_experiment(&ratio, &cone, &[50, 100, 200], &unit_domain(), 0).unwrap();
    assert_eq!(table.rows.len(), 3);
    assert!(table.rows.iter().all(|r| r.sup_error >= 0.0 && r.l1_error >= 0.0));
    assert!(table.rows[2].sup_error <= 0.1, "{}", table.rows[2].sup_error);
    let csv = table.to_csv();
    assert!(csv.starts_with("width,sup_error,l1_error\n50,"));
    assert_eq!(csv.lines().count(), 4);
    assert_eq!(table.to_json(), error_floor_experiment(&ratio, &cone, &[50, 100, 200], &unit_domain(), 0).unwrap().to_json());

    let quadratic = Target::new("quadratic", |z| z[0] * z[0].conj() + z[0] * 2.0);
    let poly = error_floor_experiment(&ratio, &quadratic, &[200], &unit_domain(), 0).unwrap();
    assert!(poly.rows[0].sup_error <= 1e-2, "{}", poly.rows[0].sup_error);

    assert!(error_floor_experiment(&ratio, &cone, &[100, 50], &unit_domain(), 0).is_err());
}

#[test]
fn holomorphic_floor_is_higher() {
    let cone = Target::parse("cone").unwrap();
    let sin = error_floor_experiment(&find_activation("sin").unwrap(), &cone, &[50, 100, 200], &unit_domain(), 0).unwrap();
    let ratio = error_floor_experiment(&find_activation("ratio").unwrap(), &cone, &[200], &unit_domain(), 0).unwrap();
    assert!(sin.min_l1() >= 5.0 * ratio.rows[0].l1_error, "{} vs {}", sin.min_l1(), ratio.rows[0].l1_error);
}

#[test]
fn best_fits_of_holomorphic_activations_are_holomorphic() {
    let cone = Target::parse("cone").unwrap();
    for name in ["sin", "tanh"] {
        let v = holomorphy_of_best_fit(&find_activation(name).unwrap(), &cone, 50, &unit_domain(), 0).unwrap();
        assert!(v <= 1e-4, "{name}: {v}");
    }
    let r = holomorphy_of_best_fit(&find_activation("ratio").unwrap(), &cone, 50, &unit_domain(), 0);
    assert!(matches!(r, Err(Error::Precondition(_))));
}
