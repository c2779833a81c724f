use cvnn::complexcore::{catalog_names, monomial, random_disc_points, seeded_rng, ExceptionalSet, Piece};
use cvnn::{activation_catalog, find_activation, make_grid, Error, C32, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn catalog_values() {
    let ratio = find_activation("ratio").unwrap();
    assert_eq!(ratio.eval(c(1.0, 0.0)).unwrap(), c(0.5, 0.0));

    let e48 = find_activation("example_4_8").unwrap();
    assert_eq!(e48.eval(c(-1.0, 0.0)).unwrap(), c(0.0, 0.0));
    assert_eq!(e48.eval(c(-1.0, 1.0)).unwrap(), c(-1.0, 0.0));
    assert_eq!(e48.eval(c(2.0, 0.0)).unwrap(), c(2.0, 0.0));

    let zlog = find_activation("zlog").unwrap();
    assert_eq!(zlog.eval(c(1.0, 0.0)).unwrap(), c(0.0, 0.0));
    assert_eq!(zlog.eval(c(-2.0, 0.0)).unwrap(), c(0.0, 0.0));

    let abs2 = find_activation("abs2").unwrap();
    assert_eq!(abs2.eval(c(1.0, 2.0)).unwrap(), c(5.0, 0.0));
    let pz = find_activation("poly_zzbar").unwrap();
    assert_eq!(pz.eval(c(1.5, -3.0)).unwrap(), c(3.0, 0.0));
    let rho = find_activation("rho_c").unwrap();
    assert_eq!(rho.eval(c(-0.5, 4.0)).unwrap(), c(0.0, 0.0));
    assert_eq!(rho.eval(c(0.5, 4.0)).unwrap(), c(0.5, 0.0));
}

#[test]
fn catalog_metadata_is_consistent() {
    let names = catalog_names();
    for spec in activation_catalog() {
        assert!(names.contains(&spec.name));
        if spec.continuous {
            assert!(spec.discontinuity_set.is_empty(), "{}", spec.name);
        }
        for z in spec.discontinuity_set.probe_points(1.0, 0.0, 2) {
            assert!(spec.nonsmooth_set.distance(z) < 1e-12, "{}", spec.name);
        }
    }
    for required in ["ratio", "sigmoid_split", "zlog", "rho_c", "example_4_8", "tanh", "sin", "sinh", "conj_sin", "poly_zzbar", "abs2"] {
        assert!(names.contains(&required), "{required}");
    }
    assert_eq!(find_activation("nosuch"), Err(Error::UnknownActivation("nosuch".into())));
}

#[test]
fn tanh_pole_is_an_error() {
    let tanh = find_activation("tanh").unwrap();
    let pole = c(0.0, std::f64::consts::FRAC_PI_2);
    assert!(matches!(tanh.eval(pole), Err(Error::ActivationSingularity { .. })));
    assert!(tanh.pole_distance(c(0.0, 0.0)) > 1.5);
    assert!(tanh.eval(c(0.0, 1.0)).is_ok());
}

#[test]
fn zlog_stays_bounded_near_the_cut() {
    let zlog = find_activation("zlog").unwrap();
    for k in 1..=40 {
        let x = -0.1 * k as f64;
        let above = zlog.eval(c(x, 1e-9)).unwrap();
        let below = zlog.eval(c(x, -1e-9)).unwrap();
        assert!(above.norm() < 20.0 && below.norm() < 20.0);
    }
    let near_zero = zlog.eval(c(1e-8, 1e-8)).unwrap();
    assert!(near_zero.norm() < 1e-6);
}

#[test]
fn continuous_activations_have_small_jumps() {
    let mut rng = seeded_rng(11);
    for spec in activation_catalog().into_iter().filter(|s| s.continuous) {
        for z in random_disc_points(c(0.0, 0.0), 1.3, 50, &mut rng) {
            let h = c(1e-9, -1e-9);
            let jump = (spec.eval(z + h).unwrap() - spec.eval(z).unwrap()).norm();
            assert!(jump < 1e-6, "{} at {z}", spec.name);
        }
    }
}

#[test]
fn single_precision_matches_double() {
    let ratio = find_activation("ratio").unwrap();
    let z = C32::new(0.3, -0.4);
    let v = ratio.eval_t(z).unwrap();
    let w = ratio.eval(c(0.3, -0.4)).unwrap();
    assert!((v.re as f64 - w.re).abs() < 1e-6 && (v.im as f64 - w.im).abs() < 1e-6);
}

#[test]
fn three_point_grid_has_axes_and_centre() {
    let g = make_grid(&[c(0.0, 0.0)], 1.0, 3, &ExceptionalSet::empty()).unwrap();
    let pts = g.scalars().unwrap();
    for want in [c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)] {
        assert!(pts.contains(&want), "{want}");
    }
    assert_eq!(pts.len(), 5);
}

#[test]
fn grid_points_lie_in_ball() {
    let center = [c(0.5, -0.5), c(1.0, 2.0)];
    let g = make_grid(&center, 0.7, 5, &ExceptionalSet::empty()).unwrap();
    assert_eq!(g.dim(), 2);
    for p in g.iter() {
        let r2: f64 = p.iter().zip(&center).map(|(z, c0)| (z - c0).norm_sqr()).sum();
        assert!(r2.sqrt() <= 0.7 * (1.0 + 1e-12));
    }
}

#[test]
fn grid_avoids_declared_set() {
    let avoid = ExceptionalSet::from_pieces(vec![Piece::real_axis()]);
    let g = make_grid(&[c(0.0, 0.0)], 1.0, 9, &avoid).unwrap();
    assert!(!g.is_empty());
    for &z in g.scalars().unwrap() {
        assert!(z.im.abs() >= g.guard());
    }
}

#[test]
fn grid_rejects_bad_arguments() {
    let none = ExceptionalSet::empty();
    assert!(matches!(make_grid(&[c(0.0, 0.0)], 1.0, 1, &none), Err(Error::InvalidArgument(_))));
    assert!(matches!(make_grid(&[c(0.0, 0.0)], -1.0, 5, &none), Err(Error::InvalidArgument(_))));
    assert!(matches!(make_grid(&[], 1.0, 5, &none), Err(Error::InvalidArgument(_))));
}

#[test]
fn grids_and_draws_are_deterministic() {
    let none = ExceptionalSet::empty();
    assert_eq!(make_grid(&[c(0.1, 0.2)], 2.0, 7, &none).unwrap(), make_grid(&[c(0.1, 0.2)], 2.0, 7, &none).unwrap());
    let a = random_disc_points(c(0.0, 0.0), 1.0, 10, &mut seeded_rng(3));
    let b = random_disc_points(c(0.0, 0.0), 1.0, 10, &mut seeded_rng(3));
    assert_eq!(a, b);
    assert!(a.iter().all(|z| z.norm() <= 1.0));
}

#[test]
fn monomial_matches_powers() {
    let z = c(0.7, -1.1);
    let expected = z * z * z.conj();
    assert!((monomial(z, 2, 1) - expected).norm() < 1e-14);
    assert_eq!(monomial(z, 0, 0), c(1.0, 0.0));
}
