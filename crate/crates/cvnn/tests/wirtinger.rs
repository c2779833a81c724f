use approx::assert_abs_diff_eq;
use cvnn::complexcore::{random_disc_points, seeded_rng};
use cvnn::wirtinger::{laplacian_power, mollify, wirtinger_derivative, wirtinger_jet, MollifierSpec, RingStencil, StencilConfig};
use cvnn::{find_activation, Error, Result, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

#[test]
fn jet_of_identity() {
    let f = |z: C64| Ok(z);
    let jet = wirtinger_jet(&f, c(0.3, 0.7), 1, 1, &StencilConfig::default()).unwrap();
    assert!(close(jet.get(1, 0).unwrap(), c(1.0, 0.0), 1e-10));
    assert!(close(jet.get(0, 1).unwrap(), c(0.0, 0.0), 1e-10));
    assert_eq!(jet.get(0, 0).unwrap(), c(0.3, 0.7));
    assert!(jet.get(2, 0).is_none());
}

#[test]
fn jet_of_zzbar() {
    let f = |z: C64| Ok(z * z.conj());
    for z0 in [c(0.0, 0.0), c(1.5, -2.0), c(-0.2, 0.4)] {
        let jet = wirtinger_jet(&f, z0, 1, 1, &StencilConfig::default()).unwrap();
        assert!(close(jet.get(1, 1).unwrap(), c(1.0, 0.0), 1e-8));
        assert!(close(jet.get(1, 0).unwrap(), z0.conj(), 1e-8));
    }
}

#[test]
fn jet_of_mixed_monomial() {
    let f = |z: C64| Ok(z * z * z.conj().powu(3));
    let v = wirtinger_derivative(&f, c(1.0, 0.0), 2, 3, &StencilConfig::for_order(5)).unwrap();
    assert!(close(v, c(12.0, 0.0), 1e-4 * 12.0), "{v}");
}

#[test]
fn jet_of_sin_at_origin() {
    let f = |z: C64| Ok(z.sin());
    let jet = wirtinger_jet(&f, c(0.0, 0.0), 1, 1, &StencilConfig::for_order(2)).unwrap();
    assert!(close(jet.get(0, 1).unwrap(), c(0.0, 0.0), 1e-10));
    assert!(close(jet.get(1, 0).unwrap(), c(1.0, 0.0), 1e-8));
}

#[test]
fn conjugation_swaps_orders() {
    let f = |z: C64| Ok(z.exp() * z.conj() + z * z);
    let g = |z: C64| f(z).map(|v| v.conj());
    let z0 = c(0.4, -0.3);
    let cfg = StencilConfig::for_order(4);
    let jf = wirtinger_jet(&f, z0, 2, 2, &cfg).unwrap();
    let jg = wirtinger_jet(&g, z0, 2, 2, &cfg).unwrap();
    for ((m, l), v) in jg.entries() {
        assert!(close(v, jf.get(l, m).unwrap().conj(), 1e-6), "({m},{l})");
    }
}

#[test]
fn holomorphic_functions_have_vanishing_dbar() {
    let mut rng = seeded_rng(7);
    let f = |z: C64| Ok(z.exp() * z.cos() + z.powu(3));
    for z0 in random_disc_points(c(0.0, 0.0), 1.0, 20, &mut rng) {
        let v = wirtinger_derivative(&f, z0, 0, 1, &StencilConfig::for_order(1)).unwrap();
        assert!(v.norm() < 1e-8, "{z0}: {v}");
    }
}

#[test]
fn laplacian_examples() {
    let cfg1 = StencilConfig::for_order(2);
    let abs2 = |z: C64| Ok(C64::new(z.norm_sqr(), 0.0));
    for z0 in [c(0.0, 0.0), c(1.0, 1.0), c(-3.0, 0.5)] {
        assert!(close(laplacian_power(&abs2, 1, z0, &cfg1).unwrap(), c(4.0, 0.0), 1e-6));
    }
    let abs4 = |z: C64| Ok(C64::new(z.norm_sqr().powi(2), 0.0));
    let v = laplacian_power(&abs4, 2, c(0.3, -0.2), &StencilConfig::for_order(4)).unwrap();
    assert!(close(v, c(64.0, 0.0), 64.0 * 1e-4), "{v}");
    let re = |z: C64| Ok(C64::new(z.re, 0.0));
    assert!(laplacian_power(&re, 1, c(0.5, 0.5), &cfg1).unwrap().norm() < 1e-8);
    assert!(matches!(laplacian_power(&re, 0, c(0.0, 0.0), &cfg1), Err(Error::InvalidArgument(_))));
}

#[test]
fn singular_samples_propagate() {
    let f = |z: C64| -> Result<C64> {
        if z.norm() < 1e-3 {
            Err(Error::ActivationSingularity { re: z.re, im: z.im })
        } else {
            Ok(z.inv())
        }
    };
    assert!(wirtinger_jet(&f, c(0.0, 0.0), 1, 1, &StencilConfig::default()).is_err());
}

#[test]
fn ring_stencil_recovers_monomial_coefficients() {
    let g = |z: C64| Ok(c(2.0, -1.0) * z * z * z.conj() + z.exp());
    let s = RingStencil::with_defaults(2, 1, 0.5, 3).unwrap();
    let v = s.apply(&g, c(0.0, 0.0)).unwrap();
    assert!(close(v, c(2.0, -1.0) * 2.0, 1e-6), "{v}");
    let s = RingStencil::with_defaults(3, 0, 0.5, 3).unwrap();
    let v = s.apply(&g, c(0.0, 0.0)).unwrap();
    assert!(close(v, c(1.0, 0.0), 1e-6), "{v}");
}

#[test]
fn mollifier_kernel_properties() {
    let spec = MollifierSpec::new(0.1, 64).unwrap();
    let mass: f64 = spec.nodes().iter().map(|(_, w)| w).sum();
    assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-6);
    assert_eq!(spec.kernel(c(0.1, 0.0)), 0.0);
    assert_eq!(spec.kernel(c(0.08, 0.08)), 0.0);
    assert!(spec.kernel(c(0.0, 0.0)) > 0.0);
    assert!(MollifierSpec::new(-1.0, 64).is_err());
}

#[test]
fn mollified_affine_is_unchanged() {
    let id = find_activation("identity").unwrap();
    let m = mollify(&id, MollifierSpec::new(0.2, 48).unwrap());
    for z in [c(0.0, 0.0), c(1.0, -2.0), c(-0.3, 0.9)] {
        assert!(close(m.eval(z).unwrap(), z, 1e-10));
    }
}

#[test]
fn mollified_rho_c() {
    let rho = find_activation("rho_c").unwrap();
    let eps = 0.1;
    let m = mollify(&rho, MollifierSpec::new(eps, 64).unwrap());
    let v = m.eval(c(0.5, 0.3)).unwrap();
    assert!(close(v, c(0.5, 0.0), 1e-10));
    let at_zero = m.eval(c(0.0, 0.0)).unwrap();
    assert!(at_zero.re > 0.0 && at_zero.re < eps && at_zero.im.abs() < 1e-15);

    let fine = mollify(&rho, MollifierSpec::new(eps, 256).unwrap());
    assert!((fine.eval(c(0.0, 0.0)).unwrap() - at_zero).norm() < 1e-4);
}
