use cvnn::complexcore::{random_disc_points, seeded_rng};
use cvnn::network::{compose, eval_shallow, lift_affine, linear_combination, linear_combine, pass_through, restrict_line, CMatrix, Layer};
use cvnn::verify::random_network;
use cvnn::{find_activation, Error, Network, Network32, Shallow, ShallowNetwork, C64};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn scalar_net(a0: C64, b0: C64, a1: C64, b1: C64) -> Network {
    let l0 = Layer::new(CMatrix::from_dense(1, 1, &[a0]).unwrap(), vec![b0]).unwrap();
    let l1 = Layer::new(CMatrix::from_dense(1, 1, &[a1]).unwrap(), vec![b1]).unwrap();
    Network::new(1, vec![l0, l1]).unwrap()
}

#[test]
fn evaluation_examples() {
    let ratio = find_activation("ratio").unwrap();
    let one = scalar_net(c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
    assert_eq!(one.eval(&ratio, &[c(1.0, 0.0)]).unwrap(), c(0.5, 0.0));
    let two = compose(&one, &one).unwrap();
    assert_eq!(two.hidden_layers(), 2);
    assert!((two.eval(&ratio, &[c(1.0, 0.0)]).unwrap() - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
    let flat = scalar_net(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(7.0, 2.0));
    for z in [c(0.0, 0.0), c(3.0, -1.0)] {
        assert_eq!(flat.eval(&ratio, &[z]).unwrap(), c(7.0, 2.0));
    }
}

#[test]
fn shallow_examples() {
    let abs2 = find_activation("abs2").unwrap();
    let mut s = Shallow::constant(1, c(0.0, 0.0));
    s.push(c(1.0, 0.0), vec![c(1.0, 0.0)], c(0.0, 0.0));
    assert_eq!(eval_shallow(&s, &abs2, &[c(2.0, 0.0)]).unwrap(), c(4.0, 0.0));
    let five = Shallow::constant(1, c(5.0, 0.0));
    assert_eq!(five.eval(&abs2, &[c(-1.0, 9.0)]).unwrap(), c(5.0, 0.0));
    s.push(c(-1.0, 0.0), vec![c(1.0, 0.0)], c(0.0, 0.0));
    for z in [c(0.3, 0.1), c(-2.0, 5.0)] {
        assert_eq!(s.eval(&abs2, &[z]).unwrap(), c(0.0, 0.0));
        assert_eq!(s.to_network().eval(&abs2, &[z]).unwrap(), c(0.0, 0.0));
    }
}

#[test]
fn shallow_to_network_agrees() {
    let ratio = find_activation("ratio").unwrap();
    let mut s = ShallowNetwork::constant(2, c(0.5, -0.5));
    s.push(c(1.0, 2.0), vec![c(0.3, 0.1), c(-1.0, 0.0)], c(0.2, 0.0));
    s.push(c(-0.4, 0.0), vec![c(0.0, 1.0), c(0.5, 0.5)], c(0.0, -0.3));
    let net = s.to_network();
    assert_eq!(net.hidden_layers(), 1);
    let mut rng = seeded_rng(1);
    for _ in 0..20 {
        let z = random_disc_points(c(0.0, 0.0), 2.0, 2, &mut rng);
        assert!((net.eval(&ratio, &z).unwrap() - s.eval(&ratio, &z).unwrap()).norm() < 1e-14);
    }
}

#[test]
fn trivial_combinations() {
    let ratio = find_activation("ratio").unwrap();
    let mut rng = seeded_rng(2);
    let t1 = random_network(&mut rng, 2, 2, 3, 1.0).unwrap();
    let t2 = random_network(&mut rng, 2, 2, 4, 1.0).unwrap();
    let keep = linear_combine(&t1, &t2, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
    let half = linear_combine(&t1, &t1, c(0.5, 0.0), c(0.5, 0.0)).unwrap();
    let mixed = linear_combine(&t1, &t2, c(2.0, 0.0), c(0.0, -1.0)).unwrap();
    let many = linear_combination(&[&t1, &t2, &t1], &[c(1.0, 0.0), c(0.0, -1.0), c(1.0, 0.0)], c(0.5, 0.0)).unwrap();
    for _ in 0..100 {
        let z = random_disc_points(c(0.0, 0.0), 1.0, 2, &mut rng);
        let v1 = t1.eval(&ratio, &z).unwrap();
        let v2 = t2.eval(&ratio, &z).unwrap();
        assert!((keep.eval(&ratio, &z).unwrap() - v1).norm() < 1e-12);
        assert!((half.eval(&ratio, &z).unwrap() - v1).norm() < 1e-12);
        assert!((mixed.eval(&ratio, &z).unwrap() - (v1 * 2.0 - c(0.0, 1.0) * v2)).norm() < 1e-12);
        assert!((many.eval(&ratio, &z).unwrap() - (v1 * 2.0 - c(0.0, 1.0) * v2 + 0.5)).norm() < 1e-12);
    }
}

#[test]
fn combination_preconditions() {
    let mut rng = seeded_rng(3);
    let shallow = random_network(&mut rng, 1, 1, 3, 1.0).unwrap();
    let deep = random_network(&mut rng, 1, 2, 3, 1.0).unwrap();
    let wide = random_network(&mut rng, 2, 1, 3, 1.0).unwrap();
    let one = c(1.0, 0.0);
    assert_eq!(linear_combine(&shallow, &deep, one, one).unwrap_err(), Error::DepthMismatch { left: 1, right: 2 });
    assert!(matches!(linear_combine(&shallow, &wide, one, one), Err(Error::DimensionMismatch { .. })));
    assert!(matches!(compose(&wide, &shallow), Err(Error::DimensionMismatch { .. })));
    assert!(matches!(lift_affine(&wide, &[one], one), Err(Error::DimensionMismatch { .. })));
    assert!(matches!(restrict_line(&wide, &[one], &[one, one]), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn compose_with_constant_inner() {
    let sigma = find_activation("sin").unwrap();
    let mut rng = seeded_rng(4);
    let outer = random_network(&mut rng, 1, 2, 3, 1.0).unwrap();
    let zero = scalar_net(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
    let net = compose(&outer, &zero).unwrap();
    assert_eq!(net.hidden_layers(), 3);
    let expect = outer.eval(&sigma, &[c(0.0, 0.0)]).unwrap();
    for z in [c(0.2, 0.1), c(-1.0, 0.4)] {
        assert!((net.eval(&sigma, &[z]).unwrap() - expect).norm() < 1e-14);
    }
}

#[test]
fn lift_and_restrict_examples() {
    let sigma = find_activation("tanh").unwrap();
    let mut rng = seeded_rng(5);
    let phi = random_network(&mut rng, 1, 2, 3, 0.5).unwrap();
    let e1 = lift_affine(&phi, &[c(1.0, 0.0), c(0.0, 0.0)], c(0.0, 0.0)).unwrap();
    let flat = lift_affine(&phi, &[c(0.0, 0.0), c(0.0, 0.0)], c(0.3, -0.1)).unwrap();
    let same = restrict_line(&phi, &[c(1.0, 0.0)], &[c(0.0, 0.0)]).unwrap();
    let psi = random_network(&mut rng, 2, 2, 3, 0.5).unwrap();
    let point = restrict_line(&psi, &[c(0.0, 0.0), c(0.0, 0.0)], &[c(0.1, 0.2), c(-0.3, 0.0)]).unwrap();
    let at_b = psi.eval(&sigma, &[c(0.1, 0.2), c(-0.3, 0.0)]).unwrap();
    let phi_b = phi.eval(&sigma, &[c(0.3, -0.1)]).unwrap();
    for z in random_disc_points(c(0.0, 0.0), 1.0, 20, &mut rng) {
        let w = [z, c(0.7, 0.7) * z];
        assert!((e1.eval(&sigma, &w).unwrap() - phi.eval(&sigma, &[z]).unwrap()).norm() < 1e-14);
        assert!((flat.eval(&sigma, &w).unwrap() - phi_b).norm() < 1e-14);
        assert!((same.eval(&sigma, &[z]).unwrap() - phi.eval(&sigma, &[z]).unwrap()).norm() < 1e-14);
        assert!((point.eval(&sigma, &[z]).unwrap() - at_b).norm() < 1e-14);
    }
}

#[test]
fn lift_then_restrict_round_trip() {
    let sigma = find_activation("ratio").unwrap();
    let mut rng = seeded_rng(6);
    let phi = random_network(&mut rng, 1, 2, 4, 1.0).unwrap();
    let a = [c(0.5, 0.5), c(-1.0, 0.2), c(0.0, 1.0)];
    let b0 = c(0.1, 0.0);
    let lifted = lift_affine(&phi, &a, b0).unwrap();
    let u = [c(0.2, 0.0), c(0.0, 0.3), c(-0.1, 0.1)];
    let v = [c(0.0, 0.0), c(0.4, 0.0), c(0.0, 0.0)];
    let back = restrict_line(&lifted, &u, &v).unwrap();
    let slope: C64 = a.iter().zip(&u).map(|(x, y)| x * y).sum();
    let shift: C64 = b0 + a.iter().zip(&v).map(|(x, y)| x * y).sum::<C64>();
    for z in random_disc_points(c(0.0, 0.0), 1.0, 50, &mut rng) {
        let direct = phi.eval(&sigma, &[slope * z + shift]).unwrap();
        assert!((back.eval(&sigma, &[z]).unwrap() - direct).norm() < 1e-13);
    }
}

#[test]
fn composition_is_associative() {
    let sigma = find_activation("ratio").unwrap();
    let mut rng = seeded_rng(7);
    let f = random_network(&mut rng, 1, 1, 3, 1.0).unwrap();
    let g = random_network(&mut rng, 1, 2, 2, 1.0).unwrap();
    let h = random_network(&mut rng, 2, 1, 3, 1.0).unwrap();
    let left = compose(&compose(&f, &g).unwrap(), &h).unwrap();
    let right = compose(&f, &compose(&g, &h).unwrap()).unwrap();
    assert_eq!(left.hidden_layers(), 4);
    assert_eq!(left.widths(), right.widths());
    for _ in 0..50 {
        let z = random_disc_points(c(0.0, 0.0), 1.0, 2, &mut rng);
        assert!((left.eval(&sigma, &z).unwrap() - right.eval(&sigma, &z).unwrap()).norm() < 1e-13);
    }
}

#[test]
fn pass_through_is_sigma() {
    let sigma = find_activation("sinh").unwrap();
    let id: Network = pass_through();
    for z in [c(0.3, 0.4), c(-1.0, 2.0)] {
        assert_eq!(id.eval(&sigma, &[z]).unwrap(), z.sinh());
    }
}

#[test]
fn json_round_trip_is_bit_exact() {
    let mut rng = seeded_rng(8);
    let net = random_network(&mut rng, 2, 3, 4, 1.7).unwrap();
    let text = net.to_json();
    let back = Network::from_json(&text).unwrap();
    assert_eq!(back, net);
    assert_eq!(back.to_json(), text);
    assert!(Network::from_json("{\"format\":1}").is_err());
    let tampered = text.replacen("\"L\":3", "\"L\":2", 1);
    assert!(matches!(Network::from_json(&tampered), Err(Error::Format(_))));
}

#[test]
fn single_precision_network() {
    let sigma = find_activation("ratio").unwrap();
    let mut rng = seeded_rng(9);
    let net = random_network(&mut rng, 1, 2, 3, 1.0).unwrap();
    let small: Network32 = net.cast();
    let z = c(0.3, -0.2);
    let v64 = net.eval(&sigma, &[z]).unwrap();
    let v32 = small.eval(&sigma, &[cvnn::C32::new(0.3, -0.2)]).unwrap();
    assert!((v64.re - v32.re as f64).abs() < 1e-5 && (v64.im - v32.im as f64).abs() < 1e-5);
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn algebra_matches_sequential_evaluation(
        seed in 0u64..1000,
        depth in 1usize..4,
        width in 1usize..5,
        alpha in complex(),
        beta in complex(),
        z in complex(),
        w in complex(),
    ) {
        let sigma = find_activation("ratio").unwrap();
        let mut rng = seeded_rng(seed);
        let t1 = random_network(&mut rng, 2, depth, width, 1.0).unwrap();
        let t2 = random_network(&mut rng, 2, depth, width + 1, 1.0).unwrap();
        let outer = random_network(&mut rng, 1, depth, width, 1.0).unwrap();
        let p = [z, w];
        let v1 = t1.eval(&sigma, &p).unwrap();
        let v2 = t2.eval(&sigma, &p).unwrap();
        let sum = linear_combine(&t1, &t2, alpha, beta).unwrap().eval(&sigma, &p).unwrap();
        prop_assert!((sum - (alpha * v1 + beta * v2)).norm() < 1e-12);
        let comp = compose(&outer, &t1).unwrap();
        prop_assert_eq!(comp.hidden_layers(), 2 * depth);
        prop_assert!((comp.eval(&sigma, &p).unwrap() - outer.eval(&sigma, &[v1]).unwrap()).norm() < 1e-12);
        let line = restrict_line(&t1, &[alpha, beta], &[w, z]).unwrap();
        prop_assert!((line.eval(&sigma, &[z]).unwrap() - t1.eval(&sigma, &[alpha * z + w, beta * z + z]).unwrap()).norm() < 1e-12);
    }
}
