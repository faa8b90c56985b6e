use lohe_core::diagnostics::real_matrix_diameter;
use lohe_core::dynamics::{integrate, lt_rhs, lt_rhs_pairwise, EnsembleState, IntegratorOptions, LtFlow};
use lohe_core::models::generate::{
    random_dims, random_real_symbol, random_special_orthogonal, random_symbol, random_unit_tensor, random_unit_vector,
    rng_from_seed,
};
use lohe_core::models::{pauli_decode, pauli_encode, PauliCoordinates, SphereSo};
use lohe_core::symbol::{shuffle_symbol, validate_symbol};
use lohe_core::tensor::{
    coupling_increment, frobenius_inner, shuffle, tensor_product, Bitstring, DenseTensor, Permutation, SizeVector,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn inner_product_is_multiplicative(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let s1 = SizeVector::new(random_dims(&mut rng, 2, 3).into_iter().chain([2]).collect()).unwrap();
        let s2 = SizeVector::new(random_dims(&mut rng, 2, 3)).unwrap();
        let (a, b) = (random_unit_tensor(&mut rng, &s1), random_unit_tensor(&mut rng, &s1));
        let (c, d) = (random_unit_tensor(&mut rng, &s2), random_unit_tensor(&mut rng, &s2));
        let lhs = frobenius_inner(&tensor_product(&a, &c), &tensor_product(&b, &d)).unwrap();
        let rhs = frobenius_inner(&a, &b).unwrap() * frobenius_inner(&c, &d).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn coupling_increment_is_norm_neutral(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let size = SizeVector::new(random_dims(&mut rng, 3, 3)).unwrap();
        let tj = random_unit_tensor(&mut rng, &size);
        let partner = random_unit_tensor(&mut rng, &size).scale(lohe_core::tensor::C64::new(rng.random::<f64>() * 2.0, 0.0));
        for pattern in Bitstring::all(size.rank()) {
            let inc = coupling_increment(&partner, &tj, &pattern, 1.3).unwrap();
            prop_assert!(frobenius_inner(&tj, &inc).unwrap().re.abs() < 1e-14);
        }
    }

    #[test]
    fn shuffles_compose_as_a_group_action(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let m = rng.random_range(1..=4);
        let dims: Vec<usize> = (0..m).map(|_| rng.random_range(1..=3)).collect();
        let t = random_unit_tensor(&mut rng, &SizeVector::new(dims.clone()).unwrap());
        let perms = Permutation::all(m);
        let sigma = &perms[rng.random_range(0..perms.len())];
        let tau = &perms[rng.random_range(0..perms.len())];
        let composed = shuffle(&t, &sigma.compose(tau).unwrap()).unwrap();
        let stepwise = shuffle(&shuffle(&t, tau).unwrap(), sigma).unwrap();
        prop_assert_eq!(composed, stepwise);
        prop_assert_eq!(shuffle(&shuffle(&t, sigma).unwrap(), &sigma.inverse()).unwrap(), t.clone());

        let c = random_symbol(&mut rng, &dims, 2, 1.0, 1.0).unwrap();
        let back = shuffle_symbol(&shuffle_symbol(&c, sigma).unwrap(), &sigma.inverse()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn mean_field_matches_pairwise(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let dims = random_dims(&mut rng, 2, 3);
        let n = rng.random_range(1..=5);
        let c = random_symbol(&mut rng, &dims, n, 1.0, 2.0).unwrap();
        let state = EnsembleState::initial(&c);
        let fast = lt_rhs(&c, &state).unwrap();
        let slow = lt_rhs_pairwise(&c, &state).unwrap();
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert!(a.sub(b).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn pauli_round_trip(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let x = random_unit_vector(&mut rng, 4);
        let p = PauliCoordinates { theta: rng.random_range(-10.0..10.0), x: [x[0], x[1], x[2], x[3]] };
        let u = pauli_encode(&p);
        prop_assert!((u.adjoint() * &u - DMatrix::identity(2, 2)).norm() < 1e-14);
        let back = pauli_decode(&u).unwrap();
        prop_assert!((pauli_encode(&back) - &u).norm() < 1e-12);
        // Same point up to the (theta, x) ~ (theta + pi, -x) identification.
        let dtheta = (back.theta - p.theta).rem_euclid(std::f64::consts::PI);
        prop_assert!(dtheta.min(std::f64::consts::PI - dtheta) < 1e-10);
        prop_assert!(validate_symbol(&random_symbol(&mut rng, &[2], 2, 1.0, 1.0).unwrap()).is_valid());
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn real_symbols_stay_real(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let dims = [vec![3], vec![2, 2]][rng.random_range(0..2)].clone();
        let couplings: Vec<f64> = (0..1 << dims.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c = random_real_symbol(&mut rng, &dims, 3, 1.0, &couplings).unwrap();
        prop_assert!(c.is_real());
        let flow = LtFlow::new(&c);
        let traj = integrate(|_, y: &Vec<DenseTensor>| flow.rhs(y), c.initial().to_vec(), &IntegratorOptions::new(1e-2, 10.0).sample_every(50)).unwrap();
        let worst = traj.states.iter().flatten().fold(0.0f64, |m, t| m.max(t.max_imag()));
        prop_assert!(worst <= 1e-10);
    }
}

#[test]
fn sphere_and_matrix_flows_are_tangent() {
    let mut rng = rng_from_seed(11);
    for _ in 0..50 {
        let n = 4;
        let x: Vec<DVector<f64>> = (0..n).map(|_| random_unit_vector(&mut rng, 3)).collect();
        let u: Vec<DMatrix<f64>> = (0..n).map(|_| random_special_orthogonal(&mut rng, 3)).collect();
        let model = SphereSo {
            omegas: (0..n).map(|_| lohe_core::models::generate::random_skew(&mut rng, 3, 1.0)).collect(),
            amats: (0..n).map(|_| lohe_core::models::generate::random_skew(&mut rng, 3, 1.0)).collect(),
            coupling: 1.7,
        };
        let (dx, du) = model.rhs(&(x.clone(), u.clone()));
        for j in 0..n {
            assert!(x[j].dot(&dx[j]).abs() < 1e-12);
            assert!((&du[j] * u[j].transpose() + &u[j] * du[j].transpose()).norm() < 1e-12);
        }
    }
}

#[test]
fn so3_diameter_identity() {
    let mut rng = rng_from_seed(3);
    for _ in 0..20 {
        let u = [random_special_orthogonal(&mut rng, 3), random_special_orthogonal(&mut rng, 3)];
        let d = real_matrix_diameter(&u);
        let tr = (&u[0] * u[1].transpose()).trace();
        assert!((d * d - 2.0 * (3.0 - tr)).abs() < 1e-12);
    }
}

/// Central differences of h_ij and G_ij along a trajectory against the
/// closed-form overlap rates.
#[test]
fn overlap_rates_match_finite_differences() {
    let mut rng = rng_from_seed(21);
    let n = 4;
    let model = SphereSo {
        omegas: (0..n).map(|_| lohe_core::models::generate::random_skew(&mut rng, 3, 1.0)).collect(),
        amats: (0..n).map(|_| lohe_core::models::generate::random_skew(&mut rng, 3, 1.0)).collect(),
        coupling: 1.5,
    };
    let x0: Vec<DVector<f64>> = (0..n).map(|_| random_unit_vector(&mut rng, 3)).collect();
    let u0: Vec<DMatrix<f64>> = (0..n).map(|_| random_special_orthogonal(&mut rng, 3)).collect();
    let h = 1e-3;
    let traj = integrate(
        |_, y: &(Vec<DVector<f64>>, Vec<DMatrix<f64>>)| Ok(model.rhs(y)),
        (x0, u0),
        &IntegratorOptions::new(h, 2.0),
    )
    .unwrap();
    let overlaps: Vec<_> = traj.states.iter().map(lohe_core::models::sphere_so::Overlaps::of).collect();
    let (mut worst_h, mut worst_g): (f64, f64) = (0.0, 0.0);
    for k in (1..traj.states.len() - 1).step_by(97) {
        let (hdot, gdot) = model.overlap_rates(&traj.states[k]);
        let fd_h = (&overlaps[k + 1].h - &overlaps[k - 1].h) / (2.0 * h);
        worst_h = worst_h.max((fd_h - hdot).amax());
        for i in 0..n {
            for j in 0..n {
                let fd = (&overlaps[k + 1].big_g[i][j] - &overlaps[k - 1].big_g[i][j]) / (2.0 * h);
                worst_g = worst_g.max((fd - &gdot[i][j]).amax());
            }
        }
    }
    assert!(worst_h <= 1e-4, "h rates off by {worst_h}");
    assert!(worst_g <= 1e-4, "G rates off by {worst_g}");
}
