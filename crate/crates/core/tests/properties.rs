use dirac2c::dirac::{free_mode_propagator, propagate_strang};
use dirac2c::physics::{free_eigenbasis, h1d, lambda_of};
use dirac2c::smallmass::{propagate_smallmass, smallmass_phase};
use dirac2c::tcl::tcl_free_factor;
use dirac2c::*;
use proptest::prelude::*;

fn unit() -> PhysicsParams {
    PhysicsParams::new(1.0, 1.0, 1.0).unwrap()
}

fn field_strategy(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b)), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_round_trip_and_parseval(values in field_strategy(64)) {
        let g = make_grid(64, -3.0, 5.0).unwrap();
        let u = UpperField::new(&g, values).unwrap();
        let coeffs = u.to_momentum();
        let back = UpperField::to_position(&g, &coeffs).unwrap();
        prop_assert!(back.distance(&u).unwrap() < 1e-12);
        let spectral: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        let direct: f64 = u.values().iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((spectral - direct).abs() < 1e-12 * direct.max(1.0));
    }

    #[test]
    fn momentum_operator_is_linear(a in field_strategy(32), b in field_strategy(32), s in -2.0f64..2.0) {
        let g = make_grid(32, -4.0, 4.0).unwrap();
        let ua = UpperField::new(&g, a).unwrap();
        let ub = UpperField::new(&g, b).unwrap();
        let z = Complex64::new(s, 0.5);
        let lhs = ua.axpy(z, &ub).unwrap().apply_p();
        let rhs = ua.apply_p().axpy(z, &ub.apply_p()).unwrap();
        prop_assert!(lhs.distance(&rhs).unwrap() < 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn packets_are_normalized(x0 in 1.0f64..12.0, p0 in -1.5f64..1.5, xc in -5.0f64..5.0) {
        let g = make_grid(1024, -30.0, 30.0).unwrap();
        let u = gaussian_packet(&g, x0, p0, xc).unwrap();
        prop_assert!((u.norm_sq() - 1.0).abs() < 1e-8);
        prop_assert!(u.boundary_tail() <= 1e-8);
    }

    #[test]
    fn eigenbasis_orthonormal_and_even(p in -20.0f64..20.0, m in 0.0f64..3.0, c in 0.2f64..3.0) {
        let params = PhysicsParams::new(m, c, 1.0).unwrap();
        let b = free_eigenbasis(p, &params);
        let h = h1d(p, &params);
        prop_assert!((b.u_plus.norm() - 1.0).abs() < 1e-12);
        prop_assert!((b.u_minus.norm() - 1.0).abs() < 1e-12);
        prop_assert!(b.u_plus.dot(&b.u_minus).abs() < 1e-12);
        let scale = 1.0 + b.lambda;
        prop_assert!((h * b.u_plus - b.u_plus * b.lambda).norm() < 1e-12 * scale);
        prop_assert!((h * b.u_minus + b.u_minus * b.lambda).norm() < 1e-12 * scale);
        prop_assert_eq!(lambda_of(p, &params), lambda_of(-p, &params));
    }

    #[test]
    fn mode_propagator_is_unitary(p in -10.0f64..10.0, t in -20.0f64..20.0) {
        let u = free_mode_propagator(p, t, &unit());
        let defect = (u.adjoint() * u - nalgebra::Matrix2::identity()).norm();
        prop_assert!(defect < 1e-12);
    }

    #[test]
    fn smallmass_phase_unimodular_and_even(p in -5.0f64..5.0, t in 0.0f64..20.0, m in 0.0f64..0.2) {
        let params = PhysicsParams::new(m, 1.0, 1.0).unwrap();
        let z = smallmass_phase(p, t, &params);
        prop_assert!((z.norm() - 1.0).abs() < 1e-14);
        prop_assert!((z - smallmass_phase(-p, t, &params)).norm() < 1e-14);
    }

    #[test]
    fn tcl_factor_envelope(p in -4.0f64..4.0, t in 0.0f64..10.0, m in 0.5f64..2.0) {
        let params = PhysicsParams::new(m, 1.0, 1.0).unwrap();
        let f = tcl_free_factor(p, t, &params);
        let mc2 = params.rest_energy();
        let envelope = (-(p * p / (2.0 * mc2 * mc2 / (params.c * params.c))) * (mc2 * t).sin().powi(2)).exp();
        prop_assert!(f.norm() <= 1.0 + 1e-14);
        prop_assert!((f.norm() - envelope).abs() < 1e-12);
    }

    #[test]
    fn strang_conserves_norm(a in -0.2f64..0.2, p0 in -0.5f64..0.5, steps in 1usize..40) {
        let g = make_grid(256, -30.0, 30.0).unwrap();
        let psi = SpinorField::from_upper(gaussian_packet(&g, 10.0, p0, 0.0).unwrap());
        let out = propagate_strang(&psi, 0.05, steps, &PotentialSpec::Linear { a }, &unit()).unwrap();
        prop_assert!((out.norm_sq() - 1.0).abs() < 1e-10);
        let mut rec = DensityRecord::new(&g);
        rec.push_spinor(0.05 * steps as f64, &out).unwrap();
        prop_assert!(rec.q_density[0].iter().all(|&v| v >= 0.0));
        let leak = total_leakage(&rec, 0);
        prop_assert!((-1e-12..=1.0).contains(&leak));
        prop_assert!(rec.norm_partition_defect() < 1e-10);
    }

    #[test]
    fn smallmass_preserves_norm(m in 0.0f64..0.2, p0 in -1.0f64..1.0, t in 0.0f64..10.0) {
        let g = make_grid(256, -30.0, 30.0).unwrap();
        let params = PhysicsParams::new(m, 1.0, 1.0).unwrap();
        let u = gaussian_packet(&g, 10.0, p0, 0.0).unwrap();
        let out = propagate_smallmass(&u, t, &PotentialSpec::Zero, &params).unwrap();
        prop_assert!((out.norm_sq() - u.norm_sq()).abs() < 1e-12);
    }

    #[test]
    fn scaled_record_distance(scale in 0.1f64..5.0) {
        let g = make_grid(64, -10.0, 10.0).unwrap();
        let u = gaussian_packet(&g, 4.0, 0.0, 0.0).unwrap();
        let mut a = DensityRecord::new(&g);
        let mut b = DensityRecord::new(&g);
        a.push(0.0, &u, &u).unwrap();
        b.push(0.0, &u, &u.scale(Complex64::new(scale.sqrt(), 0.0))).unwrap();
        let m = compare_densities(&a, &b).unwrap();
        prop_assert!((m.normalized_l2 - (scale - 1.0).abs()).abs() < 1e-12);
    }
}
