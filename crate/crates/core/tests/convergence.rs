use dirac2c::diagnostics::mirror_defect;
use dirac2c::dirac::{propagate_exact_free, propagate_strang, DenseDiracOracle};
use dirac2c::tcl::{reconstruct_q, tcl_free_solution, GuardPolicy, TclOperator, TclStepper};
use dirac2c::*;

fn unit() -> PhysicsParams {
    PhysicsParams::new(1.0, 1.0, 1.0).unwrap()
}

#[test]
fn strang_is_second_order() {
    let g = make_grid(128, -30.0, 30.0).unwrap();
    let pot = PotentialSpec::Linear { a: 0.1 };
    let psi = SpinorField::from_upper(gaussian_packet(&g, 10.0, 0.2, 0.0).unwrap());
    let exact = DenseDiracOracle::new(&g, &pot, &unit()).unwrap().evolve(&psi, 2.0).unwrap();
    let err = |dt: f64| {
        let n = (2.0 / dt).round() as usize;
        propagate_strang(&psi, dt, n, &pot, &unit()).unwrap().distance(&exact).unwrap()
    };
    let ratio = err(0.1) / err(0.05);
    assert!((ratio - 4.0).abs() < 0.6, "ratio {ratio}");
}

#[test]
fn rk4_is_fourth_order() {
    let g = make_grid(512, -30.0, 30.0).unwrap();
    let u0 = gaussian_packet(&g, 10.0, 1.0, 0.0).unwrap();
    let t = 5.0;
    let exact = UpperField::to_position(&g, &tcl_free_solution(&g, &u0.to_momentum(), t, &unit()).unwrap()).unwrap();
    let err = |dt: f64| {
        let op = TclOperator::new(&g, &PotentialSpec::Zero, &unit()).unwrap();
        let mut stepper = TclStepper::new(op, dt, GuardPolicy::Refuse).unwrap();
        let mut u = u0.clone();
        stepper.advance(&mut u, 0.0, (t / dt).round() as usize).unwrap();
        u.distance(&exact).unwrap()
    };
    let ratio = err(0.025) / err(0.0125);
    assert!((ratio - 16.0).abs() < 4.0, "ratio {ratio}");
}

#[test]
fn exact_free_is_time_reversible() {
    let g = make_grid(256, -30.0, 30.0).unwrap();
    let psi = SpinorField::from_upper(gaussian_packet(&g, 10.0, 0.2, 0.0).unwrap());
    let fwd = propagate_exact_free(&psi, 2.0, &unit()).unwrap();
    let back = propagate_exact_free(&fwd, -2.0, &unit()).unwrap();
    assert!(back.distance(&psi).unwrap() < 1e-12);
    assert!(propagate_strang(&psi, -0.01, 10, &PotentialSpec::Zero, &unit()).is_err());
}

#[test]
fn free_packet_density_is_even() {
    let g = make_grid(1024, -30.0, 30.0).unwrap();
    let psi = SpinorField::from_upper(gaussian_packet(&g, 10.0, 0.0, 0.0).unwrap());
    for t in [1.0, 4.0, 10.0] {
        let out = propagate_exact_free(&psi, t, &unit()).unwrap();
        let q = out.lower().density();
        assert!(q.iter().any(|&v| v > 1e-6));
        assert!(mirror_defect(&q, &g, 0.0).unwrap() < 1e-8);
    }
}

#[test]
fn tcl_leakage_tracks_mode_envelope() {
    let g = make_grid(1024, -30.0, 30.0).unwrap();
    let params = unit();
    let u0 = gaussian_packet(&g, 10.0, 0.0, 0.0).unwrap();
    let c0 = u0.to_momentum();
    let weights: Vec<f64> = c0.iter().map(|c| c.norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    for t in [0.5, 1.0, 2.0, 5.0] {
        let u = UpperField::to_position(&g, &tcl_free_solution(&g, &c0, t, &params).unwrap()).unwrap();
        let leak = 1.0 - u.norm_sq();
        let s2 = t.sin().powi(2);
        let y: Vec<f64> = g.momenta().iter().map(|k| k * k * s2).collect();
        let env: f64 = weights.iter().zip(&y).map(|(w, y)| w * y).sum::<f64>() / total;
        let second: f64 = weights.iter().zip(&y).map(|(w, y)| w * y * y / 2.0).sum::<f64>() / total;
        // 1 − e^{−y} lies between y − y²/2 and y
        assert!(leak <= env + 1e-12 && leak >= env - second - 1e-12, "t={t}: {leak} vs {env}");
        let q = reconstruct_q(&u, t, &PotentialSpec::Zero, &params).unwrap();
        assert!((q.norm_sq() - leak).abs() <= second + 1e-12);
    }
}

#[test]
fn free_tcl_revives() {
    let g = make_grid(1024, -30.0, 30.0).unwrap();
    let u0 = gaussian_packet(&g, 10.0, 0.3, 0.0).unwrap();
    let t = std::f64::consts::PI;
    let c = tcl_free_solution(&g, &u0.to_momentum(), t, &unit()).unwrap();
    let u = UpperField::to_position(&g, &c).unwrap();
    assert!((u.norm_sq() - 1.0).abs() < 1e-12);
    let q = reconstruct_q(&u, t, &PotentialSpec::Zero, &unit()).unwrap();
    assert!(q.norm_sq() < 1e-20);
}
