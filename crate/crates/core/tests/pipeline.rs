use symdiv_core::chan::{cp_exact, ChannelFamily};
use symdiv_core::dynamics::{
    classify_trajectory, ddiv_sufficient, dynamical_map_at, generator_at, pdiv_sufficient, propagator_cp_check,
    ClassifyOptions, RateTrajectory,
};
use symdiv_core::measure::{gellmann_mum_povm, mub_povm, pauli_15_2_povm};
use symdiv_core::{CMatrix, Superoperator};

// exp(tL) by scaling and squaring of a truncated Taylor series.
fn expm(l: &Superoperator, t: f64) -> CMatrix {
    let a = l.matrix().scale_real(t / 1024.0);
    let n = a.rows();
    let mut term = CMatrix::identity(n);
    let mut sum = CMatrix::identity(n);
    for k in 1..20 {
        term = (&term * &a).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..10 {
        sum = &sum * &sum;
    }
    sum
}

#[test]
fn dynamical_map_matches_generator_exponential() {
    for p in [mub_povm(3).unwrap(), gellmann_mum_povm(3).unwrap(), pauli_15_2_povm()] {
        let f = ChannelFamily::build(p).unwrap();
        let gamma: Vec<f64> = (0..f.n()).map(|a| 0.3 + 0.1 * a as f64 - 0.25 * (a % 3) as f64).collect();
        let snap = generator_at(&f, &gamma).unwrap();
        let traj = RateTrajectory::constant(&gamma, RateTrajectory::uniform_grid(1.0, 10).unwrap()).unwrap();
        for t in [0.0, 0.35, 1.0] {
            let map = dynamical_map_at(&f, &traj, t).unwrap();
            let diff = map.matrix().max_abs_diff(&expm(&snap.generator, t));
            assert!(diff < 1e-10, "t = {t}: {diff:e}");
        }
    }
}

#[test]
fn negative_rates_break_cp_divisibility() {
    let f = ChannelFamily::build(mub_povm(3).unwrap()).unwrap();
    let gamma = [1.0, 1.0, -1.0, -1.0];
    let traj = RateTrajectory::constant(&gamma, RateTrajectory::uniform_grid(0.5, 5).unwrap()).unwrap();
    let report = classify_trajectory(&f, &traj, &ClassifyOptions::default()).unwrap();
    assert!(!report.cp_divisible);
    assert!(!report.p_necessary);
    assert!(!report.violations.is_empty());

    let checks = propagator_cp_check(&f, &traj, &[(0.0, 0.1), (0.2, 0.4)], 1e-9).unwrap();
    assert!(checks.iter().any(|c| c.cp() == Some(false)));
    assert!(cp_exact(&dynamical_map_at(&f, &traj, 0.0).unwrap(), 1e-9).psd);
}

#[test]
fn one_distinguished_rate_copositivity_region() {
    let f = ChannelFamily::build(mub_povm(3).unwrap()).unwrap();
    let holds = |g: f64, gt: f64| ddiv_sufficient(&f, &[g, gt, gt, gt], 1e-9).holds;
    for gt in [0.1, 0.5, 2.0] {
        assert!(holds(-gt + 1e-6, gt));
        assert!(!holds(-gt - 1e-3, gt));
    }
    assert!(!holds(1.0, -0.01));
}

#[test]
fn ququart_boundary_ratio() {
    let f = ChannelFamily::build(pauli_15_2_povm()).unwrap();
    let mut gamma = vec![-1.0; 12];
    gamma.extend([13.0; 3]);
    let r = pdiv_sufficient(&f, &gamma);
    assert!(r.holds);
    assert_eq!(r.l, 12);
    assert!((r.b - 3.0).abs() < 1e-12);
    assert!((r.ratio.unwrap() - 13.0).abs() < 1e-12);

    gamma[14] = 12.9;
    assert!(!pdiv_sufficient(&f, &gamma).holds);
}
