//! Property tests for the algebra layer and cross-module invariants.

use duality_core::discrimination::{
    med_program, med_projectors, uqsd_bound, uqsd_povm, uqsd_program, Strategy as Measurement,
};
use duality_core::interferometer::{
    evolve_pipeline, split_probs, visibility_closed_form, ExperimentConfig,
};
use duality_core::linalg::{
    adjoint, inner, norm_sq, tensor, tensor_vec, validate_povm, CMat, CVec, C64,
};
use duality_core::montecarlo::{
    estimate_dm, estimate_du, estimate_visibility, sample_counts, NoiseModel,
};
use proptest::prelude::*;
use std::f64::consts::PI;

fn arb_c64() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn arb_mat2() -> impl Strategy<Value = CMat> {
    proptest::collection::vec(arb_c64(), 4).prop_map(|v| CMat::new(2, v).unwrap())
}

fn arb_vec2() -> impl Strategy<Value = CVec> {
    proptest::collection::vec(arb_c64(), 2).prop_map(|v| CVec::new(v).unwrap())
}

proptest! {
    #[test]
    fn tensor_mixed_product(a in arb_mat2(), b in arb_mat2(), c in arb_mat2(), d in arb_mat2()) {
        // (A⊗B)(C⊗D) = (AC)⊗(BD)
        let lhs = tensor(&a, &b).unwrap().matmul(&tensor(&c, &d).unwrap()).unwrap();
        let rhs = tensor(&a.matmul(&c).unwrap(), &b.matmul(&d).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn tensor_vec_matches_tensor_action(a in arb_mat2(), b in arb_mat2(), x in arb_vec2(), y in arb_vec2()) {
        // (A⊗B)(x⊗y) = (Ax)⊗(By)
        let lhs = tensor(&a, &b).unwrap().matvec(&tensor_vec(&x, &y).unwrap()).unwrap();
        let rhs = tensor_vec(&a.matvec(&x).unwrap(), &b.matvec(&y).unwrap()).unwrap();
        prop_assert!(norm_sq(&lhs.sub(&rhs).unwrap()) < 1e-24);
    }

    #[test]
    fn adjoint_involution(m in arb_mat2()) {
        prop_assert!(adjoint(&adjoint(&m)).max_abs_diff(&m) == 0.0);
    }

    #[test]
    fn inner_conjugate_symmetry(a in arb_vec2(), b in arb_vec2()) {
        let ab = inner(&a, &b).unwrap();
        let ba = inner(&b, &a).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-14);
    }

    #[test]
    fn discrimination_povms_always_validate(t2a in 0.0..=1.0f64, s2n in 0.0..=1.0f64) {
        let theta_a = t2a.atan() / 2.0;
        let theta_n = s2n.asin() / 2.0;
        let program = uqsd_program(theta_a, theta_n).unwrap();
        let (povm, _) = uqsd_povm(&program, theta_a, theta_n).unwrap();
        prop_assert!(validate_povm(&povm).is_valid());
        let med = med_projectors(med_program(theta_a, theta_n).unwrap().theta4);
        prop_assert!(validate_povm(&med).is_valid());
    }

    #[test]
    fn wave_plate_program_invariants(t2a in 0.0..=1.0f64, s2n in 0.0..=1.0f64) {
        let theta_a = t2a.atan() / 2.0;
        let theta_n = s2n.asin() / 2.0;
        let uqsd = uqsd_program(theta_a, theta_n).unwrap();
        prop_assert!((uqsd.theta6 - PI / 4.0).abs() < 1e-15);
        if t2a <= s2n {
            prop_assert_eq!(uqsd.theta5, 0.0);
            prop_assert_eq!(uqsd.theta7, 0.0);
        }
        let med = med_program(theta_a, theta_n).unwrap();
        prop_assert!((med.theta6 - PI / 4.0).abs() < 1e-15);
        prop_assert_eq!(med.theta5, 0.0);
        prop_assert_eq!(med.theta7, 0.0);
    }

    #[test]
    fn exit_probabilities_conserved(t2a in 0.0..=1.0f64, s2n in 0.0..=1.0f64, phi in 0.0..(2.0 * PI)) {
        let config = ExperimentConfig::from_ratios(t2a, s2n, phi, 1.0).unwrap();
        let pair = evolve_pipeline(&config);
        let total = norm_sq(&pair.psi_v) + norm_sq(&pair.psi_d);
        prop_assert!((total - 1.0).abs() < 1e-12);
    }
}

/// Swept-phase pipeline oracle for the closed-form visibility, on a 10×10
/// parameter grid. The sweep contains the fringe extremes (φ = 0 and π).
#[test]
fn visibility_closed_form_matches_swept_pipeline() {
    let mut worst = 0.0_f64;
    for i in 0..10 {
        for j in 0..10 {
            let theta_a = (PI / 8.0) * i as f64 / 9.0;
            let theta_n = (PI / 4.0) * j as f64 / 9.0;
            let mut max = f64::MIN;
            let mut min = f64::MAX;
            for k in 0..48 {
                let phi = 2.0 * PI * k as f64 / 48.0;
                let config = ExperimentConfig::new(theta_a, theta_n, phi, 1.0).unwrap();
                let p = norm_sq(&evolve_pipeline(&config).psi_d);
                max = max.max(p);
                min = min.min(p);
            }
            let swept = (max - min) / (max + min);
            let closed = visibility_closed_form(theta_a, theta_n).unwrap();
            worst = worst.max((swept - closed).abs());
        }
    }
    assert!(worst < 1e-10, "worst sweep-vs-closed-form gap {worst}");
}

/// Monte Carlo consistency: across growing budgets the estimates tighten
/// and stay within 4σ of the closed forms for at least 95% of a 20-setting
/// grid.
#[test]
fn estimates_converge_with_budget() {
    let settings: Vec<(f64, f64, Measurement)> = (0..20)
        .map(|k| {
            let t2a = 0.15 + 0.8 * (k % 10) as f64 / 9.0;
            let s2n = if k % 2 == 0 { 0.2 } else { 0.9 };
            let strategy = if k < 10 { Measurement::Uqsd } else { Measurement::Med };
            (t2a, s2n, strategy)
        })
        .collect();
    let budgets = [1e3, 1e4, 1e5, 1e6];
    let mut mean_abs_err = Vec::new();
    for (b_idx, &budget) in budgets.iter().enumerate() {
        let noise = NoiseModel::default().with_budget(budget);
        let mut within = 0usize;
        let mut err_acc = 0.0;
        for (s_idx, &(t2a, s2n, strategy)) in settings.iter().enumerate() {
            let config = ExperimentConfig::from_ratios(t2a, s2n, 0.0, 1.0).unwrap();
            let (p1, p2) = split_probs(config.theta_a).unwrap();
            let seed = 0xC0FFEE + (b_idx * 100 + s_idx) as u64;
            let record = sample_counts(&config, strategy, &noise, seed).unwrap();
            let (est, closed) = match strategy {
                Measurement::Uqsd => (
                    estimate_du(&record).unwrap(),
                    uqsd_bound(p1, p2, config.theta_n).unwrap(),
                ),
                Measurement::Med => (
                    estimate_dm(&record).unwrap(),
                    2.0 * duality_core::discrimination::helstrom(p1, p2, config.theta_n).unwrap()
                        - 1.0,
                ),
            };
            let v = estimate_visibility(&record).unwrap();
            let v_closed = visibility_closed_form(config.theta_a, config.theta_n).unwrap();
            let resid_d = (est.value - closed).abs();
            let resid_v = (v.value - v_closed).abs();
            if resid_d <= 4.0 * est.sigma.max(1e-12) && resid_v <= 4.0 * v.sigma.max(1e-12) {
                within += 1;
            }
            err_acc += resid_d + resid_v;
        }
        assert!(
            within as f64 >= 0.95 * settings.len() as f64,
            "budget {budget:.0}: only {within}/20 settings within 4σ"
        );
        mean_abs_err.push(err_acc / settings.len() as f64);
    }
    for w in mean_abs_err.windows(2) {
        assert!(
            w[1] < w[0],
            "mean absolute error did not decrease: {mean_abs_err:?}"
        );
    }
}
