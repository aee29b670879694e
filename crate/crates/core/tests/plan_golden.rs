#![allow(clippy::excessive_precision)]

use approx::assert_relative_eq;
use ngbs_core::protocol::{coefficient_history, mismatches, plan_times, SignPhase};

// 40-digit reference values, N = 10, φ_1 = 0
const GT: [f64; 10] = [
    4.7123889803846898577,
    5.4977871437821381673,
    11.783757237818697111,
    0.60513305627650067852,
    0.56690411585381954307,
    0.53080727382876358344,
    0.49988120652930750939,
    0.47355233022214197423,
    0.45094207425639505217,
    0.43130596944852987288,
];

const C10: [f64; 11] = [
    1.0,
    3.071486922386409132,
    6.3667301123455171933,
    10.228850530310469735,
    13.413452999756028195,
    14.679995436695505445,
    13.483530317270425702,
    10.293710975061258698,
    6.3267879347011441901,
    2.8908046334053734329,
    0.77336262113981718103,
];

const DELTA10: [f64; 11] = [
    0.0,
    0.02871055218381296,
    0.050903911626703369,
    0.066237971200045808,
    0.074383805301097733,
    0.075247210165253795,
    0.069548010970319286,
    0.060317049753408365,
    0.056858139918849399,
    0.085847308787094612,
    0.22663737886018282,
];

#[test]
fn interaction_times_n10() {
    let plan = plan_times(10, 0.0).unwrap();
    for (got, want) in plan.interaction_times().iter().zip(GT) {
        assert_relative_eq!(*got, want, max_relative = 1e-13);
    }
    assert!(plan.warnings.is_empty());
}

#[test]
fn plan_does_not_depend_on_phase() {
    let a = plan_times(10, 0.0).unwrap().interaction_times();
    let b = plan_times(10, 1.234).unwrap().interaction_times();
    assert_eq!(a, b);
}

#[test]
fn sign_phases_and_atom_phases() {
    let phi1 = 0.7;
    let plan = plan_times(10, phi1).unwrap();
    for step in &plan.steps {
        if step.k <= 3 {
            assert_eq!(step.sign_phase, SignPhase::Zero);
            assert_relative_eq!(step.varphi, phi1, max_relative = 1e-15);
        } else {
            assert_eq!(step.sign_phase, SignPhase::Pi);
            let diff =
                (step.varphi - phi1 - std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI);
            assert!(diff < 1e-12 || 2.0 * std::f64::consts::PI - diff < 1e-12);
        }
    }
}

#[test]
fn final_coefficients_n10() {
    let history = coefficient_history(10).unwrap();
    let c = &history[9].ground;
    for (got, want) in c.iter().zip(C10) {
        assert_relative_eq!(*got, want, max_relative = 1e-12);
    }
    for (got, want) in mismatches(c).iter().zip(DELTA10) {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}

#[test]
fn coefficients_below_the_top_are_positive() {
    let history = coefficient_history(10).unwrap();
    for (i, step) in history.iter().enumerate() {
        let k = i + 1;
        for n in 0..k {
            assert!(step.ground[n] > 0.0, "c_{n}^({k}) = {}", step.ground[n]);
        }
    }
    // the second step leaves a negative top coefficient, later ones do not
    assert!(history[1].ground[2] < 0.0);
    for step in &history[2..] {
        assert!(step.ground.iter().all(|c| *c > 0.0));
    }
}

#[test]
fn targeted_residual_vanishes() {
    let history = coefficient_history(10).unwrap();
    for (i, step) in history.iter().enumerate() {
        let k = i + 1;
        let n = (k - 1).max(1);
        assert!(
            step.residual(n).abs() < 1e-12,
            "k = {k}: {}",
            step.residual(n)
        );
    }
}
