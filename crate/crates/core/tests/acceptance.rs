//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ngbs_core::feasibility::{
    decoherence_time, estimated_infidelity, max_photon_bound, monte_carlo_jitter,
    photon_bound_report, timing_error_estimate,
};
use ngbs_core::fock::{
    coherent_dim, coherent_state, fidelity, inner_product, make_binomial_state, orthogonal_partner,
    BinomialStateSpec,
};
use ngbs_core::gates::{
    cnot, ideal_cnot_amplitudes, qubit_preparation_branches, two_qubit_amplitudes, ControlAtom,
    LogicalQubitSpec,
};
use ngbs_core::jc::{evolve_resonant, jc_unitary_oracle, Headroom, JointState};
use ngbs_core::protocol::{
    appendix_identity_check, coefficient_history, plan_times, run_protocol, run_protocol_full_sim,
};
use ngbs_core::reference::{
    compare_with_reference, p3_approximation, C2_OF_STEP2, F3_HALF_INFIDELITY, GT3,
    N3_PROBABILITY_FLOOR, P2_CURVATURE, TOTAL_PROBABILITY_RANGE,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Mean fidelity of the frozen-seed jitter run (N = 3, p = 1/2, σ = 1e-2,
/// 1000 trials, seed 20240601), as raw bits.
const JITTER_GOLDEN_BITS: u64 = 0x3feffe3e925c6211;
const JITTER_SEED: u64 = 20240601;

const P_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const P_INTERIOR: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_pair(rng: &mut ChaCha8Rng) -> (C64, C64) {
    let a = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let b = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    (a / n, b / n)
}

fn table_reproduction() -> Outcome {
    let cells = compare_with_reference(&(3..=10).collect::<Vec<_>>()).map_err(|e| e.to_string())?;
    let published: Vec<_> = cells.iter().filter(|c| c.n >= 1).collect();
    let misses: Vec<String> = published
        .iter()
        .filter(|c| !c.within_tolerance)
        .map(|c| {
            format!(
                "N={} n={}: computed {:.4e}, table {:.4e}",
                c.n_max, c.n, c.computed, c.reference
            )
        })
        .collect();
    let summary = format!(
        "{}/{} cells within tolerance",
        published.len() - misses.len(),
        published.len()
    );
    if misses.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; outside: {}", misses.join("; ")))
    }
}

fn quoted_scalars() -> Outcome {
    let mut failures = Vec::new();
    let gt3 = plan_times(3, 0.0).map_err(|e| e.to_string())?.steps[2].gt;
    if (gt3 - GT3).abs() > 1e-3 {
        failures.push(format!("gT_3 = {gt3}"));
    }
    let c22 = coefficient_history(2).map_err(|e| e.to_string())?[1].ground[2];
    if (c22 - C2_OF_STEP2).abs() > 1e-6 {
        failures.push(format!("c_2^(2) = {c22}"));
    }
    let (mut p2_err, mut p3_err) = (0.0f64, 0.0f64);
    for p in P_GRID {
        let r2 = run_protocol(2, p, 0.0).map_err(|e| e.to_string())?;
        p2_err = p2_err.max((r2.step_probabilities()[1] - (1.0 - P2_CURVATURE * p * p)).abs());
        let r3 = run_protocol(3, p, 0.0).map_err(|e| e.to_string())?;
        p3_err = p3_err.max((r3.step_probabilities()[2] - p3_approximation(p)).abs());
    }
    if p2_err > 5e-5 {
        failures.push(format!("P_2 deviation {p2_err:.3e}"));
    }
    if p3_err > 5e-3 {
        failures.push(format!("P_3 deviation {p3_err:.3e}"));
    }
    let f3 = run_protocol(3, 0.5, 0.0)
        .map_err(|e| e.to_string())?
        .fidelity;
    if ((1.0 - f3) - F3_HALF_INFIDELITY).abs() > 1e-5 {
        failures.push(format!("1 - F_3(1/2) = {:.3e}", 1.0 - f3));
    }
    let mut worst = 0.0f64;
    for n in 4..=10 {
        worst = worst.max(
            1.0 - run_protocol(n, 0.5, 0.0)
                .map_err(|e| e.to_string())?
                .fidelity,
        );
    }
    if worst > 5e-4 {
        failures.push(format!("max 1 - F_N(1/2) = {worst:.3e}"));
    }
    let detail = format!(
        "gT_3 = {gt3:.6}, c_2^(2) = {c22:.9}, P_2 dev {p2_err:.2e}, P_3 dev {p3_err:.2e}, \
         1-F_3 = {:.3e}, max 1-F_N = {worst:.3e}",
        1.0 - f3
    );
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; failing: {}", failures.join(", ")))
    }
}

fn probability_range() -> Outcome {
    let (lo, hi) = TOTAL_PROBABILITY_RANGE;
    let mut values = Vec::new();
    let mut outside = Vec::new();
    for n in 4..=10 {
        let total = run_protocol(n, 0.5, 0.0)
            .map_err(|e| e.to_string())?
            .total_probability;
        values.push(format!("N={n}: {total:.4}"));
        if !(lo..=hi).contains(&total) {
            outside.push(n);
        }
    }
    let p3 = run_protocol(3, 0.5, 0.0)
        .map_err(|e| e.to_string())?
        .total_probability;
    values.insert(0, format!("N=3: {p3:.4}"));
    // p away from 1/2 is informational only
    for n in 4..=10 {
        let mut off = Vec::new();
        for p in P_INTERIOR {
            let total = run_protocol(n, p, 0.0)
                .map_err(|e| e.to_string())?
                .total_probability;
            if !(lo..=hi).contains(&total) {
                off.push(format!("{p}"));
            }
        }
        if !off.is_empty() {
            println!(
                "      note: N={n} total probability outside [{lo}, {hi}] at p = {}",
                off.join(", ")
            );
        }
    }
    let detail = values.join(", ");
    ensure(
        outside.is_empty() && p3 >= N3_PROBABILITY_FLOOR,
        if outside.is_empty() {
            detail
        } else {
            format!("{detail}; outside [{lo}, {hi}] for N = {outside:?}")
        },
    )
}

fn oracle_equivalence() -> Outcome {
    let (mut worst_overlap, mut worst_prob) = (0.0f64, 0.0f64);
    for n in 1..=10 {
        for p in P_INTERIOR {
            let rec = run_protocol(n, p, 0.0).map_err(|e| e.to_string())?;
            let sim = run_protocol_full_sim(n, p, 0.0).map_err(|e| e.to_string())?;
            let overlap =
                fidelity(&rec.final_state, &sim.final_state).map_err(|e| e.to_string())?;
            worst_overlap = worst_overlap.max(1.0 - overlap);
            for (a, b) in rec.step_probabilities().iter().zip(&sim.step_probabilities) {
                worst_prob = worst_prob.max((a - b).abs());
            }
        }
    }
    ensure(
        worst_overlap <= 1e-10 && worst_prob <= 1e-10,
        format!("max 1-overlap {worst_overlap:.2e}, max probability deviation {worst_prob:.2e}"),
    )
}

fn dynamics_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let dim = rng.gen_range(1..=12);
        let mut draw = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let up: Vec<C64> = (0..dim).map(|_| draw()).collect();
        let down: Vec<C64> = (0..dim).map(|_| draw()).collect();
        let norm = up
            .iter()
            .chain(&down)
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        let state = JointState::new(
            up.iter().map(|z| z / norm).collect(),
            down.iter().map(|z| z / norm).collect(),
        )
        .map_err(|e| e.to_string())?;
        let gt = rng.gen_range(0.0..20.0);
        let fast = evolve_resonant(&state, gt, Headroom::Grow).map_err(|e| e.to_string())?;
        let dense = jc_unitary_oracle(&state, gt, Headroom::Grow).map_err(|e| e.to_string())?;
        worst = worst.max(fast.max_abs_diff(&dense));
    }
    ensure(
        worst < 1e-10,
        format!("500 cases, max amplitude deviation {worst:.2e}"),
    )
}

fn structural_identities() -> Outcome {
    let identity = appendix_identity_check(30);
    let mut worst_overlap = 0.0f64;
    for n in 1..=20 {
        for p in P_INTERIOR {
            let spec = BinomialStateSpec::new(n, p, 0.3).map_err(|e| e.to_string())?;
            let a = make_binomial_state(&spec, n + 1).map_err(|e| e.to_string())?;
            let b = make_binomial_state(&orthogonal_partner(&spec), n + 1)
                .map_err(|e| e.to_string())?;
            worst_overlap = worst_overlap.max(inner_product(&a, &b).norm());
        }
    }
    let history = coefficient_history(10).map_err(|e| e.to_string())?;
    let mut worst_residual = 0.0f64;
    for (i, step) in history.iter().enumerate() {
        let k = i + 1;
        worst_residual = worst_residual.max(step.residual((k - 1).max(1)).abs());
    }
    let eps = 4.0 * f64::EPSILON;
    let first = history[0].residual(1).abs();
    let second = history[1].residual(1).abs();
    ensure(
        identity < 1e-12 && worst_overlap < 1e-12 && worst_residual < 1e-12 && first <= eps && second <= eps,
        format!(
            "identity {identity:.2e}, orthogonal overlap {worst_overlap:.2e}, targeted residual {worst_residual:.2e}, \
             a_1^(1) {first:.1e}, a_1^(2) {second:.1e}"
        ),
    )
}

fn cnot_checks() -> Outcome {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut basis_err = 0.0f64;
    for n in 1..=10 {
        let spec = LogicalQubitSpec::new(n, 0.0);
        for (c, d) in [(one, zero), (zero, one)] {
            for (a, b) in [(one, zero), (zero, one)] {
                let out = cnot(&ControlAtom::new(c, d), &spec.encode(a, b), &spec)
                    .map_err(|e| e.to_string())?;
                let got = two_qubit_amplitudes(&out, &spec);
                let want = ideal_cnot_amplitudes(c, d, a, b);
                for r in 0..2 {
                    for s in 0..2 {
                        basis_err = basis_err.max((got[r][s] - want[r][s]).norm());
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let mut general_err = 0.0f64;
    for i in 0..100 {
        let spec = LogicalQubitSpec::new(1 + i % 10, rng.gen_range(0.0..2.0 * PI));
        let (a, b) = random_pair(&mut rng);
        let (c, d) = random_pair(&mut rng);
        let out =
            cnot(&ControlAtom::new(c, d), &spec.encode(a, b), &spec).map_err(|e| e.to_string())?;
        let got = two_qubit_amplitudes(&out, &spec);
        let want = ideal_cnot_amplitudes(c, d, a, b);
        for r in 0..2 {
            for s in 0..2 {
                general_err = general_err.max((got[r][s] - want[r][s]).norm());
            }
        }
    }
    let (mut prob_err, mut state_err) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let spec = LogicalQubitSpec::new(1 + i % 10, rng.gen_range(0.0..2.0 * PI));
        let (a, b) = random_pair(&mut rng);
        let [g, e] = qubit_preparation_branches(a, b, &spec).map_err(|e| e.to_string())?;
        prob_err = prob_err
            .max((g.probability - 0.5).abs())
            .max((e.probability - 0.5).abs());
        state_err = state_err.max(g.field.max_abs_diff(&spec.encode(a, -b)));
    }
    ensure(
        basis_err < 1e-14 && general_err < 1e-12 && prob_err <= 1e-12 && state_err < 1e-12,
        format!(
            "basis {basis_err:.1e}, general {general_err:.2e}, preparation probability {prob_err:.1e}, \
             g-branch state {state_err:.2e}"
        ),
    )
}

fn limits() -> Outcome {
    let mut endpoint_ok = true;
    for n in 1..=10 {
        let vac = make_binomial_state(
            &BinomialStateSpec::new(n, 0.0, 0.0).map_err(|e| e.to_string())?,
            n + 1,
        )
        .map_err(|e| e.to_string())?;
        let top = make_binomial_state(
            &BinomialStateSpec::new(n, 1.0, 0.0).map_err(|e| e.to_string())?,
            n + 1,
        )
        .map_err(|e| e.to_string())?;
        endpoint_ok &= vac.amplitude(0) == C64::new(1.0, 0.0)
            && vac.amplitudes()[1..].iter().all(|z| z.norm() == 0.0);
        endpoint_ok &= top.amplitude(n) == C64::new(1.0, 0.0)
            && top.amplitudes()[..n].iter().all(|z| z.norm() == 0.0);
        let r0 = run_protocol(n, 0.0, 0.0).map_err(|e| e.to_string())?;
        let r1 = run_protocol(n, 1.0, 0.0).map_err(|e| e.to_string())?;
        endpoint_ok &= (r0.final_state.amplitude(0).norm() - 1.0).abs() < 1e-15;
        endpoint_ok &= (r1.final_state.amplitude(n).norm() - 1.0).abs() < 1e-15;
    }
    let alpha = C64::new(1.0, 0.0);
    let mut fids = Vec::new();
    for n in [10usize, 20, 40] {
        let dim = coherent_dim(alpha).max(n + 1);
        let coh = coherent_state(alpha, dim).map_err(|e| e.to_string())?;
        let spec = BinomialStateSpec::new(n, 1.0 / n as f64, 0.0).map_err(|e| e.to_string())?;
        let bin = make_binomial_state(&spec, dim).map_err(|e| e.to_string())?;
        fids.push(fidelity(&coh, &bin).map_err(|e| e.to_string())?);
    }
    let monotone = fids.windows(2).all(|w| w[1] > w[0]);
    ensure(
        endpoint_ok && monotone,
        format!(
            "endpoints exact: {endpoint_ok}; coherent fidelity N=10,20,40: {:.8}, {:.8}, {:.8}",
            fids[0], fids[1], fids[2]
        ),
    )
}

fn feasibility() -> Outcome {
    let gt3 = plan_times(3, 0.0).map_err(|e| e.to_string())?.steps[2].gt;
    let estimate = timing_error_estimate(3, gt3, 1e-2);
    let history = coefficient_history(3).map_err(|e| e.to_string())?;
    let deltas = ngbs_core::protocol::mismatches(&history[2].ground);
    let below: Vec<String> = (1..=3)
        .filter(|&n| estimate[n] < deltas[n])
        .map(|n| {
            format!(
                "n={n}: estimate {:.5e} < delta {:.5e}",
                estimate[n], deltas[n]
            )
        })
        .collect();
    let arithmetic = decoherence_time(1e-3, 2) == 1e-3
        && decoherence_time(1e-3, 10) == 2e-4
        && max_photon_bound(50.0, 1.0) == 9999
        && max_photon_bound(1.0, 1.0) == 3
        && max_photon_bound(2.0 * PI * 5e4, 1e-3) == 394_784;
    let report = photon_bound_report(5e4, 1e-3);
    let surfaced = report.with_two_pi == 394_784
        && report.without_two_pi == 9999
        && report.note.contains("394784")
        && report.note.contains("9999");
    let detail = format!(
        "hand arithmetic exact: {arithmetic}; bound reported as {} (g = 2 pi f) and {} (g = f)",
        report.with_two_pi, report.without_two_pi
    );
    if below.is_empty() && arithmetic && surfaced {
        Ok(format!("{detail}; estimate dominates delta for n = 1..3"))
    } else {
        Err(format!("{detail}; {}", below.join("; ")))
    }
}

fn monte_carlo_regression() -> Outcome {
    let first = monte_carlo_jitter(3, 0.5, 1e-2, 1000, JITTER_SEED).map_err(|e| e.to_string())?;
    let second = monte_carlo_jitter(3, 0.5, 1e-2, 1000, JITTER_SEED).map_err(|e| e.to_string())?;
    let bits = first.mean_fidelity.to_bits();
    let deterministic = bits == second.mean_fidelity.to_bits();
    let golden = bits == JITTER_GOLDEN_BITS;
    let gt3 = plan_times(3, 0.0).map_err(|e| e.to_string())?.steps[2].gt;
    let estimate = estimated_infidelity(&timing_error_estimate(3, gt3, 1e-2), 0.5);
    let ratio = first.mean_infidelity() / estimate;
    ensure(
        deterministic && golden && (0.1..=10.0).contains(&ratio),
        format!(
            "mean fidelity {:.12} (bits {bits:#018x}, golden match {golden}), mean infidelity {:.3e}, \
             estimate {estimate:.3e}, ratio {ratio:.2}",
            first.mean_fidelity,
            first.mean_infidelity()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("table reproduction", table_reproduction),
        ("quoted scalars", quoted_scalars),
        ("probability range", probability_range),
        ("recursion vs joint evolution", oracle_equivalence),
        ("dynamics oracle", dynamics_oracle),
        ("structural identities", structural_identities),
        ("cnot", cnot_checks),
        ("limits", limits),
        ("feasibility", feasibility),
        ("monte carlo regression", monte_carlo_regression),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS  {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
