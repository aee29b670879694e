//! Experimental-feasibility estimates: timing jitter, lifetimes, the
//! decoherence-limited photon number, and a Monte Carlo study of
//! interaction-time noise.
//!
//! The closed-form estimates here are order-of-magnitude figures. The Monte
//! Carlo routine gives the quantitative effect of a given jitter model.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::{binomial_coefficient, pow_or_one};
use crate::protocol::{plan_times, simulate_plan, ProtocolError};

/// Typical field-ionization detector efficiency range.
pub const DETECTOR_EFFICIENCY_NOTE: &str =
    "atomic detection efficiency is typically 70%-80%; with near-unit success probability the final \
     ground-state measurement does not reduce the uncertainty on the cavity state and may be omitted";

/// Photon-number bound quoted for `g = 2π × 50 kHz`, `τ_cav = 1 ms`.
pub const QUOTED_MAX_PHOTON_BOUND: f64 = 1e4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeasibilityError {
    #[error("parameter {name} = {value} must be positive")]
    NonPositive { name: &'static str, value: f64 },
    #[error("relative timing error {0} must be below 1")]
    TimingErrorTooLarge(f64),
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("jitter width {0} must be non-negative")]
    NegativeJitter(f64),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParams {
    /// Coupling constant in rad/s.
    pub g: f64,
    /// Atomic lifetime in s.
    pub tau_at: f64,
    /// Cavity photon lifetime in s.
    pub tau_cav: f64,
    /// Relative interaction-time error `ΔT/T ≈ Δv/v`.
    pub rel_time_err: f64,
    /// Cavity quality factor, informational only.
    pub quality_factor: f64,
}

impl ExperimentParams {
    pub fn validate(&self) -> Result<(), FeasibilityError> {
        for (name, value) in [
            ("g", self.g),
            ("tau_at", self.tau_at),
            ("tau_cav", self.tau_cav),
            ("rel_time_err", self.rel_time_err),
            ("quality_factor", self.quality_factor),
        ] {
            if value.is_nan() || value <= 0.0 {
                return Err(FeasibilityError::NonPositive { name, value });
            }
        }
        if self.rel_time_err >= 1.0 {
            return Err(FeasibilityError::TimingErrorTooLarge(self.rel_time_err));
        }
        Ok(())
    }
}

impl Default for ExperimentParams {
    /// Fabry-Perot figures: `g = 2π × 50 kHz`, `τ_at = 10 ms`, `τ_cav = 1 ms`,
    /// `Δv/v = 10⁻²`, `Q = 10⁹`.
    fn default() -> Self {
        Self {
            g: 2.0 * PI * 5.0e4,
            tau_at: 1e-2,
            tau_cav: 1e-3,
            rel_time_err: 1e-2,
            quality_factor: 1e9,
        }
    }
}

/// Order-of-magnitude coefficient error `δ_exp,n = n (gT_N)² (ΔT/T)²` for
/// `n = 0..=N`.
pub fn timing_error_estimate(n_max: usize, gt_n: f64, rel_err: f64) -> Vec<f64> {
    let scale = gt_n * gt_n * rel_err * rel_err;
    (0..=n_max).map(|n| n as f64 * scale).collect()
}

/// Infidelity to `|N, p, φ⟩` of a state with coefficients
/// `b_n (1 - δ_n)`, i.e. `1 - (E[1-δ])² / E[(1-δ)²]` under the binomial
/// weights. Used to turn the per-coefficient estimate into one number.
pub fn estimated_infidelity(deltas: &[f64], p: f64) -> f64 {
    let n_max = deltas.len() - 1;
    let (mut first, mut second) = (0.0, 0.0);
    for (n, d) in deltas.iter().enumerate() {
        let w = binomial_coefficient(n_max, n as i64).powi(2)
            * pow_or_one(p, n)
            * pow_or_one(1.0 - p, n_max - n);
        first += w * (1.0 - d);
        second += w * (1.0 - d) * (1.0 - d);
    }
    1.0 - first * first / second
}

/// Field decoherence time `τ_dec = 2 τ_cav / N`.
pub fn decoherence_time(tau_cav: f64, n_max: usize) -> f64 {
    2.0 * tau_cav / n_max as f64
}

/// Largest integer `N` with `N < 4 (g τ_cav)²`.
pub fn max_photon_bound(g: f64, tau_cav: f64) -> u64 {
    let limit = 4.0 * (g * tau_cav).powi(2);
    let nearest = limit.round();
    // snap values that are an integer up to rounding in g·τ
    if (limit - nearest).abs() <= 1e-9 * limit.max(1.0) {
        (nearest as u64).saturating_sub(1)
    } else {
        (limit.ceil() as u64).saturating_sub(1)
    }
}

/// The photon-number bound for a nominal coupling frequency read both as
/// an ordinary frequency (`g = 2πf`) and as an angular one (`g = f`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonBoundReport {
    pub coupling_frequency_hz: f64,
    pub tau_cav: f64,
    /// `g = 2π f`.
    pub with_two_pi: u64,
    /// `g = f`.
    pub without_two_pi: u64,
    pub quoted: f64,
    pub note: String,
}

pub fn photon_bound_report(coupling_frequency_hz: f64, tau_cav: f64) -> PhotonBoundReport {
    let with_two_pi = max_photon_bound(2.0 * PI * coupling_frequency_hz, tau_cav);
    let without_two_pi = max_photon_bound(coupling_frequency_hz, tau_cav);
    let note = format!(
        "N < 4(g tau_cav)^2 gives {with_two_pi} with g = 2*pi*f and {without_two_pi} with g = f; \
         the quoted bound N < 1e4 corresponds to g = f"
    );
    PhotonBoundReport {
        coupling_frequency_hz,
        tau_cav,
        with_two_pi,
        without_two_pi,
        quoted: QUOTED_MAX_PHOTON_BOUND,
        note,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepLifetime {
    pub k: usize,
    /// Interaction time in s.
    pub duration: f64,
    pub within_atomic_lifetime: bool,
    pub within_cavity_lifetime: bool,
    pub within_decoherence_time: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifetimeReport {
    pub decoherence_time: f64,
    pub steps: Vec<StepLifetime>,
    /// Sum of all interaction times in s.
    pub total_interaction_time: f64,
    /// Every step passes all three checks and the summed interaction time
    /// stays below the cavity lifetime.
    pub sequence_fits: bool,
}

/// Compares each `T_k = gT_k / g` with `τ_at`, `τ_cav` and `τ_dec`.
pub fn lifetime_check(params: &ExperimentParams, gt_sequence: &[f64]) -> LifetimeReport {
    let tau_dec = decoherence_time(params.tau_cav, gt_sequence.len().max(1));
    let steps: Vec<StepLifetime> = gt_sequence
        .iter()
        .enumerate()
        .map(|(i, gt)| {
            let t = gt / params.g;
            StepLifetime {
                k: i + 1,
                duration: t,
                within_atomic_lifetime: t < params.tau_at,
                within_cavity_lifetime: t < params.tau_cav,
                within_decoherence_time: t < tau_dec,
            }
        })
        .collect();
    let total: f64 = steps.iter().map(|s| s.duration).sum();
    let sequence_fits = total < params.tau_cav
        && steps.iter().all(|s| {
            s.within_atomic_lifetime && s.within_cavity_lifetime && s.within_decoherence_time
        });
    LifetimeReport {
        decoherence_time: tau_dec,
        steps,
        total_interaction_time: total,
        sequence_fits,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JitterStats {
    pub trials: usize,
    pub rel_sigma: f64,
    pub mean_fidelity: f64,
    pub min_fidelity: f64,
    pub mean_probability: f64,
}

impl JitterStats {
    pub fn mean_infidelity(&self) -> f64 {
        1.0 - self.mean_fidelity
    }
}

/// Re-runs the default plan with every `gT_k` multiplied by an independent
/// `1 + ε_k`, `ε_k ~ Normal(0, σ²)`, keeping ground-state post-selection.
///
/// Trial `i` draws from its own ChaCha20 stream `i` under `seed`, so the
/// result does not depend on scheduling.
pub fn monte_carlo_jitter(
    n_max: usize,
    p: f64,
    rel_sigma: f64,
    trials: usize,
    seed: u64,
) -> Result<JitterStats, FeasibilityError> {
    if trials == 0 {
        return Err(FeasibilityError::NoTrials);
    }
    if rel_sigma.is_nan() || rel_sigma < 0.0 {
        return Err(FeasibilityError::NegativeJitter(rel_sigma));
    }
    let plan = plan_times(n_max, 0.0)?;
    let base = plan.interaction_times();
    let noise = Normal::new(0.0, rel_sigma).expect("finite non-negative sigma");
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let gts: Vec<f64> = base
                .iter()
                .map(|gt| gt * (1.0 + noise.sample(&mut rng)))
                .collect();
            let run = simulate_plan(&plan.with_times(&gts)?, p)?;
            Ok((run.fidelity, run.total_probability))
        })
        .collect::<Result<Vec<_>, ProtocolError>>()?;
    let count = outcomes.len() as f64;
    Ok(JitterStats {
        trials,
        rel_sigma,
        mean_fidelity: outcomes.iter().map(|o| o.0).sum::<f64>() / count,
        min_fidelity: outcomes.iter().map(|o| o.0).fold(f64::INFINITY, f64::min),
        mean_probability: outcomes.iter().map(|o| o.1).sum::<f64>() / count,
    })
}
