//! Sequential-atom generation of generalized binomial states.
//!
//! Each of `N` two-level atoms is prepared as `√p |↑⟩ + e^{iφ_k} √(1-p) |↓⟩`,
//! crosses the cavity for a time `T_k`, and is post-selected in `|↓⟩`. After
//! step `k` the field is
//!
//! ```text
//! |ψ_k⟩ = (1/𝒩_k) Σ_{n=0}^{k} c_n^(k) [p^n (1-p)^(k-n)]^{1/2} e^{inφ} |n⟩
//! ```
//!
//! with real effective coefficients `c_n^(k)` that do not depend on `p`.
//! The recursion for `c` and the interaction times are independent of `p`
//! and `φ`, so a [`ProtocolPlan`] is built once per `N`.
//!
//! Conventions:
//! * `c_0^(k) = +1` after every step (the `Φ_k = π` steps flip the global
//!   sign).
//! * `T_k` solves the `n = k-1` excited-branch condition exactly. Steps with
//!   `Φ_k = 0` take `sin(g√n T_k) ≤ 0`, steps with `Φ_k = π` take both
//!   `sin` and `cos` non-negative.
//! * Each step carries an integer branch `m` that adds `2πm` to the targeted
//!   rotation angle `√(k-1)·gT_k`. The defaults are `0` except `m = 2` at
//!   `k = 3`, which gives `gT_3 ≈ 11.784`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::{
    binomial_coefficient, binomial_weight, fidelity, make_binomial_state, pow_or_one,
    BinomialStateSpec, FockError, FockVector,
};
use crate::jc::{
    evolve_resonant, project_atom, ramsey_prepare, tensor, AtomLevel, DynamicsError, Headroom,
};

/// Interaction times are expected in `[MIN_GT, MAX_GT]`.
pub const MIN_GT: f64 = 0.1;
pub const MAX_GT: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("maximum photon number must be at least 1")]
    EmptyTarget,
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("plan has {plan} steps but {given} interaction times were supplied")]
    StepCount { plan: usize, given: usize },
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Relative phase `Φ_k` between the atomic preparation and the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignPhase {
    Zero,
    Pi,
}

impl SignPhase {
    pub fn radians(self) -> f64 {
        match self {
            SignPhase::Zero => 0.0,
            SignPhase::Pi => PI,
        }
    }

    fn sign(self) -> f64 {
        match self {
            SignPhase::Zero => 1.0,
            SignPhase::Pi => -1.0,
        }
    }

    /// Default convention: `Φ_k = 0` for `k ≤ 3`, `π` afterwards.
    pub fn default_for_step(k: usize) -> Self {
        if k <= 3 {
            SignPhase::Zero
        } else {
            SignPhase::Pi
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanWarning {
    /// `gT_k` below the usual experimental range.
    ShortInteraction { k: usize, gt: f64 },
    /// `gT_k` above the usual experimental range.
    LongInteraction { k: usize, gt: f64 },
    /// A `Φ_k = π` step met coefficients of opposite sign, so the
    /// principal-branch time has a negative cosine.
    NegativeCoefficient { k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannedStep {
    pub k: usize,
    /// Dimensionless interaction time `g·T_k`.
    pub gt: f64,
    /// Ramsey relative phase `φ_k`.
    pub varphi: f64,
    pub sign_phase: SignPhase,
    pub branch: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolPlan {
    pub n_max: usize,
    pub varphi1: f64,
    pub steps: Vec<PlannedStep>,
    pub warnings: Vec<PlanWarning>,
}

impl ProtocolPlan {
    pub fn interaction_times(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.gt).collect()
    }

    pub fn has_range_warning(&self) -> bool {
        self.warnings.iter().any(|w| {
            matches!(
                w,
                PlanWarning::ShortInteraction { .. } | PlanWarning::LongInteraction { .. }
            )
        })
    }

    /// Same phases and conventions with replaced interaction times.
    pub fn with_times(&self, gts: &[f64]) -> Result<Self, ProtocolError> {
        if gts.len() != self.steps.len() {
            return Err(ProtocolError::StepCount {
                plan: self.steps.len(),
                given: gts.len(),
            });
        }
        let mut plan = self.clone();
        for (step, &gt) in plan.steps.iter_mut().zip(gts) {
            step.gt = gt;
        }
        Ok(plan)
    }
}

/// Excited-branch residuals `a_n^(k)` (n = 1..k) and ground-branch
/// coefficients `c_n^(k)` (n = 0..k) after one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepCoefficients {
    pub excited: Vec<f64>,
    pub ground: Vec<f64>,
}

impl StepCoefficients {
    /// `a_n^(k)`, zero outside `1..=k`.
    pub fn residual(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.excited.get(n - 1).copied().unwrap_or(0.0)
        }
    }
}

/// One step of the coefficient recursion:
///
/// ```text
/// a_n = c_{n-1} cos(√n gT) + e^{iΦ} c_n sin(√n gT)
/// c_n = e^{iΦ} c_n cos(√n gT) - c_{n-1} sin(√n gT)
/// ```
///
/// followed by a global sign flip when `Φ = π` so that `c_0 = +1`.
pub fn step_coefficients(prev: &[f64], gt: f64, sign_phase: SignPhase) -> StepCoefficients {
    let k = prev.len();
    let at = |i: isize| -> f64 {
        if i < 0 {
            0.0
        } else {
            prev.get(i as usize).copied().unwrap_or(0.0)
        }
    };
    let e = sign_phase.sign();
    let mut excited = Vec::with_capacity(k);
    let mut ground = Vec::with_capacity(k + 1);
    for n in 0..=k {
        let (sin, cos) = ((n as f64).sqrt() * gt).sin_cos();
        let (lo, hi) = (at(n as isize - 1), at(n as isize));
        if n >= 1 {
            excited.push(e * (lo * cos + e * hi * sin));
        }
        ground.push(e * (e * hi * cos - lo * sin));
    }
    StepCoefficients { excited, ground }
}

/// Branch used at step `k` when none is given.
pub fn default_branch(k: usize) -> i64 {
    if k == 3 {
        2
    } else {
        0
    }
}

/// Targeted rotation angle `√(k-1)·gT_k` (before the branch offset) that
/// zeroes `a_{k-1}^(k)`, plus whether a negative coefficient was met.
fn targeted_angle(prev: &[f64], k: usize, sign_phase: SignPhase) -> (f64, bool) {
    match k {
        1 => (1.5 * PI, false),
        2 => (1.75 * PI, false),
        _ => {
            let lo = prev[k - 2];
            let hi = prev[k - 1];
            let s = if lo >= 0.0 { 1.0 } else { -1.0 };
            match sign_phase {
                // c_{n-1} cos x + c_n sin x = 0 with sin x <= 0
                SignPhase::Zero => ((-s * lo).atan2(s * hi).rem_euclid(2.0 * PI), false),
                // c_{n-1} cos x - c_n sin x = 0 with sin x >= 0
                SignPhase::Pi => (
                    (s * lo).atan2(s * hi).rem_euclid(2.0 * PI),
                    lo < 0.0 || hi < 0.0,
                ),
            }
        }
    }
}

/// Divisor `√(k-1)` of the targeted angle (`1` for the first step).
fn targeted_sqrt(k: usize) -> f64 {
    ((k.max(2) - 1) as f64).sqrt()
}

fn build_plan(
    n_max: usize,
    varphi1: f64,
    branches: &[i64],
) -> Result<(ProtocolPlan, Vec<StepCoefficients>), ProtocolError> {
    if n_max < 1 {
        return Err(ProtocolError::EmptyTarget);
    }
    let mut c = vec![1.0];
    let mut steps = Vec::with_capacity(n_max);
    let mut records = Vec::with_capacity(n_max);
    let mut warnings = Vec::new();
    for k in 1..=n_max {
        let sign_phase = SignPhase::default_for_step(k);
        let branch = branches
            .get(k - 1)
            .copied()
            .unwrap_or_else(|| default_branch(k));
        let (angle, negative) = targeted_angle(&c, k, sign_phase);
        if negative {
            warnings.push(PlanWarning::NegativeCoefficient { k });
        }
        let gt = (angle + 2.0 * PI * branch as f64) / targeted_sqrt(k);
        if gt < MIN_GT {
            warnings.push(PlanWarning::ShortInteraction { k, gt });
        } else if gt > MAX_GT {
            warnings.push(PlanWarning::LongInteraction { k, gt });
        }
        let varphi = match sign_phase {
            SignPhase::Zero => varphi1,
            SignPhase::Pi => PI + varphi1,
        };
        let step = step_coefficients(&c, gt, sign_phase);
        c = step.ground.clone();
        steps.push(PlannedStep {
            k,
            gt,
            varphi,
            sign_phase,
            branch,
        });
        records.push(step);
    }
    Ok((
        ProtocolPlan {
            n_max,
            varphi1,
            steps,
            warnings,
        },
        records,
    ))
}

/// Interaction times and atomic phases for an `N`-step run with the
/// default branches.
pub fn plan_times(n_max: usize, varphi1: f64) -> Result<ProtocolPlan, ProtocolError> {
    plan_times_with_branches(n_max, varphi1, &[])
}

/// As [`plan_times`], with per-step branch overrides; missing entries use
/// [`default_branch`].
pub fn plan_times_with_branches(
    n_max: usize,
    varphi1: f64,
    branches: &[i64],
) -> Result<ProtocolPlan, ProtocolError> {
    build_plan(n_max, varphi1, branches).map(|(plan, _)| plan)
}

/// Effective coefficient sequences `c^(1) .. c^(N)` of the default plan.
pub fn coefficient_history(n_max: usize) -> Result<Vec<StepCoefficients>, ProtocolError> {
    build_plan(n_max, 0.0, &[]).map(|(_, records)| records)
}

/// `𝒩_j² = Σ_n c_n² p^n (1-p)^(j-n)` with `j = c.len() - 1`.
pub fn norm_sqr(c: &[f64], p: f64) -> f64 {
    let j = c.len() - 1;
    c.iter()
        .enumerate()
        .map(|(n, cn)| cn * cn * pow_or_one(p, n) * pow_or_one(1.0 - p, j - n))
        .sum()
}

/// Probability `𝒩_k² / 𝒩_{k-1}²` of detecting the `k`-th atom in `|↓⟩`.
pub fn step_probability(c_k: &[f64], c_km1: &[f64], p: f64) -> f64 {
    norm_sqr(c_k, p) / norm_sqr(c_km1, p)
}

/// Fidelity of the generated state to `|N, p, φ⟩` from the coefficients
/// alone: `[Σ b_n c_n p^n (1-p)^(N-n)]² / Σ c_n² p^n (1-p)^(N-n)`.
pub fn closed_form_fidelity(c: &[f64], p: f64) -> f64 {
    let n_max = c.len() - 1;
    let overlap: f64 = c
        .iter()
        .enumerate()
        .map(|(n, cn)| {
            binomial_coefficient(n_max, n as i64)
                * cn
                * pow_or_one(p, n)
                * pow_or_one(1.0 - p, n_max - n)
        })
        .sum();
    overlap * overlap / norm_sqr(c, p)
}

/// Signed relative mismatch `δ_n = 1 - c_n / b_n` for `n = 0..=N`.
pub fn mismatches(c: &[f64]) -> Vec<f64> {
    let n_max = c.len() - 1;
    c.iter()
        .enumerate()
        .map(|(n, cn)| 1.0 - cn / binomial_coefficient(n_max, n as i64))
        .collect()
}

/// Field state `Σ c_n [p^n (1-p)^(N-n)]^{1/2} e^{inφ} |n⟩ / 𝒩_N`.
pub fn field_from_coefficients(c: &[f64], p: f64, phi: f64) -> Result<FockVector, ProtocolError> {
    let n_max = c.len() - 1;
    let amps = c
        .iter()
        .enumerate()
        .map(|(n, cn)| C64::from_polar(cn * binomial_weight(n_max, n, p), n as f64 * phi))
        .collect();
    Ok(FockVector::new(amps)?.normalized()?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub k: usize,
    pub gt: f64,
    /// `c_n^(k)`, n = 0..k.
    pub coefficients: Vec<f64>,
    /// `a_n^(k)`, n = 1..k.
    pub residuals: Vec<f64>,
    /// `P_k(p)` at the run's `p`.
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub n_max: usize,
    pub p: f64,
    pub phi: f64,
    pub plan: ProtocolPlan,
    pub steps: Vec<StepRecord>,
    pub final_state: FockVector,
    pub total_probability: f64,
    pub fidelity: f64,
    /// `δ_n^(N)`, n = 0..N.
    pub mismatches: Vec<f64>,
}

impl GenerationReport {
    pub fn final_coefficients(&self) -> &[f64] {
        &self.steps.last().expect("at least one step").coefficients
    }

    pub fn step_probabilities(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.probability).collect()
    }

    pub fn max_abs_mismatch(&self) -> f64 {
        self.mismatches.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    pub fn target(&self) -> Result<FockVector, ProtocolError> {
        let spec = BinomialStateSpec::new(self.n_max, self.p, self.phi)?;
        Ok(make_binomial_state(&spec, self.n_max + 1)?)
    }
}

fn check_inputs(n_max: usize, p: f64) -> Result<(), ProtocolError> {
    if n_max < 1 {
        return Err(ProtocolError::EmptyTarget);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(ProtocolError::InvalidProbability(p));
    }
    Ok(())
}

fn assemble_report(
    plan: ProtocolPlan,
    records: Vec<StepCoefficients>,
    p: f64,
    phi: f64,
) -> Result<GenerationReport, ProtocolError> {
    let n_max = plan.n_max;
    let mut prev = vec![1.0];
    let mut steps = Vec::with_capacity(n_max);
    for (planned, record) in plan.steps.iter().zip(records) {
        let probability = step_probability(&record.ground, &prev, p);
        prev = record.ground.clone();
        steps.push(StepRecord {
            k: planned.k,
            gt: planned.gt,
            coefficients: record.ground,
            residuals: record.excited,
            probability,
        });
    }
    let final_state = field_from_coefficients(&prev, p, phi)?;
    let target = make_binomial_state(&BinomialStateSpec::new(n_max, p, phi)?, n_max + 1)?;
    Ok(GenerationReport {
        n_max,
        p,
        phi,
        total_probability: steps.iter().map(|s| s.probability).product(),
        fidelity: fidelity(&target, &final_state)?,
        mismatches: mismatches(&prev),
        final_state,
        steps,
        plan,
    })
}

/// Runs the full generation procedure for the target `|N, p, φ⟩` through
/// the coefficient recursion.
///
/// The first atom's phase is `φ_1 = -φ`. With `p = 0` every atom is in
/// `|↓⟩` and the field stays in the vacuum with probability one.
pub fn run_protocol(n_max: usize, p: f64, phi: f64) -> Result<GenerationReport, ProtocolError> {
    check_inputs(n_max, p)?;
    let (plan, records) = build_plan(n_max, -phi, &[])?;
    assemble_report(plan, records, p, phi)
}

/// Outcome of executing a plan through the joint atom-field dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedRun {
    pub step_probabilities: Vec<f64>,
    /// Conditional field after each post-selection.
    pub fields: Vec<FockVector>,
    pub final_state: FockVector,
    pub total_probability: f64,
    /// Fidelity to `|N, p, -φ_1⟩`.
    pub fidelity: f64,
}

/// Executes `plan` atom by atom: Ramsey preparation, resonant evolution for
/// `gT_k`, projection on `|↓⟩`.
pub fn simulate_plan(plan: &ProtocolPlan, p: f64) -> Result<SimulatedRun, ProtocolError> {
    check_inputs(plan.n_max, p)?;
    let mut field = FockVector::vacuum(1)?;
    let mut step_probabilities = Vec::with_capacity(plan.n_max);
    let mut fields = Vec::with_capacity(plan.n_max);
    for step in &plan.steps {
        let atom = ramsey_prepare(p, step.varphi)?;
        let evolved = evolve_resonant(&tensor(&atom, &field), step.gt, Headroom::Grow)?;
        let (next, prob) = project_atom(&evolved, AtomLevel::Down)?;
        field = next;
        step_probabilities.push(prob);
        fields.push(field.clone());
    }
    let phi = -plan.varphi1;
    let target = make_binomial_state(&BinomialStateSpec::new(plan.n_max, p, phi)?, plan.n_max + 1)?;
    Ok(SimulatedRun {
        total_probability: step_probabilities.iter().product(),
        fidelity: fidelity(&target, &field)?,
        step_probabilities,
        fields,
        final_state: field,
    })
}

/// [`run_protocol`] carried out on the joint state instead of the
/// coefficient recursion.
pub fn run_protocol_full_sim(
    n_max: usize,
    p: f64,
    phi: f64,
) -> Result<SimulatedRun, ProtocolError> {
    check_inputs(n_max, p)?;
    simulate_plan(&plan_times(n_max, -phi)?, p)
}

/// Largest deviation of `√(b_{n-1}^(k-1)² + b_n^(k-1)²)`-normalized rotations
/// from `b_n^(k)` over `1 ≤ n ≤ k ≤ k_max`, for both sign conventions.
///
/// With `sin = ∓b_{n-1}/r` and `cos = b_n/r`, the `Φ = 0` form
/// `b_n cos - b_{n-1} sin` and the `Φ = π` form `b_n cos + b_{n-1} sin`
/// must both equal `b_n^(k)`.
pub fn appendix_identity_check(k_max: usize) -> f64 {
    let mut worst = 0.0f64;
    for k in 1..=k_max {
        for n in 1..=k as i64 {
            let lo = binomial_coefficient(k - 1, n - 1);
            let hi = binomial_coefficient(k - 1, n);
            let r = (lo * lo + hi * hi).sqrt();
            let target = binomial_coefficient(k, n);
            let cos = hi / r;
            let zero_phase = hi * cos - lo * (-lo / r);
            let pi_phase = hi * cos + lo * (lo / r);
            let rel_zero = (zero_phase - target).abs() / target;
            let rel_pi = (pi_phase - target).abs() / target;
            worst = worst.max(rel_zero).max(rel_pi);
        }
    }
    worst
}

/// Success probability `1/2^N` of conditional schemes that require every
/// atom in the ground state.
pub fn conditional_scheme_baseline(n_max: usize) -> f64 {
    0.5f64.powi(n_max as i32)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n_max: usize,
    pub p: f64,
    pub total_probability: f64,
    pub fidelity: f64,
    pub step_probabilities: Vec<f64>,
}

/// Evaluates total probability, fidelity and `P_k(p)` on an `(N, p)` grid.
pub fn probability_sweep(
    n_values: &[usize],
    p_grid: &[f64],
) -> Result<Vec<SweepRow>, ProtocolError> {
    for &p in p_grid {
        if !(0.0..=1.0).contains(&p) {
            return Err(ProtocolError::InvalidProbability(p));
        }
    }
    let histories = n_values
        .iter()
        .map(|&n| coefficient_history(n))
        .collect::<Result<Vec<_>, _>>()?;
    let cells: Vec<(usize, usize, f64)> = n_values
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| p_grid.iter().map(move |&p| (i, n, p)))
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(i, n_max, p)| {
            let history = &histories[i];
            let mut prev: &[f64] = &[1.0];
            let mut step_probabilities = Vec::with_capacity(n_max);
            for record in history {
                step_probabilities.push(step_probability(&record.ground, prev, p));
                prev = &record.ground;
            }
            SweepRow {
                n_max,
                p,
                total_probability: step_probabilities.iter().product(),
                fidelity: closed_form_fidelity(prev, p),
                step_probabilities,
            }
        })
        .collect())
}
