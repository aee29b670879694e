//! Dispersive atom-cavity gates on a qubit encoded in two orthogonal
//! binomial states `|0_L⟩ = |N, 1/2, φ⟩` and `|1_L⟩ = |N, 1/2, φ + π⟩`.
//!
//! A far-detuned three-level atom shifts the field phase by `-nθ` only when
//! it is in `|e⟩`, with `θ = Ω²t/δ`. At `θ = π` this swaps the two logical
//! states, which gives a CNOT with the atom as control (`|g⟩ = |0_c⟩`,
//! `|e⟩ = |1_c⟩`).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::{inner_product, make_binomial_state, BinomialStateSpec, FockError, FockVector};

/// Largest norm a target may have outside the logical span.
pub const LOGICAL_SPAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GateError {
    #[error("amplitudes have squared norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("target has norm {residual:e} outside the logical subspace")]
    OutsideLogicalSpan { residual: f64 },
    #[error(transparent)]
    Fock(#[from] FockError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ControlLevel {
    G,
    E,
}

/// Control atom restricted to `|g⟩, |e⟩`; the upper level `|i⟩` is never
/// populated in the dispersive regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlAtom {
    pub g: C64,
    pub e: C64,
}

impl ControlAtom {
    pub fn new(g: C64, e: C64) -> Self {
        Self { g, e }
    }

    pub fn ground() -> Self {
        Self::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    }

    pub fn excited() -> Self {
        Self::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.g.norm_sqr() + self.e.norm_sqr()
    }
}

/// Encoding `|0_L⟩ = |N, 1/2, φ⟩`, `|1_L⟩ = |N, 1/2, φ + π⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogicalQubitSpec {
    pub n_max: usize,
    pub phi: f64,
}

impl LogicalQubitSpec {
    pub fn new(n_max: usize, phi: f64) -> Self {
        Self { n_max, phi }
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn zero(&self) -> FockVector {
        make_binomial_state(
            &BinomialStateSpec::new(self.n_max, 0.5, self.phi).expect("p = 1/2"),
            self.dim(),
        )
        .expect("dim = N + 1")
    }

    pub fn one(&self) -> FockVector {
        make_binomial_state(
            &BinomialStateSpec::new(self.n_max, 0.5, self.phi + PI).expect("p = 1/2"),
            self.dim(),
        )
        .expect("dim = N + 1")
    }

    /// `a|0_L⟩ + b|1_L⟩`.
    pub fn encode(&self, a: C64, b: C64) -> FockVector {
        self.zero().scaled(a).add_scaled(b, &self.one())
    }
}

/// `|n⟩ ↦ e^{-inθ} |n⟩`.
pub fn dispersive_phase(field: &FockVector, theta: f64) -> FockVector {
    let amps = field
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, a)| a * C64::from_polar(1.0, -(n as f64) * theta))
        .collect();
    FockVector::new(amps).expect("non-empty")
}

/// Atom-field state `|g⟩|F_g⟩ + |e⟩|F_e⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateJoint {
    pub g: FockVector,
    pub e: FockVector,
}

impl GateJoint {
    pub fn product(atom: &ControlAtom, field: &FockVector) -> Self {
        Self {
            g: field.scaled(atom.g),
            e: field.scaled(atom.e),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.g.norm_sqr() + self.e.norm_sqr()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.g
            .max_abs_diff(&other.g)
            .max(self.e.max_abs_diff(&other.e))
    }
}

/// π dispersive interaction on an arbitrary joint state.
pub fn pi_di_joint(state: &GateJoint) -> GateJoint {
    GateJoint {
        g: state.g.clone(),
        e: dispersive_phase(&state.e, PI),
    }
}

/// π dispersive interaction of a control atom with a field.
pub fn pi_di(atom: &ControlAtom, field: &FockVector) -> GateJoint {
    pi_di_joint(&GateJoint::product(atom, field))
}

/// π/2 pulse: `|g⟩ → (|g⟩ + |e⟩)/√2`, `|e⟩ → (|e⟩ - |g⟩)/√2`.
pub fn ramsey_pi_half(atom: &ControlAtom) -> ControlAtom {
    ControlAtom {
        g: (atom.g - atom.e) * FRAC_1_SQRT_2,
        e: (atom.g + atom.e) * FRAC_1_SQRT_2,
    }
}

fn ramsey_pi_half_joint(state: &GateJoint) -> GateJoint {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    GateJoint {
        g: state.g.scaled(h).add_scaled(-h, &state.e),
        e: state.g.scaled(h).add_scaled(h, &state.e),
    }
}

fn check_normalized(a: C64, b: C64) -> Result<(), GateError> {
    let n = a.norm_sqr() + b.norm_sqr();
    if (n - 1.0).abs() > 1e-12 {
        return Err(GateError::NotNormalized(n));
    }
    Ok(())
}

/// One measurement branch of the qubit preparation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreparationBranch {
    pub outcome: ControlLevel,
    pub probability: f64,
    /// Normalized conditional field.
    pub field: FockVector,
}

/// Both branches of the preparation sequence: Ramsey `a|g⟩ + b|e⟩`, π-DI
/// on `|0_L⟩`, π/2 pulse, atomic measurement. Index 0 is `g`, 1 is `e`.
pub fn qubit_preparation_branches(
    a: C64,
    b: C64,
    spec: &LogicalQubitSpec,
) -> Result<[PreparationBranch; 2], GateError> {
    check_normalized(a, b)?;
    let after = ramsey_pi_half_joint(&pi_di(&ControlAtom::new(a, b), &spec.zero()));
    let total = after.norm_sqr();
    let branch = |outcome, field: &FockVector| -> Result<PreparationBranch, GateError> {
        Ok(PreparationBranch {
            outcome,
            probability: field.norm_sqr() / total,
            field: field.normalized()?,
        })
    };
    Ok([
        branch(ControlLevel::G, &after.g)?,
        branch(ControlLevel::E, &after.e)?,
    ])
}

/// Prepares `a|0_L⟩ ± b|1_L⟩` and samples the atomic outcome with `rng`.
/// Outcome `e` gives `a|0_L⟩ + b|1_L⟩`, outcome `g` gives `a|0_L⟩ - b|1_L⟩`.
pub fn prepare_qubit_superposition<R: Rng + ?Sized>(
    a: C64,
    b: C64,
    spec: &LogicalQubitSpec,
    rng: &mut R,
) -> Result<PreparationBranch, GateError> {
    let [g, e] = qubit_preparation_branches(a, b, spec)?;
    let u: f64 = rng.gen();
    Ok(if u < g.probability { g } else { e })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogicalComponents {
    pub zero: C64,
    pub one: C64,
    /// Norm of the part of the field outside the logical span.
    pub residual: f64,
}

/// Projects `field` onto `{|0_L⟩, |1_L⟩}`.
pub fn logical_decompose(field: &FockVector, spec: &LogicalQubitSpec) -> LogicalComponents {
    let zero_state = spec.zero();
    let one_state = spec.one();
    let zero = inner_product(&zero_state, field);
    let one = inner_product(&one_state, field);
    let rest = field
        .add_scaled(-zero, &zero_state)
        .add_scaled(-one, &one_state);
    LogicalComponents {
        zero,
        one,
        residual: rest.norm(),
    }
}

/// Applies the π-DI CNOT to a control atom and a logical target field.
pub fn cnot(
    control: &ControlAtom,
    target: &FockVector,
    spec: &LogicalQubitSpec,
) -> Result<GateJoint, GateError> {
    let parts = logical_decompose(target, spec);
    if parts.residual >= LOGICAL_SPAN_TOL {
        return Err(GateError::OutsideLogicalSpan {
            residual: parts.residual,
        });
    }
    Ok(pi_di(control, target))
}

/// Amplitudes `[[⟨g,0_L|ψ⟩, ⟨g,1_L|ψ⟩], [⟨e,0_L|ψ⟩, ⟨e,1_L|ψ⟩]]`.
pub fn two_qubit_amplitudes(state: &GateJoint, spec: &LogicalQubitSpec) -> [[C64; 2]; 2] {
    let g = logical_decompose(&state.g, spec);
    let e = logical_decompose(&state.e, spec);
    [[g.zero, g.one], [e.zero, e.one]]
}

/// Ideal CNOT output for control `c|0⟩ + d|1⟩` and target `a|0⟩ + b|1⟩`,
/// in the layout of [`two_qubit_amplitudes`].
pub fn ideal_cnot_amplitudes(c: C64, d: C64, a: C64, b: C64) -> [[C64; 2]; 2] {
    [[a * c, b * c], [b * d, a * d]]
}
