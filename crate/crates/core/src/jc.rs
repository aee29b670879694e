//! Resonant Jaynes-Cummings evolution of a two-level atom and one cavity
//! mode, in the interaction picture.
//!
//! Time always enters as the dimensionless product `g·t`. The closed-form
//! propagator rotates each pair `(|↑,n⟩, |↓,n+1⟩)` by the angle
//! `√(n+1)·g·t`; `|↓,0⟩` is stationary. [`jc_unitary_oracle`] builds the
//! same propagator from the dense generator and a Taylor matrix exponential
//! and is kept independent of the blockwise form so the two can be
//! compared.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::{FockError, FockVector};

/// Outcome probabilities below this are treated as impossible.
pub const IMPOSSIBLE_OUTCOME_TOL: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error(
        "excited amplitude on the top Fock level {dim_minus_one} would leave the truncated space"
    )]
    Truncation { dim_minus_one: usize },
    #[error("outcome {level:?} has probability {probability:e}")]
    ImpossibleOutcome { level: AtomLevel, probability: f64 },
    #[error("atomic excitation probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error(transparent)]
    Fock(#[from] FockError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AtomLevel {
    Up,
    Down,
}

/// What to do when the excited branch populates the top Fock level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Headroom {
    /// Extend the truncation by one level before evolving.
    #[default]
    Grow,
    /// Report a truncation violation.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomState {
    pub up: C64,
    pub down: C64,
}

impl AtomState {
    pub fn excited() -> Self {
        Self {
            up: C64::new(1.0, 0.0),
            down: C64::new(0.0, 0.0),
        }
    }

    pub fn ground() -> Self {
        Self {
            up: C64::new(0.0, 0.0),
            down: C64::new(1.0, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.up.norm_sqr() + self.down.norm_sqr()
    }
}

/// Ramsey-zone preparation `√p |↑⟩ + e^{iφ} √(1-p) |↓⟩`.
pub fn ramsey_prepare(p: f64, varphi: f64) -> Result<AtomState, DynamicsError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(DynamicsError::InvalidProbability(p));
    }
    Ok(AtomState {
        up: C64::new(p.sqrt(), 0.0),
        down: C64::from_polar((1.0 - p).sqrt(), varphi),
    })
}

/// Amplitudes `u_n` on `|↑,n⟩` and `d_n` on `|↓,n⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointState {
    up: Vec<C64>,
    down: Vec<C64>,
}

impl JointState {
    pub fn new(up: Vec<C64>, down: Vec<C64>) -> Result<Self, DynamicsError> {
        if up.is_empty() || up.len() != down.len() {
            return Err(FockError::EmptyDimension.into());
        }
        Ok(Self { up, down })
    }

    /// Basis state `|level, n⟩` in a space with `dim` photon levels.
    pub fn basis(level: AtomLevel, n: usize, dim: usize) -> Result<Self, DynamicsError> {
        let field = FockVector::number_state(n, dim)?;
        let atom = match level {
            AtomLevel::Up => AtomState::excited(),
            AtomLevel::Down => AtomState::ground(),
        };
        Ok(tensor(&atom, &field))
    }

    pub fn dim(&self) -> usize {
        self.up.len()
    }

    pub fn up(&self) -> &[C64] {
        &self.up
    }

    pub fn down(&self) -> &[C64] {
        &self.down
    }

    pub fn norm_sqr(&self) -> f64 {
        self.up.iter().chain(&self.down).map(|a| a.norm_sqr()).sum()
    }

    /// Zero-pads both branches to `dim` photon levels.
    pub fn padded(&self, dim: usize) -> Self {
        let mut s = self.clone();
        if dim > s.dim() {
            s.up.resize(dim, C64::new(0.0, 0.0));
            s.down.resize(dim, C64::new(0.0, 0.0));
        }
        s
    }

    /// Largest elementwise modulus of `self - other` over the padded space.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let dim = self.dim().max(other.dim());
        let (a, b) = (self.padded(dim), other.padded(dim));
        a.up.iter()
            .chain(&a.down)
            .zip(b.up.iter().chain(&b.down))
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn with_headroom(&self, headroom: Headroom) -> Result<Self, DynamicsError> {
        let top = self.dim() - 1;
        if self.up[top] == C64::new(0.0, 0.0) {
            return Ok(self.clone());
        }
        match headroom {
            Headroom::Grow => Ok(self.padded(self.dim() + 1)),
            Headroom::Strict => Err(DynamicsError::Truncation { dim_minus_one: top }),
        }
    }
}

/// Product state `|atom⟩ ⊗ |field⟩`.
pub fn tensor(atom: &AtomState, field: &FockVector) -> JointState {
    JointState {
        up: field.amplitudes().iter().map(|a| atom.up * a).collect(),
        down: field.amplitudes().iter().map(|a| atom.down * a).collect(),
    }
}

/// Evolves `state` for the dimensionless time `gt` using the exact
/// two-by-two rotations of the resonant interaction.
pub fn evolve_resonant(
    state: &JointState,
    gt: f64,
    headroom: Headroom,
) -> Result<JointState, DynamicsError> {
    let mut s = state.with_headroom(headroom)?;
    let dim = s.dim();
    for n in 0..dim - 1 {
        let (sin, cos) = (((n + 1) as f64).sqrt() * gt).sin_cos();
        let u = s.up[n];
        let d = s.down[n + 1];
        s.up[n] = u * cos + d * sin;
        s.down[n + 1] = d * cos - u * sin;
    }
    Ok(s)
}

/// Field state conditioned on measuring the atom in `level`, with the Born
/// probability of that outcome.
pub fn project_atom(
    state: &JointState,
    level: AtomLevel,
) -> Result<(FockVector, f64), DynamicsError> {
    let branch = match level {
        AtomLevel::Up => &state.up,
        AtomLevel::Down => &state.down,
    };
    let field = FockVector::new(branch.clone())?;
    let probability = field.norm_sqr() / state.norm_sqr();
    if probability < IMPOSSIBLE_OUTCOME_TOL {
        return Err(DynamicsError::ImpossibleOutcome { level, probability });
    }
    Ok((field.normalized()?, probability))
}

/// Relative size of the last Taylor term accepted by the oracle.
const TAYLOR_TOL: f64 = 1e-13;

/// Dense generator `G` (with `g = 1`) of `d/dt ψ = G ψ` on the ordering
/// `[u_0 .. u_{D-1}, d_0 .. d_{D-1}]`.
fn jc_generator(dim: usize) -> Array2<f64> {
    let mut g = Array2::zeros((2 * dim, 2 * dim));
    for n in 1..dim {
        let r = (n as f64).sqrt();
        // <↑,n-1| G |↓,n> = +√n, <↓,n| G |↑,n-1> = -√n
        g[[n - 1, dim + n]] = r;
        g[[dim + n, n - 1]] = -r;
    }
    g
}

fn one_norm(m: &Array2<f64>) -> f64 {
    m.columns()
        .into_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(a)` by scaling and squaring with a truncated Taylor series.
pub(crate) fn expm_taylor(a: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    let norm = one_norm(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings);
    let mut result = Array2::<f64>::eye(n);
    let mut term = Array2::<f64>::eye(n);
    for k in 1..=60 {
        term = term.dot(&scaled) / k as f64;
        result += &term;
        if one_norm(&term) <= TAYLOR_TOL * one_norm(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

/// Same propagation as [`evolve_resonant`], obtained from the matrix
/// exponential of the dense truncated generator.
pub fn jc_unitary_oracle(
    state: &JointState,
    gt: f64,
    headroom: Headroom,
) -> Result<JointState, DynamicsError> {
    let s = state.with_headroom(headroom)?;
    let dim = s.dim();
    let propagator = expm_taylor(&(jc_generator(dim) * gt));
    let psi: Array1<C64> = s.up.iter().chain(&s.down).copied().collect();
    let out: Vec<C64> = propagator
        .rows()
        .into_iter()
        .map(|row| row.iter().zip(psi.iter()).map(|(m, x)| x * *m).sum())
        .collect();
    let (up, down) = out.split_at(dim);
    JointState::new(up.to_vec(), down.to_vec())
}
