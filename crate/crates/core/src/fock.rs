//! Truncated single-mode Fock space: state vectors, generalized binomial
//! states, coherent states and overlaps.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used when a vector is checked for unit norm.
pub const NORM_TOL: f64 = 1e-12;

/// Largest tail probability a coherent state may lose to truncation.
pub const COHERENT_TAIL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("truncation dimension {dim} too small: need at least {needed}")]
    Truncation { needed: usize, dim: usize },
    #[error("zero vector has no fidelity")]
    ZeroVector,
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("dimension must be at least 1")]
    EmptyDimension,
}

/// Reduces an angle to the half-open interval (-π, π].
pub fn reduce_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Square root of the binomial coefficient `N choose n`; zero outside `0..=N`.
///
/// The coefficient is accumulated as a running product that stays integral
/// at every step, so it is exact while `N choose n` fits in 53 bits. Beyond
/// the f64 range the log form is used.
pub fn binomial_coefficient(n_max: usize, n: i64) -> f64 {
    if n < 0 || n as u64 > n_max as u64 {
        return 0.0;
    }
    let n = n as usize;
    let m = n.min(n_max - n);
    if n_max <= 1000 {
        let mut c = 1.0f64;
        for i in 1..=m {
            c = c * (n_max - m + i) as f64 / i as f64;
        }
        c.sqrt()
    } else {
        let ln: f64 = (1..=m)
            .map(|i| ((n_max - m + i) as f64).ln() - (i as f64).ln())
            .sum();
        (0.5 * ln).exp()
    }
}

/// Complex amplitudes of a single cavity mode over photon numbers `0..dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockVector {
    amplitudes: Vec<C64>,
}

impl FockVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self, FockError> {
        if amplitudes.is_empty() {
            return Err(FockError::EmptyDimension);
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self, FockError> {
        Self::new(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Result<Self, FockError> {
        Self::new(vec![C64::new(0.0, 0.0); dim])
    }

    /// Number state `|n⟩` in a space of size `dim`.
    pub fn number_state(n: usize, dim: usize) -> Result<Self, FockError> {
        if n >= dim {
            return Err(FockError::Truncation { needed: n + 1, dim });
        }
        let mut v = Self::zeros(dim)?;
        v.amplitudes[n] = C64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn vacuum(dim: usize) -> Result<Self, FockError> {
        Self::number_state(0, dim)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// Amplitude on `|n⟩`, zero beyond the truncation.
    pub fn amplitude(&self, n: usize) -> C64 {
        self.amplitudes.get(n).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    pub fn normalized(&self) -> Result<Self, FockError> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(FockError::ZeroVector);
        }
        Ok(self.scaled(C64::new(1.0 / norm, 0.0)))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    /// Zero-pads (never truncates) to at least `dim` entries.
    pub fn padded(&self, dim: usize) -> Self {
        let mut amplitudes = self.amplitudes.clone();
        if amplitudes.len() < dim {
            amplitudes.resize(dim, C64::new(0.0, 0.0));
        }
        Self { amplitudes }
    }

    /// `self + factor * other`, padded to the larger dimension.
    pub fn add_scaled(&self, factor: C64, other: &Self) -> Self {
        let dim = self.dim().max(other.dim());
        let amplitudes = (0..dim)
            .map(|n| self.amplitude(n) + factor * other.amplitude(n))
            .collect();
        Self { amplitudes }
    }

    /// Expectation of the photon number operator `a†a`.
    pub fn mean_photon_number(&self) -> f64 {
        let total = self.norm_sqr();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, a)| n as f64 * a.norm_sqr())
            .sum::<f64>()
            / total
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let dim = self.dim().max(other.dim());
        (0..dim)
            .map(|n| (self.amplitude(n) - other.amplitude(n)).norm())
            .fold(0.0, f64::max)
    }
}

/// Parameters `(N, p, φ)` of a generalized binomial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinomialStateSpec {
    n_max: usize,
    p: f64,
    phi: f64,
}

impl BinomialStateSpec {
    pub fn new(n_max: usize, p: f64, phi: f64) -> Result<Self, FockError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(FockError::InvalidProbability(p));
        }
        Ok(Self {
            n_max,
            p,
            phi: reduce_phase(phi),
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Mean phase, reduced to (-π, π].
    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// `p^e` with `0^0 = 1`.
pub(crate) fn pow_or_one(base: f64, exp: usize) -> f64 {
    if exp == 0 {
        1.0
    } else {
        base.powi(exp as i32)
    }
}

/// Real weight `[p^n (1-p)^(N-n)]^{1/2}` of photon number `n`.
pub(crate) fn binomial_weight(n_max: usize, n: usize, p: f64) -> f64 {
    (pow_or_one(p, n) * pow_or_one(1.0 - p, n_max - n)).sqrt()
}

/// Builds `|N, p, φ⟩ = Σ b_n [p^n (1-p)^(N-n)]^{1/2} e^{inφ} |n⟩` in a space
/// of size `dim`.
pub fn make_binomial_state(spec: &BinomialStateSpec, dim: usize) -> Result<FockVector, FockError> {
    let needed = spec.n_max + 1;
    if dim < needed {
        return Err(FockError::Truncation { needed, dim });
    }
    let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
    for (n, amp) in amplitudes.iter_mut().enumerate().take(needed) {
        let modulus =
            binomial_coefficient(spec.n_max, n as i64) * binomial_weight(spec.n_max, n, spec.p);
        *amp = C64::from_polar(modulus, n as f64 * spec.phi);
    }
    FockVector::new(amplitudes)
}

/// `Σ conj(a_n) b_n`, zero-padding the shorter vector.
pub fn inner_product(a: &FockVector, b: &FockVector) -> C64 {
    a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum()
}

/// `|⟨a|b⟩|² / (‖a‖² ‖b‖²)`.
pub fn fidelity(a: &FockVector, b: &FockVector) -> Result<f64, FockError> {
    let na = a.norm_sqr();
    let nb = b.norm_sqr();
    if na == 0.0 || nb == 0.0 {
        return Err(FockError::ZeroVector);
    }
    Ok((inner_product(a, b).norm_sqr() / (na * nb)).clamp(0.0, 1.0))
}

/// Truncation size that keeps a coherent state's tail well below
/// [`COHERENT_TAIL_TOL`].
pub fn coherent_dim(alpha: C64) -> usize {
    let r = alpha.norm();
    (r * r + 8.0 * r + 10.0).ceil() as usize
}

/// Coherent state `e^{-|α|²/2} Σ α^n / √(n!) |n⟩`.
pub fn coherent_state(alpha: C64, dim: usize) -> Result<FockVector, FockError> {
    if dim == 0 {
        return Err(FockError::EmptyDimension);
    }
    let mut amplitudes = Vec::with_capacity(dim);
    let mut amp = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    amplitudes.push(amp);
    for n in 1..dim {
        amp = amp * alpha / (n as f64).sqrt();
        amplitudes.push(amp);
    }
    let v = FockVector { amplitudes };
    if 1.0 - v.norm_sqr() >= COHERENT_TAIL_TOL {
        return Err(FockError::Truncation {
            needed: coherent_dim(alpha),
            dim,
        });
    }
    v.normalized()
}

/// `(N, p, φ) ↦ (N, 1 - p, φ + π)`, the parameters of an orthogonal state.
pub fn orthogonal_partner(spec: &BinomialStateSpec) -> BinomialStateSpec {
    BinomialStateSpec {
        n_max: spec.n_max,
        p: 1.0 - spec.p,
        phi: reduce_phase(spec.phi + PI),
    }
}
