//! Reference values for regression comparison: the tabulated coefficient
//! mismatches `δ_n^(N)` for `N = 3..=10` and the quoted headline figures.

use serde::{Deserialize, Serialize};

use crate::protocol::{coefficient_history, mismatches, ProtocolError};

/// Tabulated `δ_n^(N)` for `n = 0..=N`, keyed by `N`.
pub const REFERENCE_MISMATCHES: [(usize, &[f64]); 8] = [
    (3, &[0.0, 1.391e-2, 0.981e-4, 3.167e-3]),
    (4, &[0.0, 1.325e-2, 1.041e-2, 1.525e-3, 6.720e-2]),
    (5, &[0.0, 1.533e-2, 1.846e-2, 1.183e-2, 1.434e-2, 1.100e-1]),
    (
        6,
        &[
            0.0, 1.816e-2, 2.618e-2, 2.442e-1, 1.812e-2, 2.963e-2, 1.424e-1,
        ],
    ),
    (
        7,
        &[
            0.0, 2.107e-2, 3.334e-2, 3.658e-2, 3.213e-2, 2.684e-2, 4.490e-2, 1.686e-1,
        ],
    ),
    (
        8,
        &[
            0.0, 2.384e-2, 3.984e-2, 4.761e-2, 4.731e-2, 4.101e-2, 3.664e-2, 5.950e-2, 1.908e-1,
        ],
    ),
    (
        9,
        &[
            0.0, 2.640e-2, 4.578e-2, 5.753e-2, 6.156e-2, 5.835e-2, 4.052e-2, 4.678e-2, 7.320e-2,
            2.100e-1,
        ],
    ),
    (
        10,
        &[
            0.0, 2.874e-2, 5.101e-2, 6.633e-2, 7.446e-2, 7.528e-2, 6.956e-2, 6.034e-2, 5.692e-2,
            8.608e-2, 2.268e-1,
        ],
    ),
];

/// Quoted `gT_3`.
pub const GT3: f64 = 11.784;
/// Quoted `c_2^(2)`.
pub const C2_OF_STEP2: f64 = -(1.0 - 3.114e-3);
/// Quoted `P_2(p) ≈ 1 - P2_CURVATURE p²`.
pub const P2_CURVATURE: f64 = 6.22e-3;
/// Quoted `1 - F_3(1/2)`.
pub const F3_HALF_INFIDELITY: f64 = 3.9e-5;
/// Quoted order of `1 - F_N(1/2)` for `4 ≤ N ≤ 10`.
pub const FN_HALF_INFIDELITY: f64 = 1e-4;
/// Quoted range of the total generation probability for `4 ≤ N ≤ 10`.
pub const TOTAL_PROBABILITY_RANGE: (f64, f64) = (0.92, 0.98);
/// Quoted lower bound of the `N = 3` generation probability.
pub const N3_PROBABILITY_FLOOR: f64 = 1.0 - 1e-2;

/// Quoted approximation `P_3(p) ≈ 1 - 0.08 p (1-p)² / (1 - 0.006 p²)`.
pub fn p3_approximation(p: f64) -> f64 {
    1.0 - 8e-2 * p * (1.0 - p).powi(2) / (1.0 - 6e-3 * p * p)
}

/// Tabulated `δ_n^(N)`, if present.
pub fn reference_mismatch(n_max: usize, n: usize) -> Option<f64> {
    REFERENCE_MISMATCHES
        .iter()
        .find(|(k, _)| *k == n_max)
        .and_then(|(_, row)| row.get(n).copied())
}

/// Comparison tolerance for a tabulated value: `max(2 % relative, 2e-4)`.
pub fn table_tolerance(reference: f64) -> f64 {
    (0.02 * reference.abs()).max(2e-4)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub n_max: usize,
    pub n: usize,
    pub computed: f64,
    pub reference: f64,
    pub abs_diff: f64,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

/// Computed mismatches side by side with the tabulated ones for every `N`
/// in `n_values` that has reference data.
pub fn compare_with_reference(n_values: &[usize]) -> Result<Vec<TableCell>, ProtocolError> {
    let mut cells = Vec::new();
    for &n_max in n_values {
        let Some((_, row)) = REFERENCE_MISMATCHES.iter().find(|(k, _)| *k == n_max) else {
            continue;
        };
        let history = coefficient_history(n_max)?;
        let computed = mismatches(&history[n_max - 1].ground);
        for (n, (&c, &r)) in computed.iter().zip(row.iter()).enumerate() {
            let abs_diff = (c - r).abs();
            let tolerance = table_tolerance(r);
            cells.push(TableCell {
                n_max,
                n,
                computed: c,
                reference: r,
                abs_diff,
                tolerance,
                within_tolerance: abs_diff <= tolerance,
            });
        }
    }
    Ok(cells)
}
