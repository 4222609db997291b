//! Partial-transpose negativities of three-qubit states.
//!
//! Normalization: `N = ‖ρ^{T_A}‖₁ - 1`, i.e. twice the sum of the moduli of
//! the negative partial-transpose eigenvalues, so that GHZ scores 1.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, EIGEN_TOL};
use crate::qubits::{partial_transpose, DensityOperator};

/// Eigenvalues above this (and below zero) count as zero.
const NEGATIVE_EIGEN_TOL: f64 = 1e-12;

/// One-versus-rest bipartition, labelled by the lone qubit (1, 2 or 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BipartitionLabel {
    solo: usize,
}

impl BipartitionLabel {
    pub const ALL: [BipartitionLabel; 3] =
        [BipartitionLabel { solo: 1 }, BipartitionLabel { solo: 2 }, BipartitionLabel { solo: 3 }];

    pub fn new(solo: usize) -> Result<Self> {
        if !(1..=3).contains(&solo) {
            return Err(Error::validation("solo", format!("qubit {solo} is not one of 1, 2, 3")));
        }
        Ok(BipartitionLabel { solo })
    }

    pub fn solo(&self) -> usize {
        self.solo
    }
}

fn check_three(rho: &DensityOperator) -> Result<()> {
    if rho.num_qubits() != 3 {
        return Err(Error::contract(format!("negativity needs a 3-qubit state, got {}", rho.num_qubits())));
    }
    Ok(())
}

pub fn bipartite_negativity(rho: &DensityOperator, part: BipartitionLabel) -> Result<f64> {
    check_three(rho)?;
    let pt = partial_transpose(rho, &[part.solo - 1])?;
    let values = hermitian_eigen(&pt, EIGEN_TOL)?.values;
    Ok(2.0 * values.iter().filter(|&&l| l < -NEGATIVE_EIGEN_TOL).map(|l| -l).sum::<f64>())
}

/// The three one-versus-rest negativities, ordered by lone qubit.
pub fn bipartite_negativities(rho: &DensityOperator) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(BipartitionLabel::ALL) {
        *slot = bipartite_negativity(rho, part)?;
    }
    Ok(out)
}

/// Geometric mean of the three bipartite negativities.
pub fn tripartite_negativity(rho: &DensityOperator) -> Result<f64> {
    let [a, b, c] = bipartite_negativities(rho)?;
    let prod = a * b * c;
    Ok(if prod > 0.0 { prod.cbrt() } else { 0.0 })
}
