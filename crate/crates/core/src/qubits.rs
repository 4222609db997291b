//! Qubit registers: kets, density operators, partial trace and transpose.
//!
//! Index convention: the first-listed qubit is the most significant bit, so
//! qubit `q` of an `n`-qubit register sits at bit `n - 1 - q`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, ComplexMatrix, ComplexVector, C64, EIGEN_TOL};

const NORM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-9;
const HERMITIAN_INPUT_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_TOL, 0)` are roundoff; anything lower is rejected.
pub const PSD_TOL: f64 = 1e-10;

fn qubit_count(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::contract(format!("dimension {dim} is not a power of two")));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Normalized state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: ComplexVector,
}

impl PureState {
    /// Requires unit norm within 1e-12.
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        let num_qubits = qubit_count(amplitudes.dim())?;
        let norm = amplitudes.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::contract(format!("state has squared norm {norm}, expected 1")));
        }
        Ok(PureState { num_qubits, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::contract("cannot normalize the zero vector"));
        }
        Self::new(amplitudes.scale(c64(1.0 / norm, 0.0)))
    }

    /// Normalizes a real superposition `Σ w_k |bits_k>`.
    pub fn superposition(terms: &[(f64, &str)]) -> Result<Self> {
        let n = terms.first().map(|(_, b)| b.len()).ok_or_else(|| Error::contract("empty superposition"))?;
        let mut amps = ComplexVector::zeros(1 << n);
        for (w, bits) in terms {
            if bits.len() != n {
                return Err(Error::contract("mixed register sizes in superposition"));
            }
            amps[parse_bits(bits)?] += c64(*w, 0.0);
        }
        Self::normalized(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.dim()
    }

    pub fn projector(&self) -> DensityOperator {
        DensityOperator { num_qubits: self.num_qubits, matrix: self.amplitudes.outer_self() }
    }
}

fn parse_bits(bits: &str) -> Result<usize> {
    bits.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::contract(format!("invalid bit string {bits:?}"))),
    })
}

/// Computational basis ket; the first bit is the most significant.
pub fn basis_ket(bits: &[u8]) -> Result<PureState> {
    if bits.is_empty() {
        return Err(Error::contract("basis ket needs at least one bit"));
    }
    let mut index = 0usize;
    for &b in bits {
        if b > 1 {
            return Err(Error::contract(format!("bit value {b} is not 0 or 1")));
        }
        index = (index << 1) | b as usize;
    }
    let mut amps = ComplexVector::zeros(1 << bits.len());
    amps[index] = c64(1.0, 0.0);
    PureState::new(amps)
}

/// Polar/azimuthal pair `(α, β)` of a single-qubit ket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAngles {
    alpha: f64,
    beta: f64,
}

impl BlochAngles {
    /// `alpha ∈ [0, π]`, `beta ∈ [0, 2π)`.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&alpha) {
            return Err(Error::validation("alpha", format!("{alpha} outside [0, π]")));
        }
        if !(0.0..TAU).contains(&beta) {
            return Err(Error::validation("beta", format!("{beta} outside [0, 2π)")));
        }
        Ok(BlochAngles { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Amplitudes `(cos α, e^{-iβ} sin α)` without range checks.
#[inline]
pub fn bloch_amplitudes(alpha: f64, beta: f64) -> [C64; 2] {
    let (s, c) = alpha.sin_cos();
    [c64(c, 0.0), C64::from_polar(s, -beta)]
}

/// `|α,β> = cos α |0> + e^{-iβ} sin α |1>`.
pub fn bloch_ket(angles: BlochAngles) -> PureState {
    let [a0, a1] = bloch_amplitudes(angles.alpha, angles.beta);
    let amps = ComplexVector::from_vec(vec![a0, a1]).expect("finite amplitudes");
    PureState { num_qubits: 1, amplitudes: amps }
}

/// Tensor product in listed order.
pub fn tensor_states(factors: &[PureState]) -> Result<PureState> {
    let (first, rest) = factors.split_first().ok_or_else(|| Error::contract("empty tensor product"))?;
    let mut amps = first.amplitudes.clone();
    for f in rest {
        amps = amps.kron(&f.amplitudes);
    }
    PureState::normalized(amps)
}

/// The reference three-qubit states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NamedState {
    #[serde(rename = "GHZ")]
    Ghz,
    W,
    #[serde(rename = "Wtilde")]
    WTilde,
    #[serde(rename = "sigmaGHZ")]
    SigmaGhz,
}

impl NamedState {
    pub const ALL: [NamedState; 4] = [NamedState::Ghz, NamedState::W, NamedState::WTilde, NamedState::SigmaGhz];

    pub fn name(self) -> &'static str {
        match self {
            NamedState::Ghz => "GHZ",
            NamedState::W => "W",
            NamedState::WTilde => "Wtilde",
            NamedState::SigmaGhz => "sigmaGHZ",
        }
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedState {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        NamedState::ALL
            .into_iter()
            .find(|n| n.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::validation("state", format!("unknown state {s:?} (GHZ, W, Wtilde, sigmaGHZ)")))
    }
}

pub fn named_state(which: NamedState) -> PureState {
    let terms: &[(f64, &str)] = match which {
        NamedState::Ghz => &[(1.0, "000"), (1.0, "111")],
        NamedState::W => &[(1.0, "100"), (1.0, "010"), (1.0, "001")],
        NamedState::WTilde => &[(1.0, "110"), (1.0, "101"), (1.0, "011")],
        NamedState::SigmaGhz => &[(1.0, "110"), (1.0, "001")],
    };
    PureState::superposition(terms).expect("well-formed named state")
}

/// Unit-trace, Hermitian, positive semidefinite operator on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    num_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates and cleans up a candidate density matrix.
    ///
    /// The input is re-symmetrized and rescaled to unit trace; eigenvalues in
    /// `[-1e-10, 0)` are clipped to zero, anything more negative is an error.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::contract("density matrix must be square"));
        }
        let num_qubits = qubit_count(matrix.rows())?;
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_INPUT_TOL {
            return Err(Error::contract(format!("density matrix is not Hermitian (defect {defect:e})")));
        }
        let m = matrix.hermitian_part();
        let tr = linalg::trace(&m)?.re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::contract(format!("density matrix has trace {tr}, expected 1")));
        }
        let m = m.scale_real(1.0 / tr);
        let eig = linalg::hermitian_eigen(&m, EIGEN_TOL)?;
        let min = eig.values[0];
        if min < -PSD_TOL {
            return Err(Error::Numerical(format!("density matrix has eigenvalue {min:e} below -{PSD_TOL:e}")));
        }
        let matrix = if min < 0.0 {
            let clipped = eig.map_spectrum(|l| l.max(0.0));
            let tr = linalg::trace(&clipped)?.re;
            clipped.scale_real(1.0 / tr)
        } else {
            m
        };
        Ok(DensityOperator { num_qubits, matrix })
    }

    /// Same as [`DensityOperator::new`] after dividing by the trace.
    pub fn from_unnormalized(matrix: ComplexMatrix) -> Result<Self> {
        let tr = linalg::trace(&matrix)?.re;
        if tr.is_nan() || tr <= 0.0 {
            return Err(Error::contract(format!("cannot normalize an operator with trace {tr}")));
        }
        Self::new(matrix.scale_real(1.0 / tr))
    }

    pub fn from_pure(state: &PureState) -> Self {
        state.projector()
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let d = 1usize << num_qubits;
        DensityOperator { num_qubits, matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64) }
    }

    /// Convex combination `Σ w_k ρ_k`; weights must be nonnegative and sum to 1.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let (_, first) = parts.first().ok_or_else(|| Error::contract("empty mixture"))?;
        let mut total = 0.0;
        let mut acc = ComplexMatrix::zeros(first.dim(), first.dim());
        for &(w, rho) in parts {
            if w < 0.0 || !w.is_finite() {
                return Err(Error::contract(format!("mixture weight {w} is negative")));
            }
            if rho.num_qubits != first.num_qubits {
                return Err(Error::contract("mixture of different register sizes"));
            }
            total += w;
            acc = &acc + &rho.matrix.scale_real(w);
        }
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::contract(format!("mixture weights sum to {total}")));
        }
        Ok(DensityOperator { num_qubits: first.num_qubits, matrix: acc.scale_real(1.0 / total) })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(linalg::hermitian_eigen(&self.matrix, EIGEN_TOL)?.values)
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator {
            num_qubits: self.num_qubits + other.num_qubits,
            matrix: linalg::kron(&self.matrix, &other.matrix),
        }
    }

    /// Reorders qubits: qubit `q` of the result is qubit `order[q]` of `self`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<DensityOperator> {
        let n = self.num_qubits;
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&q| q >= n || std::mem::replace(&mut seen[q], true)) {
            return Err(Error::contract(format!("{order:?} is not a permutation of {n} qubits")));
        }
        let map = |idx: usize| -> usize {
            let mut src = 0;
            for (q, &from) in order.iter().enumerate() {
                let bit = (idx >> (n - 1 - q)) & 1;
                src |= bit << (n - 1 - from);
            }
            src
        };
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] = self.matrix[(map(i), map(j))];
            }
        }
        Ok(DensityOperator { num_qubits: n, matrix: out })
    }
}

fn check_subset(set: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() != set.len() {
        return Err(Error::contract(format!("qubit set {set:?} has duplicates")));
    }
    if let Some(&q) = s.iter().find(|&&q| q >= n) {
        return Err(Error::contract(format!("qubit {q} outside a {n}-qubit register")));
    }
    Ok(s)
}

/// Reduced state on `keep`, in the kept qubits' original relative order.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let n = rho.num_qubits;
    let keep = check_subset(keep, n)?;
    if keep.is_empty() {
        return Err(Error::contract("partial trace must keep at least one qubit"));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let embed = |kept: usize, env: usize| -> usize {
        let mut idx = 0;
        for (pos, &q) in keep.iter().enumerate() {
            idx |= ((kept >> (keep.len() - 1 - pos)) & 1) << (n - 1 - q);
        }
        for (pos, &q) in traced.iter().enumerate() {
            idx |= ((env >> (traced.len() - 1 - pos)) & 1) << (n - 1 - q);
        }
        idx
    };
    let dk = 1usize << keep.len();
    let de = 1usize << traced.len();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = c64(0.0, 0.0);
            for e in 0..de {
                acc += rho.matrix[(embed(i, e), embed(j, e))];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(DensityOperator { num_qubits: keep.len(), matrix: out.hermitian_part() })
}

/// Transposes the indices of the qubits in `part`. The result is Hermitian
/// but need not be positive, so it comes back as a bare matrix.
pub fn partial_transpose(rho: &DensityOperator, part: &[usize]) -> Result<ComplexMatrix> {
    let n = rho.num_qubits;
    let part = check_subset(part, n)?;
    let mask: usize = part.iter().map(|&q| 1usize << (n - 1 - q)).sum();
    let d = rho.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let si = (i & !mask) | (j & mask);
            let sj = (j & !mask) | (i & mask);
            out[(i, j)] = rho.matrix[(si, sj)];
        }
    }
    Ok(out)
}

/// `½ Σ |λ_k(a - b)|`.
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::contract(format!("trace distance between dimensions {} and {}", a.dim(), b.dim())));
    }
    let diff = &a.matrix - &b.matrix;
    let eig = linalg::hermitian_eigen(&diff.hermitian_part(), EIGEN_TOL)?;
    Ok(0.5 * eig.values.iter().map(|l| l.abs()).sum::<f64>())
}
