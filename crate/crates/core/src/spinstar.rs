//! Central spin coupled to three peripheral spins by flip-flop exchange.
//!
//! ```text
//! H = (ω₀/2) Σ_{k=0..3} σ_z^k + Σ_{k=1..3} c_k (σ₊⁰σ₋^k + σ₋⁰σ₊^k),   c₁ = c₃ = c, c₂ = c·x
//! ```
//!
//! Spin 0 is the central spin and the most significant qubit. The basis
//! convention is `σ_z|0> = -|0>`, `σ_z|1> = +|1>`, so `|0000>` has energy
//! `-2ω₀`; flipping it silently mirrors the whole spectrum.
//!
//! The closed-form eigensystem is labelled by energy level: `4-` is the level
//! `-(c√(2+x²) + ω₀)`, `5-` the level `ω₀ - c√(2+x²)`, `1±` the levels `±cx`,
//! and each label carries the eigenvector that actually has that energy.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, kron, ComplexMatrix, ComplexVector, EIGEN_TOL};
use crate::qubits::{partial_trace, DensityOperator};

/// Below this inhomogeneity the `1/x` terms of the closed forms are avoided.
pub const ANALYTIC_X_MIN: f64 = 1e-6;
/// Relative energy window (in units of ω₀) for calling two levels degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;
const ORTHONORMAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinStarParams {
    pub omega0: f64,
    pub c: f64,
    pub x: f64,
    pub kt: f64,
}

impl SpinStarParams {
    pub fn new(omega0: f64, c: f64, x: f64, kt: f64) -> Result<Self> {
        let p = SpinStarParams { omega0, c, x, kt };
        p.validate()?;
        Ok(p)
    }

    /// Homogeneous model with `ω₀ = 1`.
    pub fn homogeneous(c: f64, kt: f64) -> Result<Self> {
        Self::new(1.0, c, 1.0, kt)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("omega0", self.omega0), ("c", self.c), ("kT", self.kt)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation(name, format!("must be positive and finite, got {v}")));
            }
        }
        if !(self.x >= 0.0 && self.x.is_finite()) {
            return Err(Error::validation("x", format!("must be nonnegative and finite, got {}", self.x)));
        }
        Ok(())
    }

    fn couplings(&self) -> [f64; 3] {
        [self.c, self.c * self.x, self.c]
    }
}

fn single_site(op: &ComplexMatrix, site: usize) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    (0..4).fold(ComplexMatrix::identity(1), |acc, k| kron(&acc, if k == site { op } else { &id }))
}

/// The 16x16 Hamiltonian.
pub fn hamiltonian(p: &SpinStarParams) -> ComplexMatrix {
    let sz = ComplexMatrix::from_diag(&[-1.0, 1.0]);
    let raise = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).expect("2x2");
    let lower = linalg::dagger(&raise);

    let mut h = ComplexMatrix::zeros(16, 16);
    for k in 0..4 {
        h = &h + &single_site(&sz, k).scale_real(p.omega0 / 2.0);
    }
    let raise0 = single_site(&raise, 0);
    let lower0 = single_site(&lower, 0);
    for (k, ck) in (1..4).zip(p.couplings()) {
        let hop = &(&raise0 * &single_site(&lower, k)) + &(&lower0 * &single_site(&raise, k));
        h = &h + &hop.scale_real(ck);
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
    Alpha,
    Beta,
    Single,
}

/// Name of a closed-form eigenpair, e.g. `psi4-` or `psi6a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EigenLabel {
    pub family: u8,
    pub branch: Branch,
}

impl EigenLabel {
    pub const fn new(family: u8, branch: Branch) -> Self {
        EigenLabel { family, branch }
    }
}

impl fmt::Display for EigenLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let suffix = match self.branch {
            Branch::Plus => "+",
            Branch::Minus => "-",
            Branch::Alpha => "a",
            Branch::Beta => "b",
            Branch::Single => "",
        };
        write!(f, "psi{}{}", self.family, suffix)
    }
}

/// Closed-form energy levels; valid for every `x >= 0`.
pub fn analytic_energies(p: &SpinStarParams) -> Vec<(EigenLabel, f64)> {
    use Branch::*;
    let SpinStarParams { omega0: w, c, x, .. } = *p;
    let s = (8.0 + x * x).sqrt();
    let r = (2.0 + x * x).sqrt();
    vec![
        (EigenLabel::new(1, Plus), c * x),
        (EigenLabel::new(1, Minus), -c * x),
        (EigenLabel::new(2, Plus), 0.5 * c * (x + s)),
        (EigenLabel::new(2, Minus), -0.5 * c * (x + s)),
        (EigenLabel::new(3, Plus), 0.5 * c * (x - s)),
        (EigenLabel::new(3, Minus), -0.5 * c * (x - s)),
        (EigenLabel::new(4, Plus), c * r + w),
        (EigenLabel::new(4, Minus), -(c * r + w)),
        (EigenLabel::new(5, Plus), c * r - w),
        (EigenLabel::new(5, Minus), -(c * r - w)),
        (EigenLabel::new(6, Alpha), -w),
        (EigenLabel::new(6, Beta), -w),
        (EigenLabel::new(7, Alpha), w),
        (EigenLabel::new(7, Beta), w),
        (EigenLabel::new(8, Single), -2.0 * w),
        (EigenLabel::new(9, Single), 2.0 * w),
    ]
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub label: EigenLabel,
    pub energy: f64,
    pub state: ComplexVector,
}

/// All sixteen closed-form eigenpairs plus the normalization constants.
#[derive(Debug, Clone)]
pub struct AnalyticEigensystem {
    pub pairs: Vec<Eigenpair>,
    /// Norm of the `ψ2` combinations.
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl AnalyticEigensystem {
    pub fn get(&self, label: EigenLabel) -> Option<&Eigenpair> {
        self.pairs.iter().find(|p| p.label == label)
    }

    /// `Σ w(E_k) |ψ_k><ψ_k|`.
    pub fn spectral_sum(&self, weight: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(16, 16);
        for pair in &self.pairs {
            let w = weight(pair.energy);
            if w != 0.0 {
                acc = &acc + &pair.state.outer_self().scale_real(w);
            }
        }
        acc
    }
}

fn ket4(terms: &[(f64, &str)], scale: f64) -> ComplexVector {
    let mut v = ComplexVector::zeros(16);
    for &(w, bits) in terms {
        let idx = usize::from_str_radix(bits, 2).expect("binary label");
        v[idx] += c64(w * scale, 0.0);
    }
    v
}

/// Builds the closed-form eigensystem; fails for `x < 1e-6` so callers can
/// fall back to [`numeric_eigensystem`].
pub fn analytic_eigensystem(p: &SpinStarParams) -> Result<AnalyticEigensystem> {
    p.validate()?;
    let x = p.x;
    if x < ANALYTIC_X_MIN {
        return Err(Error::AnalyticDomain { x });
    }
    let s = (8.0 + x * x).sqrt();
    let r = (2.0 + x * x).sqrt();
    let a = (s - x) / 2.0;
    let b = (s + x) / 2.0;
    let k1 = (4.0 + 2.0 * a * a).sqrt();
    // the ψ3 combinations carry b instead of a, so their norm differs from k1
    let k1b = (4.0 + 2.0 * b * b).sqrt();
    let k2 = (2.0 * (2.0 + x * x)).sqrt();
    let k3 = (2.0 / (x * x) + 3.0 + x * x).sqrt();
    let kb = (1.0 + x * x).sqrt();

    let two_exc = |sign: f64, coef: f64, norm: f64| {
        ket4(
            &[(1.0, "0011"), (sign, "1100"), (1.0, "0110"), (sign, "1001"), (coef, "0101"), (sign * coef, "1010")],
            1.0 / norm,
        )
    };
    let three_exc = |sign: f64| ket4(&[(r, "0111"), (sign, "1011"), (sign * x, "1101"), (sign, "1110")], 1.0 / k2);
    let one_exc = |sign: f64| ket4(&[(1.0, "0100"), (x, "0010"), (1.0, "0001"), (sign * r, "1000")], 1.0 / k2);

    let states = [
        ket4(&[(1.0, "0011"), (-1.0, "1100"), (-1.0, "0110"), (1.0, "1001")], 0.5),
        ket4(&[(1.0, "0011"), (1.0, "1100"), (-1.0, "0110"), (-1.0, "1001")], 0.5),
        two_exc(1.0, a, k1),
        two_exc(-1.0, a, k1),
        two_exc(1.0, -b, k1b),
        two_exc(-1.0, -b, k1b),
        three_exc(1.0),
        one_exc(-1.0),
        one_exc(1.0),
        three_exc(-1.0),
        ket4(&[(1.0 / x, "0001"), (1.0, "0010"), (-(1.0 / x + x), "0100")], 1.0 / k3),
        ket4(&[(1.0, "0010"), (-x, "0001")], 1.0 / kb),
        ket4(&[(1.0 / x, "1011"), (1.0, "1101"), (-(1.0 / x + x), "1110")], 1.0 / k3),
        ket4(&[(1.0, "1101"), (-x, "1011")], 1.0 / kb),
        ket4(&[(1.0, "0000")], 1.0),
        ket4(&[(1.0, "1111")], 1.0),
    ];
    let pairs: Vec<Eigenpair> = analytic_energies(p)
        .into_iter()
        .zip(states)
        .map(|((label, energy), state)| Eigenpair { label, energy, state })
        .collect();

    for (i, pi) in pairs.iter().enumerate() {
        for pj in &pairs[i..] {
            let expect = if pi.label == pj.label { 1.0 } else { 0.0 };
            let overlap = pi.state.inner(&pj.state);
            if (overlap - c64(expect, 0.0)).norm() > ORTHONORMAL_TOL {
                return Err(Error::Numerical(format!(
                    "closed-form eigenvectors {} and {} have overlap {overlap}",
                    pi.label, pj.label
                )));
            }
        }
    }
    Ok(AnalyticEigensystem { pairs, k1, k2, k3 })
}

/// Numerical eigendecomposition of `H`.
pub fn numeric_eigensystem(p: &SpinStarParams) -> Result<linalg::EigenDecomposition> {
    p.validate()?;
    linalg::hermitian_eigen(&hamiltonian(p), EIGEN_TOL)
}

/// Gibbs state `e^{-H/kT} / Z` on the four spins.
///
/// Uses the closed-form eigensystem when `x` allows, the numerical one
/// otherwise. Boltzmann factors are shifted by the ground energy.
pub fn thermal_state(p: &SpinStarParams) -> Result<DensityOperator> {
    p.validate()?;
    let unnormalized = match analytic_eigensystem(p) {
        Ok(sys) => {
            let e0 = sys.pairs.iter().map(|q| q.energy).fold(f64::INFINITY, f64::min);
            sys.spectral_sum(|e| (-(e - e0) / p.kt).exp())
        }
        Err(Error::AnalyticDomain { .. }) => {
            let eig = numeric_eigensystem(p)?;
            let e0 = eig.values[0];
            eig.map_spectrum(|e| (-(e - e0) / p.kt).exp())
        }
        Err(e) => return Err(e),
    };
    DensityOperator::from_unnormalized(unnormalized)
}

/// Gibbs state built only from the numerical eigensolver.
pub fn thermal_state_numeric(p: &SpinStarParams) -> Result<DensityOperator> {
    let eig = numeric_eigensystem(p)?;
    let e0 = eig.values[0];
    DensityOperator::from_unnormalized(eig.map_spectrum(|e| (-(e - e0) / p.kt).exp()))
}

/// Thermal state with the central spin traced out.
pub fn peripheral_state(p: &SpinStarParams) -> Result<DensityOperator> {
    partial_trace(&thermal_state(p)?, &[1, 2, 3])
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    /// More than one entry when levels tie within `1e-12·ω₀`.
    pub labels: Vec<EigenLabel>,
}

impl GroundState {
    pub fn is_degenerate(&self) -> bool {
        self.labels.len() > 1
    }
}

impl fmt::Display for GroundState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
        f.write_str(&names.join("|"))
    }
}

pub fn ground_state_label(p: &SpinStarParams) -> Result<GroundState> {
    p.validate()?;
    let levels = analytic_energies(p);
    let energy = levels.iter().map(|l| l.1).fold(f64::INFINITY, f64::min);
    let window = DEGENERACY_TOL * p.omega0;
    let labels = levels.iter().filter(|l| l.1 - energy <= window).map(|l| l.0).collect();
    Ok(GroundState { energy, labels })
}

/// Couplings where the ground state changes: `|0000> → ψ4-` at `c_low` and
/// `ψ4- → ψ2-` at `c_high`.
pub fn transition_couplings(omega0: f64, x: f64) -> Result<(f64, f64)> {
    if omega0.is_nan() || omega0 <= 0.0 {
        return Err(Error::validation("omega0", "must be positive"));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::validation("x", format!("must be nonnegative and finite, got {x}")));
    }
    let r = (2.0 + x * x).sqrt();
    let c_low = omega0 / r;
    let denom = (x + (8.0 + x * x).sqrt()) / 2.0 - r;
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::NoCrossing { x });
    }
    Ok((c_low, omega0 / denom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubits::{named_state, trace_distance, NamedState, PureState};

    fn params(c: f64, x: f64, kt: f64) -> SpinStarParams {
        SpinStarParams::new(1.0, c, x, kt).unwrap()
    }

    #[test]
    fn free_spin_diagonal() {
        let h = hamiltonian(&SpinStarParams { omega0: 1.0, c: 0.0, x: 1.0, kt: 1.0 });
        for i in 0..16usize {
            let expect = 0.5 * (2.0 * i.count_ones() as f64 - 4.0);
            assert_eq!(h[(i, i)], c64(expect, 0.0));
        }
        assert_eq!(h.max_abs(), 2.0);
    }

    #[test]
    fn hopping_elements() {
        let h = hamiltonian(&params(0.7, 1.9, 1.0));
        assert!((h[(0b1000, 0b0100)].re - 0.7).abs() < 1e-15);
        assert!((h[(0b1000, 0b0010)].re - 0.7 * 1.9).abs() < 1e-15);
        assert!((h[(0b1000, 0b0001)].re - 0.7).abs() < 1e-15);
        // peripheral spins do not talk to each other
        assert_eq!(h[(0b0100, 0b0010)], c64(0.0, 0.0));
        assert_eq!(h.hermiticity_defect(), 0.0);
    }

    #[test]
    fn closed_form_points() {
        let p = params(1.0, 1.0, 1.0);
        let sys = analytic_eigensystem(&p).unwrap();
        let e = |f, b| sys.get(EigenLabel::new(f, b)).unwrap().energy;
        assert!((e(2, Branch::Minus) + 2.0).abs() < 1e-15);
        assert!((e(4, Branch::Minus) + (3f64.sqrt() + 1.0)).abs() < 1e-15);
        assert_eq!(e(6, Branch::Alpha), -1.0);
        assert_eq!(e(6, Branch::Beta), -1.0);
        for x in [0.01, 0.5, 1.0, 3.0] {
            let sys = analytic_eigensystem(&params(1.0, x, 1.0)).unwrap();
            let a = &sys.get(EigenLabel::new(6, Branch::Alpha)).unwrap().state;
            let b = &sys.get(EigenLabel::new(6, Branch::Beta)).unwrap().state;
            assert!(a.inner(b).norm() < 1e-15);
        }
    }

    #[test]
    fn closed_form_pairs_are_eigenpairs() {
        for &(c, x) in &[(1.0, 1.0), (0.3, 0.2), (4.0, 2.5), (9.0, 5.0)] {
            let p = params(c, x, 1.0);
            let h = hamiltonian(&p);
            for pair in analytic_eigensystem(&p).unwrap().pairs {
                let hv = h.apply(&pair.state);
                let res = (0..16).map(|i| (hv[i] - pair.state[i] * pair.energy).norm()).fold(0.0, f64::max);
                assert!(res < 1e-12, "{} at c={c}, x={x}: residual {res}", pair.label);
            }
        }
    }

    #[test]
    fn tiny_x_falls_back() {
        let p = params(1.0, 1e-8, 0.5);
        assert!(matches!(analytic_eigensystem(&p), Err(Error::AnalyticDomain { .. })));
        let rho = thermal_state(&p).unwrap();
        let reference = thermal_state_numeric(&p).unwrap();
        assert!((rho.matrix() - reference.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn ground_states() {
        let label = |c| ground_state_label(&params(c, 1.0, 1.0)).unwrap().to_string();
        assert_eq!(label(0.5), "psi8");
        assert_eq!(label(2.0), "psi4-");
        assert_eq!(label(4.0), "psi2-");
        let (lo, _) = transition_couplings(1.0, 1.0).unwrap();
        assert!(ground_state_label(&params(lo, 1.0, 1.0)).unwrap().is_degenerate());
    }

    #[test]
    fn transition_points() {
        let (lo, hi) = transition_couplings(1.0, 1.0).unwrap();
        assert!((lo - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((hi - 1.0 / (2.0 - 3f64.sqrt())).abs() < 1e-12);
        let sys = analytic_energies(&params(lo, 1.0, 1.0));
        let e4m = sys.iter().find(|l| l.0 == EigenLabel::new(4, Branch::Minus)).unwrap().1;
        assert!((e4m + 2.0).abs() < 1e-12);
        assert!(matches!(transition_couplings(1.0, 0.0), Err(Error::NoCrossing { .. })));
        assert!(transition_couplings(1.0, -1.0).is_err());
    }

    #[test]
    fn low_temperature_states() {
        let rho = thermal_state(&params(0.3, 1.0, 0.01)).unwrap();
        let vac = PureState::superposition(&[(1.0, "0000")]).unwrap().projector();
        assert!(trace_distance(&rho, &vac).unwrap() < 1e-8);

        let w = named_state(NamedState::W).projector();
        let wt = named_state(NamedState::WTilde).projector();
        let both = DensityOperator::mixture(&[(0.5, &w), (0.5, &wt)]).unwrap();
        let rp = peripheral_state(&params(6.0, 1.0, 0.01)).unwrap();
        assert!(trace_distance(&rp, &both).unwrap() < 1e-6);
    }

    #[test]
    fn infinite_temperature_limit() {
        let rho = thermal_state(&params(1.3, 0.7, 1e6)).unwrap();
        assert!(trace_distance(&rho, &DensityOperator::maximally_mixed(4)).unwrap() < 1e-4);
    }

    #[test]
    fn parameter_validation() {
        assert!(SpinStarParams::new(1.0, 0.0, 1.0, 1.0).is_err());
        assert!(SpinStarParams::new(1.0, 1.0, -0.5, 1.0).is_err());
        assert!(SpinStarParams::new(1.0, 1.0, 1.0, 0.0).is_err());
        assert!(SpinStarParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(SpinStarParams::new(1.0, 1.0, 0.0, 1.0).is_ok());
    }
}
