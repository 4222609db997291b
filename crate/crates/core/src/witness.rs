//! Biseparability-exclusion witness for three qubits.
//!
//! A trial state on the duplicated register is a product of six single-qubit
//! kets, each being either `|θ,φ>` (slot label `A`) or `|η,ξ>` (label `B`).
//! Slots 0..3 form copy one (qubits 1, 2, 3) and slots 3..6 copy two. With
//! `c1`, `c2` the two copies,
//!
//! ```text
//! Q = |<c1|ρ|c2>| - Σ_i sqrt(<c1'_i|ρ|c1'_i> <c2'_i|ρ|c2'_i>)
//! ```
//!
//! where `c1'_i`, `c2'_i` are the copies with their qubit-`i` factors
//! exchanged, for the three bipartitions `1|23`, `2|13`, `3|12`. Every
//! biseparable state has `Q <= 0` for all trial states.
//!
//! The detector `I^(N)` integrates `C = max(0, Q)` over `(θ, η) ∈ [0, π]²`
//! and sums over `N` equally spaced longitudes for each of `φ` and `ξ`.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, C64};
use crate::qubits::{bloch_amplitudes, named_state, DensityOperator, NamedState};

/// Roundoff allowance on the products under the square roots.
const SQRT_ARG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotLabel {
    A,
    B,
}

/// Assignment of the six duplicated-space slots to the two trial kets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SlotPattern([SlotLabel; 6]);

impl SlotPattern {
    /// `|θφ>|θφ>|θφ>|ηξ>|ηξ>|ηξ>`.
    pub const STANDARD: SlotPattern =
        SlotPattern([SlotLabel::A, SlotLabel::A, SlotLabel::A, SlotLabel::B, SlotLabel::B, SlotLabel::B]);

    /// `|θφ>|θφ>|ηξ>|ηξ>|ηξ>|θφ>`, which sees σGHZ but not GHZ.
    pub const CROSSED: SlotPattern =
        SlotPattern([SlotLabel::A, SlotLabel::A, SlotLabel::B, SlotLabel::B, SlotLabel::B, SlotLabel::A]);

    pub fn new(labels: [SlotLabel; 6]) -> Result<Self> {
        let has_a = labels.contains(&SlotLabel::A);
        let has_b = labels.contains(&SlotLabel::B);
        if !(has_a && has_b) {
            return Err(Error::validation("pattern", "needs at least one A slot and one B slot"));
        }
        Ok(SlotPattern(labels))
    }

    pub fn labels(&self) -> [SlotLabel; 6] {
        self.0
    }
}

impl Default for SlotPattern {
    fn default() -> Self {
        SlotPattern::STANDARD
    }
}

impl fmt::Display for SlotPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.0 {
            f.write_str(match l {
                SlotLabel::A => "A",
                SlotLabel::B => "B",
            })?;
        }
        Ok(())
    }
}

impl FromStr for SlotPattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let labels: Vec<SlotLabel> = s
            .chars()
            .filter(|c| !matches!(c, ',' | ' '))
            .map(|c| match c.to_ascii_uppercase() {
                'A' => Ok(SlotLabel::A),
                'B' => Ok(SlotLabel::B),
                other => Err(Error::validation("pattern", format!("unexpected slot label {other:?}"))),
            })
            .collect::<Result<_>>()?;
        let labels: [SlotLabel; 6] = labels
            .try_into()
            .map_err(|v: Vec<_>| Error::validation("pattern", format!("expected 6 slots, got {}", v.len())))?;
        SlotPattern::new(labels)
    }
}

impl Serialize for SlotPattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SlotPattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Angles of the two trial kets plus their slot layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialConfiguration {
    pub theta: f64,
    pub phi: f64,
    pub eta: f64,
    pub xi: f64,
    pub pattern: SlotPattern,
}

impl TrialConfiguration {
    pub fn new(theta: f64, phi: f64, eta: f64, xi: f64, pattern: SlotPattern) -> Result<Self> {
        for (name, v) in [("theta", theta), ("eta", eta)] {
            if !(0.0..=PI).contains(&v) {
                return Err(Error::validation(name, format!("{v} outside [0, π]")));
            }
        }
        for (name, v) in [("phi", phi), ("xi", xi)] {
            if !(0.0..TAU).contains(&v) {
                return Err(Error::validation(name, format!("{v} outside [0, 2π)")));
            }
        }
        Ok(TrialConfiguration { theta, phi, eta, xi, pattern })
    }

    /// Standard pattern with both longitudes at zero.
    pub fn polar(theta: f64, eta: f64) -> Result<Self> {
        Self::new(theta, 0.0, eta, 0.0, SlotPattern::STANDARD)
    }
}

/// Three-qubit density matrix in a fixed-size layout for the hot loop.
#[derive(Clone)]
struct Rho3([[C64; 8]; 8]);

impl Rho3 {
    fn new(rho: &DensityOperator) -> Result<Self> {
        if rho.num_qubits() != 3 {
            return Err(Error::contract(format!("witness needs a 3-qubit state, got {} qubits", rho.num_qubits())));
        }
        let m = rho.matrix();
        let mut out = [[c64(0.0, 0.0); 8]; 8];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = m[(i, j)];
            }
        }
        Ok(Rho3(out))
    }

    fn element(&self, u: &[C64; 8], v: &[C64; 8]) -> C64 {
        let mut acc = c64(0.0, 0.0);
        for (ui, rho_row) in u.iter().zip(&self.0) {
            let row: C64 = rho_row.iter().zip(v).map(|(r, vj)| r * vj).sum();
            acc += ui.conj() * row;
        }
        acc
    }
}

fn product3(k: [&[C64; 2]; 3]) -> [C64; 8] {
    let mut out = [c64(0.0, 0.0); 8];
    for (idx, z) in out.iter_mut().enumerate() {
        *z = k[0][(idx >> 2) & 1] * k[1][(idx >> 1) & 1] * k[2][idx & 1];
    }
    out
}

fn q_kernel(rho: &Rho3, a: &[C64; 2], b: &[C64; 2], pattern: &SlotPattern) -> Result<f64> {
    let slots: [&[C64; 2]; 6] = pattern.0.map(|l| match l {
        SlotLabel::A => a,
        SlotLabel::B => b,
    });
    let c1 = [slots[0], slots[1], slots[2]];
    let c2 = [slots[3], slots[4], slots[5]];
    let mut q = rho.element(&product3(c1), &product3(c2)).norm();
    for i in 0..3 {
        let mut u = c1;
        let mut v = c2;
        u[i] = c2[i];
        v[i] = c1[i];
        let pu = product3(u);
        let pv = product3(v);
        let arg = (rho.element(&pu, &pu) * rho.element(&pv, &pv)).re;
        if arg < -SQRT_ARG_TOL {
            return Err(Error::Numerical(format!(
                "negative product {arg:e} under square root for bipartition {}; input is not PSD",
                i + 1
            )));
        }
        q -= arg.max(0.0).sqrt();
    }
    Ok(q)
}

pub fn q_value(rho: &DensityOperator, trial: &TrialConfiguration) -> Result<f64> {
    let r = Rho3::new(rho)?;
    let a = bloch_amplitudes(trial.theta, trial.phi);
    let b = bloch_amplitudes(trial.eta, trial.xi);
    q_kernel(&r, &a, &b, &trial.pattern)
}

/// Positive part of [`q_value`].
pub fn c_value(rho: &DensityOperator, trial: &TrialConfiguration) -> Result<f64> {
    Ok(q_value(rho, trial)?.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadratureRule {
    /// Composite midpoint: nodes at `(k + ½)π/n`, weights `π/n`.
    #[default]
    Midpoint,
    /// Composite trapezoid: nodes at `kπ/(n-1)`, half weight at the ends.
    Trapezoid,
}

impl FromStr for QuadratureRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "midpoint" => Ok(QuadratureRule::Midpoint),
            "trapezoid" => Ok(QuadratureRule::Trapezoid),
            _ => Err(Error::validation("rule", format!("unknown quadrature rule {s:?}"))),
        }
    }
}

impl QuadratureRule {
    /// Nodes and weights on `[0, π]`.
    pub fn nodes(self, n: usize) -> Vec<(f64, f64)> {
        match self {
            QuadratureRule::Midpoint => {
                let h = PI / n as f64;
                (0..n).map(|k| ((k as f64 + 0.5) * h, h)).collect()
            }
            QuadratureRule::Trapezoid => {
                let h = PI / (n - 1) as f64;
                (0..n)
                    .map(|k| {
                        let w = if k == 0 || k == n - 1 { 0.5 * h } else { h };
                        let x = if k == n - 1 { PI } else { k as f64 * h };
                        (x, w)
                    })
                    .collect()
            }
        }
    }
}

/// Grid and longitude count for `I^(N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub n_longitudes: usize,
    pub n_theta: usize,
    pub n_eta: usize,
    #[serde(default)]
    pub rule: QuadratureRule,
}

impl QuadratureSpec {
    /// 15x15 midpoint grid.
    pub fn replication(n_longitudes: usize) -> Self {
        QuadratureSpec { n_longitudes, n_theta: 15, n_eta: 15, rule: QuadratureRule::Midpoint }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_longitudes == 0 {
            return Err(Error::validation("n_longitudes", "must be positive"));
        }
        let min = match self.rule {
            QuadratureRule::Midpoint => 1,
            QuadratureRule::Trapezoid => 2,
        };
        for (name, n) in [("n_theta", self.n_theta), ("n_eta", self.n_eta)] {
            if n < min {
                return Err(Error::validation(name, format!("grid size {n} below {min} for the {:?} rule", self.rule)));
            }
        }
        Ok(())
    }

    pub fn with_longitudes(self, n_longitudes: usize) -> Self {
        QuadratureSpec { n_longitudes, ..self }
    }
}

/// Whether grid nodes may be evaluated on the rayon pool. Both paths sum
/// the node values sequentially in the same order, so they agree bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

/// `I^(N)(ρ)` with the default (parallel) execution.
pub fn i_n_detector(rho: &DensityOperator, quad: &QuadratureSpec, pattern: &SlotPattern) -> Result<f64> {
    i_n_detector_with(rho, quad, pattern, Execution::Parallel)
}

pub fn i_n_detector_with(
    rho: &DensityOperator,
    quad: &QuadratureSpec,
    pattern: &SlotPattern,
    exec: Execution,
) -> Result<f64> {
    quad.validate()?;
    let r = Rho3::new(rho)?;
    let n = quad.n_longitudes;
    let longitudes: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
    let thetas = quad.rule.nodes(quad.n_theta);
    let etas = quad.rule.nodes(quad.n_eta);

    // one task per (φ, ξ, θ) row; the η loop runs inside
    let mut rows: Vec<(f64, f64, (f64, f64))> = Vec::with_capacity(n * n * thetas.len());
    for &phi in &longitudes {
        for &xi in &longitudes {
            rows.extend(thetas.iter().map(|&t| (phi, xi, t)));
        }
    }
    let row_value = |&(phi, xi, (theta, wt)): &(f64, f64, (f64, f64))| -> Result<Vec<f64>> {
        let a = bloch_amplitudes(theta, phi);
        etas.iter()
            .map(|&(eta, we)| {
                let b = bloch_amplitudes(eta, xi);
                Ok(wt * we * q_kernel(&r, &a, &b, pattern)?.max(0.0))
            })
            .collect()
    };
    let values: Vec<Vec<f64>> = match exec {
        Execution::Serial => rows.iter().map(row_value).collect::<Result<_>>()?,
        Execution::Parallel => rows.par_iter().map(row_value).collect::<Result<_>>()?,
    };
    Ok(values.iter().flatten().sum())
}

type NormKey = (QuadratureSpec, SlotPattern);

fn normalizer_cache() -> &'static Mutex<HashMap<NormKey, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<NormKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `I^(N)(ρ_GHZ)` for this grid and pattern, computed once per process.
pub fn ghz_normalizer(quad: &QuadratureSpec, pattern: &SlotPattern) -> Result<f64> {
    let key = (*quad, *pattern);
    if let Some(&v) = normalizer_cache().lock().expect("normalizer cache poisoned").get(&key) {
        return Ok(v);
    }
    let ghz = named_state(NamedState::Ghz).projector();
    let value = i_n_detector(&ghz, quad, pattern)?;
    normalizer_cache().lock().expect("normalizer cache poisoned").insert(key, value);
    Ok(value)
}

/// `I^(N)(ρ) / I^(N)(ρ_GHZ)` on the same grid.
pub fn i_n_normalized(rho: &DensityOperator, quad: &QuadratureSpec, pattern: &SlotPattern) -> Result<f64> {
    let norm = ghz_normalizer(quad, pattern)?;
    if norm <= 0.0 {
        return Err(Error::Config(format!("GHZ reference detector vanishes for pattern {pattern} on this grid")));
    }
    Ok(i_n_detector(rho, quad, pattern)? / norm)
}

/// `C(ρ, θ, φ, η, ξ)` tabulated with rows over `thetas` and columns over `etas`.
pub fn c_surface(
    rho: &DensityOperator,
    pattern: &SlotPattern,
    thetas: &[f64],
    etas: &[f64],
    phi: f64,
    xi: f64,
) -> Result<Vec<Vec<f64>>> {
    let r = Rho3::new(rho)?;
    thetas
        .iter()
        .map(|&t| {
            let a = bloch_amplitudes(t, phi);
            etas.iter().map(|&e| Ok(q_kernel(&r, &a, &bloch_amplitudes(e, xi), pattern)?.max(0.0))).collect()
        })
        .collect()
}

/// `n` equally spaced points covering `[0, π]` inclusive.
pub fn polar_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| if k == n - 1 { PI } else { PI * k as f64 / (n - 1) as f64 }).collect(),
    }
}

/// Closed form of `C(ρ_GHZ, θ, 0, η, 0)`.
pub fn analytic_c_ghz(theta: f64, eta: f64) -> f64 {
    let (st, ct) = theta.sin_cos();
    let (se, ce) = eta.sin_cos();
    let overlap = |c: f64, s: f64, x3: f64| (3.0 * c + x3.cos() + 4.0 * s.powi(3)).abs();
    let coherence = overlap(ct, st, 3.0 * theta) * overlap(ce, se, 3.0 * eta) / 32.0;
    let populations = 1.5 * (ce * ce * ct + se * se * st).abs() * (ct * ct * ce + st * st * se).abs();
    (coherence - populations).max(0.0)
}

/// Which reading of the closed-form W expression to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WConvention {
    /// The expression as usually quoted; under `|α,β> = cos α|0> + e^{-iβ} sin α|1>`
    /// it describes `W̃ = (|110>+|101>+|011>)/√3`.
    AsPrinted,
    /// `sin ⇄ cos` everywhere; describes `W = (|100>+|010>+|001>)/√3`.
    Swapped,
}

/// Closed form of `C(ρ, θ, 0, η, 0)` for the W-type states.
pub fn analytic_c_w(theta: f64, eta: f64, convention: WConvention) -> f64 {
    let (mut st, mut ct) = theta.sin_cos();
    let (mut se, mut ce) = eta.sin_cos();
    if convention == WConvention::Swapped {
        std::mem::swap(&mut st, &mut ct);
        std::mem::swap(&mut se, &mut ce);
    }
    let coherence = 3.0 * (ct * ce).abs() * st * st * se * se;
    let populations = (st * se * (2.0 * ct * se + st * ce)).abs() * (2.0 * ce * st + se * ct).abs();
    (coherence - populations).max(0.0)
}
