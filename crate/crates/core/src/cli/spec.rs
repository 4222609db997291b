use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubits::NamedState;
use crate::witness::{QuadratureRule, QuadratureSpec, SlotPattern};

/// Points per swept axis when a config leaves `steps` out.
pub const DEFAULT_STEPS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepMode {
    #[serde(rename = "homogeneous_kT_c")]
    HomogeneousKtC,
    #[serde(rename = "inhomogeneous_kT_x")]
    InhomogeneousKtX,
    #[serde(rename = "c_profile_lowT")]
    CProfileLowT,
    #[serde(rename = "x_profile_lowT")]
    XProfileLowT,
    #[serde(rename = "c_surface")]
    CSurface,
    #[serde(rename = "mixture_family")]
    MixtureFamily,
}

/// The mixtures `p·ρ_first + (1-p)·ρ_second`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MixtureFamily {
    /// `p·GHZ + (1-p)·W`
    #[serde(rename = "GHZ_W")]
    GhzW,
    /// `p·|111> + (1-p)·W`
    #[serde(rename = "W_111")]
    W111,
    /// `p·|111> + (1-p)·GHZ`
    #[serde(rename = "GHZ_111")]
    Ghz111,
}

impl MixtureFamily {
    pub const ALL: [MixtureFamily; 3] = [MixtureFamily::GhzW, MixtureFamily::W111, MixtureFamily::Ghz111];

    pub fn name(self) -> &'static str {
        match self {
            MixtureFamily::GhzW => "GHZ_W",
            MixtureFamily::W111 => "W_111",
            MixtureFamily::Ghz111 => "GHZ_111",
        }
    }
}

impl fmt::Display for MixtureFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MixtureFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        MixtureFamily::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::validation("family", format!("unknown mixture family {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    I1,
    I4,
    I1Normalized,
    I4Normalized,
    Negativity,
    GroundLabel,
}

impl OutputKind {
    pub fn column(self) -> &'static str {
        match self {
            OutputKind::I1 => "i1",
            OutputKind::I4 => "i4",
            OutputKind::I1Normalized => "i1_normalized",
            OutputKind::I4Normalized => "i4_normalized",
            OutputKind::Negativity => "negativity",
            OutputKind::GroundLabel => "ground_label",
        }
    }

    /// Longitude count for detector outputs.
    pub fn longitudes(self) -> Option<usize> {
        match self {
            OutputKind::I1 | OutputKind::I1Normalized => Some(1),
            OutputKind::I4 | OutputKind::I4Normalized => Some(4),
            _ => None,
        }
    }
}

/// Inclusive, evenly spaced range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_steps() -> usize {
    DEFAULT_STEPS
}

impl Axis {
    pub fn new(min: f64, max: f64, steps: usize) -> Self {
        Axis { min, max, steps }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::validation(name, "range bounds must be finite"));
        }
        if self.steps < 2 {
            return Err(Error::validation(name, format!("steps must be at least 2, got {}", self.steps)));
        }
        if self.min >= self.max {
            return Err(Error::validation(
                name,
                format!("range is inverted or empty: min {} >= max {}", self.min, self.max),
            ));
        }
        Ok(())
    }

    fn within(&self, name: &str, lo: f64, hi: f64) -> Result<()> {
        if self.min < lo || self.max > hi {
            return Err(Error::validation(name, format!("range must lie within [{lo}, {hi}]")));
        }
        Ok(())
    }

    /// The `steps` sample points, endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let h = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps).map(|k| if k + 1 == self.steps { self.max } else { self.min + k as f64 * h }).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axes {
    #[serde(rename = "kT", alias = "kt", skip_serializing_if = "Option::is_none")]
    pub kt: Option<Axis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Axis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Axis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Axis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<Axis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<Axis>,
}

/// Parameters held constant during a sweep, in units of ω₀.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedParams {
    #[serde(default = "one")]
    pub omega0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(rename = "kT", alias = "kt", skip_serializing_if = "Option::is_none")]
    pub kt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl Default for FixedParams {
    fn default() -> Self {
        FixedParams { omega0: 1.0, c: None, x: None, kt: None, phi: None, xi: None }
    }
}

/// Polar grid for the detector; longitudes follow from the requested outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_theta: usize,
    pub n_eta: usize,
    #[serde(default)]
    pub rule: QuadratureRule,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n_theta: 15, n_eta: 15, rule: QuadratureRule::Midpoint }
    }
}

impl GridSpec {
    pub fn quadrature(&self, n_longitudes: usize) -> QuadratureSpec {
        QuadratureSpec { n_longitudes, n_theta: self.n_theta, n_eta: self.n_eta, rule: self.rule }
    }
}

impl FromStr for GridSpec {
    type Err = Error;
    /// Parses `NxM`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::validation("grid", format!("expected NxM, got {s:?}"));
        let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let n_theta = a.trim().parse().map_err(|_| bad())?;
        let n_eta = b.trim().parse().map_err(|_| bad())?;
        Ok(GridSpec { n_theta, n_eta, rule: QuadratureRule::Midpoint })
    }
}

/// A complete sweep description, normally read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub mode: SweepMode,
    #[serde(default)]
    pub axes: Axes,
    #[serde(default)]
    pub fixed: FixedParams,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub outputs: Vec<OutputKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<MixtureFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<NamedState>,
    #[serde(default)]
    pub pattern: SlotPattern,
}

fn need<T: Copy>(v: Option<T>, field: &str, mode: SweepMode) -> Result<T> {
    v.ok_or_else(|| Error::validation(field, format!("required by mode {mode:?}")))
}

fn positive(v: f64, field: &str) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::validation(field, format!("must be positive and finite, got {v}")));
    }
    Ok(())
}

fn nonnegative(v: f64, field: &str) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::validation(field, format!("must be nonnegative and finite, got {v}")));
    }
    Ok(())
}

impl SweepSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: SweepSpec = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("sweep spec serializes")
    }

    /// Names of the two swept axes (one for profiles and mixtures).
    pub fn swept(&self) -> &'static [&'static str] {
        match self.mode {
            SweepMode::HomogeneousKtC => &["kT", "c"],
            SweepMode::InhomogeneousKtX => &["kT", "x"],
            SweepMode::CProfileLowT => &["c"],
            SweepMode::XProfileLowT => &["x"],
            SweepMode::CSurface => &["theta", "eta"],
            SweepMode::MixtureFamily => &["p"],
        }
    }

    pub fn axis(&self, name: &str) -> Option<Axis> {
        match name {
            "kT" => self.axes.kt,
            "c" => self.axes.c,
            "x" => self.axes.x,
            "p" => self.axes.p,
            "theta" => self.axes.theta,
            "eta" => self.axes.eta,
            _ => None,
        }
    }

    /// Checks everything a sweep needs before any computation starts.
    pub fn validate(&self) -> Result<()> {
        let mode = self.mode;
        for name in ["kT", "c", "x", "p", "theta", "eta"] {
            let field = format!("axes.{name}");
            match (self.axis(name), self.swept().contains(&name)) {
                (Some(a), true) => a.validate(&field)?,
                (None, true) => return Err(Error::validation(&field, format!("required by mode {mode:?}"))),
                (Some(_), false) => return Err(Error::validation(&field, format!("not swept in mode {mode:?}"))),
                (None, false) => {}
            }
        }
        if let Some(a) = self.axes.kt {
            positive(a.min, "axes.kT.min")?;
        }
        if let Some(a) = self.axes.c {
            positive(a.min, "axes.c.min")?;
        }
        if let Some(a) = self.axes.x {
            nonnegative(a.min, "axes.x.min")?;
        }
        if let Some(a) = self.axes.p {
            a.within("axes.p", 0.0, 1.0)?;
        }
        for name in ["theta", "eta"] {
            if let Some(a) = self.axis(name) {
                a.within(&format!("axes.{name}"), 0.0, std::f64::consts::PI)?;
            }
        }

        let f = &self.fixed;
        positive(f.omega0, "fixed.omega0")?;
        let spin = matches!(
            mode,
            SweepMode::HomogeneousKtC | SweepMode::InhomogeneousKtX | SweepMode::CProfileLowT | SweepMode::XProfileLowT
        );
        if spin {
            if !self.swept().contains(&"c") {
                positive(need(f.c, "fixed.c", mode)?, "fixed.c")?;
            }
            if !self.swept().contains(&"kT") {
                positive(need(f.kt, "fixed.kT", mode)?, "fixed.kT")?;
            }
            if let Some(x) = f.x {
                nonnegative(x, "fixed.x")?;
            }
        }
        match mode {
            SweepMode::CSurface => {
                if self.state.is_none() {
                    return Err(Error::validation("state", "required by mode CSurface"));
                }
                for (name, v) in [("fixed.phi", f.phi), ("fixed.xi", f.xi)] {
                    if let Some(v) = v {
                        if !(0.0..std::f64::consts::TAU).contains(&v) {
                            return Err(Error::validation(name, format!("must lie in [0, 2π), got {v}")));
                        }
                    }
                }
            }
            SweepMode::MixtureFamily if self.family.is_none() => {
                return Err(Error::validation("family", "required by mode MixtureFamily"));
            }
            _ => {}
        }

        if mode != SweepMode::CSurface {
            if self.outputs.is_empty() {
                return Err(Error::validation("outputs", "at least one output is required"));
            }
            if mode == SweepMode::MixtureFamily && self.outputs.contains(&OutputKind::GroundLabel) {
                return Err(Error::validation("outputs", "ground_label needs a spin-star mode"));
            }
            for (i, o) in self.outputs.iter().enumerate() {
                if self.outputs[..i].contains(o) {
                    return Err(Error::validation("outputs", format!("{} listed twice", o.column())));
                }
            }
            if self.outputs.iter().any(|o| o.longitudes().is_some()) {
                self.grid.quadrature(1).validate().map_err(|e| match e {
                    Error::Validation { field, message } => {
                        Error::Validation { field: format!("grid.{field}"), message }
                    }
                    e => e,
                })?;
            }
        }
        Ok(())
    }

    /// Fixes the grid at 15x15 midpoint.
    pub fn replicate_paper(&mut self) {
        self.grid = GridSpec::default();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SweepSpec {
        SweepSpec::from_toml_str(
            r#"
mode = "homogeneous_kT_c"
outputs = ["i1_normalized", "negativity"]
[axes]
kT = { min = 0.01, max = 3.0, steps = 40 }
c = { min = 0.1, max = 6.0 }
"#,
        )
        .unwrap()
    }

    fn field_of(e: Error) -> String {
        match e {
            Error::Validation { field, .. } => field,
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn parses_and_defaults() {
        let s = sample();
        assert_eq!(s.axes.c.unwrap().steps, DEFAULT_STEPS);
        assert_eq!(s.grid, GridSpec::default());
        assert_eq!(s.pattern, SlotPattern::STANDARD);
        assert_eq!(s.fixed.omega0, 1.0);
        assert_eq!(SweepSpec::from_toml_str(&s.to_toml_string()).unwrap(), s);
    }

    #[test]
    fn rejects_zero_temperature() {
        let mut s = sample();
        s.axes.kt = Some(Axis::new(0.0, 3.0, 10));
        assert_eq!(field_of(s.validate().unwrap_err()), "axes.kT.min");
    }

    #[test]
    fn rejects_single_step() {
        let mut s = sample();
        s.axes.c = Some(Axis::new(0.1, 6.0, 1));
        assert_eq!(field_of(s.validate().unwrap_err()), "axes.c");
    }

    #[test]
    fn rejects_inverted_range() {
        let mut s = sample();
        s.axes.c = Some(Axis::new(6.0, 0.1, 10));
        let e = s.validate().unwrap_err();
        assert!(e.to_string().contains("axes.c"), "{e}");
    }

    #[test]
    fn missing_fixed_param() {
        let s: SweepSpec = toml::from_str(
            r#"
mode = "c_profile_lowT"
outputs = ["i1"]
axes.c = { min = 0.1, max = 6.0 }
"#,
        )
        .unwrap();
        assert_eq!(field_of(s.validate().unwrap_err()), "fixed.kT");
    }

    #[test]
    fn unknown_keys_are_config_errors() {
        let e = SweepSpec::from_toml_str("mode = \"c_surface\"\nbogus = 1\n").unwrap_err();
        assert!(matches!(e, Error::Config(_)));
    }

    #[test]
    fn axis_values_hit_endpoints() {
        let v = Axis::new(0.25, 5.0, 20).values();
        assert_eq!(v.len(), 20);
        assert_eq!(v[0], 0.25);
        assert_eq!(v[19], 5.0);
        assert!((v[3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_flag() {
        let g: GridSpec = "21x31".parse().unwrap();
        assert_eq!((g.n_theta, g.n_eta), (21, 31));
        assert!("21".parse::<GridSpec>().is_err());
    }
}
