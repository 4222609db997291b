use rayon::prelude::*;

use super::spec::{GridSpec, MixtureFamily, OutputKind, SweepMode, SweepSpec};
use super::table::{Cell, SweepRow, Table};
use crate::error::{Error, Result};
use crate::negativity::tripartite_negativity;
use crate::qubits::{basis_ket, named_state, DensityOperator, NamedState};
use crate::spinstar::{ground_state_label, peripheral_state, SpinStarParams};
use crate::witness::{c_surface, ghz_normalizer, i_n_detector_with, Execution, SlotPattern};

/// CSV header for a swept variable.
pub fn axis_column(name: &str) -> &'static str {
    match name {
        "kT" => "kT_over_omega0",
        "c" => "c_over_omega0",
        "x" => "x",
        "p" => "p",
        "theta" => "theta",
        "eta" => "eta",
        _ => "value",
    }
}

/// `p·ρ_first + (1-p)·ρ_second` for one of the three families.
pub fn mixture_state(family: MixtureFamily, p: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::validation("p", format!("must lie in [0, 1], got {p}")));
    }
    let ghz = named_state(NamedState::Ghz).projector();
    let w = named_state(NamedState::W).projector();
    let ones = basis_ket(&[1, 1, 1])?.projector();
    let (first, second) = match family {
        MixtureFamily::GhzW => (&ghz, &w),
        MixtureFamily::W111 => (&ones, &w),
        MixtureFamily::Ghz111 => (&ones, &ghz),
    };
    DensityOperator::mixture(&[(p, first), (1.0 - p, second)])
}

struct Evaluator<'a> {
    outputs: &'a [OutputKind],
    grid: GridSpec,
    pattern: SlotPattern,
    norms: [f64; 2],
}

impl<'a> Evaluator<'a> {
    fn new(outputs: &'a [OutputKind], grid: GridSpec, pattern: SlotPattern) -> Result<Self> {
        let mut norms = [f64::NAN; 2];
        for (slot, n) in [(0, 1), (1, 4)] {
            if outputs
                .iter()
                .any(|o| o.longitudes() == Some(n) && matches!(o, OutputKind::I1Normalized | OutputKind::I4Normalized))
            {
                let v = ghz_normalizer(&grid.quadrature(n), &pattern)?;
                if v <= 0.0 {
                    return Err(Error::Config(format!(
                        "GHZ reference detector vanishes for pattern {pattern} on this grid"
                    )));
                }
                norms[slot] = v;
            }
        }
        Ok(Evaluator { outputs, grid, pattern, norms })
    }

    /// Appends the requested outputs for one grid point. `params` is only
    /// consulted for `ground_label`.
    fn row(&self, coords: &[f64], rho: Option<&DensityOperator>, params: Option<&SpinStarParams>) -> Result<SweepRow> {
        let mut row: SweepRow = coords.iter().map(|&v| Cell::Real(v)).collect();
        let mut raw = [None::<f64>; 2];
        for &o in self.outputs {
            let cell = match o {
                OutputKind::GroundLabel => {
                    let p = params.ok_or_else(|| Error::contract("ground_label needs spin-star parameters"))?;
                    Cell::Text(ground_state_label(p)?.to_string())
                }
                OutputKind::Negativity => Cell::Real(tripartite_negativity(rho.expect("state for negativity"))?),
                _ => {
                    let n = o.longitudes().expect("detector output");
                    let slot = usize::from(n == 4);
                    let v = match raw[slot] {
                        Some(v) => v,
                        None => {
                            let rho = rho.expect("state for detector");
                            let v = i_n_detector_with(rho, &self.grid.quadrature(n), &self.pattern, Execution::Serial)?;
                            raw[slot] = Some(v);
                            v
                        }
                    };
                    let normalized = matches!(o, OutputKind::I1Normalized | OutputKind::I4Normalized);
                    Cell::Real(if normalized { v / self.norms[slot] } else { v })
                }
            };
            row.push(cell);
        }
        Ok(row)
    }

    fn needs_state(&self) -> bool {
        self.outputs.iter().any(|&o| o != OutputKind::GroundLabel)
    }
}

fn map_points<T: Sync, F>(points: &[T], exec: Execution, f: F) -> Result<Vec<SweepRow>>
where
    F: Fn(&T) -> Result<SweepRow> + Sync + Send,
{
    match exec {
        Execution::Serial => points.iter().map(f).collect(),
        Execution::Parallel => points.par_iter().map(f).collect(),
    }
}

/// Runs a validated sweep on the rayon pool.
pub fn run_sweep(spec: &SweepSpec) -> Result<Table> {
    run_sweep_with(spec, Execution::Parallel)
}

/// Rows come out in row-major order of the swept axes (first axis slowest)
/// whatever the execution mode.
pub fn run_sweep_with(spec: &SweepSpec, exec: Execution) -> Result<Table> {
    spec.validate()?;
    let names = spec.swept();
    let axes: Vec<Vec<f64>> = names.iter().map(|n| spec.axis(n).expect("validated axis").values()).collect();
    let points: Vec<Vec<f64>> = match axes.as_slice() {
        [a] => a.iter().map(|&u| vec![u]).collect(),
        [a, b] => a.iter().flat_map(|&u| b.iter().map(move |&v| vec![u, v])).collect(),
        _ => unreachable!("one or two swept axes"),
    };
    let mut header: Vec<String> = names.iter().map(|n| axis_column(n).to_string()).collect();

    let f = &spec.fixed;
    let rows = match spec.mode {
        SweepMode::CSurface => {
            header.push("c_value".into());
            let rho = named_state(spec.state.expect("validated state")).projector();
            let (phi, xi) = (f.phi.unwrap_or(0.0), f.xi.unwrap_or(0.0));
            let surface = c_surface(&rho, &spec.pattern, &axes[0], &axes[1], phi, xi)?;
            points
                .iter()
                .zip(surface.iter().flatten())
                .map(|(pt, &c)| vec![Cell::Real(pt[0]), Cell::Real(pt[1]), Cell::Real(c)])
                .collect()
        }
        SweepMode::MixtureFamily => {
            header.extend(spec.outputs.iter().map(|o| o.column().to_string()));
            let family = spec.family.expect("validated family");
            let eval = Evaluator::new(&spec.outputs, spec.grid, spec.pattern)?;
            map_points(&points, exec, |pt| eval.row(pt, Some(&mixture_state(family, pt[0])?), None))?
        }
        mode => {
            header.extend(spec.outputs.iter().map(|o| o.column().to_string()));
            let eval = Evaluator::new(&spec.outputs, spec.grid, spec.pattern)?;
            let params = |pt: &[f64]| -> Result<SpinStarParams> {
                let (mut c, mut x, mut kt) = (f.c.unwrap_or(f64::NAN), f.x.unwrap_or(1.0), f.kt.unwrap_or(f64::NAN));
                match mode {
                    SweepMode::HomogeneousKtC => (kt, c) = (pt[0], pt[1]),
                    SweepMode::InhomogeneousKtX => (kt, x) = (pt[0], pt[1]),
                    SweepMode::CProfileLowT => c = pt[0],
                    SweepMode::XProfileLowT => x = pt[0],
                    _ => unreachable!(),
                }
                SpinStarParams::new(f.omega0, c, x, kt)
            };
            map_points(&points, exec, |pt| {
                let p = params(pt)?;
                let rho = if eval.needs_state() { Some(peripheral_state(&p)?) } else { None };
                eval.row(pt, rho.as_ref(), Some(&p))
            })?
        }
    };
    Ok(Table { header, rows })
}

/// `I^(1)` and `I^(4)`, each normalized to GHZ, for `p_steps` evenly spaced
/// mixing weights in `[0, 1]`.
pub fn run_mixture_family(family: MixtureFamily, p_steps: usize, grid: &GridSpec) -> Result<Table> {
    let spec = SweepSpec {
        mode: SweepMode::MixtureFamily,
        axes: super::spec::Axes { p: Some(super::spec::Axis::new(0.0, 1.0, p_steps)), ..Default::default() },
        fixed: Default::default(),
        grid: *grid,
        outputs: vec![OutputKind::I1Normalized, OutputKind::I4Normalized],
        family: Some(family),
        state: None,
        pattern: SlotPattern::STANDARD,
    };
    run_sweep(&spec)
}
