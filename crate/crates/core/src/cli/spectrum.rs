use serde::Serialize;

use super::table::{Cell, Table};
use crate::error::{Error, Result};
use crate::spinstar::{analytic_eigensystem, analytic_energies, numeric_eigensystem, SpinStarParams};

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRow {
    pub label: String,
    /// Closed-form energy over ω₀.
    pub energy: f64,
    /// Numerical eigenvalue of the same rank, over ω₀.
    pub numeric_energy: f64,
    /// `(re, im)` in computational-basis order, central spin first.
    pub amplitudes: Vec<(f64, f64)>,
}

/// Closed-form eigenpairs next to the numerical spectrum, sorted by energy.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumDump {
    pub omega0: f64,
    pub c: f64,
    pub x: f64,
    pub rows: Vec<SpectrumRow>,
    pub max_deviation: f64,
    /// Set when the closed-form vectors were unavailable and numerical ones
    /// were substituted.
    pub note: Option<String>,
}

type RawRow = (String, f64, Vec<(f64, f64)>);

pub fn spectrum_dump(p: &SpinStarParams) -> Result<SpectrumDump> {
    let numeric = numeric_eigensystem(p)?;
    let amps = |v: &crate::linalg::ComplexVector| v.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>();
    let (mut pairs, note): (Vec<RawRow>, _) = match analytic_eigensystem(p) {
        Ok(sys) => (sys.pairs.iter().map(|q| (q.label.to_string(), q.energy, amps(&q.state))).collect(), None),
        Err(Error::AnalyticDomain { x }) => {
            let mut levels = analytic_energies(p);
            levels.sort_by(|a, b| a.1.total_cmp(&b.1));
            let rows = levels
                .into_iter()
                .enumerate()
                .map(|(k, (label, e))| (label.to_string(), e, amps(&numeric.vector(k))))
                .collect();
            let note = format!("x = {x} is below the closed-form domain; amplitudes are numerical eigenvectors");
            (rows, Some(note))
        }
        Err(e) => return Err(e),
    };
    pairs.sort_by(|a, b| a.1.total_cmp(&b.1));
    let w = p.omega0;
    let rows: Vec<SpectrumRow> = pairs
        .into_iter()
        .zip(&numeric.values)
        .map(|((label, energy, amplitudes), &num)| SpectrumRow {
            label,
            energy: energy / w,
            numeric_energy: num / w,
            amplitudes,
        })
        .collect();
    let max_deviation = rows.iter().map(|r| (r.energy - r.numeric_energy).abs() * w).fold(0.0, f64::max);
    Ok(SpectrumDump { omega0: p.omega0, c: p.c, x: p.x, rows, max_deviation, note })
}

impl SpectrumDump {
    pub fn to_table(&self) -> Table {
        let mut header: Vec<String> =
            ["label", "energy_over_omega0", "numeric_energy_over_omega0", "deviation_over_omega0"]
                .map(String::from)
                .to_vec();
        for k in 0..16 {
            header.push(format!("re_{k:04b}"));
            header.push(format!("im_{k:04b}"));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut row = vec![
                    Cell::Text(r.label.clone()),
                    Cell::Real(r.energy),
                    Cell::Real(r.numeric_energy),
                    Cell::Real((r.energy - r.numeric_energy).abs()),
                ];
                row.extend(r.amplitudes.iter().flat_map(|&(re, im)| [Cell::Real(re), Cell::Real(im)]));
                row
            })
            .collect();
        Table { header, rows }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_rows_matching_numerics() {
        let d = spectrum_dump(&SpinStarParams::new(1.0, 1.0, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(d.rows.len(), 16);
        assert!(d.max_deviation < 1e-9, "{}", d.max_deviation);
        assert!(d.note.is_none());
        let e6: Vec<f64> = d.rows.iter().filter(|r| r.label.starts_with("psi6")).map(|r| r.energy).collect();
        assert_eq!(e6, vec![-1.0, -1.0]);
        let t = d.to_table();
        assert_eq!(t.header.len(), 36);
        assert!(t.rows.iter().all(|r| r.len() == 36));
    }

    #[test]
    fn fallback_is_noted() {
        let d = spectrum_dump(&SpinStarParams::new(1.0, 2.0, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!(d.rows.len(), 16);
        assert!(d.note.is_some());
        assert!(d.max_deviation < 1e-9);
    }
}
