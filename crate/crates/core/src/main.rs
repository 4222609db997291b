use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spinstar_gme::cli::{
    run_mixture_family, run_sweep_with, spectrum_dump, Cell, GridSpec, MixtureFamily, SweepSpec, Table,
};
use spinstar_gme::negativity::tripartite_negativity;
use spinstar_gme::qubits::{named_state, DensityOperator, NamedState};
use spinstar_gme::spinstar::{peripheral_state, thermal_state, SpinStarParams};
use spinstar_gme::witness::{ghz_normalizer, i_n_detector, Execution, QuadratureRule, SlotPattern};
use spinstar_gme::{Error, Result};

/// Genuine tripartite entanglement in a thermal spin star.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Sweep description (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Polar quadrature grid, e.g. 15x15.
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<GridSpec>,

    /// Quadrature rule for the polar grid.
    #[arg(long, global = true)]
    rule: Option<Rule>,

    /// Longitudes per copy for single-point detector values.
    #[arg(long, global = true)]
    longitudes: Option<usize>,

    /// 15x15 midpoint grid, detector evaluated for N = 1 and N = 4.
    #[arg(long, global = true)]
    replicate_paper: bool,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a parameter sweep from a config file.
    Sweep {
        /// Evaluate grid points on one thread.
        #[arg(long)]
        serial: bool,
    },
    /// Normalized detectors along one of the mixture families.
    Mixture {
        #[arg(long, value_parser = parse_family)]
        family: MixtureFamily,
        #[arg(long, default_value_t = 21)]
        p_steps: usize,
    },
    /// Detector values and negativity for one state.
    Witness {
        /// Named state (GHZ, W, Wtilde, sigmaGHZ); otherwise the peripheral spin-star state.
        #[arg(long, value_parser = parse_state, conflicts_with_all = ["c", "x", "kt"])]
        state: Option<NamedState>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "AAABBB", value_parser = parse_pattern)]
        pattern: SlotPattern,
    },
    /// Closed-form and numerical spectrum of the Hamiltonian.
    Spectrum {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Density matrix of the peripheral (or full) thermal state.
    State {
        #[command(flatten)]
        params: ParamArgs,
        /// Keep the central spin.
        #[arg(long)]
        full: bool,
    },
}

#[derive(Args, Debug)]
struct ParamArgs {
    #[arg(long, default_value_t = 1.0)]
    omega0: f64,
    /// Coupling over ω₀.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Inhomogeneity of the middle peripheral coupling.
    #[arg(long, default_value_t = 1.0)]
    x: f64,
    /// Temperature kT over ω₀.
    #[arg(long = "kT", alias = "kt", default_value_t = 0.01)]
    kt: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<SpinStarParams> {
        SpinStarParams::new(self.omega0, self.c * self.omega0, self.x, self.kt * self.omega0)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Rule {
    Midpoint,
    Trapezoid,
}

fn parse_grid(s: &str) -> std::result::Result<GridSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_family(s: &str) -> std::result::Result<MixtureFamily, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_state(s: &str) -> std::result::Result<NamedState, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_pattern(s: &str) -> std::result::Result<SlotPattern, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Cli {
    fn grid(&self, base: GridSpec) -> GridSpec {
        if self.replicate_paper {
            return GridSpec::default();
        }
        let mut g = self.grid.map_or(base, |g| GridSpec { rule: base.rule, ..g });
        match self.rule {
            Some(Rule::Midpoint) => g.rule = QuadratureRule::Midpoint,
            Some(Rule::Trapezoid) => g.rule = QuadratureRule::Trapezoid,
            None => {}
        }
        g
    }

    fn longitudes(&self) -> Result<Vec<usize>> {
        match (self.replicate_paper, self.longitudes) {
            (true, Some(n)) if n != 1 && n != 4 => Err(Error::Validation {
                field: "longitudes".into(),
                message: "replication mode uses N = 1 and 4".into(),
            }),
            (true, Some(n)) => Ok(vec![n]),
            (true, None) => Ok(vec![1, 4]),
            (false, n) => Ok(vec![n.unwrap_or(1)]),
        }
    }

    fn reject_config(&self) -> Result<()> {
        match &self.config {
            Some(_) => Err(Error::Validation {
                field: "config".into(),
                message: "only the sweep subcommand reads a config file".into(),
            }),
            None => Ok(()),
        }
    }
}

fn output(cli: &Cli, table: &Table, json: Option<&dyn erased::Json>) -> Result<()> {
    let path = cli.out.as_deref();
    let label = path.unwrap_or(Path::new("<stdout>")).to_path_buf();
    let io = |source| Error::Io { path: label.clone(), source };
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(File::create(p).map_err(io)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    match cli.format {
        Format::Csv => table.write_csv(&mut w).map_err(|e| match e {
            Error::Io { source, .. } => io(source),
            e => e,
        })?,
        Format::Json => {
            let res = match json {
                Some(j) => j.write(&mut w),
                None => serde_json::to_writer_pretty(&mut w, table),
            };
            res.map_err(|e| io(e.into()))?;
            writeln!(w).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

mod erased {
    /// Object-safe JSON serialization for alternative payloads.
    pub trait Json {
        fn write(&self, w: &mut dyn std::io::Write) -> serde_json::Result<()>;
    }

    impl<T: serde::Serialize> Json for T {
        fn write(&self, w: &mut dyn std::io::Write) -> serde_json::Result<()> {
            serde_json::to_writer_pretty(w, self)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Sweep { serial } => {
            let path = cli.config.as_deref().ok_or_else(|| Error::Validation {
                field: "config".into(),
                message: "the sweep subcommand needs --config".into(),
            })?;
            let mut spec = SweepSpec::from_file(path)?;
            spec.grid = cli.grid(spec.grid);
            let exec = if *serial { Execution::Serial } else { Execution::Parallel };
            let table = run_sweep_with(&spec, exec)?;
            output(cli, &table, None)
        }
        Command::Mixture { family, p_steps } => {
            cli.reject_config()?;
            let table = run_mixture_family(*family, *p_steps, &cli.grid(GridSpec::default()))?;
            output(cli, &table, None)
        }
        Command::Witness { state, params, pattern } => {
            cli.reject_config()?;
            let (source, rho): (String, DensityOperator) = match state {
                Some(s) => (s.to_string(), named_state(*s).projector()),
                None => {
                    let p = params.params()?;
                    (format!("spinstar(c={},x={},kT={})", params.c, params.x, params.kt), peripheral_state(&p)?)
                }
            };
            let grid = cli.grid(GridSpec::default());
            let negativity = tripartite_negativity(&rho)?;
            let header = ["source", "n_longitudes", "i_n", "i_n_normalized", "negativity"].map(String::from).to_vec();
            let mut table = Table::new(header);
            for n in cli.longitudes()? {
                let quad = grid.quadrature(n);
                let value = i_n_detector(&rho, &quad, pattern)?;
                let norm = ghz_normalizer(&quad, pattern)?;
                let normalized = if norm > 0.0 { value / norm } else { f64::NAN };
                table.rows.push(vec![
                    Cell::Text(source.clone()),
                    Cell::Text(n.to_string()),
                    Cell::Real(value),
                    Cell::Real(normalized),
                    Cell::Real(negativity),
                ]);
            }
            output(cli, &table, None)
        }
        Command::Spectrum { params } => {
            cli.reject_config()?;
            let dump = spectrum_dump(&params.params()?)?;
            if let Some(note) = &dump.note {
                eprintln!("note: {note}");
            }
            eprintln!("max |E_analytic - E_numeric| = {:e}", dump.max_deviation);
            output(cli, &dump.to_table(), Some(&dump))
        }
        Command::State { params, full } => {
            cli.reject_config()?;
            let p = params.params()?;
            let rho = if *full { thermal_state(&p)? } else { peripheral_state(&p)? };
            let mut table = Table::new(["row", "col", "re", "im"].map(String::from).to_vec());
            let m = rho.matrix();
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    let z = m[(i, j)];
                    table.rows.push(vec![
                        Cell::Text(i.to_string()),
                        Cell::Text(j.to_string()),
                        Cell::Real(z.re),
                        Cell::Real(z.im),
                    ]);
                }
            }
            output(cli, &table, None)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io { source, .. }) if cli.out.is_none() && source.kind() == io::ErrorKind::BrokenPipe => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
