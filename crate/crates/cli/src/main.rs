use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lwgauge::acceptance::{criteria, find};
use lwgauge::asymptotics::{
    fit_power_law, richardson_coefficient, sweep, verdict_from_columns, ComponentVerdict,
    FitOutcome, SweepTable, MIN_POINTS,
};
use lwgauge::config::RunConfig;
use lwgauge::coulomb::{sample, ObservationEvent, PotentialSample};
use lwgauge::grid::{discrepancy_field, proper_projection, VectorField3};
use lwgauge::{exec, Error, Exec, Vec3};

#[derive(Parser)]
#[command(
    name = "lwgauge",
    version,
    about = "Coulomb-gauge potentials of moving point charges and the simplified transverse projection"
)]
struct Cli {
    /// Worker threads for parallel loops (default: all cores).
    #[arg(long, env = "LWGAUGE_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// Run configuration (flat `section.key = value` file).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every potential at one event.
    Sample {
        #[command(flatten)]
        cfg: ConfigArg,
        /// Observation time; requires --r. Without both, the first point of
        /// the configured null-ray sweep is used.
        #[arg(long, allow_negative_numbers = true)]
        t: Option<f64>,
        /// Observation point `x,y,z`.
        #[arg(long, value_parser = parse_vec3, allow_negative_numbers = true)]
        r: Option<Vec3>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Sample the potentials along a null ray and write the CSV table.
    Sweep {
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Fit power laws to sweep columns and compare the orders of A_C and Δ[A].
    Fit {
        /// Sweep CSV with an `r` column.
        input: PathBuf,
        /// Columns to fit (default: ACx,ACy,ACz,dAx,dAy,dAz).
        #[arg(long, value_delimiter = ',')]
        columns: Option<Vec<String>>,
        /// Also write the fits as CSV.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Accepted for symmetry with the other subcommands; not read.
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
    },
    /// Project a gridded vector field onto its divergence-free part.
    ProjectGrid {
        #[command(flatten)]
        cfg: ConfigArg,
        /// Field CSV with columns i,j,k,Vx,Vy,Vz.
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Write proper minus simplified projection about `grid.source`.
        #[arg(long, value_name = "PATH")]
        discrepancy: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Verify {
        /// Accepted for symmetry with the other subcommands; the suite is fixed.
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        /// List the checks without running them.
        #[arg(long)]
        list: bool,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<usize>>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    ChecksFailed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::ChecksFailed(_) => 1,
            CliError::Core(e) => match e {
                Error::Io(_) => 3,
                Error::NonConvergence { .. }
                | Error::ChargeCrossesObserver { .. }
                | Error::SignChange
                | Error::DegenerateInput(_)
                | Error::ExtrapolationDiverged => 4,
                _ => 2,
            },
        }
    }
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [x, y, z] => Ok(Vec3::new(x, y, z)),
        _ => Err(format!("expected x,y,z, got {s:?}")),
    }
}

/// 15 significant digits.
fn num(v: f64) -> String {
    format!("{v:.14e}")
}

fn vec(v: Vec3) -> String {
    format!("{}, {}, {}", num(v.x), num(v.y), num(v.z))
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn io_err(e: io::Error) -> Error {
    Error::Io(e.to_string())
}

fn cmd_sample(
    cfg: &RunConfig,
    t: Option<f64>,
    r: Option<Vec3>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let event = match (t, r) {
        (Some(t), Some(r)) => ObservationEvent::Lab { t, r },
        (None, None) => ObservationEvent::NullRay {
            t_ret: cfg.sweep.t_ret,
            direction: cfg.sweep.direction,
            radius: cfg.sweep.r0,
        },
        _ => return Err(CliError::Usage("--t and --r must be given together".into())),
    };
    let s: PotentialSample = sample(&cfg.trajectory, event, cfg.q, &cfg.eval)?;
    let mut w = open_out(out)?;
    let lines = [
        ("t", num(s.t)),
        ("r", vec(s.r)),
        ("t_ret", num(s.t_ret)),
        ("phi_L", num(s.phi_l)),
        ("phi_C", num(s.phi_c)),
        ("A_L", vec(s.a_l)),
        ("A_C", vec(s.a_c)),
        ("A_simplified", vec(s.a_simplified)),
        ("delta_A", vec(s.delta_a)),
    ];
    for (k, v) in lines {
        writeln!(w, "{k:<13}= {v}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

fn cmd_sweep(cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let s = sweep(
        &cfg.trajectory,
        &cfg.sweep,
        cfg.q,
        &cfg.eval,
        Exec::default(),
    )?;
    if !s.closure_ok() {
        eprintln!(
            "warning: retarded-time closure error {:.3e}",
            s.closure_error
        );
    }
    let out = out.or(cfg.output.as_deref());
    s.to_table().write_csv(open_out(out)?)?;
    Ok(())
}

fn describe(fit: &FitOutcome) -> String {
    match fit {
        Ok(f) => format!(
            "exponent {:+.4}, coefficient {}",
            f.exponent,
            num(f.coefficient)
        ),
        Err(reason) => format!("skipped ({reason})"),
    }
}

fn cmd_fit(input: &Path, columns: Option<Vec<String>>, out: Option<&Path>) -> Result<(), CliError> {
    let file = File::open(input).map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
    let table = SweepTable::read_csv(file)?;
    if table.rows.len() < MIN_POINTS {
        return Err(Error::TooFewRows {
            found: table.rows.len(),
            needed: MIN_POINTS,
        }
        .into());
    }
    let radii = table.column("r")?;
    let columns = columns.unwrap_or_else(|| {
        ["ACx", "ACy", "ACz", "dAx", "dAy", "dAz"]
            .map(String::from)
            .to_vec()
    });
    let data: Vec<Vec<f64>> = columns
        .iter()
        .map(|c| table.column(c))
        .collect::<Result<_, _>>()?;

    let stdout = io::stdout();
    let mut text = stdout.lock();
    let mut csv = SweepTable {
        headers: [
            "exponent",
            "coefficient",
            "residual_rms",
            "r_min",
            "r_max",
            "richardson",
        ]
        .map(String::from)
        .to_vec(),
        rows: Vec::new(),
    };
    let mut names = Vec::new();
    writeln!(
        text,
        "window r in [{}, {}], {} points",
        num(radii[0]),
        num(radii[radii.len() - 1]),
        radii.len()
    )
    .map_err(io_err)?;
    for (name, values) in columns.iter().zip(&data) {
        match fit_power_law(&radii, values) {
            Ok(f) => {
                let power = f.exponent.round();
                let rich = richardson_coefficient(&radii, values, power);
                writeln!(
                    text,
                    "{name:<6} exponent {:+.4}  coefficient {}  rms {:.2e}  r^{}-limit {}",
                    f.exponent,
                    num(f.coefficient),
                    f.residual_rms,
                    -power,
                    rich.as_ref().map_or_else(|e| e.to_string(), |c| num(*c))
                )
                .map_err(io_err)?;
                names.push(name.clone());
                csv.rows.push(vec![
                    f.exponent,
                    f.coefficient,
                    f.residual_rms,
                    f.r_window.0,
                    f.r_window.1,
                    rich.unwrap_or(f64::NAN),
                ]);
            }
            Err(e) => writeln!(text, "{name:<6} not fitted: {e}").map_err(io_err)?,
        }
    }

    let pick = |prefix: &str| -> Option<[&[f64]; 3]> {
        let idx = |axis: &str| columns.iter().position(|c| *c == format!("{prefix}{axis}"));
        Some([
            &data[idx("x")?][..],
            &data[idx("y")?][..],
            &data[idx("z")?][..],
        ])
    };
    if let (Some(ac), Some(da)) = (pick("AC"), pick("dA")) {
        let report = verdict_from_columns(&radii, ac, da);
        let line = |c: &ComponentVerdict| {
            format!(
                "{:<4} {:<13} A_C: {}; Δ[A]: {}",
                c.label,
                c.verdict.map_or("skipped", |v| v.label()),
                describe(&c.ac),
                describe(&c.delta)
            )
        };
        for c in report
            .components
            .iter()
            .chain(std::iter::once(&report.magnitude))
        {
            writeln!(text, "{}", line(c)).map_err(io_err)?;
        }
        writeln!(text, "verdict {}", report.overall().label()).map_err(io_err)?;
    }
    text.flush().map_err(io_err)?;

    if let Some(path) = out {
        let mut w = open_out(Some(path))?;
        writeln!(w, "column,{}", csv.headers.join(",")).map_err(io_err)?;
        for (name, row) in names.iter().zip(&csv.rows) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{name},{}", cells.join(",")).map_err(io_err)?;
        }
        w.flush().map_err(io_err)?;
    }
    Ok(())
}

fn cmd_project_grid(
    cfg: &RunConfig,
    input: &Path,
    out: Option<&Path>,
    discrepancy: Option<&Path>,
) -> Result<(), CliError> {
    let grid = cfg.grid.ok_or_else(|| {
        CliError::Usage("configuration has no `grid.dims` / `grid.spacing`".into())
    })?;
    let file = File::open(input).map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
    let field = VectorField3::read_csv(grid, file)?;
    let p = proper_projection(&field, Exec::default());
    if let Some(leak) = p.leakage {
        eprintln!("warning: {leak}");
    }
    println!("max |div V|   {}", num(p.divergence_in));
    println!("max |div V_T| {}", num(p.divergence_out));
    println!("reduction     {}", num(p.reduction_factor()));
    println!("max |V|       {}", num(field.max_norm()));
    println!("max |V_T|     {}", num(p.field.max_norm()));
    if let Some(path) = out.or(cfg.output.as_deref()) {
        p.field.write_csv(open_out(Some(path))?)?;
    }
    if let Some(path) = discrepancy {
        discrepancy_field(&field, cfg.grid_source, Exec::default())?
            .write_csv(open_out(Some(path))?)?;
    }
    Ok(())
}

fn cmd_verify(list: bool, only: Option<Vec<usize>>) -> Result<(), CliError> {
    let selected = match only {
        None => criteria(),
        Some(ids) => ids
            .iter()
            .map(|&id| find(id).ok_or_else(|| CliError::Usage(format!("no criterion {id}"))))
            .collect::<Result<_, _>>()?,
    };
    if list {
        for c in &selected {
            println!("[{}] {} (budget {} s)", c.id, c.name, c.budget.as_secs());
        }
        return Ok(());
    }
    let mut first_failure = None;
    for c in &selected {
        let o = c.run(Exec::default());
        println!("{}", o.report());
        if first_failure.is_none() {
            if let Some(f) = o.first_failure() {
                first_failure = Some(format!(
                    "criterion {} ({}): {}: {}",
                    o.id, o.name, f.label, f.detail
                ));
            }
        }
    }
    match first_failure {
        None => Ok(()),
        Some(msg) => Err(CliError::ChecksFailed(format!("first failure: {msg}"))),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.threads == Some(0) {
        return Err(CliError::Usage("LWGAUGE_THREADS must be positive".into()));
    }
    exec::init_thread_pool(cli.threads);
    match cli.command {
        Command::Sample { cfg, t, r, out } => {
            cmd_sample(&RunConfig::load(&cfg.config)?, t, r, out.as_deref())
        }
        Command::Sweep { cfg, out } => cmd_sweep(&RunConfig::load(&cfg.config)?, out.as_deref()),
        Command::Fit {
            input,
            columns,
            out,
            ..
        } => cmd_fit(&input, columns, out.as_deref()),
        Command::ProjectGrid {
            cfg,
            input,
            out,
            discrepancy,
        } => cmd_project_grid(
            &RunConfig::load(&cfg.config)?,
            &input,
            out.as_deref(),
            discrepancy.as_deref(),
        ),
        Command::Verify { list, only, .. } => cmd_verify(list, only),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
