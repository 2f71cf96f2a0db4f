use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qcvol::arith::{ratio, render_rational, Rational};
use qcvol::closed_form::{extreme_volume, ClosedFormSolution, VolumeSign};
use qcvol::grid::symmetric_grid;
use qcvol::report::{self, table_csv, table_json};
use serde_json::json;

const EXIT_USAGE: u8 = 2;
const EXIT_MISMATCH: u8 = 3;
const EXIT_VIOLATIONS: u8 = 4;

/// Largest dimension `realize` writes; the grid has `2^d` vertices.
const REALIZE_MAX_DIM: usize = 20;

#[derive(Parser)]
#[command(name = "qcvol", version, about = "Extreme box volumes of d-dimensional quasi-copulas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sign {
    Negative,
    Positive,
}

impl From<Sign> for VolumeSign {
    fn from(s: Sign) -> Self {
        match s {
            Sign::Negative => VolumeSign::Negative,
            Sign::Positive => VolumeSign::Positive,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Extreme volume, box and levels for one dimension.
    Solve {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum)]
        sign: Sign,
        #[arg(long)]
        json: bool,
    },
    /// Extreme volumes over a range of dimensions.
    Table {
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long, value_enum)]
        sign: Sign,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the closed form against the exact simplex.
    Verify {
        #[arg(long, default_value_t = 12)]
        reduced_max: usize,
        #[arg(long, default_value_t = 4)]
        full_max: usize,
        /// Test hook: shift every closed-form volume by 1/1000.
        #[arg(long, hide = true)]
        corrupt_closed_form: bool,
    },
    /// Write the optimal grid as JSON and validate it.
    Realize {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum)]
        sign: Option<Sign>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-dimension records for plotting the two extremes.
    Plotdata {
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Io(String),
    Code(u8),
}

impl From<qcvol::Error> for Failure {
    fn from(e: qcvol::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn list(v: &[Rational]) -> String {
    v.iter().map(render_rational).collect::<Vec<_>>().join(" ")
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(render_rational).collect()
}

fn solve_text(s: &ClosedFormSolution) -> String {
    let i0 = s.i0.map_or_else(|| "none (d = 3..6 solved analytically)".to_string(), |i| i.to_string());
    format!(
        "d: {}\nsign: {}\ni0: {}\nvolume: {}\nbox: [{}, {}]^{}\ndelta: {}\nq: {}\n",
        s.d,
        s.sign,
        i0,
        render_rational(&s.volume),
        render_rational(&s.box_edge_a),
        render_rational(&s.box_edge_b),
        s.d,
        list(&s.delta),
        list(&s.q_levels)
    )
}

fn solve_json(s: &ClosedFormSolution) -> String {
    let doc = json!({
        "d": s.d,
        "sign": s.sign,
        "source": s.source,
        "i0": s.i0,
        "volume": render_rational(&s.volume),
        "box": [render_rational(&s.box_edge_a), render_rational(&s.box_edge_b)],
        "delta": strings(&s.delta),
        "q_levels": strings(&s.q_levels),
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("json");
    text.push('\n');
    text
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { dim, sign, json } => {
            let s = extreme_volume(dim, sign.into())?;
            emit(&if json { solve_json(&s) } else { solve_text(&s) }, None)
        }
        Command::Table { from, to, sign, format, json, out } => {
            let rows = report::table(from, to, sign.into())?;
            let text = if json || format == Format::Json { table_json(&rows) } else { table_csv(&rows) };
            emit(&text, out.as_ref())
        }
        Command::Plotdata { from, to, format, json, out } => {
            let recs = report::plotdata(from, to)?;
            let text = if json || format == Format::Json {
                report::plotdata_json(&recs)
            } else if recs.is_empty() {
                String::new()
            } else {
                report::plotdata_csv(&recs)
            };
            emit(&text, out.as_ref())
        }
        Command::Verify { reduced_max, full_max, corrupt_closed_form } => {
            let rep = report::verify(reduced_max, full_max, |d, sign| {
                let mut s = extreme_volume(d, sign)?;
                if corrupt_closed_form {
                    s.volume += ratio(1, 1000);
                }
                Ok(s)
            })?;
            let mut text = String::new();
            for c in &rep.checks {
                text.push_str(&c.line());
                text.push('\n');
            }
            text.push_str(&format!("{} checks, {} failed\n", rep.checks.len(), rep.failures()));
            emit(&text, None)?;
            if rep.passed() {
                Ok(())
            } else {
                Err(Failure::Code(EXIT_MISMATCH))
            }
        }
        Command::Realize { dim, sign, out } => {
            if dim > REALIZE_MAX_DIM {
                return Err(Failure::Usage(format!(
                    "realize is limited to d <= {REALIZE_MAX_DIM} (the grid has 2^d vertices), got {dim}"
                )));
            }
            let sign = sign.ok_or_else(|| Failure::Usage("realize needs --sign".into()))?;
            let out = out.ok_or_else(|| Failure::Usage("realize needs --out".into()))?;
            let sol = extreme_volume(dim, sign.into())?;
            let grid = symmetric_grid(&sol)?;
            emit(&grid.to_json(), Some(&out))?;
            let violations = grid.validate();
            for v in violations.iter().take(20) {
                eprintln!("{v}");
            }
            emit(
                &format!(
                    "box: [{}, {}]^{dim}\nviolations: {}\nvolume: {}\n",
                    render_rational(&sol.box_edge_a),
                    render_rational(&sol.box_edge_b),
                    violations.len(),
                    render_rational(&grid.volume())
                ),
                None,
            )?;
            if violations.is_empty() {
                Ok(())
            } else {
                Err(Failure::Code(EXIT_VIOLATIONS))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
        Err(Failure::Code(c)) => ExitCode::from(c),
    }
}
