use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use f2fib::lattice::{self, DualGraph, HeightProblem, Rational};
use f2fib::search::{self, Analysis, SearchConfig};
use f2fib::tate::KodairaSymbol;

#[derive(Parser)]
#[command(name = "f2fib", version, about = "Elliptic fibrations over P^1 over F2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Screen all 2^21 equations and print the isomorphism classes of survivors.
    Classify {
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Binary screening cache, reused when valid.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Compare the classes with the reference tables; exit 1 on mismatch.
        #[arg(long)]
        golden_check: bool,
        /// Also write a CSV table.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Include every survivor in the report.
        #[arg(long)]
        trace: bool,
    },
    /// Full report for one equation, e.g. "y^2+txy=x^3+t^5".
    Analyze { equation: String },
    /// Dual-graph and height-pairing tools.
    Lattice {
        #[command(subcommand)]
        command: LatticeCommand,
    },
}

#[derive(Subcommand)]
enum LatticeCommand {
    /// Determinant of the intersection matrix.
    Det {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Connected subconfigurations of canonical type.
    Canonical {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Solve <P,P> = 2 + 2(P.O) - sum of local contributions.
    Height {
        #[arg(long)]
        target: Rational,
        /// Comma-separated Kodaira symbols, e.g. IV,I1*.
        #[arg(long, value_delimiter = ',')]
        fibers: Vec<KodairaSymbol>,
        #[arg(long, default_value_t = 3)]
        max_po: u32,
    },
    /// Mordell-Weil group for a trivial lattice such as A2+D5.
    Mw { lattice: String },
}

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

/// Prints to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: impl std::fmt::Display) {
    let _ = writeln!(io::stdout().lock(), "{text}");
}

fn read_graph(path: &PathBuf) -> Result<DualGraph, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn classify(jobs: usize, out: Option<PathBuf>, cache: Option<PathBuf>, golden_check: bool, csv: Option<PathBuf>, trace: bool) -> ExitCode {
    let cfg = SearchConfig { worker_count: jobs, output_path: out.clone(), emit_trace: trace, cache_path: cache };
    let result = match search::run_classification(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if out.is_none() {
        emit(result.to_json());
    }
    if let Some(path) = csv {
        if let Err(e) = fs::write(&path, result.to_csv()) {
            return fail(format!("{}: {e}", path.display()));
        }
    }
    eprintln!(
        "{} equations, {} survivors, {} classes",
        result.meta.space_size, result.meta.survivor_count, result.meta.class_count
    );
    if golden_check {
        let rows = search::golden_rows();
        let report = search::verify_against_golden(&result.classes, &rows);
        for m in &report.matches {
            let row = &rows[m.row];
            let note = if m.equation_in_class { "" } else { " (listed equation lies outside this class)" };
            eprintln!("match: {} | j = {} <-> class {}{note}", row.fibers, row.j, m.canonical_code);
        }
        for &r in &report.unmatched_rows {
            eprintln!("MISMATCH row: {} | {} | j = {}", rows[r].equation, rows[r].fibers, rows[r].j);
        }
        for &c in &report.unmatched_classes {
            let class = result.classes.iter().find(|k| k.canonical_code == c).expect("class listed");
            eprintln!("MISMATCH class {c}: {} | {} | j = {}", class.equation, class.fibers, class.j);
        }
        if !report.is_bijection() {
            return ExitCode::from(EXIT_MISMATCH);
        }
        eprintln!("golden check passed: {} rows", rows.len());
    }
    ExitCode::SUCCESS
}

fn analyze(text: &str) -> ExitCode {
    match search::analyze_one(text) {
        Ok(report) => {
            emit(serde_json::to_string_pretty(&report).expect("plain data"));
            if let Analysis::Singular { .. } = report {
                eprintln!("discriminant vanishes");
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn run_lattice(cmd: LatticeCommand) -> ExitCode {
    match cmd {
        LatticeCommand::Det { graph } => match read_graph(&graph).map(|g| lattice::gram_det(&g)) {
            Ok(Ok(d)) => {
                emit(d);
                ExitCode::SUCCESS
            }
            Ok(Err(e)) => fail(e),
            Err(e) => fail(e),
        },
        LatticeCommand::Canonical { graph } => {
            let g = match read_graph(&graph) {
                Ok(g) => g,
                Err(e) => return fail(e),
            };
            match lattice::canonical_type_subcurves(&g) {
                Ok(subs) => {
                    emit(serde_json::to_string_pretty(&subs).expect("plain data"));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        LatticeCommand::Height { target, fibers, max_po } => {
            if fibers.is_empty() {
                return fail("--fibers needs at least one symbol");
            }
            let problem = HeightProblem::new(target, &fibers, max_po);
            for s in lattice::height_solve(&problem) {
                emit(s);
            }
            ExitCode::SUCCESS
        }
        LatticeCommand::Mw { lattice: name } => match lattice::mw_lookup(&name) {
            Ok(row) => {
                emit(format_args!("{} -> {}", row.trivial_lattice, row.mw));
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Classify { jobs, out, cache, golden_check, csv, trace } => {
            if jobs == 0 {
                return fail("--jobs must be at least 1");
            }
            classify(jobs, out, cache, golden_check, csv, trace)
        }
        Command::Analyze { equation } => analyze(&equation),
        Command::Lattice { command } => run_lattice(command),
    }
}
