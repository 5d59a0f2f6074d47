use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::value::RawValue;
use sqlap_core::format::sig12;
use sqlap_core::io::parse_graph6_with;
use sqlap_core::{
    all_graphs, combined_matrix, extremal_search, laplacian, parse_edge_list, parse_graph6_lines, scan,
    write_graph6, Check, CheckReport, Graph, RandomFamily, ScanOptions, ScanSummary, SearchConfig,
    SearchOutcome, Strictness, EPSILON,
};

/// Spectral checks of Laplacian inequalities for graphs and their squares.
#[derive(Parser, Debug)]
#[command(name = "sqlap", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate all checks on the given graphs.
    Verify(VerifyArgs),
    /// Evaluate the checks over an exhaustive or random family.
    Scan(ScanArgs),
    /// Hill-climb over edge flips to minimize one margin.
    Extremal(ExtremalArgs),
    /// Print the spectra behind the checks for a single graph.
    Spectrum(SpectrumArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// A graph6 string. Without any input flag, graph6 lines are read from stdin.
    #[arg(conflicts_with_all = ["file", "edge_list"])]
    graph6: Option<String>,

    /// File with one graph6 string per line (`-` for stdin).
    #[arg(long, conflicts_with = "edge_list")]
    file: Option<PathBuf>,

    /// File holding one graph as an edge list: `n` on the first line, then `u v` per edge
    /// (`-` for stdin).
    #[arg(long)]
    edge_list: Option<PathBuf>,

    /// Accept nonzero padding bits and non-canonical size headers.
    #[arg(long)]
    lenient: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,

    #[arg(long, value_enum, default_value = "json")]
    format: Format,

    /// Margins below minus this value count as violations.
    #[arg(long, default_value_t = EPSILON, value_parser = parse_tolerance)]
    tolerance: f64,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("mode").required(true).args(["all", "random"]))]
struct ScanArgs {
    /// Vertex count (the smallest order with --n-max).
    #[arg(long)]
    n: usize,

    /// Every labeled graph on n vertices (n <= 8).
    #[arg(long)]
    all: bool,

    /// Seeded G(n, p) samples.
    #[arg(long, requires_all = ["count", "p"])]
    random: bool,

    /// Number of random samples.
    #[arg(long)]
    count: Option<u64>,

    /// Comma-separated edge probabilities, cycled through after every order.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,

    /// Random seed; one is chosen and printed when omitted.
    #[arg(long)]
    seed: Option<u64>,

    /// Largest order for random samples; orders cycle from n to n-max.
    #[arg(long, requires = "random")]
    n_max: Option<usize>,

    /// Comma-separated subset of main, power, ecc, ng.
    #[arg(long, value_delimiter = ',', default_values_t = Check::ALL)]
    checks: Vec<Check>,

    #[arg(long, value_enum, default_value = "json")]
    format: Format,

    /// Also write one CSV row per graph to this path.
    #[arg(long)]
    csv: Option<PathBuf>,

    #[arg(long, default_value_t = EPSILON, value_parser = parse_tolerance)]
    tolerance: f64,
}

#[derive(Args, Debug)]
struct ExtremalArgs {
    /// The margin to minimize: main, power, ecc or ng.
    #[arg(long)]
    objective: Check,

    #[arg(long)]
    n: usize,

    /// Maximum number of accepted flips per restart.
    #[arg(long)]
    steps: usize,

    #[arg(long)]
    seed: u64,

    #[arg(long, default_value_t = 1)]
    restarts: usize,

    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[command(flatten)]
    input: InputArgs,

    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t.is_finite() && t >= 0.0 {
        Ok(t)
    } else {
        Err(format!("tolerance must be finite and nonnegative, got {s}"))
    }
}

/// Failure modes, each with its exit status.
enum Failure {
    Input(String),
    Violations(usize),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn input_error(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

/// Reads `path`, or standard input when it is absent or `-`.
fn read_source(path: Option<&PathBuf>) -> Result<(String, String), Failure> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            let text = fs::read_to_string(p).map_err(|e| input_error(format!("{}: {e}", p.display())))?;
            Ok((p.display().to_string(), text))
        }
        _ => {
            let mut text = String::new();
            io::stdin().read_to_string(&mut text)?;
            Ok(("stdin".into(), text))
        }
    }
}

fn read_graphs(input: &InputArgs) -> Result<Vec<Graph>, Failure> {
    let strictness = if input.lenient {
        Strictness::Lenient
    } else {
        Strictness::Strict
    };
    let graphs = if let Some(text) = &input.graph6 {
        vec![parse_graph6_with(text.trim(), strictness).map_err(input_error)?]
    } else if let Some(path) = &input.edge_list {
        let (name, text) = read_source(Some(path))?;
        vec![parse_edge_list(&text).map_err(|e| input_error(format!("{name}: {e}")))?]
    } else {
        let (name, text) = read_source(input.file.as_ref())?;
        parse_graph6_lines(&text, strictness).map_err(|e| input_error(format!("{name}: {e}")))?
    };
    if graphs.is_empty() {
        return Err(Failure::Input("no graphs in input".into()));
    }
    if let Some((i, g)) = graphs.iter().enumerate().find(|(_, g)| g.order() < 2) {
        return Err(Failure::Input(format!(
            "graph {} has order n = {}; the checks need order n >= 2",
            i + 1,
            g.order()
        )));
    }
    Ok(graphs)
}

fn text_margin(v: Option<f64>) -> String {
    v.map(sig12).unwrap_or_else(|| "-".into())
}

fn write_report(
    out: &mut impl Write,
    format: Format,
    report: &CheckReport,
    tolerance: f64,
) -> io::Result<()> {
    match format {
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string(report).expect("report serializes")
        ),
        Format::Csv => writeln!(out, "{}", report.to_csv_row()),
        Format::Text => {
            let status = if report.violations(tolerance).next().is_some() {
                "VIOLATION"
            } else {
                "ok"
            };
            writeln!(
                out,
                "{} n={} main={} power={} ecc={} ng={} far={} {status}",
                report.graph6,
                report.n,
                text_margin(report.margin_main),
                text_margin(report.margin_power),
                text_margin(report.margin_ecc),
                text_margin(report.margin_ng),
                report.far_count
            )
        }
    }
}

fn run_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let graphs = read_graphs(&args.input)?;
    let options = ScanOptions {
        checks: Check::ALL.to_vec(),
        tolerance: args.tolerance,
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    if args.format == Format::Csv {
        writeln!(out, "{}", CheckReport::CSV_HEADER)?;
    }
    let mut write_error = None;
    let mut sink = |r: &CheckReport| {
        if write_error.is_none() {
            write_error = write_report(&mut out, args.format, r, args.tolerance).err();
        }
    };
    let summary = scan("input", graphs, &options, Some(&mut sink)).map_err(input_error)?;
    if let Some(e) = write_error {
        return Err(e.into());
    }
    out.flush()?;
    finish(&summary.violations)
}

fn finish<T>(violations: &[T]) -> Result<(), Failure> {
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violations(violations.len()))
    }
}

fn chosen_seed() -> u64 {
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or_default();
    nanos ^ (u64::from(std::process::id()) << 32)
}

fn run_scan(args: &ScanArgs) -> Result<(), Failure> {
    let mut csv = match &args.csv {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            writeln!(w, "{}", CheckReport::CSV_HEADER)?;
            Some(w)
        }
        None => None,
    };
    let mut write_error: Option<io::Error> = None;
    let mut sink = |r: &CheckReport| {
        if let (Some(w), None) = (csv.as_mut(), &write_error) {
            write_error = writeln!(w, "{}", r.to_csv_row()).err();
        }
    };
    let sink: Option<&mut dyn FnMut(&CheckReport)> = if args.csv.is_some() { Some(&mut sink) } else { None };
    let options = ScanOptions {
        checks: args.checks.clone(),
        tolerance: args.tolerance,
    };

    let summary = if args.all {
        let graphs = all_graphs(args.n).map_err(input_error)?;
        scan(&format!("all n={}", args.n), graphs, &options, sink).map_err(input_error)?
    } else {
        let seed = args.seed.unwrap_or_else(|| {
            let seed = chosen_seed();
            eprintln!("seed: {seed}");
            seed
        });
        let family = RandomFamily {
            n_min: args.n,
            n_max: args.n_max.unwrap_or(args.n),
            p_values: args.p.clone(),
            count: args.count.expect("clap requires --count"),
            seed,
        };
        if family.n_min < 2 {
            return Err(Failure::Input(format!(
                "order n = {} is out of scope, the checks need order n >= 2",
                family.n_min
            )));
        }
        let graphs = family.iter().map_err(input_error)?;
        scan(&family.descriptor(), graphs, &options, sink).map_err(input_error)?
    };
    if let Some(e) = write_error {
        return Err(e.into());
    }
    if let Some(mut w) = csv {
        w.flush()?;
    }
    print_summary(&summary, args.format)?;
    finish(&summary.violations)
}

fn print_summary(summary: &ScanSummary, format: Format) -> io::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string(summary).expect("summary serializes")
        )?,
        Format::Csv => {
            writeln!(out, "check,min_margin,argmin_graph6,equality_count")?;
            for (check, stats) in &summary.checks {
                writeln!(
                    out,
                    "{check},{},{},{}",
                    sig12(stats.min_margin),
                    stats.argmin_graph6,
                    stats.equality_count
                )?;
            }
        }
        Format::Text => {
            writeln!(out, "family: {}", summary.family_descriptor)?;
            writeln!(out, "graphs scanned: {}", summary.graphs_scanned)?;
            for (check, stats) in &summary.checks {
                writeln!(
                    out,
                    "{check:<6} min margin {} at {} ({} equality cases)",
                    sig12(stats.min_margin),
                    stats.argmin_graph6,
                    stats.equality_count
                )?;
            }
            writeln!(out, "violations: {}", summary.violations.len())?;
            for v in &summary.violations {
                writeln!(out, "  {} {} {}", v.check, v.graph6, sig12(v.margin))?;
            }
            writeln!(out, "wall time: {:.3}s", summary.wall_time)?;
        }
    }
    Ok(())
}

fn run_extremal(args: &ExtremalArgs) -> Result<(), Failure> {
    let config = SearchConfig {
        objective: args.objective,
        n: args.n,
        steps: args.steps,
        seed: args.seed,
        restarts: args.restarts,
    };
    let outcome = extremal_search(&config).map_err(input_error)?;
    print_outcome(&outcome, args.format)?;
    finish(&outcome.violations)
}

fn print_outcome(outcome: &SearchOutcome, format: Format) -> io::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string(outcome).expect("outcome serializes")
        ),
        Format::Csv => {
            writeln!(out, "objective,n,steps,seed,restarts,best_margin,witness,trajectory_length,best_restart,violations")?;
            let c = &outcome.config;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                c.objective,
                c.n,
                c.steps,
                c.seed,
                c.restarts,
                sig12(outcome.best_margin),
                outcome.witness,
                outcome.trajectory_length,
                outcome.best_restart,
                outcome.violations.len()
            )
        }
        Format::Text => {
            writeln!(out, "best margin: {}", sig12(outcome.best_margin))?;
            writeln!(out, "witness: {}", outcome.witness)?;
            writeln!(
                out,
                "restart: {} ({} accepted flips)",
                outcome.best_restart, outcome.trajectory_length
            )?;
            writeln!(out, "violations: {}", outcome.violations.len())
        }
    }
}

/// A float that serializes with 12 significant digits.
struct Sig(f64);

impl serde::Serialize for Sig {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        sqlap_core::format::serialize_sig12(&self.0, s)
    }
}

fn json_list(values: &[f64]) -> Box<RawValue> {
    let items: Vec<Sig> = values.iter().map(|&v| Sig(v)).collect();
    serde_json::value::to_raw_value(&items).expect("floats serialize")
}

fn run_spectrum(args: &SpectrumArgs) -> Result<(), Failure> {
    let graphs = read_graphs(&args.input)?;
    if graphs.len() != 1 {
        return Err(Failure::Input(format!(
            "spectrum takes a single graph, got {}",
            graphs.len()
        )));
    }
    let g = &graphs[0];
    let eig = |m: sqlap_core::SymmetricMatrix| m.eigenvalues().map(|s| s.values).map_err(input_error);
    let lg = eig(laplacian(g))?;
    let lsq = eig(laplacian(&g.square()))?;
    let comb = eig(combined_matrix(g).map_err(input_error)?)?;
    let far = g.far_set().len();
    let graph6 = write_graph6(g).map_err(input_error)?;

    let stdout = io::stdout();
    let mut out = stdout.lock();
    match args.format {
        Format::Json => {
            writeln!(
                out,
                "{}",
                spectrum_json(&graph6, g.order(), &lg, &lsq, &comb, far)
            )?;
        }
        Format::Csv => {
            writeln!(out, "matrix,eigenvalues")?;
            for (name, values) in [
                ("laplacian", &lg),
                ("square_laplacian", &lsq),
                ("combined", &comb),
            ] {
                let joined: Vec<String> = values.iter().map(|&v| sig12(v)).collect();
                writeln!(out, "{name},{}", joined.join(" "))?;
            }
        }
        Format::Text => {
            let fixed = |values: &[f64]| values.iter().map(|&v| fixed6(v)).collect::<Vec<_>>().join(" ");
            writeln!(out, "graph6: {graph6}")?;
            writeln!(out, "n: {}", g.order())?;
            writeln!(out, "L(G): {}", fixed(&lg))?;
            writeln!(out, "L(G^2): {}", fixed(&lsq))?;
            writeln!(out, "combined: {}", fixed(&comb))?;
            writeln!(out, "lambda2: {}", fixed(&lg[1..2]))?;
            writeln!(out, "lambda2': {}", fixed(&comb[1..2]))?;
            writeln!(out, "far_count: {far}")?;
        }
    }
    Ok(())
}

fn spectrum_json(graph6: &str, n: usize, lg: &[f64], lsq: &[f64], comb: &[f64], far: usize) -> String {
    #[derive(serde::Serialize)]
    struct Listing<'a> {
        graph6: &'a str,
        n: usize,
        laplacian: Box<RawValue>,
        square_laplacian: Box<RawValue>,
        combined: Box<RawValue>,
        lambda2: Sig,
        lambda2_prime: Sig,
        far_count: usize,
    }
    let listing = Listing {
        graph6,
        n,
        laplacian: json_list(lg),
        square_laplacian: json_list(lsq),
        combined: json_list(comb),
        lambda2: Sig(lg[1]),
        lambda2_prime: Sig(comb[1]),
        far_count: far,
    };
    serde_json::to_string(&listing).expect("listing serializes")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Verify(args) => run_verify(args),
        Command::Scan(args) => run_scan(args),
        Command::Extremal(args) => run_extremal(args),
        Command::Spectrum(args) => run_spectrum(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violations(count)) => {
            eprintln!("{count} violation(s) found");
            ExitCode::from(2)
        }
        Err(Failure::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Six decimals, without a sign on values that round to zero.
fn fixed6(v: f64) -> String {
    let s = format!("{v:.6}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}
