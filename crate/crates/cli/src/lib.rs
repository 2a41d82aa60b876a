//! The `ncmetric` command line: JSON triple documents in, distances and diagnostics out.
//!
//! Exit codes: 0 success, 1 other failure, 2 parse error, 3 unknown or missing state,
//! 4 inequality violation, 5 no closed form for `--method closed-form`.

pub mod dispatch;
pub mod document;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dispatch::{compute, Computed, MethodChoice};
use document::TripleDocument;
use ncmetric_commutative::{geodesic_length, graph_from_dirac, metric_to_triple, three_point_inverse, CommutativeError};
use ncmetric_linalg::{c, ComplexMatrix, C64};
use ncmetric_oracle::OracleOptions;
use ncmetric_sm::{direct_gtt, sm_fiber_distance, sm_gtt, FermionMasses, GttMethod, HiggsDoublet};
use ncmetric_triple::{AlgebraElement, BlockElement, DistanceValue, PureState};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn other(m: impl Into<String>) -> Self {
        Self { code: 1, message: m.into() }
    }
    pub fn parse(m: impl Into<String>) -> Self {
        Self { code: 2, message: m.into() }
    }
    pub fn state(m: impl Into<String>) -> Self {
        Self { code: 3, message: m.into() }
    }
    pub fn inequality(m: impl Into<String>) -> Self {
        Self { code: 4, message: m.into() }
    }
    pub fn unavailable(m: impl Into<String>) -> Self {
        Self { code: 5, message: m.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

#[derive(Debug, Parser)]
#[command(name = "ncmetric", version, about = "Spectral distances on finite spectral triples")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct SolveFlags {
    #[arg(long, value_enum, default_value_t = MethodChoice::Auto)]
    pub method: MethodChoice,
    /// Relative tolerance of the oracle.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed of the oracle's restarts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SolveFlags {
    fn options(&self) -> Result<OracleOptions, CliError> {
        let mut o = OracleOptions::from_env();
        if let Some(t) = self.tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(CliError::parse("--tol must lie in (0, 1)"));
            }
            o.rel_tol = t;
        }
        o.seed = self.seed;
        Ok(o)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance between two named states.
    Distance {
        file: PathBuf,
        state_a: String,
        state_b: String,
        #[command(flatten)]
        solve: SolveFlags,
        /// Also print an optimizing algebra element.
        #[arg(long)]
        witness: bool,
    },
    /// Pairwise distances between all declared states.
    Matrix {
        file: PathBuf,
        #[command(flatten)]
        solve: SolveFlags,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Worker threads for the pairs.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        /// Write the CSV table here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Sidecar CSV marking infinite entries with 1.
        #[arg(long)]
        mask: Option<PathBuf>,
    },
    /// Couplings of the three-point space with prescribed distances d(1,2), d(1,3), d(2,3).
    Invert3 {
        #[arg(allow_hyphen_values = true)]
        a: f64,
        #[arg(allow_hyphen_values = true)]
        b: f64,
        #[arg(allow_hyphen_values = true)]
        c: f64,
    },
    /// Triple realizing a metric given as CSV ("inf" allowed off the diagonal).
    Realize {
        metric: PathBuf,
        /// Document path; standard output when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Standard-model fiber metric from a mass configuration and a Higgs value.
    Sm {
        config: PathBuf,
        /// h1 as "re" or "re,im".
        #[arg(allow_hyphen_values = true)]
        h1: String,
        /// h2 as "re" or "re,im".
        #[arg(allow_hyphen_values = true)]
        h2: String,
        /// Compare with the direct operator norm.
        #[arg(long)]
        verify: bool,
    },
    /// Dirac graph of a commutative document and its geodesic upper bounds.
    Graph { file: PathBuf },
}

/// Textual form of a distance: Rust's shortest round-trip float, or "inf".
pub fn format_value(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v:?}")
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::other(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::other(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<document::Loaded, CliError> {
    let text = read(path)?;
    TripleDocument::from_json(&text)
        .and_then(|d| d.load())
        .map_err(|e| CliError { code: e.code, message: format!("{}: {}", path.display(), e.message) })
}

fn complex_json(z: C64) -> serde_json::Value {
    serde_json::json!([z.re, z.im])
}

fn matrix_json(m: &ComplexMatrix) -> serde_json::Value {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| complex_json(m.get(i, j))).collect::<Vec<_>>()).collect()
}

/// Witness coordinates, one JSON value per algebra block.
pub fn witness_json(a: &AlgebraElement) -> serde_json::Value {
    a.blocks
        .iter()
        .map(|b| match b {
            BlockElement::Real(r) => serde_json::json!(r),
            BlockElement::Complex(z) => complex_json(*z),
            BlockElement::Quaternion(q) => serde_json::json!(q),
            BlockElement::Matrix(m) => matrix_json(m),
        })
        .collect()
}

fn render(out: &mut String, d: &Computed, witness: bool) {
    let _ = writeln!(out, "distance: {}", format_value(d.distance.value));
    let _ = writeln!(out, "method: {}", d.method);
    if witness {
        match (&d.distance.witness, &d.note) {
            (Some(w), _) => {
                let _ = writeln!(out, "witness: {}", witness_json(w));
            }
            (None, Some(n)) => {
                let _ = writeln!(out, "witness: none ({n})");
            }
            (None, None) => {
                let _ = writeln!(out, "witness: none");
            }
        }
    }
}

pub fn cmd_distance(file: &Path, a: &str, b: &str, solve: &SolveFlags, witness: bool) -> Result<String, CliError> {
    let doc = load(file)?;
    let (s1, s2) = (doc.state(a)?, doc.state(b)?);
    let d = compute(&doc.triple, s1, s2, solve.method, &solve.options()?, witness)?;
    let mut out = String::new();
    render(&mut out, &d, witness);
    Ok(out)
}

/// All pairwise distances with their methods, in document order.
pub fn distance_table(
    doc: &document::Loaded,
    solve: &SolveFlags,
    threads: usize,
) -> Result<(Vec<Vec<DistanceValue>>, Vec<Vec<String>>), CliError> {
    let n = doc.states.len();
    if n == 0 {
        return Err(CliError::state("the document declares no states"));
    }
    let opts = solve.options()?;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let one = |&(i, j): &(usize, usize)| compute(&doc.triple, &doc.states[i].1, &doc.states[j].1, solve.method, &opts, false);
    let threads = threads.clamp(1, pairs.len().max(1));
    let results: Vec<Result<Computed, CliError>> = if threads == 1 {
        pairs.iter().map(one).collect()
    } else {
        let chunk = pairs.len().div_ceil(threads);
        std::thread::scope(|s| {
            let handles: Vec<_> = pairs.chunks(chunk).map(|ch| s.spawn(move || ch.iter().map(one).collect::<Vec<_>>())).collect();
            handles.into_iter().flat_map(|h| h.join().expect("worker thread panicked")).collect()
        })
    };
    let mut values = vec![vec![DistanceValue::finite(0.0); n]; n];
    let mut methods = vec![vec![String::from("-"); n]; n];
    for (&(i, j), r) in pairs.iter().zip(results) {
        let r = r?;
        values[i][j] = r.distance.clone();
        values[j][i] = r.distance;
        methods[i][j] = r.method.clone();
        methods[j][i] = r.method;
    }
    Ok((values, methods))
}

fn csv_text(names: &[String], rows: impl Fn(usize, usize) -> String) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(vec![]);
    let io = |e: csv::Error| CliError::other(format!("csv: {e}"));
    let mut header = vec![String::new()];
    header.extend(names.iter().cloned());
    w.write_record(&header).map_err(io)?;
    for i in 0..names.len() {
        let mut rec = vec![names[i].clone()];
        rec.extend((0..names.len()).map(|j| rows(i, j)));
        w.write_record(&rec).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::other(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn cmd_matrix(
    file: &Path,
    solve: &SolveFlags,
    format: Format,
    parallel: usize,
    output: Option<&Path>,
    mask: Option<&Path>,
) -> Result<String, CliError> {
    let doc = load(file)?;
    let (values, methods) = distance_table(&doc, solve, parallel)?;
    let names: Vec<String> = doc.states.iter().map(|(n, _)| n.clone()).collect();
    let n = names.len();
    if let Some(m) = mask {
        let text = csv_text(&names, |i, j| if values[i][j].is_infinite() { "1".into() } else { "0".into() })?;
        write(m, &text)?;
    }
    let text = match format {
        Format::Csv => csv_text(&names, |i, j| {
            let v = values[i][j].value;
            if v.is_infinite() {
                String::new()
            } else {
                format_value(v)
            }
        })?,
        Format::Table => {
            let cells: Vec<Vec<String>> = (0..n).map(|i| (0..n).map(|j| format_value(values[i][j].value)).collect()).collect();
            let width = cells.iter().flatten().chain(&names).map(|s| s.chars().count()).max().unwrap_or(1);
            let mut out = String::new();
            let _ = write!(out, "{:>width$}", "");
            for name in &names {
                let _ = write!(out, "  {name:>width$}");
            }
            out.push('\n');
            for (i, row) in cells.iter().enumerate() {
                let _ = write!(out, "{:>width$}", names[i]);
                for cell in row {
                    let _ = write!(out, "  {cell:>width$}");
                }
                out.push('\n');
            }
            let mut used: Vec<&str> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| methods[i][j].as_str()).collect();
            used.sort_unstable();
            used.dedup();
            let _ = writeln!(out, "methods: {}", used.join(", "));
            out
        }
    };
    match output {
        Some(p) => {
            write(p, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

pub fn cmd_invert3(a: f64, b: f64, c: f64) -> Result<String, CliError> {
    let (d12, d13, d23) = three_point_inverse(a, b, c).map_err(|e| match e {
        CommutativeError::SquaredTriangle(name) => CliError::inequality(format!("squared triangle inequality violated: {name}")),
        e => CliError::other(e.to_string()),
    })?;
    let mut out = String::new();
    for (label, v) in [("D12", d12), ("D13", d13), ("D23", d23)] {
        let note = if v == 0.0 { "  (deleted-link)" } else { "" };
        let _ = writeln!(out, "{label} = {}{note}", format_value(v));
    }
    Ok(out)
}

/// Reads a square metric from CSV; cells are numbers or "inf".
pub fn parse_metric(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows = vec![];
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::parse(format!("row {}: {e}", i + 1)))?;
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, cell)| {
                cell.parse::<f64>()
                    .map_err(|_| CliError::parse(format!("row {} column {}: not a number: \"{cell}\"", i + 1, j + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn cmd_realize(metric: &Path, output: Option<&Path>) -> Result<String, CliError> {
    let dist = parse_metric(&read(metric)?)?;
    let triple = metric_to_triple(&dist).map_err(|e| match e {
        CommutativeError::Triangle { .. } => CliError::inequality(e.to_string()),
        CommutativeError::Asymmetric(i, j) | CommutativeError::BadEntry(i, j) => {
            CliError::parse(format!("row {} column {}: {e}", i + 1, j + 1))
        }
        CommutativeError::InvalidN(_) => CliError::parse(format!("metric must be square with at least two points: {e}")),
        e => CliError::other(e.to_string()),
    })?;
    let states: Vec<(String, PureState)> = (0..dist.len()).map(|i| ((i + 1).to_string(), PureState::canonical(i))).collect();
    let json = TripleDocument::from_triple(&triple, &states).to_json() + "\n";
    match output {
        Some(p) => {
            write(p, &json)?;
            Ok(format!("wrote {} ({} points, Hilbert space dimension {})\n", p.display(), dist.len(), triple.dim()))
        }
        None => Ok(json),
    }
}

#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct SmConfig {
    up: Vec<f64>,
    down: Vec<f64>,
    lepton: Vec<f64>,
    #[serde(default)]
    ckm: Option<Vec<Vec<document::Entry>>>,
}

fn parse_complex(s: &str, name: &str) -> Result<C64, CliError> {
    let bad = || CliError::parse(format!("{name}: expected \"re\" or \"re,im\", found \"{s}\""));
    let mut parts = s.split(',').map(|p| p.trim().parse::<f64>());
    let re = parts.next().ok_or_else(bad)?.map_err(|_| bad())?;
    let im = match parts.next() {
        Some(v) => v.map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(c(re, im))
}

pub fn load_masses(path: &Path) -> Result<FermionMasses, CliError> {
    let text = read(path)?;
    let cfg: SmConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::parse(format!("{}: line {} column {}: {e}", path.display(), e.line(), e.column())))?;
    let ckm = match cfg.ckm {
        None => ComplexMatrix::identity(cfg.up.len()),
        Some(rows) => {
            let n = rows.len();
            let mut entries = vec![];
            for (i, r) in rows.iter().enumerate() {
                if r.len() != n {
                    return Err(CliError::parse(format!("ckm[{i}]: expected {n} entries")));
                }
                for (j, e) in r.iter().enumerate() {
                    entries.push(match e {
                        document::Entry::Real(x) => c(*x, 0.0),
                        document::Entry::Complex([a, b]) => c(*a, *b),
                        document::Entry::Text(_) => return Err(CliError::parse(format!("ckm[{i}][{j}]: expected a number or [re, im]"))),
                    });
                }
            }
            ComplexMatrix::new(n, n, entries).map_err(|e| CliError::parse(format!("ckm: {e}")))?
        }
    };
    FermionMasses::new(cfg.up, cfg.down, cfg.lepton, ckm).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

pub fn cmd_sm(config: &Path, h1: &str, h2: &str, verify: bool) -> Result<String, CliError> {
    let masses = load_masses(config)?;
    let h = HiggsDoublet::new(parse_complex(h1, "h1")?, parse_complex(h2, "h2")?).map_err(|e| CliError::parse(e.to_string()))?;
    let g = sm_gtt(&h, &masses);
    let d = sm_fiber_distance(&h, &masses);
    let mut out = String::new();
    let _ = writeln!(out, "gtt: {}", format_value(g.value));
    let _ = writeln!(out, "distance: {}", format_value(d.value));
    let method = match g.method {
        GttMethod::ClosedForm => "closed-form",
        GttMethod::DirectNorm => "direct-norm",
    };
    let _ = writeln!(out, "method: {method}");
    if let Some(diag) = &g.diagnostic {
        let _ = writeln!(out, "note: {diag}");
    }
    if verify {
        let direct = direct_gtt(&h, &masses);
        let residual = if direct == 0.0 { (g.value - direct).abs() } else { (g.value - direct).abs() / direct };
        let _ = writeln!(out, "direct: {}", format_value(direct));
        let _ = writeln!(out, "residual: {residual:e}");
    }
    Ok(out)
}

pub fn cmd_graph(file: &Path) -> Result<String, CliError> {
    let doc = load(file)?;
    let commutative = doc.triple.algebra.blocks.len() == doc.triple.dim()
        && doc.triple.slots.iter().enumerate().all(|(k, s)| s.block_index == k && s.mode == ncmetric_triple::Mode::Scalar);
    if !commutative {
        return Err(CliError::other("graph needs a commutative document (one scalar slot per point)"));
    }
    let g = graph_from_dirac(&doc.triple.dirac).map_err(|e| CliError::other(e.to_string()))?;
    let mut out = String::new();
    let _ = writeln!(out, "points: {}", g.n);
    let _ = writeln!(out, "edges:");
    for &(i, j, l) in &g.edges {
        let _ = writeln!(out, "  {}-{}  length {}", i + 1, j + 1, format_value(l));
    }
    let _ = writeln!(out, "geodesic upper bounds:");
    for i in 0..g.n {
        let row: Vec<String> = (0..g.n).map(|j| format_value(geodesic_length(&g, i, j).value)).collect();
        let _ = writeln!(out, "  {}", row.join(" "));
    }
    Ok(out)
}

pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Distance { file, state_a, state_b, solve, witness } => cmd_distance(file, state_a, state_b, solve, *witness),
        Command::Matrix { file, solve, format, parallel, output, mask } => {
            cmd_matrix(file, solve, *format, *parallel, output.as_deref(), mask.as_deref())
        }
        Command::Invert3 { a, b, c } => cmd_invert3(*a, *b, *c),
        Command::Realize { metric, output } => cmd_realize(metric, output.as_deref()),
        Command::Sm { config, h1, h2, verify } => cmd_sm(config, h1, h2, *verify),
        Command::Graph { file } => cmd_graph(file),
    }
}

/// Parses arguments and runs; returns (exit code, stdout, stderr).
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { (0, text, String::new()) } else { (2, String::new(), text) };
        }
    };
    match execute(&cli) {
        Ok(out) => (0, out, String::new()),
        Err(e) => (e.code, String::new(), format!("error: {}\n", e.message)),
    }
}
