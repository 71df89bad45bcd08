mod output;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qgraph::analysis::{self, gaussian_test, DifferenceReport, TraceReport};
use qgraph::eigensolver::{self, WeylReport, DEFAULT_TOL};
use qgraph::orbits::{self, DEFAULT_EPS};
use qgraph::{demo, io, Error, Grouping, QuantumGraph};

use output::{num, Csv};

#[derive(Parser)]
#[command(name = "qgraph", version, about = "Spectra, length spectra and trace-formula checks for quantum graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues k on (0, kmax] with multiplicities.
    Eigs {
        graph: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Weighted length spectrum up to lmax.
    Lenspec {
        graph: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Periodic orbits (primitive and repeated) up to lmax.
    Orbits {
        graph: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Evaluate both sides of the trace formula with a Gaussian test function.
    ///
    /// With two graphs, checks the formula for their difference. Cutoffs
    /// are chosen automatically unless --kmax or --lmax is given.
    TraceCheck {
        graph: PathBuf,
        other: Option<PathBuf>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Eigenvalue count on (0, kmax] against the Weyl prediction.
    Weyl {
        graph: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Density functionals and zero data of two graphs.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Write an example graph file.
    ///
    /// Names: interval [start [end]], interval_dirichlet, interval_neumann,
    /// circle [length], pumpkin_left n, pumpkin_right n, fig1_left [a b c],
    /// fig1_right [a b c], three_vertex.
    Demo {
        name: String,
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum GroupingMode {
    Exact,
    Numeric,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Opts {
    /// Spectral cutoff [default: 20π]
    #[arg(long)]
    kmax: Option<f64>,
    /// Length cutoff [default: 30]
    #[arg(long)]
    lmax: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Gaussian test function exp(-t x²)
    #[arg(long, default_value_t = 0.5)]
    t: f64,
    #[arg(long, value_enum, default_value_t = GroupingMode::Exact)]
    grouping: GroupingMode,
    /// Merge distance for numeric grouping
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

const DEFAULT_KMAX: f64 = 20.0 * PI;
const DEFAULT_LMAX: f64 = 30.0;

/// An input or computation error; exits with status 1.
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<(String, bool), Failure>;

impl Opts {
    fn validate(&self) -> Result<(), Failure> {
        let bad = |m: String| Err(Failure(m));
        if let Some(k) = self.kmax {
            if !(k > 0.0 && k.is_finite()) {
                return bad(format!("--kmax must be positive, got {k}"));
            }
        }
        if let Some(l) = self.lmax {
            if !(l > 0.0 && l.is_finite()) {
                return bad(format!("--lmax must be positive, got {l}"));
            }
        }
        if !(self.tol > 0.0 && self.tol < 1e-2) {
            return bad(format!("--tol must lie in (0, 1e-2), got {}", self.tol));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad(format!("--eps must be positive, got {}", self.eps));
        }
        if self.threads == Some(0) {
            return bad("--threads must be at least 1".into());
        }
        Ok(())
    }

    fn kmax(&self) -> f64 {
        self.kmax.unwrap_or(DEFAULT_KMAX)
    }

    fn lmax(&self) -> f64 {
        self.lmax.unwrap_or(DEFAULT_LMAX)
    }

    fn grouping(&self) -> Grouping {
        match self.grouping {
            GroupingMode::Exact => Grouping::Exact,
            GroupingMode::Numeric => Grouping::Numeric { eps: self.eps },
        }
    }

    fn render<T: Serialize>(&self, report: &T, csv: impl FnOnce() -> String) -> String {
        match self.format {
            Format::Csv => csv(),
            Format::Json => output::json(report),
        }
    }
}

fn load(path: &Path) -> Result<QuantumGraph, Failure> {
    io::read_graph(path)
        .map(|f| f.graph)
        .map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn eigs(graph: &Path, opts: &Opts) -> Outcome {
    let qg = load(graph)?;
    let spectrum = eigensolver::eigenvalues_in(&qg, 0.0, opts.kmax(), opts.tol)?;
    let text = opts.render(&spectrum, || {
        let mut csv = Csv::new(&["k", "multiplicity"]);
        for e in &spectrum.entries {
            csv.row(&[num(e.k), e.multiplicity.to_string()]);
        }
        csv.finish()
    });
    Ok((text, true))
}

fn vector_cell(v: &Option<Vec<u32>>) -> String {
    v.as_ref()
        .map(|v| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" "))
        .unwrap_or_default()
}

fn lenspec(graph: &Path, opts: &Opts) -> Outcome {
    let qg = load(graph)?;
    let ls = orbits::length_spectrum(&qg, opts.lmax(), opts.grouping())?;
    let text = opts.render(&ls, || {
        let mut csv = Csv::new(&["length", "weight", "orbit_count", "length_vector"]);
        for e in &ls.entries {
            csv.row(&[num(e.length), num(e.weight), e.orbit_count.to_string(), vector_cell(&e.vector)]);
        }
        csv.finish()
    });
    Ok((text, true))
}

#[derive(Serialize)]
struct OrbitRow {
    length: f64,
    repetitions: usize,
    bonds: Vec<usize>,
    length_vector: Vec<u32>,
    amplitude_re: f64,
    amplitude_im: f64,
}

fn orbit_listing(graph: &Path, opts: &Opts) -> Outcome {
    let qg = load(graph)?;
    let l = opts.lmax();
    let all = orbits::all_orbits(&orbits::primitive_orbits(&qg, l)?, l);
    let rows: Vec<OrbitRow> = all
        .iter()
        .map(|o| {
            let a = o.amplitude();
            OrbitRow {
                length: o.length,
                repetitions: o.repetitions,
                bonds: o.bonds.clone(),
                length_vector: o.length_vector.clone(),
                amplitude_re: a.re,
                amplitude_im: a.im,
            }
        })
        .collect();
    let text = opts.render(&rows, || {
        let mut csv = Csv::new(&["length", "repetitions", "bonds", "length_vector", "amplitude_re", "amplitude_im"]);
        for r in &rows {
            let bonds = r.bonds.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
            csv.row(&[
                num(r.length),
                r.repetitions.to_string(),
                bonds,
                vector_cell(&Some(r.length_vector.clone())),
                num(r.amplitude_re),
                num(r.amplitude_im),
            ]);
        }
        csv.finish()
    });
    Ok((text, true))
}

fn single_trace(qg: &QuantumGraph, opts: &Opts) -> Result<TraceReport, Failure> {
    let phi = gaussian_test(opts.t)?;
    let report = match (opts.kmax, opts.lmax) {
        (None, None) => analysis::trace_check_auto(qg, &phi, analysis::trace::TAIL_TARGET)?,
        _ => {
            let (k_auto, l_auto) = analysis::auto_cutoffs(qg, &phi, analysis::trace::TAIL_TARGET)?;
            analysis::trace_check(qg, &phi, opts.kmax.unwrap_or(k_auto), opts.lmax.unwrap_or(l_auto))?
        }
    };
    Ok(report)
}

const TRACE_HEADER: [&str; 11] = [
    "k_max", "l_max", "lhs", "rhs", "residual", "tail_lhs", "tail_rhs", "volume_term", "zero_term", "orbit_term", "pass",
];

fn trace_row(r: &TraceReport) -> Vec<String> {
    vec![
        num(r.k_max),
        num(r.l_max),
        num(r.lhs),
        num(r.rhs),
        num(r.residual),
        num(r.tail_lhs),
        num(r.tail_rhs),
        num(r.volume_term),
        num(r.zero_term),
        num(r.orbit_term),
        r.pass.to_string(),
    ]
}

#[derive(Serialize)]
struct PairTrace {
    a: TraceReport,
    b: TraceReport,
    difference: DifferenceReport,
}

fn trace_check(graph: &Path, other: Option<&Path>, opts: &Opts) -> Outcome {
    let qa = load(graph)?;
    let ra = single_trace(&qa, opts)?;
    let Some(other) = other else {
        let pass = ra.pass;
        let text = opts.render(&ra, || {
            let mut csv = Csv::new(&TRACE_HEADER);
            csv.row(&trace_row(&ra));
            csv.finish()
        });
        return Ok((text, pass));
    };
    let qb = load(other)?;
    let rb = single_trace(&qb, opts)?;
    let difference = analysis::trace_difference(&ra, &rb);
    let pass = difference.pass;
    let report = PairTrace { a: ra, b: rb, difference };
    let text = opts.render(&report, || {
        let mut csv = Csv::new(&["lhs", "rhs", "residual", "tails", "pass"]);
        csv.row(&[
            num(difference.lhs),
            num(difference.rhs),
            num(difference.residual),
            num(difference.tails),
            difference.pass.to_string(),
        ]);
        csv.finish()
    });
    Ok((text, pass))
}

fn weyl(graph: &Path, opts: &Opts) -> Outcome {
    let qg = load(graph)?;
    let spectrum = eigensolver::eigenvalues_in(&qg, 0.0, opts.kmax(), opts.tol)?;
    let r: WeylReport = eigensolver::weyl_check(&qg, &spectrum);
    let text = opts.render(&r, || {
        let mut csv = Csv::new(&["k0", "k1", "count", "prediction", "deficit", "bound", "pass"]);
        csv.row(&[
            num(r.k0),
            num(r.k1),
            r.count.to_string(),
            num(r.prediction),
            num(r.deficit),
            r.bound.to_string(),
            r.pass.to_string(),
        ]);
        csv.finish()
    });
    Ok((text, r.pass))
}

fn compare(a: &Path, b: &Path, opts: &Opts) -> Outcome {
    let (qa, qb) = (load(a)?, load(b)?);
    let r = analysis::compare(&qa, &qb, opts.kmax(), opts.lmax())?;
    let text = opts.render(&r, || {
        let mut csv = Csv::new(&[
            "k", "l", "total_length_a", "total_length_b", "total_lengths_equal", "eig_density", "len_density",
            "m0_a", "n_a", "m0_b", "n_b", "verdict",
        ]);
        let verdict = serde_json::to_value(r.verdict).expect("verdict");
        csv.row(&[
            num(r.k),
            num(r.l),
            num(r.total_length_a),
            num(r.total_length_b),
            r.total_lengths_equal.to_string(),
            num(r.eig_density),
            num(r.len_density),
            r.zero_a.m0.to_string(),
            r.zero_a.n.to_string(),
            r.zero_b.m0.to_string(),
            r.zero_b.n.to_string(),
            verdict.as_str().unwrap_or_default().to_string(),
        ]);
        csv.finish()
    });
    Ok((text, true))
}

fn demo(name: &str, params: &[String], out: Option<&Path>) -> Result<(), Failure> {
    let refs: Vec<&str> = params.iter().map(String::as_str).collect();
    let qg = demo::demo_graph(name, &refs)?;
    let note = if params.is_empty() {
        format!("demo {name}")
    } else {
        format!("demo {name} {}", params.join(" "))
    };
    emit(&io::write_graph_string(&qg, Some(&note)), out)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let (opts, result) = match &cli.command {
        Command::Demo { name, params, out } => {
            demo(name, params, out.as_deref())?;
            return Ok(true);
        }
        Command::Eigs { graph, opts } => (opts, graph.as_path()),
        Command::Lenspec { graph, opts } => (opts, graph.as_path()),
        Command::Orbits { graph, opts } => (opts, graph.as_path()),
        Command::TraceCheck { graph, opts, .. } => (opts, graph.as_path()),
        Command::Weyl { graph, opts } => (opts, graph.as_path()),
        Command::Compare { a, opts, .. } => (opts, a.as_path()),
    };
    opts.validate()?;
    if let Some(n) = opts.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure(format!("thread pool: {e}")))?;
    }
    let (text, pass) = match &cli.command {
        Command::Eigs { .. } => eigs(result, opts)?,
        Command::Lenspec { .. } => lenspec(result, opts)?,
        Command::Orbits { .. } => orbit_listing(result, opts)?,
        Command::TraceCheck { other, .. } => trace_check(result, other.as_deref(), opts)?,
        Command::Weyl { .. } => weyl(result, opts)?,
        Command::Compare { b, .. } => compare(result, b, opts)?,
        Command::Demo { .. } => unreachable!("handled above"),
    };
    emit(&text, opts.out.as_deref())?;
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
