//! The `subroot` command line.
//!
//! Exit codes: 0 when the run converged (or the command completed), 2 when a
//! solve ended `NON_CONVERGENT`, `MAX_ITER` or `DEGENERATE` or a computation
//! failed at run time, 1 for usage and parse errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::json;

use crate::geometry::{evaluate_trace, plan_quotient_construction, render_svg, SvgOptions};
use crate::iterate::{
    iteration_matrix, scan_shifts, solve, step_counts, Engine, ShiftParams, SolveOptions, Status, WordEngine,
    DEFAULT_SCAN_RADIUS,
};
use crate::numeric::{gauss_divide, GaussInt};
use crate::polynomial::{parse_gauss, parse_polynomial, Polynomial};
use crate::report::{engine_name, format_complex, ExactValue, FloatPair, RunReport};
use crate::rewrite::{derive_rules, iterate_words, CountVector, Symbol, Word, DEFAULT_LENGTH_CAP};

#[derive(Debug, Parser)]
#[command(name = "subroot", version, about = "Polynomial roots by symbol rewriting and counting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Iterate to a root and print the count table.
    Solve(SolveCmd),
    /// Print the rewriting rules and the literal words W0..Wk.
    Trace(TraceCmd),
    /// Draw the final quotient as a ruler-and-compass construction.
    Construct(ConstructCmd),
    /// Search a box of shifts for distinct roots.
    Scan(ScanCmd),
    /// Time the counts and words engines against each other.
    Bench(BenchCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Counts,
    Words,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Counts => Engine::Counts,
            EngineArg::Words => Engine::Words,
        }
    }
}

fn gauss_arg(s: &str) -> Result<GaussInt, String> {
    parse_gauss(s).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
struct ShiftArgs {
    /// Shift α as a Gaussian integer, e.g. `i`, `-1+2i`.
    #[arg(long, default_value = "0", value_parser = gauss_arg, allow_hyphen_values = true)]
    alpha: GaussInt,
    /// Scale β (nonzero).
    #[arg(long, default_value = "1", value_parser = gauss_arg, allow_hyphen_values = true)]
    beta: GaussInt,
}

impl ShiftArgs {
    fn shift(&self) -> Result<ShiftParams, Failure> {
        ShiftParams::new(self.alpha.clone(), self.beta.clone()).map_err(|e| Failure::Usage(e.to_string()))
    }
}

#[derive(Debug, Args)]
struct StopArgs {
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 3)]
    stable_steps: usize,
    #[arg(long, default_value_t = 1e-8)]
    residual_tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, value_enum, default_value = "counts")]
    engine: EngineArg,
    /// Longest word the words engine may build.
    #[arg(long, default_value_t = DEFAULT_LENGTH_CAP)]
    length_cap: usize,
}

impl StopArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            tol: self.tol,
            stable_steps: self.stable_steps,
            residual_tol: self.residual_tol,
            max_iter: self.max_iter,
            engine: self.engine.into(),
            length_cap: self.length_cap,
            ..SolveOptions::default()
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    shift: ShiftArgs,
    #[command(flatten)]
    stop: StopArgs,
    /// Run exactly this many steps instead of the stopping rule.
    #[arg(long)]
    iters: Option<usize>,
    /// Starting count vector, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    initial: Option<Vec<i64>>,
}

impl SolveArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            fixed_iters: self.iters,
            initial: self.initial.as_deref().map(CountVector::from_i64),
            ..self.stop.options()
        }
    }
}

#[derive(Debug, Args)]
struct SolveCmd {
    polynomial: String,
    #[command(flatten)]
    args: SolveArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write to FILE instead of standard output.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TraceCmd {
    polynomial: String,
    #[command(flatten)]
    shift: ShiftArgs,
    /// Number of rewriting steps.
    #[arg(short, default_value_t = 4)]
    k: usize,
    #[arg(long, default_value_t = DEFAULT_LENGTH_CAP)]
    length_cap: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConstructCmd {
    /// Polynomial to solve first; its final counts are drawn.
    #[arg(required_unless_present = "counts", conflicts_with = "counts")]
    polynomial: Option<String>,
    /// Draw `(u1 - i·v1) / (u2 - i·v2)` for the four given integers.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "U1,V1,U2,V2")]
    counts: Option<Vec<i64>>,
    #[command(flatten)]
    args: SolveArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// SVG destination; `-` writes the SVG to standard output.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScanCmd {
    polynomial: String,
    /// Half-width of the square of shifts α tried.
    #[arg(long, default_value_t = DEFAULT_SCAN_RADIUS)]
    radius: u32,
    #[arg(long, default_value_t = 1e-6)]
    dedupe_tol: f64,
    #[command(flatten)]
    stop: StopArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchCmd {
    polynomial: String,
    #[command(flatten)]
    shift: ShiftArgs,
    #[arg(short, default_value_t = 13)]
    k: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "counts,words")]
    engines: Vec<EngineArg>,
    #[arg(long, default_value_t = DEFAULT_LENGTH_CAP)]
    length_cap: usize,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Run(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Run(_) => 2,
        }
    }
}

/// Runs the command line `args` (program name first), writing normal output
/// to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result = match &cli.command {
        Command::Solve(c) => cmd_solve(c, out),
        Command::Trace(c) => cmd_trace(c, out),
        Command::Construct(c) => cmd_construct(c, out, err),
        Command::Scan(c) => cmd_scan(c, out),
        Command::Bench(c) => cmd_bench(c, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let (Failure::Usage(msg) | Failure::Run(msg)) = &f;
            let _ = writeln!(err, "error: {msg}");
            f.code()
        }
    }
}

fn parse_poly(text: &str) -> Result<Polynomial, Failure> {
    parse_polynomial(text).map_err(|e| Failure::Usage(format!("cannot parse polynomial '{text}': {e}")))
}

fn emit(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::write(p, text).map_err(|e| Failure::Run(format!("cannot write {}: {e}", p.display())))
        }
        _ => out.write_all(text.as_bytes()).map_err(|e| Failure::Run(e.to_string())),
    }
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Converged => 0,
        Status::MaxIter | Status::NonConvergent | Status::Degenerate => 2,
    }
}

fn run_err(e: impl std::fmt::Display) -> Failure {
    Failure::Run(e.to_string())
}

fn cmd_solve(c: &SolveCmd, out: &mut dyn Write) -> Result<i32, Failure> {
    let p = parse_poly(&c.polynomial)?;
    let shift = c.args.shift.shift()?;
    let opts = c.args.options();
    let sol = solve(&p, &shift, &opts).map_err(run_err)?;
    let report = RunReport::new(&c.polynomial, &sol, &opts);
    let text = match c.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv().map_err(run_err)?,
    };
    emit(out, c.output.as_ref(), &text)?;
    Ok(status_code(sol.estimate.status))
}

fn cmd_trace(c: &TraceCmd, out: &mut dyn Write) -> Result<i32, Failure> {
    let p = parse_poly(&c.polynomial)?;
    let shift = c.shift.shift()?;
    let m = iteration_matrix(&p, &shift).map_err(run_err)?;
    let rules = derive_rules(&m).map_err(run_err)?;
    let alphabet = rules.alphabet();
    let (words, failure) = match iterate_words(&rules, Word::single(Symbol::new(0)), c.k, c.length_cap) {
        Ok(words) => (words, None),
        Err(e) => {
            let msg = e.to_string();
            (e.words, Some(Failure::Run(msg)))
        }
    };
    let shown: Vec<String> = words.iter().map(|w| alphabet.display_word(w)).collect();
    let text = match c.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json!({ "rules": rules.lines(), "words": shown }))
                .expect("strings serialize");
            s.push('\n');
            s
        }
        _ => {
            let mut s = rules.lines().join("\n");
            s.push_str("\n\n");
            for w in &shown {
                s.push_str(w);
                s.push('\n');
            }
            s
        }
    };
    emit(out, c.output.as_ref(), &text)?;
    match failure {
        Some(f) => Err(f),
        None => Ok(0),
    }
}

/// Final count quadruple of a solve, divided by its content.
fn final_quadruple(poly: &str, args: &SolveArgs) -> Result<[i64; 4], Failure> {
    let p = parse_poly(poly)?;
    if p.degree() < 2 {
        return Err(Failure::Usage("construct needs a polynomial of degree at least 2".into()));
    }
    let sol = solve(&p, &args.shift.shift()?, &args.options()).map_err(run_err)?;
    let record = sol
        .records
        .iter()
        .rev()
        .find(|r| r.estimate.is_some())
        .ok_or_else(|| Failure::Run("no iteration has a nonzero denominator pair".into()))?;
    let quad: Vec<BigInt> = record.counts.entries()[..4].to_vec();
    let g = quad.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    let mut res = [0i64; 4];
    for (slot, x) in res.iter_mut().zip(&quad) {
        *slot = (x / &g)
            .to_i64()
            .ok_or_else(|| Failure::Run(format!("count {x} is too large to draw; lower --iters or --max-iter")))?;
    }
    Ok(res)
}

fn cmd_construct(c: &ConstructCmd, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let [u1, v1, u2, v2] = match (&c.counts, &c.polynomial) {
        (Some(v), _) => <[i64; 4]>::try_from(v.as_slice())
            .map_err(|_| Failure::Usage(format!("--counts takes 4 integers, got {}", v.len())))?,
        (None, Some(poly)) => final_quadruple(poly, &c.args)?,
        (None, None) => return Err(Failure::Usage("give a polynomial or --counts".into())),
    };
    let trace = plan_quotient_construction(u1, v1, u2, v2).map_err(run_err)?;
    let point = evaluate_trace(&trace).map_err(run_err)?;
    let q = gauss_divide(&GaussInt::new(u1, -v1), &GaussInt::new(u2, -v2)).map_err(run_err)?;
    let qf = q.to_float();
    let (x, y) = (point.x + 0.0, point.y + 0.0);
    let diff = (x - qf.re).hypot(y - qf.im);

    let to_stdout = c.output.as_ref().is_some_and(|p| p.as_os_str() == "-");
    if let Some(path) = &c.output {
        let title = format!("({u1} - {v1}i) / ({u2} - {v2}i)");
        let svg = render_svg(&trace, &SvgOptions { title: Some(title), ..SvgOptions::default() }).map_err(run_err)?;
        emit(out, Some(path), &svg)?;
    }
    let summary = match c.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Summary<'a> {
                counts: [i64; 4],
                trace: &'a crate::geometry::ConstructionTrace,
                point: FloatPair,
                quotient: ExactValue,
                quotient_float: FloatPair,
            }
            let s = Summary {
                counts: [u1, v1, u2, v2],
                trace: &trace,
                point: FloatPair { re: x, im: y },
                quotient: (&q).into(),
                quotient_float: qf.into(),
            };
            let mut s = serde_json::to_string_pretty(&s).expect("summary serializes");
            s.push('\n');
            s
        }
        _ => format!(
            "counts: ({u1}, {v1}, {u2}, {v2})\n\
             construction {}: ({x:.10}, {y:.10})\n\
             quotient {q}: ({:.10}, {:.10})\n\
             difference: {diff:.3e}\n",
            point.label,
            qf.re + 0.0,
            qf.im + 0.0,
        ),
    };
    let sink: &mut dyn Write = if to_stdout { err } else { out };
    sink.write_all(summary.as_bytes()).map_err(run_err)?;
    Ok(0)
}

fn cmd_scan(c: &ScanCmd, out: &mut dyn Write) -> Result<i32, Failure> {
    let p = parse_poly(&c.polynomial)?;
    let opts = SolveOptions { dedupe_tol: c.dedupe_tol, ..c.stop.options() };
    let hits = scan_shifts(&p, c.radius, &opts);
    let text = match c.format {
        Format::Json => {
            let rows: Vec<_> = hits
                .iter()
                .map(|h| {
                    json!({
                        "root": FloatPair::from(h.estimate.float_value),
                        "exact": ExactValue::from(&h.estimate.value),
                        "residual": h.estimate.residual,
                        "iterations": h.estimate.iterations,
                        "alpha": h.shift.alpha().to_string(),
                        "beta": h.shift.beta().to_string(),
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut rows = vec![["re", "im", "residual", "iterations", "alpha"].map(String::from).to_vec()];
            for h in &hits {
                let f = h.estimate.float_value;
                rows.push(vec![
                    f.re.to_string(),
                    f.im.to_string(),
                    h.estimate.residual.to_string(),
                    h.estimate.iterations.to_string(),
                    h.shift.alpha().to_string(),
                ]);
            }
            for r in rows {
                w.write_record(&r).map_err(run_err)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| run_err(e.error()))?).expect("ASCII")
        }
        Format::Text => {
            let mut s = format!("{} distinct root(s) with |alpha| components <= {}\n", hits.len(), c.radius);
            let roots: Vec<String> = hits.iter().map(|h| format_complex(h.estimate.float_value.into(), 10)).collect();
            let width = roots.iter().map(String::len).max().unwrap_or(4).max(4);
            s.push_str(&format!("{:<width$}  {:>10}  {:>5}  alpha\n", "root", "residual", "iters"));
            for (h, r) in hits.iter().zip(&roots) {
                s.push_str(&format!(
                    "{r:<width$}  {:>10.3e}  {:>5}  {}\n",
                    h.estimate.residual,
                    h.estimate.iterations,
                    h.shift.alpha()
                ));
            }
            s
        }
    };
    emit(out, c.output.as_ref(), &text)?;
    Ok(if hits.is_empty() { 2 } else { 0 })
}

struct BenchRow {
    engine: EngineArg,
    elapsed_s: f64,
    peak_len: Option<usize>,
    counts: CountVector,
}

fn cmd_bench(c: &BenchCmd, out: &mut dyn Write) -> Result<i32, Failure> {
    let p = parse_poly(&c.polynomial)?;
    let shift = c.shift.shift()?;
    let m = iteration_matrix(&p, &shift).map_err(run_err)?;
    let mut rows = Vec::new();
    for &engine in &c.engines {
        let start = Instant::now();
        let row = match engine {
            EngineArg::Counts => {
                let mut v = CountVector::unit(m.dim());
                for _ in 0..c.k {
                    v = step_counts(&m, &v).map_err(run_err)?;
                }
                BenchRow { engine, elapsed_s: 0.0, peak_len: None, counts: v }
            }
            EngineArg::Words => {
                let rules = derive_rules(&m).map_err(run_err)?;
                let mut we = WordEngine::new(rules, Word::single(Symbol::new(0)), c.length_cap);
                let mut peak = 1;
                for _ in 0..c.k {
                    we.advance().map_err(run_err)?;
                    peak = peak.max(we.word().len());
                }
                BenchRow { engine, elapsed_s: 0.0, peak_len: Some(peak), counts: we.counts() }
            }
        };
        rows.push(BenchRow { elapsed_s: start.elapsed().as_secs_f64(), ..row });
    }
    let mut text = format!(
        "{:<7} {:>4} {:>12} {:>14} {:>14} {:>10}\n",
        "engine", "k", "total_ms", "per_step_us", "peak_word_len", "max_digits"
    );
    for r in &rows {
        let name = engine_name(r.engine.into());
        let per_step = if c.k == 0 { 0.0 } else { r.elapsed_s * 1e6 / c.k as f64 };
        let peak = r.peak_len.map_or_else(|| "-".to_string(), |n| n.to_string());
        let digits = r.counts.max_abs().to_string().len();
        text.push_str(&format!(
            "{name:<7} {:>4} {:>12.3} {:>14.1} {peak:>14} {digits:>10}\n",
            c.k,
            r.elapsed_s * 1e3,
            per_step
        ));
    }
    let agree = rows.windows(2).all(|w| w[0].counts == w[1].counts);
    if let Some(first) = rows.first() {
        text.push_str(&format!("counts at k={}: {}\n", c.k, first.counts));
    }
    if rows.len() > 1 {
        text.push_str(&format!("engines agree: {}\n", if agree { "yes" } else { "NO" }));
    }
    emit(out, None, &text)?;
    Ok(if agree { 0 } else { 2 })
}
