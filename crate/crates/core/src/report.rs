//! Serializable run reports and their text, JSON and CSV renderings.
//!
//! Big integers travel as decimal strings so that no JSON reader can round
//! them; parsing a report back recovers the exact counts and rationals.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::iterate::{Engine, IterationRecord, Solution, SolveOptions, Status};
use crate::numeric::{GaussInt, GaussRational};
use crate::rewrite::CountVector;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("invalid report JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid decimal integer '{0}'")]
    Integer(String),
    #[error("invalid rational: {0}")]
    Rational(String),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloatPair {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for FloatPair {
    fn from(z: Complex64) -> Self {
        FloatPair { re: z.re, im: z.im }
    }
}

/// Exact complex rational `(num_re + num_im·i) / den`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactValue {
    pub num_re: String,
    pub num_im: String,
    pub den: String,
}

impl From<&GaussRational> for ExactValue {
    fn from(q: &GaussRational) -> Self {
        ExactValue { num_re: q.num().re.to_string(), num_im: q.num().im.to_string(), den: q.den().to_string() }
    }
}

impl ExactValue {
    pub fn to_rational(&self) -> Result<GaussRational, ReportError> {
        let num = GaussInt::new(parse_big(&self.num_re)?, parse_big(&self.num_im)?);
        let q = GaussRational::new(num, parse_big(&self.den)?).map_err(|e| ReportError::Rational(e.to_string()))?;
        if ExactValue::from(&q) != *self {
            return Err(ReportError::Rational("not in lowest terms".into()));
        }
        Ok(q)
    }
}

fn parse_big(s: &str) -> Result<BigInt, ReportError> {
    s.parse().map_err(|_| ReportError::Integer(s.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub tol: f64,
    pub stable_steps: usize,
    pub residual_tol: f64,
    pub max_iter: usize,
    pub fixed_iters: Option<usize>,
}

impl From<&SolveOptions> for ReportOptions {
    fn from(o: &SolveOptions) -> Self {
        ReportOptions {
            tol: o.tol,
            stable_steps: o.stable_steps,
            residual_tol: o.residual_tol,
            max_iter: o.max_iter,
            fixed_iters: o.fixed_iters,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub k: usize,
    pub counts: Vec<String>,
    pub estimate: Option<ExactValue>,
    pub float: Option<FloatPair>,
}

impl From<&IterationRecord> for ReportRow {
    fn from(r: &IterationRecord) -> Self {
        ReportRow {
            k: r.k,
            counts: r.counts.entries().iter().map(BigInt::to_string).collect(),
            estimate: r.estimate.as_ref().map(ExactValue::from),
            float: r.estimate.as_ref().map(|e| e.to_float().into()),
        }
    }
}

impl ReportRow {
    pub fn count_vector(&self) -> Result<CountVector, ReportError> {
        Ok(CountVector(self.counts.iter().map(|c| parse_big(c)).collect::<Result<_, _>>()?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportResult {
    pub status: Status,
    pub value: ExactValue,
    /// `null` when a component overflows `f64`.
    pub float: Option<FloatPair>,
    pub residual: Option<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub polynomial: String,
    pub alpha: String,
    pub beta: String,
    pub engine: Engine,
    pub options: ReportOptions,
    pub iterations: Vec<ReportRow>,
    pub result: ReportResult,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl RunReport {
    pub fn new(polynomial: &str, sol: &Solution, opts: &SolveOptions) -> Self {
        let est = &sol.estimate;
        let float = (est.float_value.re.is_finite() && est.float_value.im.is_finite()).then(|| est.float_value.into());
        RunReport {
            polynomial: polynomial.to_string(),
            alpha: sol.shift.alpha().to_string(),
            beta: sol.shift.beta().to_string(),
            engine: opts.engine,
            options: opts.into(),
            iterations: sol.records.iter().map(ReportRow::from).collect(),
            result: ReportResult {
                status: est.status,
                value: (&est.value).into(),
                float,
                residual: finite(est.residual),
                iterations: est.iterations,
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }

    /// Parses a report and checks that every exact value is well formed.
    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        let report: RunReport = serde_json::from_str(text)?;
        for row in &report.iterations {
            row.count_vector()?;
            if let Some(e) = &row.estimate {
                e.to_rational()?;
            }
        }
        report.result.value.to_rational()?;
        Ok(report)
    }

    /// Fixed-width iteration table followed by a summary block.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "polynomial: {}", self.polynomial);
        let _ = writeln!(out, "shift: alpha = {}, beta = {}", self.alpha, self.beta);
        let _ = writeln!(out, "engine: {}", engine_name(self.engine));
        if !self.iterations.is_empty() {
            let dim = self.iterations[0].counts.len();
            let mut header: Vec<String> = vec!["k".into()];
            header.extend((0..dim).map(|i| format!("n({i})")));
            header.push("ratio".into());
            let mut rows: Vec<Vec<String>> = vec![header];
            for r in &self.iterations {
                let mut cells = vec![r.k.to_string()];
                cells.extend(r.counts.iter().cloned());
                cells.push(r.float.map_or_else(|| "undefined".to_string(), |f| format_complex(f, 4)));
                rows.push(cells);
            }
            let widths: Vec<usize> =
                (0..dim + 1).map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
            out.push('\n');
            for row in &rows {
                let mut line = String::new();
                for (c, w) in widths.iter().enumerate() {
                    let _ = write!(line, "{:>w$}  ", row[c], w = *w);
                }
                line.push_str(&row[dim + 1]);
                let _ = writeln!(out, "{}", line.trim_end());
            }
        }
        out.push('\n');
        let r = &self.result;
        let _ = writeln!(out, "status: {}", r.status.as_str());
        let root = r.float.map_or_else(|| "overflow".to_string(), |f| format_complex(f, 10));
        let _ = writeln!(out, "root: {root}");
        if let Ok(q) = r.value.to_rational() {
            let exact = q.to_string();
            if exact.len() <= 80 {
                let _ = writeln!(out, "exact: {exact}");
            }
        }
        let residual = r.residual.map_or_else(|| "overflow".to_string(), |x| format!("{x:.3e}"));
        let _ = writeln!(out, "residual: {residual}");
        let _ = writeln!(out, "iterations: {}", r.iterations);
        out
    }

    /// One row per iteration: `k`, the counts, and the estimate.
    pub fn to_csv(&self) -> Result<String, ReportError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let dim = self.iterations.first().map_or(0, |r| r.counts.len());
        let mut header = vec!["k".to_string()];
        header.extend((0..dim).map(|i| format!("n{i}")));
        header.extend(["ratio_re", "ratio_im", "num_re", "num_im", "den"].map(String::from));
        w.write_record(&header)?;
        for r in &self.iterations {
            let mut rec = vec![r.k.to_string()];
            rec.extend(r.counts.iter().cloned());
            match (&r.float, &r.estimate) {
                (Some(f), Some(e)) => {
                    rec.extend([f.re.to_string(), f.im.to_string(), e.num_re.clone(), e.num_im.clone(), e.den.clone()])
                }
                _ => rec.extend(std::iter::repeat_n(String::new(), 5)),
            }
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| ReportError::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv of ASCII fields"))
    }
}

pub fn engine_name(e: Engine) -> &'static str {
    match e {
        Engine::Counts => "counts",
        Engine::Words => "words",
    }
}

/// `0.7071 + 0.7071i` style with `places` decimals; components that round
/// to zero print without a sign.
pub fn format_complex(z: FloatPair, places: usize) -> String {
    let tidy = |x: f64| {
        let s = format!("{:.*}", places, x.abs());
        let zero = s.bytes().all(|b| b == b'0' || b == b'.');
        (s, x < 0.0 && !zero)
    };
    let (re, re_neg) = tidy(z.re);
    let (im, im_neg) = tidy(z.im);
    format!("{}{} {} {}i", if re_neg { "-" } else { "" }, re, if im_neg { '-' } else { '+' }, im)
}
