//! Power iteration on count vectors and root estimation.
//!
//! Starting from a count vector `w⁰` (by default `(1, 0, …, 0)`, the count of
//! the one-letter word `0`), every step multiplies by the complexified
//! shifted replacement matrix. Writing the vector as pairs
//! `(u₁, v₁, u₂, v₂, …)`, the quotient `(u_j - i·v_j) / (u_{j+1} - i·v_{j+1})`
//! tends to the root whose shifted eigenvalue `α + β·a₀·r` is strictly
//! largest in modulus.
//!
//! Two engines produce the count sequence: exact matrix-vector products,
//! and literal word rewriting followed by symbol counting.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{companion, complexify, shift, MatrixError, RealBlockMatrix};
use crate::numeric::{gauss_divide, GaussInt, GaussRational};
use crate::polynomial::Polynomial;
use crate::rewrite::{self, Alphabet, CapExceeded, CountVector, RewriteError, RuleTable, Symbol, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IterateError {
    #[error("beta must be nonzero")]
    ZeroBeta,
    #[error("count vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("denominator pair is zero")]
    DegenerateDenominator,
    #[error("pair index {j} out of range 1..={max}")]
    PairIndex { j: usize, max: usize },
    #[error("count {0} is too large to spell as a word")]
    CountTooLarge(BigInt),
    #[error(transparent)]
    CapExceeded(#[from] CapExceeded),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

impl From<MatrixError> for IterateError {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::ZeroBeta => IterateError::ZeroBeta,
            MatrixError::DimensionMismatch { expected, got } => IterateError::DimensionMismatch { expected, got },
        }
    }
}

/// Spectral shift `R' = α·I + β·R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftParams {
    alpha: GaussInt,
    beta: GaussInt,
}

impl ShiftParams {
    pub fn new(alpha: GaussInt, beta: GaussInt) -> Result<Self, IterateError> {
        if beta.is_zero() {
            return Err(IterateError::ZeroBeta);
        }
        Ok(ShiftParams { alpha, beta })
    }

    pub fn alpha(&self) -> &GaussInt {
        &self.alpha
    }

    pub fn beta(&self) -> &GaussInt {
        &self.beta
    }
}

impl Default for ShiftParams {
    fn default() -> Self {
        ShiftParams { alpha: GaussInt::zero(), beta: GaussInt::one() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Counts,
    Words,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Relative distance between successive estimates counted as stable.
    pub tol: f64,
    pub stable_steps: usize,
    /// Bound on `|p(estimate)|` for a converged result.
    pub residual_tol: f64,
    pub max_iter: usize,
    /// Roots closer than this are merged by [`scan_shifts`].
    pub dedupe_tol: f64,
    pub engine: Engine,
    /// Run exactly this many steps, ignoring the stopping rule.
    pub fixed_iters: Option<usize>,
    /// Starting count vector; `(1, 0, …, 0)` when absent.
    pub initial: Option<CountVector>,
    /// Longest word the words engine may materialize.
    pub length_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-12,
            stable_steps: 3,
            residual_tol: 1e-8,
            max_iter: 200,
            dedupe_tol: 1e-6,
            engine: Engine::Counts,
            fixed_iters: None,
            initial: None,
            length_cap: rewrite::DEFAULT_LENGTH_CAP,
        }
    }
}

/// Default half-width of the shift box searched by [`scan_shifts`].
pub const DEFAULT_SCAN_RADIUS: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Converged,
    MaxIter,
    NonConvergent,
    Degenerate,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "CONVERGED",
            Status::MaxIter => "MAX_ITER",
            Status::NonConvergent => "NON_CONVERGENT",
            Status::Degenerate => "DEGENERATE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationRecord {
    pub k: usize,
    pub counts: CountVector,
    /// Absent when the denominator pair is zero.
    pub estimate: Option<GaussRational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootEstimate {
    pub value: GaussRational,
    pub float_value: Complex64,
    pub residual: f64,
    pub iterations: usize,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub shift: ShiftParams,
    pub estimate: RootEstimate,
    pub records: Vec<IterationRecord>,
}

/// The complexified shifted replacement matrix of `p`.
pub fn iteration_matrix(p: &Polynomial, s: &ShiftParams) -> Result<RealBlockMatrix, IterateError> {
    Ok(complexify(&shift(&companion(p), &s.alpha, &s.beta)?))
}

/// Exact `M·v`.
pub fn step_counts(m: &RealBlockMatrix, v: &CountVector) -> Result<CountVector, IterateError> {
    Ok(CountVector(m.mul_vec(v.entries())?))
}

fn pair(v: &CountVector, j: usize) -> GaussInt {
    GaussInt { re: v.0[2 * j - 2].clone(), im: -&v.0[2 * j - 1] }
}

/// `(u_j - i·v_j) / (u_{j+1} - i·v_{j+1})` for the 1-based pair index `j`.
pub fn estimate_root(v: &CountVector, j: usize) -> Result<GaussRational, IterateError> {
    if !v.len().is_multiple_of(2) {
        return Err(IterateError::DimensionMismatch { expected: v.len() + 1, got: v.len() });
    }
    let pairs = v.len() / 2;
    if j == 0 || j + 1 > pairs {
        return Err(IterateError::PairIndex { j, max: pairs.saturating_sub(1) });
    }
    gauss_divide(&pair(v, j), &pair(v, j + 1)).map_err(|_| IterateError::DegenerateDenominator)
}

/// Estimates for every pair index `j = 1 … m-1`.
pub fn estimates_all(v: &CountVector) -> Vec<Option<GaussRational>> {
    (1..v.len() / 2).map(|j| estimate_root(v, j).ok()).collect()
}

/// Relative distance between successive estimates.
fn relative_delta(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Word whose counts equal `v`: symbol `k` repeated `v_k` times, or its
/// conjugate repeated `|v_k|` times.
pub fn word_for_counts(alphabet: Alphabet, v: &CountVector) -> Result<Word, IterateError> {
    let mut out = Vec::new();
    for (k, c) in v.entries().iter().enumerate() {
        let reps = c.abs().to_usize().ok_or_else(|| IterateError::CountTooLarge(c.clone()))?;
        let s = if c.is_negative() { alphabet.conj(Symbol::new(k)) } else { Symbol::new(k) };
        out.extend(std::iter::repeat_n(s, reps));
    }
    Ok(Word(out))
}

/// Literal rewriting engine: keeps the current word, with conjugate pairs
/// removed after every step.
#[derive(Debug, Clone)]
pub struct WordEngine {
    rules: RuleTable,
    word: Word,
    generation: usize,
    cap: usize,
}

impl WordEngine {
    pub fn new(rules: RuleTable, w0: Word, cap: usize) -> Self {
        WordEngine { rules, word: w0, generation: 0, cap }
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn counts(&self) -> CountVector {
        rewrite::count(self.rules.alphabet(), &self.word)
    }

    pub fn advance(&mut self) -> Result<(), CapExceeded> {
        match rewrite::rewrite_and_cancel(&self.rules, &self.word, self.cap) {
            Ok(next) => {
                self.word = next;
                self.generation += 1;
                Ok(())
            }
            Err(next_len) => Err(CapExceeded {
                words: vec![self.word.clone()],
                generation: self.generation + 1,
                next_len,
                cap: self.cap,
            }),
        }
    }
}

/// Counts of `W₀ … W_k` by rewriting, without materializing words deeper
/// than about `k/2` generations.
///
/// Rewriting is a morphism, so `W_{h+d}` is the concatenation, over the
/// letters `s` of `W_h`, of `s` rewritten `d` times; its counts are the sum
/// of those pieces' counts. Words up to `W_h` with `h = ⌈k/2⌉` and every
/// single letter rewritten up to `k - h` times are built literally (pairs
/// cancelled after each step, which leaves counts unchanged).
pub fn split_word_counts(rules: &RuleTable, w0: Word, k: usize, cap: usize) -> Result<Vec<CountVector>, IterateError> {
    let alphabet = rules.alphabet();
    let head = k.div_ceil(2);
    let tail = k - head;

    let mut engine = WordEngine::new(rules.clone(), w0, cap);
    let mut out = vec![engine.counts()];
    for _ in 0..head {
        engine.advance()?;
        out.push(engine.counts());
    }

    // tail_counts[d - 1][s] = counts of letter s rewritten d times
    let mut tail_counts: Vec<Vec<Vec<i128>>> = vec![Vec::with_capacity(alphabet.size()); tail];
    for s in 0..alphabet.size() {
        let mut piece = WordEngine::new(rules.clone(), Word::single(Symbol::new(s)), cap);
        for slot in tail_counts.iter_mut() {
            piece.advance()?;
            slot.push(piece.counts().entries().iter().map(|x| x.to_i128().expect("bounded by cap")).collect());
        }
    }
    for per_letter in &tail_counts {
        let mut acc = vec![0i128; alphabet.base()];
        for s in engine.word().symbols() {
            for (a, c) in acc.iter_mut().zip(&per_letter[s.index()]) {
                *a += c;
            }
        }
        out.push(CountVector(acc.into_iter().map(BigInt::from).collect()));
    }
    Ok(out)
}

enum Stepper {
    Counts { m: RealBlockMatrix, v: CountVector },
    Words(WordEngine),
}

impl Stepper {
    fn counts(&self) -> CountVector {
        match self {
            Stepper::Counts { v, .. } => v.clone(),
            Stepper::Words(w) => w.counts(),
        }
    }

    fn advance(&mut self) -> Result<(), IterateError> {
        match self {
            Stepper::Counts { m, v } => {
                *v = step_counts(m, v)?;
                Ok(())
            }
            Stepper::Words(w) => Ok(w.advance()?),
        }
    }
}

/// Width of the trailing window inspected by the non-convergence check.
const WINDOW: usize = 8;

/// Power-iterates `p`'s shifted replacement matrix and reports the
/// dominant root.
///
/// Degree-1 polynomials are answered exactly as `-a₁/a₀`. Otherwise the
/// run stops `CONVERGED` once `stable_steps` consecutive estimate deltas are
/// within `tol` and the residual is within `residual_tol`, `DEGENERATE` if
/// the count vector vanishes, `MAX_ITER` at `max_iter`, and
/// `NON_CONVERGENT` when, past `max_iter / 2`, the trailing window either
/// spreads by more than `100·tol`, is mostly undefined, or has settled on a
/// point that is not a root. With `fixed_iters` the run always takes that
/// many steps and reports `CONVERGED` or `MAX_ITER` from the final state.
pub fn solve(p: &Polynomial, s: &ShiftParams, opts: &SolveOptions) -> Result<Solution, IterateError> {
    if p.degree() == 1 {
        let value = gauss_divide(&-&p.coeffs()[1], &p.coeffs()[0]).expect("leading coefficient is nonzero");
        let float_value = value.to_float();
        let estimate = RootEstimate {
            residual: p.residual(float_value),
            float_value,
            value,
            iterations: 0,
            status: Status::Converged,
        };
        return Ok(Solution { shift: s.clone(), estimate, records: Vec::new() });
    }

    let m = iteration_matrix(p, s)?;
    let dim = m.dim();
    let v0 = opts.initial.clone().unwrap_or_else(|| CountVector::unit(dim));
    if v0.len() != dim {
        return Err(IterateError::DimensionMismatch { expected: dim, got: v0.len() });
    }
    let mut stepper = match opts.engine {
        Engine::Counts => Stepper::Counts { m, v: v0 },
        Engine::Words => {
            let rules = rewrite::derive_rules(&m)?;
            let w0 = word_for_counts(rules.alphabet(), &v0)?;
            Stepper::Words(WordEngine::new(rules, w0, opts.length_cap))
        }
    };

    let limit = opts.fixed_iters.unwrap_or(opts.max_iter);
    let mut records: Vec<IterationRecord> = Vec::new();
    let mut last: Option<(GaussRational, Complex64)> = None;
    let mut stable = 0usize;
    let mut k = 0usize;
    let status = loop {
        let counts = stepper.counts();
        let estimate = estimate_root(&counts, 1).ok();
        let vanished = counts.is_zero();
        records.push(IterationRecord { k, counts, estimate: estimate.clone() });

        let mut converged = false;
        if let Some(e) = estimate {
            let f = e.to_float();
            if let Some((_, prev)) = &last {
                if relative_delta(f, *prev) <= opts.tol {
                    stable += 1;
                } else {
                    stable = 0;
                }
            }
            converged = stable >= opts.stable_steps && p.residual(f) <= opts.residual_tol;
            last = Some((e, f));
        }

        if vanished {
            break Status::Degenerate;
        }
        if opts.fixed_iters.is_none() {
            if converged {
                break Status::Converged;
            }
            if k >= limit {
                break Status::MaxIter;
            }
            if k >= limit / 2 && looks_nonconvergent(p, &records, opts) {
                break Status::NonConvergent;
            }
        } else if k >= limit {
            break if converged { Status::Converged } else { Status::MaxIter };
        }
        stepper.advance()?;
        k += 1;
    };

    let (value, float_value) =
        last.unwrap_or_else(|| (GaussRational::from_gauss(GaussInt::zero()), Complex64::new(0.0, 0.0)));
    let estimate = RootEstimate { residual: p.residual(float_value), value, float_value, iterations: k, status };
    Ok(Solution { shift: s.clone(), estimate, records })
}

fn looks_nonconvergent(p: &Polynomial, records: &[IterationRecord], opts: &SolveOptions) -> bool {
    if records.len() < WINDOW {
        return false;
    }
    let window = &records[records.len() - WINDOW..];
    let defined: Vec<Complex64> = window.iter().filter_map(|r| r.estimate.as_ref().map(|e| e.to_float())).collect();
    if 2 * defined.len() <= WINDOW {
        return true;
    }
    let mut spread = 0.0f64;
    for (i, a) in defined.iter().enumerate() {
        for b in &defined[i + 1..] {
            spread = spread.max(relative_delta(*a, *b));
        }
    }
    if spread >= 100.0 * opts.tol {
        return true;
    }
    let settled = *defined.last().expect("non-empty");
    p.residual(settled) > opts.residual_tol
}

/// A root found by [`scan_shifts`] and the shift that exposed it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanHit {
    pub shift: ShiftParams,
    pub estimate: RootEstimate,
}

/// Tries every `α` with `|re α|, |im α| ≤ radius` (β = 1) in lexicographic
/// order and keeps the distinct converged roots, in order of first
/// discovery. Within a cluster of coinciding roots the hit with the smallest
/// residual is kept.
pub fn scan_shifts(p: &Polynomial, radius: u32, opts: &SolveOptions) -> Vec<ScanHit> {
    let r = radius as i64;
    let mut hits: Vec<ScanHit> = Vec::new();
    for re in -r..=r {
        for im in -r..=r {
            let shift = ShiftParams { alpha: GaussInt::new(re, im), beta: GaussInt::one() };
            let Ok(sol) = solve(p, &shift, opts) else { continue };
            let est = sol.estimate;
            if est.status != Status::Converged || est.residual > opts.residual_tol {
                continue;
            }
            match hits.iter_mut().find(|h| (h.estimate.float_value - est.float_value).norm() <= opts.dedupe_tol) {
                Some(h) if est.residual < h.estimate.residual => *h = ScanHit { shift, estimate: est },
                Some(_) => {}
                None => hits.push(ScanHit { shift, estimate: est }),
            }
        }
    }
    hits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::parse_polynomial;

    fn g(re: i64, im: i64) -> GaussInt {
        GaussInt::new(re, im)
    }

    fn shift_i(re: i64, im: i64) -> ShiftParams {
        ShiftParams::new(g(re, im), GaussInt::one()).unwrap()
    }

    fn cv(v: &[i64]) -> CountVector {
        CountVector::from_i64(v)
    }

    #[test]
    fn step_examples() {
        let m = iteration_matrix(&parse_polynomial("x^2 - i").unwrap(), &shift_i(0, 1)).unwrap();
        assert_eq!(step_counts(&m, &cv(&[1, 0, 0, 0])).unwrap(), cv(&[0, -1, 1, 0]));
        assert_eq!(step_counts(&m, &cv(&[0, -1, 1, 0])).unwrap(), cv(&[-1, -1, 0, -2]));
        assert_eq!(step_counts(&m, &CountVector::zeros(4)).unwrap(), CountVector::zeros(4));
        assert!(matches!(step_counts(&m, &cv(&[1, 0])), Err(IterateError::DimensionMismatch { .. })));
    }

    #[test]
    fn estimate_examples() {
        assert_eq!(estimate_root(&cv(&[0, -1, 1, 0]), 1).unwrap(), GaussRational::from_gauss(g(0, 1)));
        let f = estimate_root(&cv(&[-1352, -560, -560, -1352]), 1).unwrap().to_float();
        assert_eq!(format!("{:.4}+{:.4}i", f.re, f.im), "0.7071+0.7071i");
        assert_eq!(estimate_root(&cv(&[1, 0, 0, 0]), 1), Err(IterateError::DegenerateDenominator));
        assert!(matches!(estimate_root(&cv(&[1, 0, 0, 0]), 2), Err(IterateError::PairIndex { .. })));
        assert!(matches!(estimate_root(&cv(&[1, 0]), 1), Err(IterateError::PairIndex { .. })));
    }

    #[test]
    fn zero_beta_rejected() {
        assert_eq!(ShiftParams::new(g(1, 0), g(0, 0)), Err(IterateError::ZeroBeta));
    }

    #[test]
    fn second_example_converges_quickly_at_loose_tolerance() {
        let p = parse_polynomial("x^2 - i").unwrap();
        let opts = SolveOptions { tol: 1e-4, stable_steps: 1, residual_tol: 1e-4, ..Default::default() };
        let sol = solve(&p, &shift_i(0, 1), &opts).unwrap();
        assert_eq!(sol.estimate.status, Status::Converged);
        assert!(sol.estimate.iterations <= 13, "{}", sol.estimate.iterations);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((sol.estimate.float_value - Complex64::new(h, h)).norm() < 1e-4);
    }

    #[test]
    fn second_example_default_options() {
        let p = parse_polynomial("x^2 - i").unwrap();
        let sol = solve(&p, &shift_i(0, 1), &SolveOptions::default()).unwrap();
        assert_eq!(sol.estimate.status, Status::Converged);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((sol.estimate.float_value - Complex64::new(h, h)).norm() < 1e-10);
        assert!(sol.estimate.residual <= 1e-8);
    }

    #[test]
    fn other_root_by_shift() {
        let p = parse_polynomial("x^2 + 1").unwrap();
        let sol = solve(&p, &shift_i(0, -1), &SolveOptions::default()).unwrap();
        assert_eq!(sol.estimate.status, Status::Converged);
        assert_eq!(sol.estimate.value, GaussRational::from_gauss(g(0, -1)));
    }

    #[test]
    fn golden_ratio_from_fibonacci_counts() {
        let p = parse_polynomial("x^2 - x - 1").unwrap();
        let sol = solve(&p, &ShiftParams::default(), &SolveOptions::default()).unwrap();
        assert_eq!(sol.estimate.status, Status::Converged);
        assert!((sol.estimate.float_value.re - 1.6180339887).abs() < 1e-8);
        assert_eq!(sol.estimate.float_value.im, 0.0);
    }

    #[test]
    fn tied_moduli_do_not_converge() {
        let p = parse_polynomial("x^2 - 2").unwrap();
        let sol = solve(&p, &ShiftParams::default(), &SolveOptions::default()).unwrap();
        assert_eq!(sol.estimate.status, Status::NonConvergent);
        assert!(sol.estimate.iterations <= 200);
        // x^2 + 1 with no shift: eigenvalues ±i rotate the estimate
        let q = parse_polynomial("x^2 + 1").unwrap();
        let sol = solve(&q, &ShiftParams::default(), &SolveOptions::default()).unwrap();
        assert_eq!(sol.estimate.status, Status::NonConvergent);
    }

    #[test]
    fn nilpotent_matrix_is_degenerate() {
        let p = parse_polynomial("x^2").unwrap();
        let sol = solve(&p, &ShiftParams::default(), &SolveOptions::default()).unwrap();
        assert_eq!(sol.estimate.status, Status::Degenerate);
        assert_eq!(sol.records.len(), 3);
    }

    #[test]
    fn linear_polynomials_are_exact() {
        let p = parse_polynomial("3x - 6").unwrap();
        let sol = solve(&p, &ShiftParams::default(), &SolveOptions::default()).unwrap();
        assert_eq!(sol.estimate.value, GaussRational::from_gauss(g(2, 0)));
        assert_eq!(sol.estimate.iterations, 0);
        assert_eq!(sol.estimate.status, Status::Converged);
        let q = parse_polynomial("(1+i)x - 2").unwrap();
        let sol = solve(&q, &ShiftParams::default(), &SolveOptions::default()).unwrap();
        assert_eq!(sol.estimate.value, GaussRational::from_gauss(g(1, -1)));
    }

    #[test]
    fn fixed_iterations_run_to_the_end() {
        let p = parse_polynomial("x^2 - i").unwrap();
        let opts = SolveOptions { fixed_iters: Some(13), ..Default::default() };
        let sol = solve(&p, &shift_i(0, 1), &opts).unwrap();
        assert_eq!(sol.records.len(), 14);
        assert_eq!(sol.estimate.status, Status::MaxIter);
        assert_eq!(sol.records[13].counts, cv(&[-1352, -560, -560, -1352]));

        let q = parse_polynomial("x^2 + 1").unwrap();
        let opts = SolveOptions { fixed_iters: Some(4), ..Default::default() };
        let sol = solve(&q, &shift_i(0, 1), &opts).unwrap();
        assert_eq!(sol.estimate.status, Status::Converged);
    }

    #[test]
    fn initial_vector_override() {
        let p = parse_polynomial("x^2 - x - 1").unwrap();
        let opts = SolveOptions { initial: Some(cv(&[0, 0, 1, 0])), ..Default::default() };
        let sol = solve(&p, &ShiftParams::default(), &opts).unwrap();
        assert_eq!(sol.records[0].counts, cv(&[0, 0, 1, 0]));
        assert_eq!(sol.estimate.status, Status::Converged);
        let bad = SolveOptions { initial: Some(cv(&[1])), ..Default::default() };
        assert!(matches!(solve(&p, &ShiftParams::default(), &bad), Err(IterateError::DimensionMismatch { .. })));
    }

    #[test]
    fn words_engine_matches_counts_engine() {
        let p = parse_polynomial("x^2 - i").unwrap();
        let base = SolveOptions { fixed_iters: Some(13), ..Default::default() };
        let by_counts = solve(&p, &shift_i(0, 1), &base).unwrap();
        let by_words = solve(&p, &shift_i(0, 1), &SolveOptions { engine: Engine::Words, ..base }).unwrap();
        assert_eq!(by_counts.records, by_words.records);
    }

    #[test]
    fn words_engine_reports_cap() {
        let p = parse_polynomial("x^2 - 3x + 2").unwrap();
        let opts = SolveOptions { engine: Engine::Words, length_cap: 100, ..Default::default() };
        let err = solve(&p, &ShiftParams::default(), &opts).unwrap_err();
        assert!(matches!(err, IterateError::CapExceeded(_)));
    }

    #[test]
    fn split_counts_agree_with_matrix_powers() {
        for (text, alpha) in [("x^2 - i", (0, 1)), ("x^2 + 1", (0, 1)), ("2x^3 - ix + (1-i)", (1, 0))] {
            let p = parse_polynomial(text).unwrap();
            let m = iteration_matrix(&p, &shift_i(alpha.0, alpha.1)).unwrap();
            let rules = rewrite::derive_rules(&m).unwrap();
            for k in [0, 1, 2, 5, 8] {
                let split = split_word_counts(&rules, Word::single(Symbol::new(0)), k, usize::MAX).unwrap();
                let mut v = CountVector::unit(m.dim());
                for (step, c) in split.iter().enumerate() {
                    assert_eq!(c, &v, "{text} k={k} step={step}");
                    v = step_counts(&m, &v).unwrap();
                }
            }
        }
    }

    #[test]
    fn scan_finds_both_roots() {
        let p = parse_polynomial("x^2 + 1").unwrap();
        let hits = scan_shifts(&p, 1, &SolveOptions::default());
        let mut roots: Vec<String> = hits.iter().map(|h| h.estimate.value.to_string()).collect();
        roots.sort();
        assert_eq!(roots, ["-i", "i"]);
    }

    #[test]
    fn scan_real_roots() {
        let p = parse_polynomial("x^2 - 3x + 2").unwrap();
        let hits = scan_shifts(&p, 2, &SolveOptions::default());
        let mut roots: Vec<f64> = hits.iter().map(|h| h.estimate.float_value.re).collect();
        roots.sort_by(f64::total_cmp);
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - 1.0).abs() < 1e-8 && (roots[1] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn estimates_agree_across_pairs_once_converged() {
        // (x - 3)(x - 1)(x + 1)
        let p = parse_polynomial("x^3 - 3x^2 - x + 3").unwrap();
        let opts = SolveOptions::default();
        let sol = solve(&p, &ShiftParams::default(), &opts).unwrap();
        assert_eq!(sol.estimate.status, Status::Converged);
        let last = &sol.records.last().unwrap().counts;
        let all: Vec<Complex64> = estimates_all(last).into_iter().map(|e| e.unwrap().to_float()).collect();
        assert_eq!(all.len(), 2);
        assert!(relative_delta(all[0], all[1]) <= 10.0 * opts.tol);
        assert!((all[0].re - 3.0).abs() < 1e-9);
    }

    #[test]
    fn count_growth_is_bounded_by_column_sums() {
        let p = parse_polynomial("(2-i)x^3 + 3ix^2 - x + (1+2i)").unwrap();
        let s = shift_i(1, -2);
        let m = iteration_matrix(&p, &s).unwrap();
        let bound = m.max_abs_column_sum();
        let opts = SolveOptions { fixed_iters: Some(30), ..Default::default() };
        let sol = solve(&p, &s, &opts).unwrap();
        for w in sol.records.windows(2) {
            assert!(w[1].counts.max_abs() <= &bound * w[0].counts.l1());
            assert!(w[1].counts.l1() <= &bound * w[0].counts.l1());
        }
    }
}
