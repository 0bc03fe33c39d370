//! Roots of polynomials with Gaussian-integer coefficients computed by
//! rewriting symbol sequences and counting symbols.
//!
//! The pipeline: a [`polynomial::Polynomial`] gives a companion-style
//! [`matrix::ReplacementMatrix`], which is shifted and embedded as a real
//! integer [`matrix::RealBlockMatrix`]. Its columns become
//! [`rewrite::RuleTable`] rules over an alphabet with conjugate symbols.
//! Iterating the rules (or, equivalently, the matrix on count vectors) and
//! taking one complex quotient of counts estimates the dominant root
//! ([`iterate::solve`]). The final quotient can be drawn as a ruler-and-compass
//! construction ([`geometry`]).
//!
//! ```
//! use subroot_core::{parse_polynomial, solve, GaussInt, ShiftParams, SolveOptions, Status};
//!
//! let p = parse_polynomial("x^2 + 1").unwrap();
//! let shift = ShiftParams::new(GaussInt::new(0, -1), GaussInt::one()).unwrap();
//! let sol = solve(&p, &shift, &SolveOptions::default()).unwrap();
//! assert_eq!(sol.estimate.status, Status::Converged);
//! assert_eq!(sol.estimate.value.to_string(), "-i");
//! ```

pub mod cli;
pub mod geometry;
pub mod iterate;
pub mod matrix;
pub mod numeric;
pub mod polynomial;
pub mod report;
pub mod rewrite;

pub use iterate::{scan_shifts, solve, Engine, RootEstimate, ShiftParams, SolveOptions, Status};
pub use numeric::{gauss_divide, GaussInt, GaussRational};
pub use polynomial::{parse_polynomial, Polynomial};
