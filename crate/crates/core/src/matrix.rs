//! Replacement matrices, spectral shifts and the real 2×2-block embedding.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::numeric::GaussInt;
use crate::polynomial::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("beta must be nonzero")]
    ZeroBeta,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Square matrix of Gaussian integers, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplacementMatrix {
    dim: usize,
    entries: Vec<GaussInt>,
}

impl ReplacementMatrix {
    pub fn zeros(dim: usize) -> Self {
        ReplacementMatrix { dim, entries: vec![GaussInt::zero(); dim * dim] }
    }

    /// Panics unless `rows` is square.
    pub fn from_rows(rows: Vec<Vec<GaussInt>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        ReplacementMatrix { dim, entries: rows.into_iter().flatten().collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &GaussInt {
        &self.entries[row * self.dim + col]
    }

    fn get_mut(&mut self, row: usize, col: usize) -> &mut GaussInt {
        &mut self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[GaussInt]> {
        self.entries.chunks(self.dim)
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.same_dim(other.dim)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(ReplacementMatrix { dim: self.dim, entries })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        self.same_dim(other.dim)?;
        let n = self.dim;
        let mut out = ReplacementMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = GaussInt::zero();
                for k in 0..n {
                    acc = &acc + &(self.get(i, k) * other.get(k, j));
                }
                *out.get_mut(i, j) = acc;
            }
        }
        Ok(out)
    }

    fn same_dim(&self, got: usize) -> Result<(), MatrixError> {
        if got == self.dim {
            Ok(())
        } else {
            Err(MatrixError::DimensionMismatch { expected: self.dim, got })
        }
    }
}

impl fmt::Display for ReplacementMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Real integer matrix of even dimension `2m` built from 2×2 blocks
/// `[[a, b], [-b, a]]`, one per Gaussian entry `a + bi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealBlockMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl RealBlockMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        &self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigInt]> {
        self.entries.chunks(self.dim)
    }

    /// Whether every 2×2 block has the form `[[a, b], [-b, a]]`.
    pub fn has_block_structure(&self) -> bool {
        let m = self.dim / 2;
        self.dim.is_multiple_of(2)
            && (0..m).all(|bi| {
                (0..m).all(|bj| {
                    let (r, c) = (2 * bi, 2 * bj);
                    self.get(r, c) == self.get(r + 1, c + 1) && *self.get(r, c + 1) == -self.get(r + 1, c)
                })
            })
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>, MatrixError> {
        if v.len() != self.dim {
            return Err(MatrixError::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        Ok(self
            .rows()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        if other.dim != self.dim {
            return Err(MatrixError::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(RealBlockMatrix { dim: self.dim, entries })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        if other.dim != self.dim {
            return Err(MatrixError::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let n = self.dim;
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum();
            }
        }
        Ok(RealBlockMatrix { dim: n, entries })
    }

    /// Largest column sum of absolute values; bounds the per-step growth of
    /// any count vector's L1 norm.
    pub fn max_abs_column_sum(&self) -> BigInt {
        (0..self.dim).map(|j| (0..self.dim).map(|i| self.get(i, j).abs()).sum::<BigInt>()).max().unwrap_or_default()
    }
}

impl fmt::Display for RealBlockMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Companion-style replacement matrix: first row `(-a₁, …, -a_m)`, `a₀` on
/// the subdiagonal, zero elsewhere. Its eigenvalues are `a₀·rᵢ` for the
/// roots `rᵢ`, with eigenvectors `(rᵢ^{m-1}, …, rᵢ, 1)`.
pub fn companion(p: &Polynomial) -> ReplacementMatrix {
    let m = p.degree();
    let c = p.coeffs();
    let mut r = ReplacementMatrix::zeros(m);
    for j in 0..m {
        *r.get_mut(0, j) = -&c[j + 1];
    }
    for i in 1..m {
        *r.get_mut(i, i - 1) = c[0].clone();
    }
    r
}

/// `α·I + β·R`.
pub fn shift(r: &ReplacementMatrix, alpha: &GaussInt, beta: &GaussInt) -> Result<ReplacementMatrix, MatrixError> {
    if beta.is_zero() {
        return Err(MatrixError::ZeroBeta);
    }
    let mut out = r.clone();
    for e in out.entries.iter_mut() {
        *e = beta * e;
    }
    for i in 0..out.dim {
        let d = out.get_mut(i, i);
        *d = &*d + alpha;
    }
    Ok(out)
}

/// Replaces every entry `a + bi` by the block `[[a, b], [-b, a]]`.
pub fn complexify(r: &ReplacementMatrix) -> RealBlockMatrix {
    let m = r.dim;
    let n = 2 * m;
    let mut entries = vec![BigInt::zero(); n * n];
    for i in 0..m {
        for j in 0..m {
            let z = r.get(i, j);
            entries[(2 * i) * n + 2 * j] = z.re.clone();
            entries[(2 * i) * n + 2 * j + 1] = z.im.clone();
            entries[(2 * i + 1) * n + 2 * j] = -&z.im;
            entries[(2 * i + 1) * n + 2 * j + 1] = z.re.clone();
        }
    }
    RealBlockMatrix { dim: n, entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::parse_polynomial;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn g(re: i64, im: i64) -> GaussInt {
        GaussInt::new(re, im)
    }

    fn ints(m: &RealBlockMatrix) -> Vec<Vec<i64>> {
        m.rows().map(|r| r.iter().map(|x| i64::try_from(x).unwrap()).collect()).collect()
    }

    #[test]
    fn companion_examples() {
        let r = companion(&parse_polynomial("x^2 + 1").unwrap());
        assert_eq!(r, ReplacementMatrix::from_rows(vec![vec![g(0, 0), g(-1, 0)], vec![g(1, 0), g(0, 0)]]));
        let r = companion(&parse_polynomial("x^2 - i").unwrap());
        assert_eq!(r, ReplacementMatrix::from_rows(vec![vec![g(0, 0), g(0, 1)], vec![g(1, 0), g(0, 0)]]));
        let r = companion(&parse_polynomial("x - 1").unwrap());
        assert_eq!(r, ReplacementMatrix::from_rows(vec![vec![g(1, 0)]]));
    }

    #[test]
    fn companion_shape() {
        let p = parse_polynomial("(2+i)x^4 - 3x^3 + ix^2 + 5x - 7").unwrap();
        let r = companion(&p);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == 0 {
                    -&p.coeffs()[j + 1]
                } else if j + 1 == i {
                    p.coeffs()[0].clone()
                } else {
                    GaussInt::zero()
                };
                assert_eq!(r.get(i, j), &expect);
            }
        }
    }

    #[test]
    fn shift_examples() {
        let r = companion(&parse_polynomial("x^2 + 1").unwrap());
        let s = shift(&r, &g(0, 1), &g(1, 0)).unwrap();
        assert_eq!(s, ReplacementMatrix::from_rows(vec![vec![g(0, 1), g(-1, 0)], vec![g(1, 0), g(0, 1)]]));
        let r2 = companion(&parse_polynomial("x^2 - i").unwrap());
        let s2 = shift(&r2, &g(0, 1), &g(1, 0)).unwrap();
        assert_eq!(s2, ReplacementMatrix::from_rows(vec![vec![g(0, 1), g(0, 1)], vec![g(1, 0), g(0, 1)]]));
        assert_eq!(shift(&r, &g(0, 0), &g(1, 0)).unwrap(), r);
        assert_eq!(shift(&r, &g(1, 0), &g(0, 0)), Err(MatrixError::ZeroBeta));
    }

    #[test]
    fn complexify_examples() {
        let r = companion(&parse_polynomial("x^2 + 1").unwrap());
        let c = complexify(&shift(&r, &g(0, 1), &g(1, 0)).unwrap());
        assert_eq!(ints(&c), vec![vec![0, 1, -1, 0], vec![-1, 0, 0, -1], vec![1, 0, 0, 1], vec![0, 1, -1, 0]]);
        let r2 = companion(&parse_polynomial("x^2 - i").unwrap());
        let c2 = complexify(&shift(&r2, &g(0, 1), &g(1, 0)).unwrap());
        assert_eq!(ints(&c2), vec![vec![0, 1, 0, 1], vec![-1, 0, -1, 0], vec![1, 0, 0, 1], vec![0, 1, -1, 0]]);
        assert!(c.has_block_structure() && c2.has_block_structure());
    }

    #[test]
    fn complexify_real_matrix_interleaves() {
        let r = companion(&parse_polynomial("x^2 - 3x + 2").unwrap());
        let c = complexify(&r);
        assert_eq!(ints(&c), vec![vec![3, 0, -2, 0], vec![0, 3, 0, -2], vec![1, 0, 0, 0], vec![0, 1, 0, 0]]);
    }

    #[test]
    fn mul_vec_dimension_checked() {
        let c = complexify(&companion(&parse_polynomial("x^2 + 1").unwrap()));
        assert!(matches!(c.mul_vec(&[BigInt::from(1)]), Err(MatrixError::DimensionMismatch { expected: 4, got: 1 })));
    }

    fn to_c(z: &GaussInt) -> Complex64 {
        z.to_complex()
    }

    /// Roots of a quadratic by the quadratic formula.
    fn quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 2] {
        let d = (b * b - 4.0 * a * c).sqrt();
        [(-b + d) / (2.0 * a), (-b - d) / (2.0 * a)]
    }

    #[test]
    fn eigen_relation_on_quadratics() {
        let alpha = g(2, -1);
        let beta = g(1, 1);
        for text in ["x^2 + 1", "x^2 - i", "2x^2 - 3x + (1+i)", "(1-i)x^2 + 2ix - 5", "3x^2 + x + 1"] {
            let p = parse_polynomial(text).unwrap();
            let [a, b, c] = [to_c(&p.coeffs()[0]), to_c(&p.coeffs()[1]), to_c(&p.coeffs()[2])];
            let r = companion(&p);
            let rs = shift(&r, &alpha, &beta).unwrap();
            for root in quadratic_roots(a, b, c) {
                let v = [root, Complex64::new(1.0, 0.0)];
                let norm_v = (v[0].norm_sqr() + 1.0).sqrt();
                for (mat, lambda) in [(&r, a * root), (&rs, to_c(&alpha) + to_c(&beta) * a * root)] {
                    let mut err = 0.0;
                    for i in 0..2 {
                        let rv: Complex64 = (0..2).map(|j| to_c(mat.get(i, j)) * v[j]).sum();
                        err += (rv - lambda * v[i]).norm_sqr();
                    }
                    assert!(err.sqrt() <= 1e-9 * norm_v, "{text}: {err}");
                }
            }
        }
    }

    #[test]
    fn eigen_relation_on_cubic_with_known_roots() {
        // (x - 1)(x + 2)(x - i) = x^3 + (1-i)x^2 + (-2-i)x + 2i
        let p = parse_polynomial("x^3 + (1-i)x^2 + (-2-i)x + 2i").unwrap();
        let r = companion(&p);
        for root in [Complex64::new(1.0, 0.0), Complex64::new(-2.0, 0.0), Complex64::new(0.0, 1.0)] {
            assert!(p.residual(root) < 1e-12);
            let v = [root * root, root, Complex64::new(1.0, 0.0)];
            for i in 0..3 {
                let rv: Complex64 = (0..3).map(|j| to_c(r.get(i, j)) * v[j]).sum();
                assert!((rv - root * v[i]).norm() < 1e-9);
            }
        }
    }

    fn arb_matrix(m: usize) -> impl Strategy<Value = ReplacementMatrix> {
        proptest::collection::vec((-5i64..=5, -5i64..=5), m * m).prop_map(move |v| {
            let rows = v.chunks(m).map(|r| r.iter().map(|&(a, b)| g(a, b)).collect()).collect();
            ReplacementMatrix::from_rows(rows)
        })
    }

    proptest! {
        #[test]
        fn complexify_is_ring_homomorphism((a, b) in (1usize..5).prop_flat_map(|m| (arb_matrix(m), arb_matrix(m)))) {
            let (ca, cb) = (complexify(&a), complexify(&b));
            prop_assert_eq!(complexify(&a.mul(&b).unwrap()), ca.mul(&cb).unwrap());
            prop_assert_eq!(complexify(&a.add(&b).unwrap()), ca.add(&cb).unwrap());
            prop_assert!(ca.has_block_structure());
        }
    }
}
