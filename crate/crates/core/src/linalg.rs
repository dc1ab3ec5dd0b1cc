//! Dense exact matrices over Z[1/2, i].

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::DyadicGaussian;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {left_rows}x{left_cols} times {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("index out of range: {indices:?} for dimension {n}")]
    IndexOutOfRange { indices: Vec<usize>, n: usize },
    #[error("two-level matrix needs j < k, got j = {j}, k = {k}")]
    BadIndexOrder { j: usize, k: usize },
    #[error("matrix is not square")]
    NotSquare,
}

/// A `rows × cols` matrix of exact ring elements in row-major order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<DyadicGaussian>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            entries: vec![DyadicGaussian::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for j in 0..n {
            m.set(j, j, DyadicGaussian::one());
        }
        m
    }

    /// Scalar multiple of the identity.
    pub fn scalar(n: usize, value: DyadicGaussian) -> Self {
        let mut m = Self::zeros(n, n);
        for j in 0..n {
            m.set(j, j, value.clone());
        }
        m
    }

    pub fn diagonal(values: Vec<DyadicGaussian>) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (j, v) in values.into_iter().enumerate() {
            m.set(j, j, v);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<DyadicGaussian>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        ExactMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &DyadicGaussian {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: DyadicGaussian) {
        self.entries[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[DyadicGaussian] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[DyadicGaussian] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    let e = self.get(r, c);
                    if r == c {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self.get(r, c).is_zero()))
    }

    /// Exact product. Zero entries of either factor are skipped, which makes
    /// products of the sparse gate matrices cheap.
    pub fn matmul(&self, rhs: &ExactMatrix) -> Result<ExactMatrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        let nonzero_rhs: Vec<Vec<usize>> = (0..rhs.rows)
            .map(|k| {
                (0..rhs.cols)
                    .filter(|&c| !rhs.get(k, c).is_zero())
                    .collect()
            })
            .collect();
        let mut out = ExactMatrix::zeros(self.rows, rhs.cols);
        let mut terms: Vec<Vec<DyadicGaussian>> = vec![Vec::new(); rhs.cols];
        for r in 0..self.rows {
            for t in terms.iter_mut() {
                t.clear();
            }
            for (k, cols) in nonzero_rhs.iter().enumerate() {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for &c in cols {
                    terms[c].push(a * rhs.get(k, c));
                }
            }
            for (c, t) in terms.iter().enumerate() {
                match t.len() {
                    0 => {}
                    1 => out.set(r, c, t[0].clone()),
                    _ => out.set(r, c, DyadicGaussian::sum(t.iter())),
                }
            }
        }
        Ok(out)
    }

    /// Product of square matrices of equal size; panics on mismatch.
    pub fn mul(&self, rhs: &ExactMatrix) -> ExactMatrix {
        self.matmul(rhs).expect("matrix dimensions must agree")
    }

    /// Kronecker product; the left factor indexes the most significant block.
    pub fn tensor(&self, rhs: &ExactMatrix) -> ExactMatrix {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = ExactMatrix::zeros(rows, cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self.get(r1, c1);
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..rhs.rows {
                    for c2 in 0..rhs.cols {
                        let b = rhs.get(r2, c2);
                        if !b.is_zero() {
                            out.set(r1 * rhs.rows + r2, c1 * rhs.cols + c2, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ExactMatrix {
        let mut out = ExactMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn is_unitary(&self) -> bool {
        self.is_square() && self.mul(&self.adjoint()).is_identity()
    }

    /// Returns the adjoint together with whether `A·A† = I` holds exactly.
    pub fn adjoint_and_unitarity(&self) -> (ExactMatrix, bool) {
        let adj = self.adjoint();
        let unitary = self.is_square() && self.mul(&adj).is_identity();
        (adj, unitary)
    }

    pub fn scale(&self, factor: &DyadicGaussian) -> ExactMatrix {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    /// Exact determinant by Bareiss elimination over the Gaussian integers.
    ///
    /// All entries are first brought over the common denominator `(1+i)^K`,
    /// so the integer matrix `N` satisfies `A = N / (1+i)^K` and
    /// `det A = det N / (1+i)^(nK)`.
    pub fn det_exact(&self) -> Result<DyadicGaussian, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare);
        }
        let n = self.rows;
        if n == 0 {
            return Ok(DyadicGaussian::one());
        }
        let k = self
            .entries
            .iter()
            .map(DyadicGaussian::denom_exp)
            .max()
            .unwrap_or(0);
        let mut a: Vec<Vec<GaussInt>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let (re, im) = self.get(r, c).numerator_at(k);
                        GaussInt { re, im }
                    })
                    .collect()
            })
            .collect();
        let mut negate = false;
        let mut prev = GaussInt::one();
        for p in 0..n - 1 {
            if a[p][p].is_zero() {
                match (p + 1..n).find(|&r| !a[r][p].is_zero()) {
                    Some(r) => {
                        a.swap(p, r);
                        negate = !negate;
                    }
                    None => return Ok(DyadicGaussian::zero()),
                }
            }
            for r in p + 1..n {
                for c in p + 1..n {
                    let num = a[r][c].mul(&a[p][p]).sub(&a[r][p].mul(&a[p][c]));
                    a[r][c] = num.div_exact(&prev);
                }
            }
            prev = a[p][p].clone();
        }
        let mut det = a[n - 1][n - 1].clone();
        if negate {
            det = det.neg();
        }
        Ok(DyadicGaussian::new(det.re, det.im, k * n as u32))
    }

    /// Panicking variant of [`ExactMatrix::det_exact`] for square inputs.
    pub fn det(&self) -> DyadicGaussian {
        self.det_exact().expect("determinant of a square matrix")
    }

    /// Pretty-printed grid for human inspection.
    pub fn pretty(&self) -> String {
        let cells: Vec<String> = self.entries.iter().map(DyadicGaussian::render).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        let mut out = String::new();
        for r in 0..self.rows {
            let line: Vec<String> = (0..self.cols)
                .map(|c| format!("{:>width$}", cells[r * self.cols + c], width = width))
                .collect();
            out.push_str(&line.join("  "));
            out.push('\n');
        }
        out
    }

    /// First coordinate (row-major) where two equally sized matrices differ.
    pub fn first_difference(&self, other: &ExactMatrix) -> Option<(usize, usize)> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some((0, 0));
        }
        (0..self.rows * self.cols)
            .find(|&idx| self.entries[idx] != other.entries[idx])
            .map(|idx| (idx / self.cols, idx % self.cols))
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ExactMatrix {}x{}\n{}",
            self.rows,
            self.cols,
            self.pretty()
        )
    }
}

/// JSON dump: an array of rows, each an array of `[re, im, k]` triples.
impl Serialize for ExactMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<&[DyadicGaussian]> = (0..self.rows).map(|r| self.row(r)).collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExactMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<DyadicGaussian>> = Vec::deserialize(deserializer)?;
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != c) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(ExactMatrix::from_rows(rows))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct GaussInt {
    re: BigInt,
    im: BigInt,
}

impl GaussInt {
    fn one() -> Self {
        GaussInt {
            re: BigInt::one(),
            im: BigInt::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn mul(&self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn sub(&self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    fn neg(&self) -> GaussInt {
        GaussInt {
            re: -&self.re,
            im: -&self.im,
        }
    }

    /// Division known to be exact in Z[i].
    fn div_exact(&self, d: &GaussInt) -> GaussInt {
        let norm = &d.re * &d.re + &d.im * &d.im;
        let re = &self.re * &d.re + &self.im * &d.im;
        let im = &self.im * &d.re - &self.re * &d.im;
        let (qr, rr) = re.div_rem(&norm);
        let (qi, ri) = im.div_rem(&norm);
        debug_assert!(rr.is_zero() && ri.is_zero(), "inexact Gaussian division");
        GaussInt { re: qr, im: qi }
    }
}

/// The one- and two-level generators of U_n(Z[1/2, i]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LevelKind {
    /// `i` at position `j`.
    I,
    /// The 2×2 swap on rows/columns `j, k`.
    X,
    /// The scaled Hadamard on rows/columns `j, k`.
    K,
}

/// Builds `i_[j]`, `X_[j,k]` or `K_[j,k]` of dimension `n`.
pub fn level_matrix(
    kind: LevelKind,
    j: usize,
    k: Option<usize>,
    n: usize,
) -> Result<ExactMatrix, LinalgError> {
    if j >= n || k.is_some_and(|k| k >= n) {
        return Err(LinalgError::IndexOutOfRange {
            indices: std::iter::once(j).chain(k).collect(),
            n,
        });
    }
    let mut m = ExactMatrix::identity(n);
    match (kind, k) {
        (LevelKind::I, None) => {
            m.set(j, j, DyadicGaussian::i());
        }
        (LevelKind::I, Some(k)) => {
            return Err(LinalgError::IndexOutOfRange {
                indices: vec![j, k],
                n,
            });
        }
        (_, None) => {
            return Err(LinalgError::IndexOutOfRange {
                indices: vec![j],
                n,
            });
        }
        (kind, Some(k)) => {
            if j >= k {
                return Err(LinalgError::BadIndexOrder { j, k });
            }
            let block = match kind {
                LevelKind::X => x_gate(),
                _ => k_gate(),
            };
            m.set(j, j, block.get(0, 0).clone());
            m.set(j, k, block.get(0, 1).clone());
            m.set(k, j, block.get(1, 0).clone());
            m.set(k, k, block.get(1, 1).clone());
        }
    }
    Ok(m)
}

/// `K = (1/(1+i)) [[1, 1], [1, -1]]`.
pub fn k_gate() -> ExactMatrix {
    let h = DyadicGaussian::new(1, 0, 1);
    ExactMatrix::from_rows(vec![vec![h.clone(), h.clone()], vec![h.clone(), -h]])
}

/// `S = diag(1, i)`.
pub fn s_gate() -> ExactMatrix {
    ExactMatrix::diagonal(vec![DyadicGaussian::one(), DyadicGaussian::i()])
}

pub fn x_gate() -> ExactMatrix {
    let (o, z) = (DyadicGaussian::one(), DyadicGaussian::zero());
    ExactMatrix::from_rows(vec![vec![z.clone(), o.clone()], vec![o, z]])
}

/// `CS = diag(1, 1, 1, i)`.
pub fn cs_gate() -> ExactMatrix {
    let o = DyadicGaussian::one();
    ExactMatrix::diagonal(vec![o.clone(), o.clone(), o, DyadicGaussian::i()])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i3(n: usize) -> ExactMatrix {
        ExactMatrix::scalar(n, DyadicGaussian::i_pow(3))
    }

    /// Laplace expansion along the first row; slow but independent of
    /// the elimination code.
    fn det_laplace(m: &ExactMatrix) -> DyadicGaussian {
        let n = m.rows();
        if n == 1 {
            return m.get(0, 0).clone();
        }
        let mut acc = DyadicGaussian::zero();
        for c in 0..n {
            if m.get(0, c).is_zero() {
                continue;
            }
            let minor = ExactMatrix::from_rows(
                (1..n)
                    .map(|r| {
                        (0..n)
                            .filter(|&cc| cc != c)
                            .map(|cc| m.get(r, cc).clone())
                            .collect()
                    })
                    .collect(),
            );
            let term = m.get(0, c) * &det_laplace(&minor);
            acc = if c % 2 == 0 {
                &acc + &term
            } else {
                &acc - &term
            };
        }
        acc
    }

    #[test]
    fn k_squared_and_skskk() {
        let k = k_gate();
        assert_eq!(k.mul(&k), i3(2));
        let sk = s_gate().mul(&k);
        assert_eq!(sk.mul(&sk).mul(&sk), i3(2));
        let a = k.mul(&s_gate());
        assert_eq!(ExactMatrix::identity(2).mul(&a), a);
    }

    #[test]
    fn matmul_dimension_mismatch() {
        let err = ExactMatrix::zeros(2, 3)
            .matmul(&ExactMatrix::zeros(2, 3))
            .unwrap_err();
        assert!(matches!(err, LinalgError::DimensionMismatch { .. }));
    }

    #[test]
    fn tensor_examples() {
        let i2 = ExactMatrix::identity(2);
        assert_eq!(i2.tensor(&i2).tensor(&i2), ExactMatrix::identity(8));
        assert_eq!(
            k_gate().tensor(&ExactMatrix::identity(4)),
            k_gate().tensor(&i2).tensor(&i2)
        );
        let cs01 = cs_gate().tensor(&i2);
        // diag entry i exactly where x0 = x1 = 1, i.e. indices 6 and 7
        for x in 0..8 {
            let expected = if x >= 6 {
                DyadicGaussian::i()
            } else {
                DyadicGaussian::one()
            };
            assert_eq!(cs01.get(x, x), &expected);
        }
        assert!(cs01.is_diagonal());
    }

    #[test]
    fn unitarity() {
        assert!(k_gate().adjoint_and_unitarity().1);
        let o = DyadicGaussian::one();
        let d = ExactMatrix::diagonal(vec![o.clone(), o.clone(), o, DyadicGaussian::from_int(2)]);
        assert!(!d.adjoint_and_unitarity().1);
    }

    #[test]
    fn determinants() {
        assert_eq!(cs_gate().det(), DyadicGaussian::i());
        assert_eq!(k_gate().det(), DyadicGaussian::i());
        assert_eq!(det_laplace(&k_gate()), DyadicGaussian::i());
        let cs01 = cs_gate().tensor(&ExactMatrix::identity(2));
        assert_eq!(cs01.det(), DyadicGaussian::from_int(-1));
        assert!(ExactMatrix::zeros(2, 3).det_exact().is_err());
    }

    #[test]
    fn bareiss_matches_laplace_on_dense_products() {
        let i2 = ExactMatrix::identity(2);
        let k0 = k_gate().tensor(&i2).tensor(&i2);
        let k1 = i2.tensor(&k_gate()).tensor(&i2);
        let k2 = i2.tensor(&i2).tensor(&k_gate());
        let cs12 = i2.tensor(&cs_gate());
        let s0 = s_gate().tensor(&i2).tensor(&i2);
        let m = k0.mul(&cs12).mul(&k1).mul(&s0).mul(&k2).mul(&cs12).mul(&k1);
        assert_eq!(m.det(), det_laplace(&m));
        // a non-unitary integer matrix with a zero leading pivot
        let f = |v: i64| DyadicGaussian::from_int(v);
        let a = ExactMatrix::from_rows(vec![
            vec![f(0), f(2), f(1)],
            vec![f(3), f(1), DyadicGaussian::new(1, 1, 3)],
            vec![f(1), DyadicGaussian::i(), f(4)],
        ]);
        assert_eq!(a.det(), det_laplace(&a));
    }

    #[test]
    fn level_matrix_examples() {
        let m = level_matrix(LevelKind::I, 0, None, 2).unwrap();
        assert_eq!(
            m,
            ExactMatrix::diagonal(vec![DyadicGaussian::i(), DyadicGaussian::one()])
        );
        assert_eq!(level_matrix(LevelKind::X, 0, Some(1), 2).unwrap(), x_gate());
        assert_eq!(level_matrix(LevelKind::K, 0, Some(1), 2).unwrap(), k_gate());
        for n in 1..6 {
            for j in 0..n {
                assert_eq!(
                    level_matrix(LevelKind::I, j, None, n).unwrap().det(),
                    DyadicGaussian::i()
                );
            }
        }
        assert!(level_matrix(LevelKind::X, 1, Some(0), 3).is_err());
        assert!(level_matrix(LevelKind::K, 0, Some(3), 3).is_err());
        assert!(level_matrix(LevelKind::I, 0, Some(1), 3).is_err());
    }

    #[test]
    fn json_dump_roundtrip() {
        let m = k_gate();
        let js = serde_json::to_string(&m).unwrap();
        assert_eq!(js, "[[[1,0,1],[1,0,1]],[[1,0,1],[-1,0,1]]]");
        let back: ExactMatrix = serde_json::from_str(&js).unwrap();
        assert_eq!(back, m);
    }
}
