//! Finite-alphabet probability primitives and information measures.
//!
//! Alphabets are index-based (`0..size`). All information measures are in
//! bits (base-2 logarithms), `0 * log 0 = 0` by continuity, and divergence
//! returns `+inf` on a support violation instead of an error.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::{Error, Result};

/// Absolute tolerance for simplex and row-stochasticity checks.
pub const SIMPLEX_TOL: f64 = 1e-12;

#[inline]
pub(crate) fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// `p * log2(p)` with the continuity convention at zero.
#[inline]
fn xlog2(p: f64) -> f64 {
    if p > 0.0 {
        p * log2(p)
    } else {
        0.0
    }
}

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

/// Dense row-major matrix of `f64`, the storage behind joints and channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            data: vec![0.0; rows * cols],
            rows,
            cols,
        }
    }

    /// Build from nested rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput);
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(Error::EmptyInput);
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::LengthMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            data,
            rows: rows.len(),
            cols,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn transposed(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for a in 0..self.rows {
            for b in 0..self.cols {
                out[(b, a)] = self[(a, b)];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

// ---------------------------------------------------------------------------
// Pmf
// ---------------------------------------------------------------------------

/// Probability mass function on a finite alphabet.
///
/// Entries are non-negative and sum to one within [`SIMPLEX_TOL`].
/// Construction validates; [`Pmf::normalized`] rescales instead.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (i, &p) in probs.iter().enumerate() {
            if p < 0.0 || !p.is_finite() {
                return Err(Error::NegativeEntry { index: i, value: p });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Pmf { probs })
    }

    /// Rescale a non-negative vector with positive total mass to a pmf.
    pub fn normalized(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (i, &p) in probs.iter().enumerate() {
            if p < 0.0 || !p.is_finite() {
                return Err(Error::NegativeEntry { index: i, value: p });
            }
        }
        let sum: f64 = probs.iter().sum();
        if sum <= 0.0 {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Pmf {
            probs: probs.into_iter().map(|p| p / sum).collect(),
        })
    }

    pub fn uniform(n: usize) -> Self {
        Pmf {
            probs: vec![1.0 / n as f64; n.max(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    #[inline]
    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn iter(&self) -> core::slice::Iter<'_, f64> {
        self.probs.iter()
    }
}

// ---------------------------------------------------------------------------
// JointPmf
// ---------------------------------------------------------------------------

/// Joint probability distribution over a product alphabet `A x B`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    probs: Matrix,
}

impl JointPmf {
    pub fn new(probs: Matrix) -> Result<Self> {
        for (i, &p) in probs.as_slice().iter().enumerate() {
            if p < 0.0 || !p.is_finite() {
                return Err(Error::NegativeEntry { index: i, value: p });
            }
        }
        let sum = probs.sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(JointPmf { probs })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        JointPmf::new(Matrix::from_rows(rows)?)
    }

    /// The product distribution `pa(a) * pb(b)`.
    pub fn product(pa: &Pmf, pb: &Pmf) -> Self {
        let mut m = Matrix::zeros(pa.len(), pb.len());
        for a in 0..pa.len() {
            for b in 0..pb.len() {
                m[(a, b)] = pa.prob(a) * pb.prob(b);
            }
        }
        JointPmf { probs: m }
    }

    pub fn rows(&self) -> usize {
        self.probs.rows()
    }

    pub fn cols(&self) -> usize {
        self.probs.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.probs.shape()
    }

    #[inline]
    pub fn prob(&self, a: usize, b: usize) -> f64 {
        self.probs[(a, b)]
    }

    pub fn matrix(&self) -> &Matrix {
        &self.probs
    }

    /// Marginal over the row alphabet `A`.
    pub fn row_marginal(&self) -> Pmf {
        let mut m = vec![0.0; self.rows()];
        for a in 0..self.rows() {
            for b in 0..self.cols() {
                m[a] += self.prob(a, b);
            }
        }
        Pmf { probs: m }
    }

    /// Marginal over the column alphabet `B`.
    pub fn col_marginal(&self) -> Pmf {
        let mut m = vec![0.0; self.cols()];
        for a in 0..self.rows() {
            for b in 0..self.cols() {
                m[b] += self.prob(a, b);
            }
        }
        Pmf { probs: m }
    }

    /// The joint with the two alphabets exchanged.
    pub fn transposed(&self) -> JointPmf {
        JointPmf {
            probs: self.probs.transposed(),
        }
    }
}

// ---------------------------------------------------------------------------
// Channel
// ---------------------------------------------------------------------------

/// Row-stochastic conditional distribution: one output pmf per input letter.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    rows: Matrix,
}

impl Channel {
    pub fn new(rows: Matrix) -> Result<Self> {
        for (i, &p) in rows.as_slice().iter().enumerate() {
            if p < 0.0 || !p.is_finite() {
                return Err(Error::NegativeEntry { index: i, value: p });
            }
        }
        for r in 0..rows.rows() {
            let sum: f64 = rows.row(r).iter().sum();
            if (sum - 1.0).abs() > SIMPLEX_TOL {
                return Err(Error::RowNotNormalized { row: r, sum });
            }
        }
        Ok(Channel { rows })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Channel::new(Matrix::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        Channel { rows: m }
    }

    pub fn num_inputs(&self) -> usize {
        self.rows.rows()
    }

    pub fn num_outputs(&self) -> usize {
        self.rows.cols()
    }

    /// `P(output = y | input = v)`.
    #[inline]
    pub fn prob(&self, v: usize, y: usize) -> f64 {
        self.rows[(v, y)]
    }

    pub fn row(&self, v: usize) -> &[f64] {
        self.rows.row(v)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.rows
    }
}

// ---------------------------------------------------------------------------
// Information measures
// ---------------------------------------------------------------------------

/// Entropy `H(p)` in bits.
pub fn entropy(p: &Pmf) -> f64 {
    -p.iter().map(|&x| xlog2(x)).sum::<f64>()
}

/// Binary entropy `h(a) = -a log2 a - (1-a) log2 (1-a)`, with `h(0) = h(1) = 0`.
pub fn binary_entropy(a: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::OutOfRange {
            what: "binary_entropy argument",
            value: a,
        });
    }
    Ok(-xlog2(a) - xlog2(1.0 - a))
}

/// Conditional entropy `H(A|B)` of the row alphabet given the column alphabet.
pub fn conditional_entropy(j: &JointPmf) -> f64 {
    let mb = j.col_marginal();
    let mut h = 0.0;
    for a in 0..j.rows() {
        for b in 0..j.cols() {
            let p = j.prob(a, b);
            if p > 0.0 {
                h -= p * log2(p / mb.prob(b));
            }
        }
    }
    h
}

/// Informational divergence `D(p || q)` in bits; `+inf` when `p` puts mass
/// where `q` does not.
pub fn divergence(p: &Pmf, q: &Pmf) -> f64 {
    assert_eq!(p.len(), q.len(), "divergence needs equal alphabet sizes");
    let mut d = 0.0;
    for (&pi, &qi) in p.iter().zip(q.iter()) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return f64::INFINITY;
            }
            d += pi * log2(pi / qi);
        }
    }
    d
}

/// Mutual information `I(A;B) = D(j || row_marginal x col_marginal)` in bits.
pub fn mutual_information(j: &JointPmf) -> f64 {
    let ma = j.row_marginal();
    let mb = j.col_marginal();
    let mut i = 0.0;
    for a in 0..j.rows() {
        for b in 0..j.cols() {
            let p = j.prob(a, b);
            if p > 0.0 {
                i += p * log2(p / (ma.prob(a) * mb.prob(b)));
            }
        }
    }
    i
}

/// The joint `out(a, b) = p(a) * c(b|a)`.
pub fn compose(p: &Pmf, c: &Channel) -> Result<JointPmf> {
    if c.num_inputs() != p.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            got: c.num_inputs(),
        });
    }
    let mut m = Matrix::zeros(p.len(), c.num_outputs());
    for a in 0..p.len() {
        for b in 0..c.num_outputs() {
            m[(a, b)] = p.prob(a) * c.prob(a, b);
        }
    }
    JointPmf::new(m)
}

/// Empirical joint distribution of a sequence of letter pairs.
pub fn empirical_joint(
    pairs: &[(usize, usize)],
    rows: usize,
    cols: usize,
) -> Result<JointPmf> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut m = Matrix::zeros(rows, cols);
    let w = 1.0 / pairs.len() as f64;
    for &(a, b) in pairs {
        if a >= rows {
            return Err(Error::LetterOutOfRange {
                index: a,
                alphabet: rows,
            });
        }
        if b >= cols {
            return Err(Error::LetterOutOfRange {
                index: b,
                alphabet: cols,
            });
        }
        m[(a, b)] += w;
    }
    JointPmf::new(m)
}

/// Convex mixture of equally shaped joints.
pub fn mix(weights: &Pmf, joints: &[JointPmf]) -> Result<JointPmf> {
    if joints.len() != weights.len() {
        return Err(Error::LengthMismatch {
            expected: weights.len(),
            got: joints.len(),
        });
    }
    let shape = joints[0].shape();
    let mut m = Matrix::zeros(shape.0, shape.1);
    for (l, j) in joints.iter().enumerate() {
        if j.shape() != shape {
            return Err(Error::ShapeMismatch {
                expected: shape,
                got: j.shape(),
            });
        }
        let w = weights.prob(l);
        for a in 0..shape.0 {
            for b in 0..shape.1 {
                m[(a, b)] += w * j.prob(a, b);
            }
        }
    }
    JointPmf::new(m)
}
