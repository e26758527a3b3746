//! Exact rational vectors and matrices.
//!
//! Everything here is dense and exact; dimensions in this crate stay small
//! (the largest ambient space is 10-dimensional), so plain Gaussian
//! elimination over `BigRational` is sufficient.

mod hnf;

pub use hnf::{hermite_normal_form, hnf_int, integer_kernel};

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: &BigInt) -> Rational {
    Rational::from_integer(n.clone())
}

/// Formats as `num/den`, dropping the denominator when it is one.
/// Always `num/den`, also for integers.
pub fn fmt_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QVector {
    entries: Vec<Rational>,
}

impl QVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        Self { entries }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: vec![Rational::zero(); n],
        }
    }

    pub fn from_i64(xs: &[i64]) -> Self {
        Self::new(xs.iter().map(|&x| rat(x)).collect())
    }

    pub fn from_ints(xs: &[BigInt]) -> Self {
        Self::new(xs.iter().map(rat_int).collect())
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.entries[i] = Rational::one();
        v
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.entries.iter()
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<Rational> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Standard (coordinate) dot product.
    pub fn dot(&self, other: &QVector) -> Rational {
        debug_assert_eq!(self.len(), other.len());
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn add(&self, other: &QVector) -> QVector {
        QVector::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &QVector) -> QVector {
        QVector::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> QVector {
        QVector::new(self.entries.iter().map(|a| a * s).collect())
    }

    pub fn neg(&self) -> QVector {
        QVector::new(self.entries.iter().map(|a| -a).collect())
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: &Rational, other: &QVector) -> QVector {
        QVector::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + s * b)
                .collect(),
        )
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|q| q.is_integer())
    }

    /// The positive multiple with coprime integer entries (zero stays zero).
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        let lcm = self
            .entries
            .iter()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let ints: Vec<BigInt> = self
            .entries
            .iter()
            .map(|q| (q * rat_int(&lcm)).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if g.is_zero() {
            return ints;
        }
        ints.into_iter().map(|x| x / &g).collect()
    }

    /// Integer entries; panics if some entry is not integral.
    pub fn to_integers(&self) -> Vec<BigInt> {
        self.entries
            .iter()
            .map(|q| {
                assert!(q.is_integer(), "non-integral entry {q}");
                q.to_integer()
            })
            .collect()
    }
}

impl Index<usize> for QVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.entries[i]
    }
}

impl IndexMut<usize> for QVector {
    fn index_mut(&mut self, i: usize) -> &mut Rational {
        &mut self.entries[i]
    }
}

impl fmt::Debug for QVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, q) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for QVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
    }

    pub fn from_vectors(rows: &[QVector]) -> Self {
        Self::from_rows(rows.iter().map(|v| v.as_slice().to_vec()).collect())
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> QVector {
        QVector::new(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn col(&self, j: usize) -> QVector {
        QVector::new((0..self.rows).map(|i| self[(i, j)].clone()).collect())
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &QVector) -> QVector {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        QVector::new(
            (0..self.rows)
                .map(|i| {
                    (0..self.cols).fold(Rational::zero(), |acc, j| acc + &self[(i, j)] * &v[j])
                })
                .collect(),
        )
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|q| q.is_integer())
    }

    /// Bilinear form `x^T self y`.
    pub fn bilinear(&self, x: &QVector, y: &QVector) -> Rational {
        x.dot(&self.mul_vec(y))
    }

    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }

    pub fn det(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m[(r, c)].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pivot = m[(c, c)].clone();
            det *= &pivot;
            for r in c + 1..n {
                if m[(r, c)].is_zero() {
                    continue;
                }
                let f = &m[(r, c)] / &pivot;
                for k in c..n {
                    let t = &f * &m[(c, k)];
                    m[(r, k)] -= t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut aug = QMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let (r, pivots) = rref(&aug);
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Reduced row echelon form and pivot columns.
pub fn rref(m: &QMatrix) -> (QMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&r| !a[(r, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(p, row);
        let inv = a[(row, c)].recip();
        for k in c..a.cols {
            a[(row, k)] *= &inv;
        }
        for r in 0..a.rows {
            if r == row || a[(r, c)].is_zero() {
                continue;
            }
            let f = a[(r, c)].clone();
            for k in c..a.cols {
                let t = &f * &a[(row, k)];
                a[(r, k)] -= t;
            }
        }
        pivots.push(c);
        row += 1;
    }
    (a, pivots)
}

/// Exact basis of the right kernel `{x : m x = 0}`; empty iff full column rank.
pub fn kernel_basis(m: &QMatrix) -> Vec<QVector> {
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = QVector::zeros(m.cols);
            v[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r[(i, f)].clone();
            }
            v
        })
        .collect()
}

/// Solves `m x = b`, requiring a unique solution.
pub fn solve_unique(m: &QMatrix, b: &QVector) -> Result<QVector> {
    let n = m.cols;
    let mut aug = QMatrix::zeros(m.rows, n + 1);
    for i in 0..m.rows {
        for j in 0..n {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, n)] = b[i].clone();
    }
    let (r, pivots) = rref(&aug);
    if pivots.last() == Some(&n) {
        return Err(Error::NoSolution);
    }
    if pivots.len() < n {
        return Err(Error::RankDeficient {
            rank: pivots.len(),
            needed: n,
        });
    }
    Ok(QVector::new((0..n).map(|i| r[(i, n)].clone()).collect()))
}

/// The unique `y` with `<p, y> = 1` for every point `p`, where the pairing is
/// `p^T gram y`.
pub fn solve_affine(points: &[QVector], gram: &QMatrix) -> Result<QVector> {
    let n = gram.rows();
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.len(),
        });
    }
    let rank = QMatrix::from_vectors(points).rank();
    if points.is_empty() || rank < n {
        return Err(Error::RankDeficient { rank, needed: n });
    }
    let rows: Vec<QVector> = points.iter().map(|p| gram.transpose().mul_vec(p)).collect();
    let system = QMatrix::from_vectors(&rows);
    let ones = QVector::new(vec![Rational::one(); points.len()]);
    let y = solve_unique(&system, &ones)?;
    debug_assert!(points.iter().all(|p| gram.bilinear(p, &y).is_one()));
    Ok(y)
}

/// Largest integer `k >= 0` with `k^2 <= q` (for `q >= 0`).
pub fn floor_sqrt(q: &Rational) -> BigInt {
    if !q.is_positive() {
        return BigInt::zero();
    }
    let fl = q.floor().to_integer();
    fl.sqrt()
}

/// Sup-norm of an integer vector.
pub fn abs_max(xs: &[BigInt]) -> BigInt {
    xs.iter().map(|x| x.abs()).max().unwrap_or_default()
}
