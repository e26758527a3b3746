//! Concrete self-adjoint cones: real symmetric `n x n` matrices over `Z`, and
//! `2 x 2` Hermitian matrices over the ring of integers of `Q(sqrt(-m))`.

mod cusp;
mod enumerate;
pub mod field;
mod group;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

pub use cusp::CuspPoint;
pub use enumerate::short_vectors;
pub use field::{BaseRing, KElem};
pub use group::{kmat_det, kmat_identity, kmat_inverse, kmat_mul, GroupElement, KMatrix};

use crate::error::{Error, Result};
use crate::linalg::{rat, QMatrix, QVector, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    Symmetric(usize),
    Hermitian(u64),
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceKind::Symmetric(n) => write!(f, "sym:{n}"),
            SpaceKind::Hermitian(m) => write!(f, "herm:{m}"),
        }
    }
}

impl FromStr for SpaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (tag, num) = s.split_once(':').ok_or_else(|| {
            Error::Parse(format!(
                "space descriptor {s:?} is not of the form kind:number"
            ))
        })?;
        let num: u64 = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad number in space descriptor {s:?}")))?;
        match tag.trim() {
            "sym" => Ok(SpaceKind::Symmetric(num as usize)),
            "herm" => Ok(SpaceKind::Hermitian(num)),
            other => Err(Error::Parse(format!("unknown space kind {other:?}"))),
        }
    }
}

/// The vector space `V` of self-adjoint matrices with its trace pairing and
/// the lattice `L` of integral matrices, which is `Z^dim` in our coordinates.
///
/// Coordinates: for `sym:n` the upper triangle in row-major order; for
/// `herm:m` the tuple `(a, s, t, c)` standing for `[[a, b], [conj(b), c]]`
/// with `b = s + t*omega`.
#[derive(Clone, Debug)]
pub struct ConeSpace {
    kind: SpaceKind,
    ring: BaseRing,
    n: usize,
    slots: Vec<(usize, usize)>,
    gram: QMatrix,
}

pub fn make_space(kind: SpaceKind) -> Result<ConeSpace> {
    ConeSpace::new(kind)
}

impl ConeSpace {
    pub fn new(kind: SpaceKind) -> Result<Self> {
        match kind {
            SpaceKind::Symmetric(n) => {
                if n < 2 {
                    return Err(Error::InvalidParameter(format!("sym:{n} needs n >= 2")));
                }
                let mut slots = Vec::new();
                for i in 0..n {
                    for j in i..n {
                        slots.push((i, j));
                    }
                }
                let diag: Vec<Rational> = slots
                    .iter()
                    .map(|&(i, j)| rat(if i == j { 1 } else { 2 }))
                    .collect();
                Ok(Self {
                    kind,
                    ring: BaseRing::rationals(),
                    n,
                    slots,
                    gram: QMatrix::diagonal(&diag),
                })
            }
            SpaceKind::Hermitian(m) => {
                let ring = BaseRing::imaginary_quadratic(m)?;
                let (t, nm) = (ring.trace, ring.norm);
                let gram = QMatrix::from_i64(&[
                    &[1, 0, 0, 0],
                    &[0, 2, t, 0],
                    &[0, t, 2 * nm, 0],
                    &[0, 0, 0, 1],
                ]);
                Ok(Self {
                    kind,
                    ring,
                    n: 2,
                    slots: vec![(0, 0), (0, 1), (0, 1), (1, 1)],
                    gram,
                })
            }
        }
    }

    pub fn parse(descriptor: &str) -> Result<Self> {
        Self::new(descriptor.parse()?)
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn descriptor(&self) -> String {
        self.kind.to_string()
    }

    pub fn ring(&self) -> &BaseRing {
        &self.ring
    }

    /// Size of the matrices.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.slots.len()
    }

    /// Number of integer coordinates of a cusp generator.
    pub fn generator_len(&self) -> usize {
        self.n * self.ring.degree()
    }

    pub fn gram(&self) -> &QMatrix {
        &self.gram
    }

    /// The Q-rank of the group: 1 for `sym:2` and every Hermitian space.
    pub fn is_rank_one(&self) -> bool {
        self.n == 2
    }

    fn check_dim(&self, x: &QVector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn inner(&self, x: &QVector, y: &QVector) -> Result<Rational> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(self.pair(x, y))
    }

    /// `inner` without the dimension check.
    pub fn pair(&self, x: &QVector, y: &QVector) -> Rational {
        self.gram.bilinear(x, y)
    }

    pub fn to_matrix(&self, x: &QVector) -> KMatrix {
        let mut m = vec![vec![KElem::zero(); self.n]; self.n];
        match self.kind {
            SpaceKind::Symmetric(_) => {
                for (k, &(i, j)) in self.slots.iter().enumerate() {
                    m[i][j] = KElem::from_rational(x[k].clone());
                    m[j][i] = m[i][j].clone();
                }
            }
            SpaceKind::Hermitian(_) => {
                let b = KElem::new(x[1].clone(), x[2].clone());
                m[0][0] = KElem::from_rational(x[0].clone());
                m[1][1] = KElem::from_rational(x[3].clone());
                m[1][0] = self.ring.conj(&b);
                m[0][1] = b;
            }
        }
        m
    }

    /// Coordinates of a self-adjoint matrix (only the upper triangle is read).
    pub fn from_matrix(&self, m: &KMatrix) -> QVector {
        match self.kind {
            SpaceKind::Symmetric(_) => {
                QVector::new(self.slots.iter().map(|&(i, j)| m[i][j].a.clone()).collect())
            }
            SpaceKind::Hermitian(_) => QVector::new(vec![
                m[0][0].a.clone(),
                m[0][1].a.clone(),
                m[0][1].b.clone(),
                m[1][1].a.clone(),
            ]),
        }
    }

    /// Positive definiteness, by symmetric Gaussian elimination: every pivot
    /// of a Hermitian matrix is rational, and all must be positive.
    pub fn is_in_cone(&self, y: &QVector) -> bool {
        if y.len() != self.dim() {
            return false;
        }
        let mut m = self.to_matrix(y);
        let r = &self.ring;
        for k in 0..self.n {
            let d = m[k][k].a.clone();
            if !d.is_positive() {
                return false;
            }
            for i in k + 1..self.n {
                let f = m[i][k].scale(&d.recip());
                for j in k + 1..self.n {
                    let t = r.mul(&f, &m[k][j]);
                    m[i][j] = m[i][j].sub(&t);
                }
            }
        }
        true
    }

    /// For a Hermitian `y` that is not positive definite, a nonzero vector
    /// `w` over `K` with `w^dagger Y w <= 0`.
    pub fn nonpositive_vector(&self, y: &QVector) -> Option<Vec<KElem>> {
        let mut m = self.to_matrix(y);
        let r = &self.ring;
        let n = self.n;
        let mut l = vec![vec![KElem::zero(); n]; n];
        for k in 0..n {
            let d = m[k][k].a.clone();
            if !d.is_positive() {
                // solve L^dagger x = e_k on the leading block
                let mut x = vec![KElem::zero(); n];
                x[k] = KElem::one();
                for i in (0..k).rev() {
                    let mut s = KElem::zero();
                    for (j, xj) in x.iter().enumerate().take(k + 1).skip(i + 1) {
                        s = s.add(&r.mul(&r.conj(&l[j][i]), xj));
                    }
                    x[i] = s.neg();
                }
                return Some(x);
            }
            for i in k + 1..n {
                l[i][k] = m[i][k].scale(&d.recip());
                for j in k + 1..n {
                    let t = r.mul(&l[i][k], &m[k][j]);
                    m[i][j] = m[i][j].sub(&t);
                }
            }
        }
        None
    }

    pub fn identity_form(&self) -> QVector {
        let id = kmat_identity(self.n);
        self.from_matrix(&id)
    }

    pub fn gen_to_kvec(&self, w: &[BigInt]) -> Vec<KElem> {
        match self.ring.degree() {
            1 => w
                .iter()
                .map(|x| KElem::from_ints(x, &BigInt::zero()))
                .collect(),
            _ => w
                .chunks(2)
                .map(|c| KElem::from_ints(&c[0], &c[1]))
                .collect(),
        }
    }

    /// Integer coordinates of an integral vector over the base ring.
    pub fn kvec_to_gen(&self, v: &[KElem]) -> Vec<BigInt> {
        match self.ring.degree() {
            1 => v.iter().map(|x| x.a.to_integer()).collect(),
            _ => v.iter().flat_map(|x| x.to_ints()).collect(),
        }
    }

    /// `v v^dagger` for a vector over `K`.
    pub fn rank_one(&self, v: &[KElem]) -> QVector {
        let r = &self.ring;
        let m: KMatrix = v
            .iter()
            .map(|vi| v.iter().map(|vj| r.mul(vi, &r.conj(vj))).collect())
            .collect();
        self.from_matrix(&m)
    }

    pub fn embed_raw(&self, w: &[BigInt]) -> QVector {
        self.rank_one(&self.gen_to_kvec(w))
    }

    /// Gram matrix of the integral form `w -> <w w^dagger, y>` on generator
    /// coordinates, obtained by polarization.
    pub fn generator_form(&self, y: &QVector) -> QMatrix {
        let k = self.generator_len();
        let q = |w: &[BigInt]| self.pair(&self.embed_raw(w), y);
        let e =
            |i: usize| -> Vec<BigInt> { (0..k).map(|j| BigInt::from((i == j) as i64)).collect() };
        let diag: Vec<Rational> = (0..k).map(|i| q(&e(i))).collect();
        let mut g = QMatrix::zeros(k, k);
        for i in 0..k {
            g[(i, i)] = diag[i].clone();
            for j in i + 1..k {
                let s: Vec<BigInt> = (0..k)
                    .map(|l| BigInt::from(((l == i) || (l == j)) as i64))
                    .collect();
                let b = (q(&s) - &diag[i] - &diag[j]) / rat(2);
                g[(i, j)] = b.clone();
                g[(j, i)] = b;
            }
        }
        g
    }

    /// Cusps `z` with `0 < <z, y> <= mu`, sorted.
    pub fn enumerate_cusps_below(&self, y: &QVector, mu: &Rational) -> Result<Vec<CuspPoint>> {
        enumerate::cusps_below(self, y, mu)
    }

    /// Builds a group element from a matrix over the base ring.
    pub fn group_element(&self, mat: KMatrix) -> Result<GroupElement> {
        GroupElement::new(self, mat)
    }

    pub fn group_element_i64(&self, rows: &[&[i64]]) -> Result<GroupElement> {
        let mat = rows
            .iter()
            .map(|r| r.iter().map(|&x| KElem::from_int(x)).collect())
            .collect();
        GroupElement::new(self, mat)
    }

    pub fn act(&self, g: &GroupElement, x: &QVector) -> Result<QVector> {
        self.check_dim(x)?;
        Ok(g.induced().mul_vec(x))
    }

    pub fn act_form(&self, g: &GroupElement, y: &QVector) -> Result<QVector> {
        self.check_dim(y)?;
        Ok(g.adjoint().mul_vec(y))
    }

    /// Image of a cusp under any invertible matrix over `K` (Hecke matrices
    /// included), renormalized.
    pub fn act_cusp_by(&self, mat: &KMatrix, c: &CuspPoint) -> Result<CuspPoint> {
        let v = self.gen_to_kvec(c.generator());
        let img: Vec<KElem> = mat
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&v)
                    .fold(KElem::zero(), |acc, (a, b)| acc.add(&self.ring.mul(a, b)))
            })
            .collect();
        self.cusp_from_kvector(&img)
    }

    pub fn act_cusp(&self, g: &GroupElement, c: &CuspPoint) -> Result<CuspPoint> {
        self.act_cusp_by(g.mat(), c)
    }

    /// Cusp on the ray through `v v^dagger` for a nonzero vector over `K`.
    pub fn cusp_from_kvector(&self, v: &[KElem]) -> Result<CuspPoint> {
        let den = v.iter().fold(BigInt::from(1), |acc, x| {
            use num_integer::Integer;
            acc.lcm(x.a.denom()).lcm(x.b.denom())
        });
        let scaled: Vec<KElem> = v
            .iter()
            .map(|x| x.scale(&Rational::from_integer(den.clone())))
            .collect();
        self.cusp_from_generator(&self.kvec_to_gen(&scaled))
    }

    pub fn cusp_from_generator(&self, w: &[BigInt]) -> Result<CuspPoint> {
        cusp::canonical_cusp(self, w)
    }

    pub fn cusp_i64(&self, w: &[i64]) -> Result<CuspPoint> {
        let w: Vec<BigInt> = w.iter().map(|&x| BigInt::from(x)).collect();
        self.cusp_from_generator(&w)
    }
}

#[cfg(test)]
mod tests;
