use std::fmt;

use super::{BaseRing, ConeSpace, KElem};
use crate::error::{Error, Result};
use crate::linalg::{QMatrix, QVector};

pub type KMatrix = Vec<Vec<KElem>>;

pub fn kmat_identity(n: usize) -> KMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| KElem::from_int((i == j) as i64)).collect())
        .collect()
}

pub fn kmat_mul(r: &BaseRing, a: &KMatrix, b: &KMatrix) -> KMatrix {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, |row| row.len()));
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(KElem::zero(), |acc, l| acc.add(&r.mul(&a[i][l], &b[l][j]))))
                .collect()
        })
        .collect()
}

pub fn kmat_conj_transpose(r: &BaseRing, a: &KMatrix) -> KMatrix {
    let n = a.len();
    let m = a.first().map_or(0, |row| row.len());
    (0..m)
        .map(|j| (0..n).map(|i| r.conj(&a[i][j])).collect())
        .collect()
}

/// Determinant by Gaussian elimination over `K`.
pub fn kmat_det(r: &BaseRing, a: &KMatrix) -> KElem {
    let n = a.len();
    let mut m = a.clone();
    let mut det = KElem::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return KElem::zero();
        };
        if p != c {
            m.swap(p, c);
            det = det.neg();
        }
        det = r.mul(&det, &m[c][c]);
        let inv = r.inv(&m[c][c]).expect("nonzero pivot");
        for i in c + 1..n {
            let f = r.mul(&m[i][c], &inv);
            for j in c..n {
                let t = r.mul(&f, &m[c][j]);
                m[i][j] = m[i][j].sub(&t);
            }
        }
    }
    det
}

pub fn kmat_inverse(r: &BaseRing, a: &KMatrix) -> Option<KMatrix> {
    let n = a.len();
    let mut m: KMatrix = a
        .iter()
        .zip(kmat_identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(p, c);
        let inv = r.inv(&m[c][c])?;
        for j in 0..2 * n {
            m[c][j] = r.mul(&m[c][j], &inv);
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..2 * n {
                    let t = r.mul(&f, &m[c][j]);
                    m[i][j] = m[i][j].sub(&t);
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// An element of `GL_n(O)` together with its induced maps on `V`:
/// `induced` is `A -> g A g^dagger`, `adjoint` is `Y -> g^dagger Y g`.
#[derive(Clone)]
pub struct GroupElement {
    mat: KMatrix,
    induced: QMatrix,
    adjoint: QMatrix,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.mat)
    }
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.mat == other.mat
    }
}

impl Eq for GroupElement {}

fn conjugation_map(space: &ConeSpace, left: &KMatrix, right: &KMatrix) -> QMatrix {
    let r = space.ring();
    let d = space.dim();
    let cols: Vec<QVector> = (0..d)
        .map(|k| {
            let x = space.to_matrix(&QVector::unit(d, k));
            space.from_matrix(&kmat_mul(r, &kmat_mul(r, left, &x), right))
        })
        .collect();
    QMatrix::from_vectors(&cols).transpose()
}

impl GroupElement {
    pub fn new(space: &ConeSpace, mat: KMatrix) -> Result<Self> {
        let n = space.n();
        if mat.len() != n || mat.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: mat.len(),
            });
        }
        let r = space.ring();
        if mat.iter().flatten().any(|x| !x.is_integral()) || !r.is_unit(&kmat_det(r, &mat)) {
            return Err(Error::NonUnimodular);
        }
        let dag = kmat_conj_transpose(r, &mat);
        let induced = conjugation_map(space, &mat, &dag);
        let adjoint = conjugation_map(space, &dag, &mat);
        Ok(Self {
            mat,
            induced,
            adjoint,
        })
    }

    pub fn identity(space: &ConeSpace) -> Self {
        Self::new(space, kmat_identity(space.n())).expect("identity is unimodular")
    }

    pub fn mat(&self) -> &KMatrix {
        &self.mat
    }

    pub fn induced(&self) -> &QMatrix {
        &self.induced
    }

    pub fn adjoint(&self) -> &QMatrix {
        &self.adjoint
    }

    pub fn det(&self, space: &ConeSpace) -> KElem {
        kmat_det(space.ring(), &self.mat)
    }

    pub fn is_identity(&self) -> bool {
        self.mat == kmat_identity(self.mat.len())
    }

    pub fn inverse(&self, space: &ConeSpace) -> Self {
        let inv = kmat_inverse(space.ring(), &self.mat).expect("unimodular");
        Self::new(space, inv).expect("inverse of unimodular is unimodular")
    }

    /// `self * other`, acting as "first `other`, then `self`".
    pub fn compose(&self, space: &ConeSpace, other: &Self) -> Self {
        let m = kmat_mul(space.ring(), &self.mat, &other.mat);
        Self::new(space, m).expect("product of unimodular is unimodular")
    }

    pub fn neg(&self, space: &ConeSpace) -> Self {
        let m = self
            .mat
            .iter()
            .map(|row| row.iter().map(KElem::neg).collect())
            .collect();
        Self::new(space, m).expect("negation keeps unimodularity")
    }
}
