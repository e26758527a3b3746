use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::enumerate::short_vectors;
use super::{ConeSpace, KElem};
use crate::error::{Error, Result};
use crate::linalg::{integer_kernel, rat, rat_int, QMatrix, QVector, Rational};

/// A primitive rank-one point of `L`, i.e. a cusp.
///
/// `embed` is the primitive lattice point on the ray; `generator` is a
/// canonical vector `v` over the base ring whose `v v^dagger` lies on that
/// ray. Equality and ordering go through the generator, which is a function
/// of the ray alone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CuspPoint {
    generator: Vec<BigInt>,
    embed: QVector,
}

impl CuspPoint {
    pub fn generator(&self) -> &[BigInt] {
        &self.generator
    }

    pub fn embed(&self) -> &QVector {
        &self.embed
    }
}

impl fmt::Debug for CuspPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.generator.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", g.join(","))
    }
}

impl fmt::Display for CuspPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn gcd_all(xs: &[BigInt]) -> BigInt {
    xs.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

pub(super) fn canonical_cusp(space: &ConeSpace, w: &[BigInt]) -> Result<CuspPoint> {
    if w.len() != space.generator_len() {
        return Err(Error::DimensionMismatch {
            expected: space.generator_len(),
            got: w.len(),
        });
    }
    let g = gcd_all(w);
    if g.is_zero() {
        return Err(Error::InvalidParameter("zero vector has no cusp".into()));
    }
    let w: Vec<BigInt> = w.iter().map(|x| x / &g).collect();
    let raw = space.embed_raw(&w);
    let content = gcd_all(&raw.to_integers());
    let generator = if space.ring().is_rational() {
        // first nonzero entry positive
        let first_neg = w
            .iter()
            .find(|x| !x.is_zero())
            .is_some_and(|x| x.is_negative());
        if first_neg {
            w.iter().map(|x| -x).collect()
        } else {
            w
        }
    } else if content.is_one() {
        unit_orbit_max(space, &w)
    } else {
        shortest_on_line(space, &w)?
    };
    let raw = space.embed_raw(&generator);
    let c = gcd_all(&raw.to_integers());
    let embed = raw.scale(&rat_int(&c).recip());
    Ok(CuspPoint { generator, embed })
}

fn unit_orbit_max(space: &ConeSpace, w: &[BigInt]) -> Vec<BigInt> {
    let r = space.ring();
    let v = space.gen_to_kvec(w);
    r.units()
        .iter()
        .map(|u| {
            let uv: Vec<KElem> = v.iter().map(|x| r.mul(u, x)).collect();
            space.kvec_to_gen(&uv)
        })
        .max()
        .expect("unit group is nonempty")
}

/// For a ray whose coordinate ideal is not principal: among the integral
/// vectors of the line `K w`, those minimizing `N(v1) + N(v2)` (hence the
/// content of `v v^dagger`), lexicographically largest.
fn shortest_on_line(space: &ConeSpace, w: &[BigInt]) -> Result<Vec<BigInt>> {
    let r = space.ring();
    let v = space.gen_to_kvec(w);
    let wv: Vec<KElem> = v.iter().map(|x| r.mul_omega(x)).collect();
    let rows = vec![w.to_vec(), space.kvec_to_gen(&wv)];
    let perp = integer_kernel(&rows, w.len());
    let basis = integer_kernel(&perp, w.len());
    debug_assert_eq!(basis.len(), 2);
    let as_k = |c: &[BigInt]| space.gen_to_kvec(c);
    let q = |a: &[KElem], b: &[KElem]| -> Rational {
        a.iter()
            .zip(b)
            .map(|(x, y)| r.trace_form(x, y))
            .sum::<Rational>()
            / rat(2)
    };
    let kb: Vec<Vec<KElem>> = basis.iter().map(|b| as_k(b)).collect();
    let gram = QMatrix::from_rows(vec![
        vec![q(&kb[0], &kb[0]), q(&kb[0], &kb[1])],
        vec![q(&kb[1], &kb[0]), q(&kb[1], &kb[1])],
    ]);
    let bound = gram[(0, 0)].clone().min(gram[(1, 1)].clone());
    let cands = short_vectors(&gram, &bound, false)?;
    let min = cands
        .iter()
        .map(|(_, val)| val.clone())
        .min()
        .expect("basis vectors are candidates");
    let best = cands
        .into_iter()
        .filter(|(_, val)| *val == min)
        .map(|(coef, _)| {
            (0..w.len())
                .map(|j| &coef[0] * &basis[0][j] + &coef[1] * &basis[1][j])
                .collect::<Vec<BigInt>>()
        })
        .max()
        .expect("nonempty");
    Ok(best)
}
