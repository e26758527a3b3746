use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::{ModularSymbol, ReducedSymbolSpace};
use crate::cone::{kmat_det, kmat_identity, ConeSpace, KElem, KMatrix};
use crate::error::{Error, Result};
use crate::linalg::{hnf_int, rat, rat_int, QMatrix, QVector, Rational};
use crate::voronoi::Atlas;

/// A finite list of coset matrices; `T[u, v] = sum [a u, a v]`.
#[derive(Clone, Debug)]
pub struct HeckeOperator {
    pub matrices: Vec<KMatrix>,
}

impl HeckeOperator {
    pub fn identity() -> Self {
        Self {
            matrices: vec![kmat_identity(2)],
        }
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }
}

fn mat(a: KElem, b: KElem, c: KElem, d: KElem) -> KMatrix {
    vec![vec![a, b], vec![c, d]]
}

/// `[[p, 0], [0, 1]]` and `[[1, j], [0, p]]` for `0 <= j < p`.
pub fn gamma0_hecke_operator(p: u64) -> HeckeOperator {
    let p = p as i64;
    let k = KElem::from_int;
    let mut matrices = vec![mat(k(p), k(0), k(0), k(1))];
    matrices.extend((0..p).map(|j| mat(k(1), k(j), k(0), k(p))));
    HeckeOperator { matrices }
}

/// The analogous list for a principal prime `(pi)` of the base ring:
/// `[[pi, 0], [0, 1]]` and `[[1, r], [0, pi]]` for `r` running over `O/(pi)`.
pub fn principal_hecke_operator(space: &ConeSpace, pi: &KElem) -> Result<HeckeOperator> {
    let ring = space.ring();
    if pi.is_zero() || !pi.is_integral() {
        return Err(Error::BadCoset(
            "generator must be a nonzero integer of the base ring".into(),
        ));
    }
    let residues: Vec<KElem> = if ring.is_rational() {
        let n = pi.a.abs().to_integer();
        num_iter(&n)
            .map(|x| KElem::from_ints(&x, &BigInt::zero()))
            .collect()
    } else {
        // residues modulo the lattice spanned by pi and pi * omega
        let rows = vec![pi.to_ints().to_vec(), ring.mul_omega(pi).to_ints().to_vec()];
        let (h, _) = hnf_int(&rows);
        let (ha, hb) = (h[0][0].clone(), h[1][1].clone());
        num_iter(&ha)
            .flat_map(|x| num_iter(&hb).map(move |y| KElem::from_ints(&x, &y)))
            .collect()
    };
    let one = KElem::one();
    let mut matrices = vec![mat(pi.clone(), KElem::zero(), KElem::zero(), one.clone())];
    matrices.extend(
        residues
            .into_iter()
            .map(|r| mat(one.clone(), r, KElem::zero(), pi.clone())),
    );
    Ok(HeckeOperator { matrices })
}

fn num_iter(n: &BigInt) -> impl Iterator<Item = BigInt> {
    let n = n.clone();
    std::iter::successors(Some(BigInt::zero()), |x| Some(x + 1)).take_while(move |x| x < &n)
}

/// Matrix of `t` on the quotient, column `j` the image of basis vector `j`.
pub fn hecke_matrix(
    space: &ReducedSymbolSpace,
    atlas: &Atlas,
    t: &HeckeOperator,
) -> Result<QMatrix> {
    let sp = &atlas.space;
    for a in &t.matrices {
        if a.len() != 2 || a.iter().any(|r| r.len() != 2) {
            return Err(Error::BadCoset("coset matrices must be 2 x 2".into()));
        }
        if (0..2).any(|j| a[0][j].is_zero() && a[1][j].is_zero())
            || kmat_det(sp.ring(), a).is_zero()
        {
            return Err(Error::BadCoset("singular coset matrix".into()));
        }
    }
    let n = space.dim();
    let cols: Vec<QVector> = (0..n)
        .into_par_iter()
        .map(|j| {
            let s = space.basis_symbol(j);
            let mut acc = QVector::zeros(n);
            for a in &t.matrices {
                let img = ModularSymbol::new(sp.act_cusp_by(a, &s.u)?, sp.act_cusp_by(a, &s.v)?);
                acc = acc.add(&space.class_of_symbol(atlas, &img)?);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(QMatrix::from_vectors(&cols).transpose())
}

/// Characteristic polynomial `det(x I - m)`, coefficients from the constant
/// term up; monic.
pub fn charpoly(m: &QMatrix) -> Vec<Rational> {
    // Faddeev-LeVerrier
    let n = m.rows();
    let mut c = vec![Rational::zero(); n + 1];
    c[n] = rat(1);
    let mut mk = QMatrix::zeros(n, n);
    for k in 1..=n {
        let mut next = m.mul(&mk);
        for i in 0..n {
            next[(i, i)] += &c[n + 1 - k];
        }
        mk = next;
        let am = m.mul(&mk);
        let tr: Rational = (0..n).map(|i| am[(i, i)].clone()).sum();
        c[n - k] = -tr / rat(k as i64);
    }
    c
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            out.push(&n / &d);
        }
        d += 1;
    }
    out.sort();
    out.dedup();
    out
}

fn eval(poly: &[Rational], x: &Rational) -> Rational {
    poly.iter()
        .rev()
        .fold(Rational::zero(), |acc, c| acc * x + c)
}

/// Divides by `(x - r)`; assumes `r` is a root.
fn deflate(poly: &[Rational], r: &Rational) -> Vec<Rational> {
    let n = poly.len() - 1;
    let mut q = vec![Rational::zero(); n];
    let mut carry = Rational::zero();
    for i in (0..n).rev() {
        carry = &poly[i + 1] + &carry * r;
        q[i] = carry.clone();
    }
    q
}

/// Rational roots with multiplicity, ascending.
pub fn rational_roots(poly: &[Rational]) -> Vec<(Rational, usize)> {
    let mut p: Vec<Rational> = poly.to_vec();
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    let mut out: Vec<(Rational, usize)> = Vec::new();
    let push =
        |r: Rational, out: &mut Vec<(Rational, usize)>| match out.iter_mut().find(|(x, _)| *x == r)
        {
            Some(e) => e.1 += 1,
            None => out.push((r, 1)),
        };
    while p.len() > 1 && p[0].is_zero() {
        p.remove(0);
        push(Rational::zero(), &mut out);
    }
    if p.len() > 1 {
        let den = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = p.iter().map(|c| (c * rat_int(&den)).to_integer()).collect();
        let mut cands = Vec::new();
        for a in divisors(&ints[0]) {
            for b in divisors(ints.last().expect("nonconstant")) {
                let q = Rational::new(a.clone(), b);
                cands.push(-q.clone());
                cands.push(q);
            }
        }
        cands.sort();
        cands.dedup();
        for r in cands {
            while p.len() > 1 && eval(&p, &r).is_zero() {
                p = deflate(&p, &r);
                push(r.clone(), &mut out);
            }
        }
    }
    out.sort();
    out
}
