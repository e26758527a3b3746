use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::ModularSymbol;
use crate::cone::{ConeSpace, CuspPoint};
use crate::error::Result;
use crate::linalg::Rational;

/// Simple continued fraction `[a_0; a_1, ..., a_k]` of a positive rational.
pub fn cf_expand(q: &Rational) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut x = q.clone();
    loop {
        let a = x.floor();
        out.push(a.to_integer());
        let frac = &x - &a;
        if frac.is_zero() {
            return out;
        }
        x = frac.recip();
    }
}

/// The cusp `p/q` in `sym:2`, generator `(p, q)`; `(1, 0)` is infinity.
pub fn cusp_of_rational(space: &ConeSpace, q: &Rational) -> Result<CuspPoint> {
    space.cusp_from_generator(&[q.numer().clone(), q.denom().clone()])
}

/// `[0, q]` as the sum of unimodular symbols through the convergents:
/// `[0, inf] + [inf, p_0/q_0] + [p_0/q_0, p_1/q_1] + ...`, with cancelling
/// pairs removed.
pub fn manin_reduce(space: &ConeSpace, q: &Rational) -> Result<Vec<ModularSymbol>> {
    let zero = space.cusp_i64(&[0, 1])?;
    let target = cusp_of_rational(space, q)?;
    if q.numer().abs().is_one() || q.is_zero() {
        return Ok(if q.is_zero() {
            vec![]
        } else {
            vec![ModularSymbol::new(zero, target)]
        });
    }
    let mut pts = vec![zero, space.cusp_i64(&[1, 0])?];
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
    for a in cf_expand(q) {
        let p2 = &a * &p0 + &p1;
        let q2 = &a * &q0 + &q1;
        pts.push(space.cusp_from_generator(&[p2.clone(), q2.clone()])?);
        (p1, q1, p0, q0) = (p0, q0, p2, q2);
    }
    // drop backtracks such as [0, inf] + [inf, 0]
    let mut path: Vec<CuspPoint> = Vec::new();
    for c in pts {
        if path.len() >= 2 && path[path.len() - 2] == c {
            path.pop();
        } else if path.last() != Some(&c) {
            path.push(c);
        }
    }
    Ok(path
        .windows(2)
        .map(|w| ModularSymbol::new(w[0].clone(), w[1].clone()))
        .collect())
}
