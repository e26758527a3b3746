use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{ConeSpace, CuspPoint};
use crate::error::{Error, Result};
use crate::linalg::{floor_sqrt, rat, rat_int, QMatrix, QVector, Rational};

/// All nonzero integer vectors `x` with `x^T gram x <= bound`, together with
/// their values (Fincke–Pohst). With `half`, only one of `+-x` is returned
/// (the one whose last nonzero coordinate is positive).
pub fn short_vectors(
    gram: &QMatrix,
    bound: &Rational,
    half: bool,
) -> Result<Vec<(Vec<BigInt>, Rational)>> {
    let k = gram.rows();
    // q[i][i] = pivots, q[i][j] (j > i) = multipliers
    let mut q = gram.clone();
    for i in 0..k {
        if !q[(i, i)].is_positive() {
            return Err(Error::NotInCone);
        }
        for j in i + 1..k {
            let t = &q[(i, j)] / &q[(i, i)];
            q[(j, i)] = q[(i, j)].clone();
            q[(i, j)] = t;
        }
        for l in i + 1..k {
            for j in l..k {
                let t = &q[(l, i)] * &q[(i, j)];
                q[(l, j)] = &q[(l, j)] - t;
            }
        }
    }
    let mut out = Vec::new();
    let mut x = vec![BigInt::zero(); k];
    if k > 0 && !bound.is_negative() {
        descend(&q, k - 1, bound.clone(), half, true, &mut x, &mut out);
    }
    for (v, val) in out.iter_mut() {
        let qv = QVector::from_ints(v);
        *val = gram.bilinear(&qv, &qv);
    }
    Ok(out)
}

fn descend(
    q: &QMatrix,
    i: usize,
    remaining: Rational,
    half: bool,
    upper_zero: bool,
    x: &mut Vec<BigInt>,
    out: &mut Vec<(Vec<BigInt>, Rational)>,
) {
    let k = q.rows();
    let mut center = Rational::zero();
    for j in i + 1..k {
        center -= &q[(i, j)] * rat_int(&x[j]);
    }
    let s = &remaining / &q[(i, i)];
    let r = floor_sqrt(&s) + 1;
    let mut lo = (&center - rat_int(&r)).floor().to_integer();
    let hi = (&center + rat_int(&r)).ceil().to_integer();
    if half && upper_zero && lo.is_negative() {
        lo = BigInt::zero();
    }
    let mut xi = lo;
    while xi <= hi {
        let d = rat_int(&xi) - &center;
        let used = &q[(i, i)] * &d * &d;
        if used <= remaining {
            x[i] = xi.clone();
            let now_zero = upper_zero && xi.is_zero();
            if i == 0 {
                if !now_zero {
                    out.push((x.clone(), Rational::zero()));
                }
            } else {
                descend(q, i - 1, &remaining - &used, half, now_zero, x, out);
            }
        }
        xi += 1;
    }
    x[i] = BigInt::zero();
}

pub(super) fn cusps_below(space: &ConeSpace, y: &QVector, mu: &Rational) -> Result<Vec<CuspPoint>> {
    if y.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: y.len(),
        });
    }
    if !space.is_in_cone(y) {
        return Err(Error::NotInCone);
    }
    if !mu.is_positive() {
        return Ok(Vec::new());
    }
    let gram = space.generator_form(y);
    let bound = mu * rat(space.ring().minkowski_floor() as i64);
    let mut seen: BTreeMap<Vec<BigInt>, ()> = BTreeMap::new();
    let mut found = Vec::new();
    for (w, val) in short_vectors(&gram, &bound, true)? {
        let raw = space.embed_raw(&w);
        let ints = raw.to_integers();
        let c = ints
            .iter()
            .fold(BigInt::zero(), |acc, x| num_integer::Integer::gcd(&acc, x));
        if &(val / rat_int(&c)) > mu {
            continue;
        }
        let key: Vec<BigInt> = ints.iter().map(|x| x / &c).collect();
        if seen.insert(key, ()).is_none() {
            found.push(space.cusp_from_generator(&w)?);
        }
    }
    found.sort();
    Ok(found)
}
