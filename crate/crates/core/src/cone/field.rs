//! The base field `K` (either `Q` or an imaginary quadratic field) and its
//! maximal order, with elements written as `a + b*omega` over the integral
//! basis `{1, omega}`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{rat, rat_int, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BaseRing {
    /// `None` for `Q`; `Some(m)` for `Q(sqrt(-m))`.
    pub m: Option<u64>,
    /// Trace and norm of `omega`; `omega^2 = trace*omega - norm`.
    pub trace: i64,
    pub norm: i64,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KElem {
    pub a: Rational,
    pub b: Rational,
}

impl fmt::Debug for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}+{}w", self.a, self.b)
        }
    }
}

impl KElem {
    pub fn new(a: Rational, b: Rational) -> Self {
        Self { a, b }
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(rat(n), Rational::zero())
    }

    pub fn from_rational(q: Rational) -> Self {
        Self::new(q, Rational::zero())
    }

    pub fn from_ints(a: &BigInt, b: &BigInt) -> Self {
        Self::new(rat_int(a), rat_int(b))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.a, -&self.b)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.a + &o.a, &self.b + &o.b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.a - &o.a, &self.b - &o.b)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::new(&self.a * q, &self.b * q)
    }

    /// Integer coordinates; panics when not integral.
    pub fn to_ints(&self) -> [BigInt; 2] {
        assert!(self.is_integral(), "element {self:?} is not integral");
        [self.a.to_integer(), self.b.to_integer()]
    }
}

impl BaseRing {
    pub fn rationals() -> Self {
        Self {
            m: None,
            trace: 0,
            norm: 0,
        }
    }

    /// Maximal order of `Q(sqrt(-m))`: `omega = sqrt(-m)` when `m = 1, 2 (mod 4)`,
    /// `omega = (1 + sqrt(-m))/2` when `m = 3 (mod 4)`.
    pub fn imaginary_quadratic(m: u64) -> Result<Self> {
        if m == 0 || !is_squarefree(m) {
            return Err(Error::InvalidParameter(format!(
                "m = {m} is not a positive squarefree integer"
            )));
        }
        let (trace, norm) = if m % 4 == 3 {
            (1, (1 + m as i64) / 4)
        } else {
            (0, m as i64)
        };
        Ok(Self {
            m: Some(m),
            trace,
            norm,
        })
    }

    pub fn is_rational(&self) -> bool {
        self.m.is_none()
    }

    /// Rank of the maximal order over `Z`.
    pub fn degree(&self) -> usize {
        if self.is_rational() {
            1
        } else {
            2
        }
    }

    /// Absolute value of the field discriminant.
    pub fn discriminant(&self) -> u64 {
        match self.m {
            None => 1,
            Some(m) if m % 4 == 3 => m,
            Some(m) => 4 * m,
        }
    }

    pub fn mul(&self, x: &KElem, y: &KElem) -> KElem {
        // (a + b w)(c + d w) = ac + (ad + bc) w + bd w^2, w^2 = t w - n
        let bd = &x.b * &y.b;
        let a = &x.a * &y.a - &bd * rat(self.norm);
        let b = &x.a * &y.b + &x.b * &y.a + &bd * rat(self.trace);
        KElem::new(a, b)
    }

    pub fn conj(&self, x: &KElem) -> KElem {
        if self.is_rational() {
            return x.clone();
        }
        // conj(w) = t - w
        KElem::new(&x.a + &x.b * rat(self.trace), -&x.b)
    }

    pub fn norm(&self, x: &KElem) -> Rational {
        if self.is_rational() {
            return &x.a * &x.a;
        }
        &x.a * &x.a + &x.a * &x.b * rat(self.trace) + &x.b * &x.b * rat(self.norm)
    }

    /// Real part of `x * conj(y)`, times two (the polarized norm form).
    pub fn trace_form(&self, x: &KElem, y: &KElem) -> Rational {
        let p = self.mul(x, &self.conj(y));
        // trace(a + b w) = 2a + b t
        &p.a * rat(2) + &p.b * rat(self.trace)
    }

    pub fn inv(&self, x: &KElem) -> Option<KElem> {
        if x.is_zero() {
            return None;
        }
        let n = self.norm(x);
        Some(self.conj(x).scale(&n.recip()))
    }

    pub fn div(&self, x: &KElem, y: &KElem) -> Option<KElem> {
        self.inv(y).map(|iy| self.mul(x, &iy))
    }

    /// Units of the maximal order.
    pub fn units(&self) -> Vec<KElem> {
        let mut us = vec![KElem::from_int(1), KElem::from_int(-1)];
        match self.m {
            Some(1) => {
                let i = KElem::new(Rational::zero(), rat(1));
                us.push(i.clone());
                us.push(i.neg());
            }
            Some(3) => {
                // omega = (1 + sqrt(-3))/2 is a primitive sixth root of unity
                let w = KElem::new(Rational::zero(), rat(1));
                let w2 = self.mul(&w, &w);
                us.extend([w.clone(), w.neg(), w2.clone(), w2.neg()]);
            }
            _ => {}
        }
        us
    }

    pub fn is_unit(&self, x: &KElem) -> bool {
        x.is_integral() && self.norm(x).is_one()
    }

    /// A square root in `K`, if one exists.
    pub fn sqrt(&self, x: &KElem) -> Option<KElem> {
        if x.is_zero() {
            return Some(KElem::zero());
        }
        let Some(m) = self.m else {
            return rational_sqrt(&x.a).map(KElem::from_rational);
        };
        // Rewrite x = p + q sqrt(-m) and solve (u + v sqrt(-m))^2 = x.
        let half_t = Rational::new(BigInt::from(self.trace), BigInt::from(2));
        let p = &x.a + &x.b * &half_t;
        let q = if self.trace == 1 {
            &x.b / rat(2)
        } else {
            x.b.clone()
        };
        let mr = rat(m as i64);
        let (u, v) = if q.is_zero() {
            if let Some(u) = rational_sqrt(&p) {
                (u, Rational::zero())
            } else {
                (Rational::zero(), rational_sqrt(&(-&p / &mr))?)
            }
        } else {
            // v^2 = (-p + sqrt(p^2 + m q^2)) / (2m)
            let s = rational_sqrt(&(&p * &p + &mr * &q * &q))?;
            let v2 = (-&p + s) / (rat(2) * &mr);
            let v = rational_sqrt(&v2)?;
            if v.is_zero() {
                return None;
            }
            (&q / (rat(2) * &v), v)
        };
        // back to the {1, omega} basis: sqrt(-m) = 2 omega - t
        let root = if self.trace == 1 {
            KElem::new(u - &v, rat(2) * v)
        } else {
            KElem::new(u, v)
        };
        debug_assert_eq!(&self.mul(&root, &root), x);
        Some(root)
    }

    /// `omega * x` expressed in coordinates.
    pub fn mul_omega(&self, x: &KElem) -> KElem {
        self.mul(&KElem::new(Rational::zero(), rat(1)), x)
    }

    /// Largest `k` with `k <= (2/pi) sqrt(|d|)`, rounded up conservatively.
    /// Every ideal class contains an integral ideal of norm at most this.
    pub fn minkowski_floor(&self) -> u64 {
        if self.is_rational() {
            return 1;
        }
        let d = self.discriminant() as u128;
        // pi^2 > 9.8696, so k^2 * 9.8696 <= 4|d| is implied by the true bound.
        let mut k: u128 = 1;
        while 98_696 * (k + 1) * (k + 1) <= 40_000 * d {
            k += 1;
        }
        k as u64
    }
}

pub fn is_squarefree(m: u64) -> bool {
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

impl Default for KElem {
    fn default() -> Self {
        Self::zero()
    }
}

impl KElem {
    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }
}
