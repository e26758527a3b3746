//! Perfect forms, the facets of the Voronoi polyhedron, neighbors across
//! ridges, classification modulo the arithmetic group, and point reduction.

mod atlas;
mod equiv;
mod reduce;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use atlas::{classify, Atlas, ClassifyOptions, Move};
pub use equiv::{all_equivalences, forms_equivalent, pair_invariants};
pub use reduce::{reduce_point, smallest_containing_face, Reduction};

use crate::cone::{ConeSpace, CuspPoint, KElem, SpaceKind};
use crate::error::{Error, Result};
use crate::linalg::{frac, kernel_basis, rat, solve_affine, QMatrix, QVector, Rational};
use crate::polyhedra::{face_enumeration, FacetCombinatorics};

/// A codimension-one face of a facet: indices into the parent's `z`, and the
/// primitive normal `v` with `<z, v> = 0` on the ridge and `> 0` elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ridge {
    pub vertices: Vec<usize>,
    pub normal: QVector,
}

/// A perfect form with minimum 1. `z[i]` is the cusp whose embedding is
/// `comb.vertices[i]`.
#[derive(Clone, Debug)]
pub struct PerfectForm {
    pub y: QVector,
    pub z: Vec<CuspPoint>,
    pub comb: FacetCombinatorics,
    pub ridges: Vec<Ridge>,
}

impl PerfectForm {
    /// Builds the facet for `y`, checking that `y` has minimum exactly 1 on
    /// the cusps and that the minimal vectors span `V`.
    pub fn from_form(space: &ConeSpace, y: &QVector) -> Result<Self> {
        if !space.is_in_cone(y) {
            return Err(Error::NotInCone);
        }
        let z = space.enumerate_cusps_below(y, &rat(1))?;
        if let Some(bad) = z.iter().find(|c| !space.pair(c.embed(), y).is_one()) {
            return Err(Error::PerfectionFailure(format!(
                "cusp {bad} has value below 1"
            )));
        }
        let embeds: Vec<QVector> = z.iter().map(|c| c.embed().clone()).collect();
        let rank = if embeds.is_empty() {
            0
        } else {
            QMatrix::from_vectors(&embeds).rank()
        };
        if rank < space.dim() {
            return Err(Error::PerfectionFailure(format!(
                "minimal vectors span only rank {rank}"
            )));
        }
        let comb = face_enumeration(&embeds)?;
        if comb.vertices.len() != z.len() {
            return Err(Error::PerfectionFailure(
                "a minimal vector is not a vertex".into(),
            ));
        }
        let z: Vec<CuspPoint> = comb
            .vertices
            .iter()
            .map(|e| {
                z.iter()
                    .find(|c| c.embed() == e)
                    .expect("vertex is a minimal vector")
                    .clone()
            })
            .collect();
        let ridges = comb
            .ridges
            .iter()
            .map(|verts| {
                let rows: Vec<QVector> = verts
                    .iter()
                    .map(|&i| space.gram().mul_vec(z[i].embed()))
                    .collect();
                let ker = kernel_basis(&QMatrix::from_vectors(&rows));
                debug_assert_eq!(ker.len(), 1);
                let mut v = QVector::from_ints(&ker[0].primitive_integer());
                let off = (0..z.len())
                    .find(|i| !verts.contains(i))
                    .expect("ridge is proper");
                if space.pair(z[off].embed(), &v).is_negative() {
                    v = v.neg();
                }
                Ridge {
                    vertices: verts.clone(),
                    normal: v,
                }
            })
            .collect();
        Ok(Self {
            y: y.clone(),
            z,
            comb,
            ridges,
        })
    }

    pub fn z_set(&self) -> BTreeSet<CuspPoint> {
        self.z.iter().cloned().collect()
    }

    pub fn ridge_cusps(&self, r: usize) -> BTreeSet<CuspPoint> {
        self.ridges[r]
            .vertices
            .iter()
            .map(|&i| self.z[i].clone())
            .collect()
    }

    pub fn index_of(&self, c: &CuspPoint) -> Option<usize> {
        self.z.iter().position(|z| z == c)
    }

    /// Sum of the minimal vectors: a point in the interior of the facet's cone.
    pub fn barycenter(&self) -> QVector {
        let d = self.y.len();
        self.z
            .iter()
            .fold(QVector::zeros(d), |acc, c| acc.add(c.embed()))
    }

    /// Recomputes the minimal vectors from `y` and compares.
    pub fn verify(&self, space: &ConeSpace) -> Result<()> {
        let fresh = Self::from_form(space, &self.y)?;
        if fresh.z != self.z || fresh.ridges != self.ridges {
            return Err(Error::PerfectionFailure(
                "stored data differs from recomputation".into(),
            ));
        }
        Ok(())
    }
}

/// `(1 - <x, y_F>) / <x, v>`.
pub fn rho(space: &ConeSpace, x: &CuspPoint, f: &PerfectForm, v: &QVector) -> Result<Rational> {
    let den = space.pair(x.embed(), v);
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok((rat(1) - space.pair(x.embed(), &f.y)) / den)
}

/// All cusps whose canonical generator has sup-norm at most `b`.
pub fn cusps_in_box(space: &ConeSpace, b: u64) -> Vec<CuspPoint> {
    let k = space.generator_len();
    let b = b as i64;
    let mut out = BTreeSet::new();
    let mut idx = vec![-b; k];
    loop {
        // canonical representatives only need a nonnegative leading entry
        let lead = idx.iter().rev().find(|&&x| x != 0);
        if lead.is_some_and(|&x| x > 0) {
            let w: Vec<BigInt> = idx.iter().map(|&x| BigInt::from(x)).collect();
            if let Ok(c) = space.cusp_from_generator(&w) {
                out.insert(c);
            }
        }
        let mut i = 0;
        loop {
            if i == k {
                return out.into_iter().collect();
            }
            idx[i] += 1;
            if idx[i] <= b {
                break;
            }
            idx[i] = -b;
            i += 1;
        }
    }
}

/// Members of `S = {x : <x, v> < 0}` among the cusps of the box of size `b`.
pub fn sample_s(space: &ConeSpace, f: &PerfectForm, ridge: usize, b: u64) -> Vec<CuspPoint> {
    let v = &f.ridges[ridge].normal;
    cusps_in_box(space, b)
        .into_iter()
        .filter(|x| space.pair(x.embed(), v).is_negative())
        .collect()
}

#[derive(Clone, Debug)]
pub struct NeighborStep {
    pub form: PerfectForm,
    pub rho_bar: Rational,
    /// Index of the shared ridge among the neighbor's ridges.
    pub back_ridge: usize,
}

fn rho_at(space: &ConeSpace, x: &CuspPoint, y: &QVector, v: &QVector) -> Result<Rational> {
    let den = space.pair(x.embed(), v);
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok((rat(1) - space.pair(x.embed(), y)) / den)
}

/// For `y` with minimum 1 attained on `ze` and a direction `v` vanishing on
/// `ze`: the least `rho` over `S = {x : <x, v> < 0}` and the cusps attaining
/// it.
///
/// Seeds for `S` come from small generator boxes (sup-norm 1 and 2) and,
/// failing those, from a nonpositive vector of `y + t v` for `t` doubling up
/// to `2^max_doublings`.
fn min_rho(
    space: &ConeSpace,
    y: &QVector,
    v: &QVector,
    ze: &BTreeSet<CuspPoint>,
    max_doublings: u64,
) -> Result<(Rational, BTreeSet<CuspPoint>)> {
    let in_s = |x: &CuspPoint| !ze.contains(x) && space.pair(x.embed(), v).is_negative();
    let boxed = [1, 2].into_iter().find_map(|b| {
        cusps_in_box(space, b)
            .iter()
            .filter(|x| in_s(x))
            .map(|x| rho_at(space, x, y, v).expect("nonzero on S"))
            .min()
    });
    let mut hi = match boxed {
        Some(r) => r,
        None => {
            let mut t = rat(1);
            let mut found = None;
            for _ in 0..=max_doublings {
                if let Some(w) = space.nonpositive_vector(&y.add_scaled(&t, v)) {
                    found = Some(rho_at(space, &space.cusp_from_kvector(&w)?, y, v)?);
                    break;
                }
                t *= rat(2);
            }
            found.ok_or(Error::SeedSearchExhausted {
                bound: max_doublings,
            })?
        }
    };
    // Every x in S with rho(x) <= r has <x, y + r v> <= 1, so the first probe
    // radius that sees any member of S already yields the minimum. A probe
    // outside the cone instead yields a member of S with rho below the probe.
    // Probing at midpoints keeps the enumerated form away from the boundary.
    let mut lo = Rational::zero();
    for k in 0..256 {
        let r = if k >= 32 && space.is_in_cone(&y.add_scaled(&hi, v)) {
            hi.clone()
        } else {
            (&lo + &hi) / rat(2)
        };
        let yr = y.add_scaled(&r, v);
        if let Some(w) = space.nonpositive_vector(&yr) {
            let x = space.cusp_from_kvector(&w)?;
            hi = hi.min(rho_at(space, &x, y, v)?);
            continue;
        }
        let probe = space.enumerate_cusps_below(&yr, &rat(1))?;
        let mut scored: Vec<(Rational, CuspPoint)> = probe
            .into_iter()
            .filter(|x| in_s(x))
            .map(|x| (rho_at(space, &x, y, v).expect("nonzero"), x))
            .collect();
        if !scored.is_empty() {
            scored.sort();
            let best = scored[0].0.clone();
            let hits = scored
                .into_iter()
                .filter(|(r, _)| *r == best)
                .map(|(_, x)| x)
                .collect();
            return Ok((best, hits));
        }
        lo = r;
    }
    Err(Error::PerfectionFailure(
        "upper bound for rho is not attained".into(),
    ))
}

/// The neighboring facet across `f.ridges[ridge]`.
pub fn neighbor_across_ridge(
    space: &ConeSpace,
    f: &PerfectForm,
    ridge: usize,
    max_doublings: u64,
) -> Result<NeighborStep> {
    let v = &f.ridges[ridge].normal;
    let ze = f.ridge_cusps(ridge);
    let (rho_bar, mut zg) = min_rho(space, &f.y, v, &ze, max_doublings)?;
    zg.extend(ze.iter().cloned());
    let y_g = f.y.add_scaled(&rho_bar, v);
    let embeds: Vec<QVector> = zg.iter().map(|c| c.embed().clone()).collect();
    if solve_affine(&embeds, space.gram())? != y_g {
        return Err(Error::PerfectionFailure(
            "affine solve disagrees with y_F + rho v".into(),
        ));
    }
    let form = PerfectForm::from_form(space, &y_g)?;
    if form.z_set() != zg {
        return Err(Error::PerfectionFailure(
            "minimal vectors of the neighbor differ from the prediction".into(),
        ));
    }
    let back_ridge = (0..form.ridges.len())
        .find(|&r| form.ridge_cusps(r) == ze)
        .ok_or_else(|| Error::PerfectionFailure("shared ridge not found in neighbor".into()))?;
    Ok(NeighborStep {
        form,
        rho_bar,
        back_ridge,
    })
}

/// A first perfect form. For symmetric spaces this is the root form of type
/// `A_n`. Otherwise start from the identity scaled to minimum 1 and, while
/// the minimal vectors do not span, move along a direction orthogonal to them
/// until new minimal vectors appear; each move raises the rank.
pub fn initial_perfect_form(space: &ConeSpace, max_doublings: u64) -> Result<PerfectForm> {
    if let SpaceKind::Symmetric(n) = space.kind() {
        let mut m = vec![vec![KElem::zero(); n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = KElem::one();
            if i + 1 < n {
                row[i + 1] = KElem::from_rational(frac(-1, 2));
            }
        }
        return PerfectForm::from_form(space, &space.from_matrix(&m));
    }
    let mut y = space.identity_form();
    let first = space.enumerate_cusps_below(&y, &rat(space.n() as i64))?;
    let min = first
        .iter()
        .map(|c| space.pair(c.embed(), &y))
        .min()
        .expect("unit vectors have value 1");
    y = y.scale(&min.recip());
    loop {
        let z: BTreeSet<CuspPoint> = space
            .enumerate_cusps_below(&y, &rat(1))?
            .into_iter()
            .collect();
        let rows: Vec<QVector> = z.iter().map(|c| space.gram().mul_vec(c.embed())).collect();
        let ker = kernel_basis(&QMatrix::from_vectors(&rows));
        let Some(dir) = ker.into_iter().next() else {
            return PerfectForm::from_form(space, &y);
        };
        let mut v = QVector::from_ints(&dir.primitive_integer());
        if space.nonpositive_vector(&v).is_none() {
            v = v.neg();
        }
        let (r, _) = min_rho(space, &y, &v, &z, max_doublings)?;
        y = y.add_scaled(&r, &v);
    }
}
