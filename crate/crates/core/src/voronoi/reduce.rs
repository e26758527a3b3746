use num_traits::Zero;

use super::Atlas;
use crate::cone::{CuspPoint, GroupElement};
use crate::error::{Error, Result};
use crate::linalg::{QVector, Rational};

/// Outcome of the reduction walk: `gamma . x` lies in the cone over
/// `reps[rep]`.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub rep: usize,
    pub gamma: GroupElement,
    /// `gamma . x`.
    pub point: QVector,
    /// Values `<x, y>` along the walk, strictly decreasing.
    pub mus: Vec<Rational>,
    /// Values of the transported point on the neighbors of the final facet;
    /// all are `>=` the last entry of `mus`.
    pub certificate: Vec<Rational>,
}

impl Reduction {
    pub fn mu(&self) -> &Rational {
        self.mus.last().expect("walk has a start")
    }

    pub fn certificate_holds(&self) -> bool {
        self.certificate.iter().all(|c| c >= self.mu()) && self.mus.windows(2).all(|w| w[1] < w[0])
    }
}

pub fn reduce_point(atlas: &Atlas, x: &QVector) -> Result<Reduction> {
    let s = &atlas.space;
    if x.len() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            got: x.len(),
        });
    }
    if !s.is_in_cone(x) {
        return Err(Error::NotInCone);
    }
    let mut cur = 0;
    let mut gamma = GroupElement::identity(s);
    let mut point = x.clone();
    let mut mus = vec![s.pair(&point, &atlas.reps[0].y)];
    loop {
        let vals: Vec<Rational> = atlas.moves[cur]
            .iter()
            .map(|m| s.pair(&point, &m.neighbor_y))
            .collect();
        let mu = mus.last().expect("nonempty").clone();
        let best = vals
            .iter()
            .enumerate()
            .filter(|(_, v)| **v < mu)
            .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0)));
        let Some((r, val)) = best else {
            return Ok(Reduction {
                rep: cur,
                gamma,
                point,
                mus,
                certificate: vals,
            });
        };
        let mv = &atlas.moves[cur][r];
        point = s.act(&mv.gamma, &point)?;
        gamma = mv.gamma.compose(s, &gamma);
        debug_assert_eq!(&s.pair(&point, &atlas.reps[mv.target].y), val);
        mus.push(val.clone());
        cur = mv.target;
    }
}

/// The vertices of the smallest face of the facet cone containing
/// `gamma . x`, carried back by `gamma^-1`. The point may lie on the
/// boundary of the cone (e.g. a cusp).
pub fn smallest_containing_face(
    atlas: &Atlas,
    x: &QVector,
    red: &Reduction,
) -> Result<Vec<CuspPoint>> {
    let s = &atlas.space;
    let f = &atlas.reps[red.rep];
    let xp = s.act(&red.gamma, x)?;
    let mut keep = vec![true; f.z.len()];
    for ridge in &f.ridges {
        let v = s.pair(&xp, &ridge.normal);
        if v.is_zero() {
            for (i, k) in keep.iter_mut().enumerate() {
                if !ridge.vertices.contains(&i) {
                    *k = false;
                }
            }
        } else if v < Rational::zero() {
            return Err(Error::Verification(
                "point is outside the facet cone".into(),
            ));
        }
    }
    let ginv = red.gamma.inverse(s);
    let mut out: Vec<CuspPoint> =
        f.z.iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(c, _)| s.act_cusp(&ginv, c))
            .collect::<Result<_>>()?;
    out.sort();
    Ok(out)
}
