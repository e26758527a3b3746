use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ModularSymbol;
use crate::cone::CuspPoint;
use crate::error::{Error, Result};
use crate::linalg::{rat, QVector, Rational};
use crate::polyhedra::edge_path;
use crate::voronoi::{reduce_point, smallest_containing_face, Atlas};

/// Bisection rounds before giving up.
const MAX_ROUNDS: usize = 80;

#[derive(Clone, Debug)]
pub struct PartitionPoint {
    /// Position on the segment `(1 - t) u + t v`.
    pub t: Rational,
    pub rep: usize,
    /// Vertices of the smallest Voronoi cone containing the point.
    pub face: Vec<CuspPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    /// Smallest canonical generator.
    Lex,
    /// Uniform choice from a seeded generator.
    Random(u64),
}

fn locate(atlas: &Atlas, u: &CuspPoint, v: &CuspPoint, t: &Rational) -> Result<PartitionPoint> {
    let x = u.embed().scale(&(rat(1) - t)).add(&v.embed().scale(t));
    let red = reduce_point(atlas, &x)?;
    let face = smallest_containing_face(atlas, &x, &red)?;
    Ok(PartitionPoint {
        t: t.clone(),
        rep: red.rep,
        face,
    })
}

fn meets(a: &[CuspPoint], b: &[CuspPoint]) -> bool {
    a.iter().any(|c| b.contains(c))
}

/// Points on the segment between `u` and `v` such that `u` lies in the
/// first face, `v` in the last, and consecutive faces share a vertex.
pub fn sufficiently_fine_partition(
    atlas: &Atlas,
    u: &CuspPoint,
    v: &CuspPoint,
) -> Result<Vec<PartitionPoint>> {
    if !atlas.space.is_rank_one() {
        return Err(Error::UnsupportedRank);
    }
    if u == v {
        return Err(Error::DegenerateInput("partition of a zero symbol".into()));
    }
    let mut pts = vec![locate(atlas, u, v, &Rational::new(1.into(), 2.into()))?];
    for _ in 0..MAX_ROUNDS {
        let mut new_t = Vec::new();
        if !pts[0].face.contains(u) {
            new_t.push(&pts[0].t / rat(2));
        }
        let last = pts.last().expect("nonempty");
        if !last.face.contains(v) {
            new_t.push((&last.t + rat(1)) / rat(2));
        }
        for w in pts.windows(2) {
            if !meets(&w[0].face, &w[1].face) {
                new_t.push((&w[0].t + &w[1].t) / rat(2));
            }
        }
        if new_t.is_empty() {
            pts.dedup_by(|b, a| a.face == b.face);
            return Ok(pts);
        }
        for t in new_t {
            pts.push(locate(atlas, u, v, &t)?);
        }
        pts.sort_by(|a, b| a.t.cmp(&b.t));
    }
    Err(Error::ResourceGuard(format!(
        "partition not fine after {MAX_ROUNDS} bisection rounds"
    )))
}

/// Largest number of halvings behind any partition point.
pub fn partition_depth(pts: &[PartitionPoint]) -> u64 {
    pts.iter()
        .map(|p| p.t.denom().bits().saturating_sub(1))
        .max()
        .unwrap_or(0)
}

pub fn reduce_symbol(atlas: &Atlas, u: &CuspPoint, v: &CuspPoint) -> Result<Vec<ModularSymbol>> {
    reduce_symbol_with(atlas, u, v, TieBreak::Lex)
}

/// `[u, v] = [u, q_1] + [q_1, q_2] + ... + [q_{r-1}, v]` with `q_i` taken from
/// consecutive faces of a sufficiently fine partition.
pub fn reduce_symbol_with(
    atlas: &Atlas,
    u: &CuspPoint,
    v: &CuspPoint,
    tie: TieBreak,
) -> Result<Vec<ModularSymbol>> {
    if u == v {
        return Ok(Vec::new());
    }
    let pts = sufficiently_fine_partition(atlas, u, v)?;
    let mut rng = match tie {
        TieBreak::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        TieBreak::Lex => None,
    };
    let mut qs = vec![u.clone()];
    for w in pts.windows(2) {
        let mut common: Vec<CuspPoint> = w[0]
            .face
            .iter()
            .filter(|c| w[1].face.contains(c))
            .cloned()
            .collect();
        common.sort();
        let pick = match rng.as_mut() {
            Some(r) => common.choose(r).expect("faces meet").clone(),
            None => common[0].clone(),
        };
        qs.push(pick);
    }
    qs.push(v.clone());
    Ok(qs
        .windows(2)
        .filter(|w| w[0] != w[1])
        .map(|w| ModularSymbol::new(w[0].clone(), w[1].clone()))
        .collect())
}

fn midpoint(s: &ModularSymbol) -> QVector {
    s.u.embed().add(s.v.embed())
}

pub fn is_voronoi_reduced(atlas: &Atlas, s: &ModularSymbol) -> Result<bool> {
    if s.is_zero() {
        return Err(Error::DegenerateInput("zero symbol".into()));
    }
    let red = reduce_point(atlas, &midpoint(s))?;
    let f = &atlas.reps[red.rep];
    let sp = &atlas.space;
    Ok(f.index_of(&sp.act_cusp(&red.gamma, &s.u)?).is_some()
        && f.index_of(&sp.act_cusp(&red.gamma, &s.v)?).is_some())
}

/// Rewrites a reduced symbol as a path along edges of its facet.
pub fn edge_rewrite(atlas: &Atlas, s: &ModularSymbol) -> Result<Vec<ModularSymbol>> {
    if s.is_zero() {
        return Ok(Vec::new());
    }
    let sp = &atlas.space;
    let red = reduce_point(atlas, &midpoint(s))?;
    let f = &atlas.reps[red.rep];
    let a = f
        .index_of(&sp.act_cusp(&red.gamma, &s.u)?)
        .ok_or(Error::NotReduced)?;
    let b = f
        .index_of(&sp.act_cusp(&red.gamma, &s.v)?)
        .ok_or(Error::NotReduced)?;
    let ginv = red.gamma.inverse(sp);
    let path: Vec<CuspPoint> = edge_path(&f.comb, a, b)
        .into_iter()
        .map(|i| {
            if i == a {
                Ok(s.u.clone())
            } else if i == b {
                Ok(s.v.clone())
            } else {
                sp.act_cusp(&ginv, &f.z[i])
            }
        })
        .collect::<Result<_>>()?;
    Ok(path
        .windows(2)
        .map(|w| ModularSymbol::new(w[0].clone(), w[1].clone()))
        .collect())
}
