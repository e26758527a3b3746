//! Exact face lattices of bounded polytopes given by a point set, via the
//! double-description method on the homogenized cone.

use std::collections::{BTreeSet, VecDeque};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{rat, rref, QMatrix, QVector, Rational};

/// Face data of `conv(points)`: the vertices (sorted lexicographically, so
/// index order is lexicographic order), its ridges (maximal proper faces) as
/// vertex-index sets, its edges, and for every ridge an affine functional
/// `x -> <normal, x> + offset` vanishing on the ridge and positive on every
/// other vertex.
#[derive(Clone, Debug)]
pub struct FacetCombinatorics {
    pub vertices: Vec<QVector>,
    pub ridges: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
    pub functionals: Vec<(QVector, Rational)>,
    /// Affine dimension of the polytope.
    pub dim: usize,
}

impl FacetCombinatorics {
    pub fn f_vector(&self) -> (usize, usize, usize) {
        (self.vertices.len(), self.edges.len(), self.ridges.len())
    }

    pub fn eval(&self, ridge: usize, x: &QVector) -> Rational {
        let (a, b) = &self.functionals[ridge];
        a.dot(x) + b
    }

    pub fn vertex_index(&self, x: &QVector) -> Option<usize> {
        self.vertices.binary_search(x).ok()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort();
        out
    }
}

fn normalize(v: QVector) -> QVector {
    QVector::from_ints(&v.primitive_integer())
}

/// Extreme rays of the pointed cone `{a : <r, a> >= 0 for all r in rows}`,
/// assuming the rows span the ambient space. Each ray is returned as a
/// primitive integer vector.
pub fn dual_extreme_rays(rows: &[QVector]) -> Result<Vec<QVector>> {
    let d = rows.first().map_or(0, QVector::len);
    let m = QMatrix::from_vectors(rows);
    let (_, piv) = rref(&m.transpose());
    if piv.len() < d {
        return Err(Error::RankDeficient {
            rank: piv.len(),
            needed: d,
        });
    }
    // initial simplicial cone on `d` independent rows (pivot columns of rows^T)
    let basis = QMatrix::from_vectors(&piv.iter().map(|&i| rows[i].clone()).collect::<Vec<_>>());
    let inv = basis.inverse().expect("independent rows");
    let mut rays: Vec<QVector> = (0..d).map(|j| normalize(inv.col(j))).collect();
    let mut added: Vec<usize> = piv.clone();
    for (i, row) in rows.iter().enumerate() {
        if piv.contains(&i) {
            continue;
        }
        let vals: Vec<Rational> = rays.iter().map(|r| row.dot(r)).collect();
        if vals.iter().all(|v| !v.is_negative()) {
            added.push(i);
            continue;
        }
        let tight = |r: &QVector| -> BTreeSet<usize> {
            added
                .iter()
                .copied()
                .filter(|&k| rows[k].dot(r).is_zero())
                .collect()
        };
        let zsets: Vec<BTreeSet<usize>> = rays.iter().map(tight).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        let mut next: Vec<QVector> = (0..rays.len())
            .filter(|&k| !vals[k].is_negative())
            .map(|k| rays[k].clone())
            .collect();
        for &p in &pos {
            for &n in &neg {
                let common: BTreeSet<usize> = zsets[p].intersection(&zsets[n]).copied().collect();
                if common.len() + 2 < d {
                    continue;
                }
                let adjacent =
                    (0..rays.len()).all(|k| k == p || k == n || !common.is_subset(&zsets[k]));
                if adjacent {
                    let r = rays[n].scale(&vals[p]).sub(&rays[p].scale(&vals[n]));
                    next.push(normalize(r));
                }
            }
        }
        rays = next;
        added.push(i);
    }
    rays.sort();
    rays.dedup();
    Ok(rays)
}

/// Facet normals of the cone generated by `gens` (which must span).
pub fn cone_facets(gens: &[QVector]) -> Result<Vec<QVector>> {
    dual_extreme_rays(gens)
}

pub fn face_enumeration(points: &[QVector]) -> Result<FacetCombinatorics> {
    let mut pts: Vec<QVector> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 2 {
        return Err(Error::DegenerateInput("all points coincide".into()));
    }
    let amb = pts[0].len();
    let diffs: Vec<QVector> = pts[1..].iter().map(|p| p.sub(&pts[0])).collect();
    let (_, cols) = rref(&QMatrix::from_vectors(&diffs));
    let k = cols.len();
    let lift = |p: &QVector| -> QVector {
        let mut v: Vec<Rational> = cols.iter().map(|&j| p[j].clone()).collect();
        v.push(rat(1));
        QVector::new(v)
    };
    let lifted: Vec<QVector> = pts.iter().map(lift).collect();
    let normals = cone_facets(&lifted)?;
    // true vertices: the facets through them cut out a single point
    let tight_at = |l: &QVector| -> Vec<QVector> {
        normals
            .iter()
            .filter(|a| a.dot(l).is_zero())
            .cloned()
            .collect()
    };
    let keep: Vec<usize> = (0..pts.len())
        .filter(|&i| QMatrix::from_vectors(&tight_at(&lifted[i])).rank() == k)
        .collect();
    let vertices: Vec<QVector> = keep.iter().map(|&i| pts[i].clone()).collect();
    let lv: Vec<QVector> = keep.iter().map(|&i| lifted[i].clone()).collect();
    let mut ridges = Vec::new();
    let mut functionals = Vec::new();
    for a in &normals {
        let on: Vec<usize> = (0..lv.len()).filter(|&i| a.dot(&lv[i]).is_zero()).collect();
        let mut lin = vec![Rational::zero(); amb];
        for (t, &j) in cols.iter().enumerate() {
            lin[j] = a[t].clone();
        }
        ridges.push(on);
        functionals.push((QVector::new(lin), a[k].clone()));
    }
    let mut edges = Vec::new();
    for a in 0..vertices.len() {
        for b in a + 1..vertices.len() {
            let mut common: BTreeSet<usize> = (0..vertices.len()).collect();
            for r in ridges.iter().filter(|r| r.contains(&a) && r.contains(&b)) {
                common.retain(|x| r.contains(x));
            }
            if common.len() == 2 {
                edges.push((a, b));
            }
        }
    }
    Ok(FacetCombinatorics {
        vertices,
        ridges,
        edges,
        functionals,
        dim: k,
    })
}

/// A shortest edge path from `a` to `b`; among shortest paths, each step goes
/// to the smallest admissible vertex.
pub fn edge_path(comb: &FacetCombinatorics, a: usize, b: usize) -> Vec<usize> {
    let n = comb.vertices.len();
    let adj: Vec<Vec<usize>> = (0..n).map(|v| comb.neighbors(v)).collect();
    let mut dist = vec![usize::MAX; n];
    dist[b] = 0;
    let mut queue = VecDeque::from([b]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    assert!(
        dist[a] != usize::MAX,
        "edge graph of a polytope is connected"
    );
    let mut path = vec![a];
    let mut cur = a;
    while cur != b {
        cur = *adj[cur]
            .iter()
            .find(|&&w| dist[w] + 1 == dist[cur])
            .expect("BFS predecessor");
        path.push(cur);
    }
    path
}
