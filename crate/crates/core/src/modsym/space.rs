use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{edge_rewrite, reduce_symbol, ModularSymbol, SymbolChain};
use crate::cone::{ConeSpace, CuspPoint, SpaceKind};
use crate::error::{Error, Result};
use crate::linalg::{rat, rref, QMatrix, QVector};
use crate::voronoi::{all_equivalences, reduce_point, Atlas};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    /// `Gamma_0(N)` inside `SL_2(Z)`; `sym:2` only.
    Gamma0(u64),
    /// The full group of the atlas.
    Full,
}

#[derive(Clone, Debug)]
enum Labeler {
    /// Edges labeled by the bottom row of `g` in `P^1(Z/N)` for `[g 0, g inf]`.
    Gamma0 {
        n: u64,
        units: Vec<u64>,
        index: HashMap<(u64, u64), usize>,
    },
    /// `(rep, vertex a, vertex b)` with `a < b` to `(generator, sign)`; `None`
    /// for orbits whose stabilizer reverses the orientation.
    Full {
        labels: HashMap<(usize, usize, usize), Option<(usize, i64)>>,
    },
}

/// Oriented Voronoi edges modulo the group, modulo boundaries of 2-faces.
#[derive(Clone, Debug)]
pub struct ReducedSymbolSpace {
    pub level: Level,
    labeler: Labeler,
    /// One edge symbol per raw generator.
    gen_symbols: Vec<ModularSymbol>,
    relations: Vec<QVector>,
    /// Nonzero rows of the reduced relation matrix and their pivots.
    echelon: Vec<(usize, QVector)>,
    basis: Vec<usize>,
}

impl ReducedSymbolSpace {
    pub fn num_generators(&self) -> usize {
        self.gen_symbols.len()
    }

    pub fn relations(&self) -> &[QVector] {
        &self.relations
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Edge symbol representing the `i`-th basis vector of the quotient.
    pub fn basis_symbol(&self, i: usize) -> &ModularSymbol {
        &self.gen_symbols[self.basis[i]]
    }

    pub fn generator_symbol(&self, g: usize) -> &ModularSymbol {
        &self.gen_symbols[g]
    }

    /// Generator and sign of a single edge symbol, `None` if its class is
    /// zero.
    pub fn label(&self, atlas: &Atlas, s: &ModularSymbol) -> Result<Option<(usize, i64)>> {
        if s.is_zero() {
            return Ok(None);
        }
        match &self.labeler {
            Labeler::Gamma0 { n, units, index } => {
                let (c, d) = bottom_row(s)?;
                let key = p1_normalize(*n, units, &c, &d);
                Ok(index.get(&key).map(|&g| (g, 1)))
            }
            Labeler::Full { labels } => {
                let sp = &atlas.space;
                let red = reduce_point(atlas, &s.u.embed().add(s.v.embed()))?;
                let f = &atlas.reps[red.rep];
                let a = f
                    .index_of(&sp.act_cusp(&red.gamma, &s.u)?)
                    .ok_or(Error::NotReduced)?;
                let b = f
                    .index_of(&sp.act_cusp(&red.gamma, &s.v)?)
                    .ok_or(Error::NotReduced)?;
                let key = (red.rep, a.min(b), a.max(b));
                let l = labels.get(&key).ok_or(Error::NotReduced)?;
                Ok(l.map(|(g, sign)| (g, if a < b { sign } else { -sign })))
            }
        }
    }

    /// Raw generator vector of a sum of edge symbols.
    pub fn raw_of_edges(&self, atlas: &Atlas, edges: &[ModularSymbol]) -> Result<QVector> {
        let mut raw = QVector::zeros(self.num_generators());
        for e in edges {
            if let Some((g, s)) = self.label(atlas, e)? {
                raw[g] += rat(s);
            }
        }
        Ok(raw)
    }

    /// Coordinates in the quotient basis of a raw generator vector.
    pub fn reduce_raw(&self, raw: &QVector) -> QVector {
        let mut x = raw.clone();
        for (p, row) in &self.echelon {
            if !x[*p].is_zero() {
                let c = x[*p].clone();
                x = x.add_scaled(&-c, row);
            }
        }
        QVector::new(self.basis.iter().map(|&j| x[j].clone()).collect())
    }

    pub fn class_of_edges(&self, atlas: &Atlas, edges: &[ModularSymbol]) -> Result<QVector> {
        Ok(self.reduce_raw(&self.raw_of_edges(atlas, edges)?))
    }

    /// Class of `[u, v]`: reduce, rewrite along edges, label.
    pub fn class_of_symbol(&self, atlas: &Atlas, s: &ModularSymbol) -> Result<QVector> {
        let mut edges = Vec::new();
        for t in reduce_symbol(atlas, &s.u, &s.v)? {
            edges.extend(edge_rewrite(atlas, &t)?);
        }
        self.class_of_edges(atlas, &edges)
    }

    /// Sum of the classes of the terms of a path.
    pub fn class_of_path(&self, atlas: &Atlas, path: &[ModularSymbol]) -> Result<QVector> {
        let mut acc = QVector::zeros(self.dim());
        for s in path {
            acc = acc.add(&self.class_of_symbol(atlas, s)?);
        }
        Ok(acc)
    }

    pub fn class_of_chain(&self, atlas: &Atlas, chain: &SymbolChain) -> Result<QVector> {
        let mut acc = QVector::zeros(self.dim());
        for (s, c) in chain.terms() {
            acc = acc.add_scaled(&rat(c), &self.class_of_symbol(atlas, s)?);
        }
        Ok(acc)
    }
}

fn to_u64(x: &BigInt, n: u64) -> u64 {
    x.mod_floor(&BigInt::from(n)).to_u64().expect("reduced")
}

/// `(c, d)` with `[u, v] = [g 0, g inf]` for `g = [[v_1, u_1], [v_2, u_2]]`
/// of determinant one, flipping the sign of `u` if needed.
fn bottom_row(s: &ModularSymbol) -> Result<(BigInt, BigInt)> {
    let (u, v) = (s.u.generator(), s.v.generator());
    if u.len() != 2 || v.len() != 2 {
        return Err(Error::UnsupportedRank);
    }
    let det = &v[0] * &u[1] - &u[0] * &v[1];
    if det.is_one() {
        Ok((v[1].clone(), u[1].clone()))
    } else if (-&det).is_one() {
        Ok((v[1].clone(), -&u[1]))
    } else {
        Err(Error::NotReduced)
    }
}

fn p1_normalize(n: u64, units: &[u64], c: &BigInt, d: &BigInt) -> (u64, u64) {
    if n == 1 {
        return (0, 0);
    }
    let (c, d) = (to_u64(c, n), to_u64(d, n));
    units
        .iter()
        .map(|&l| {
            (
                (l as u128 * c as u128 % n as u128) as u64,
                (l as u128 * d as u128 % n as u128) as u64,
            )
        })
        .min()
        .expect("1 is a unit")
}

/// `g` in `SL_2(Z)` with bottom row congruent to `(c, d)` modulo `n`.
fn lift_to_sl2(n: u64, c: u64, d: u64) -> [[BigInt; 2]; 2] {
    let big = |x: u64| BigInt::from(x);
    if n == 1 || (c == 0 && d == 1) {
        return [[big(1), big(0)], [big(0), big(1)]];
    }
    let c0 = if c == 0 { big(n) } else { big(c) };
    let mut d0 = big(d);
    while !c0.gcd(&d0).is_one() {
        d0 += n;
    }
    // a d - b c = 1
    let e = d0.extended_gcd(&c0);
    debug_assert!(e.gcd.is_one());
    [[e.x.clone(), -e.y.clone()], [c0, d0]]
}

fn gamma0_space(space: &ConeSpace, n: u64) -> Result<ReducedSymbolSpace> {
    if space.kind() != SpaceKind::Symmetric(2) {
        return Err(Error::InvalidParameter("Gamma_0(N) needs sym:2".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("level must be positive".into()));
    }
    let units: Vec<u64> = (1..n.max(2))
        .filter(|&l| l.gcd(&n) == 1 || n == 1)
        .collect();
    let mut elems: Vec<(u64, u64)> = (0..n)
        .flat_map(|c| (0..n).map(move |d| (c, d)))
        .filter(|&(c, d)| c.gcd(&d).gcd(&n) == 1)
        .map(|(c, d)| p1_normalize(n, &units, &BigInt::from(c), &BigInt::from(d)))
        .collect();
    if n == 1 {
        elems = vec![(0, 0)];
    }
    elems.sort();
    elems.dedup();
    let index: HashMap<(u64, u64), usize> =
        elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let gen_symbols: Vec<ModularSymbol> = elems
        .iter()
        .map(|&(c, d)| {
            let g = lift_to_sl2(n, c, d);
            let zero = space.cusp_from_generator(&[g[0][1].clone(), g[1][1].clone()])?;
            let inf = space.cusp_from_generator(&[g[0][0].clone(), g[1][0].clone()])?;
            Ok(ModularSymbol::new(zero, inf))
        })
        .collect::<Result<_>>()?;
    let labeler = Labeler::Gamma0 {
        n,
        units: units.clone(),
        index: index.clone(),
    };
    let k = elems.len();
    let lab = |s: &ModularSymbol| -> Result<usize> {
        let (c, d) = bottom_row(s)?;
        Ok(index[&p1_normalize(n, &units, &c, &d)])
    };
    let mut relations = Vec::new();
    for (i, s) in gen_symbols.iter().enumerate() {
        // [g 0, g inf] + [g inf, g 0]
        let mut row = QVector::zeros(k);
        row[i] += rat(1);
        row[lab(&s.reversed())?] += rat(1);
        relations.push(row);
        // boundary of the triangle g{0, inf, 1}
        let (gu, gv) = (s.u.generator(), s.v.generator());
        let sign = if (&gv[0] * &gu[1] - &gu[0] * &gv[1]).is_positive() {
            1
        } else {
            -1
        };
        let one = space.cusp_from_generator(&[&gv[0] + sign * &gu[0], &gv[1] + sign * &gu[1]])?;
        let mut row = QVector::zeros(k);
        for e in [
            ModularSymbol::new(s.u.clone(), s.v.clone()),
            ModularSymbol::new(s.v.clone(), one.clone()),
            ModularSymbol::new(one, s.u.clone()),
        ] {
            row[lab(&e)?] += rat(1);
        }
        relations.push(row);
    }
    Ok(finish(Level::Gamma0(n), labeler, gen_symbols, relations))
}

/// Union-find over rep edges with an orientation parity per link.
struct SignedUnion {
    parent: Vec<usize>,
    parity: Vec<bool>,
    dead: Vec<bool>,
}

impl SignedUnion {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            parity: vec![false; n],
            dead: vec![false; n],
        }
    }

    fn find(&mut self, x: usize) -> (usize, bool) {
        let p = self.parent[x];
        if p == x {
            return (x, false);
        }
        let (root, par) = self.find(p);
        self.parent[x] = root;
        self.parity[x] ^= par;
        (root, self.parity[x])
    }

    /// Records `label(a) = (-1)^flip label(b)`.
    fn union(&mut self, a: usize, b: usize, flip: bool) {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            if pa ^ pb != flip {
                self.dead[ra] = true;
            }
            return;
        }
        self.parent[ra] = rb;
        self.parity[ra] = pa ^ pb ^ flip;
        self.dead[rb] |= self.dead[ra];
    }
}

/// Vertices of a polygon in cyclic order along the given edges.
fn polygon_cycle(verts: &[usize], edges: &[(usize, usize)]) -> Result<Vec<usize>> {
    let inner: Vec<(usize, usize)> = edges
        .iter()
        .copied()
        .filter(|(a, b)| verts.contains(a) && verts.contains(b))
        .collect();
    let mut cycle = vec![*verts
        .iter()
        .min()
        .ok_or_else(|| Error::DegenerateInput("empty 2-face".into()))?];
    let mut prev = usize::MAX;
    loop {
        let cur = *cycle.last().expect("nonempty");
        let next = inner
            .iter()
            .filter_map(|&(a, b)| {
                if a == cur {
                    Some(b)
                } else if b == cur {
                    Some(a)
                } else {
                    None
                }
            })
            .filter(|&x| x != prev)
            .min()
            .ok_or_else(|| Error::DegenerateInput("2-face boundary is not a cycle".into()))?;
        if next == cycle[0] {
            break;
        }
        if cycle.len() > verts.len() {
            return Err(Error::DegenerateInput(
                "2-face boundary is not a cycle".into(),
            ));
        }
        prev = cur;
        cycle.push(next);
    }
    if cycle.len() != verts.len() {
        return Err(Error::DegenerateInput(
            "2-face boundary is not a single cycle".into(),
        ));
    }
    Ok(cycle)
}

fn full_space(atlas: &Atlas) -> Result<ReducedSymbolSpace> {
    let sp = &atlas.space;
    let mut node_of: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut nodes = Vec::new();
    for (i, f) in atlas.reps.iter().enumerate() {
        for &(a, b) in &f.comb.edges {
            node_of.insert((i, a.min(b), a.max(b)), nodes.len());
            nodes.push((i, a.min(b), a.max(b)));
        }
    }
    // node for `(rep, a, b)` plus whether the orientation flips
    let locate = |rep: usize, a: usize, b: usize| -> Result<(usize, bool)> {
        let n = node_of
            .get(&(rep, a.min(b), a.max(b)))
            .ok_or_else(|| Error::Verification("transported edge is not an edge".into()))?;
        Ok((*n, a > b))
    };
    let image = |g: &crate::cone::GroupElement, target: usize, c: &CuspPoint| -> Result<usize> {
        atlas.reps[target]
            .index_of(&sp.act_cusp(g, c)?)
            .ok_or_else(|| Error::Verification("transport misses the target facet".into()))
    };
    let mut uf = SignedUnion::new(nodes.len());
    for (i, f) in atlas.reps.iter().enumerate() {
        for g in all_equivalences(sp, f, f) {
            for &(a, b) in &f.comb.edges {
                let (n0, _) = locate(i, a, b)?;
                let (n1, flip) = locate(i, image(&g, i, &f.z[a])?, image(&g, i, &f.z[b])?)?;
                uf.union(n0, n1, flip ^ (a > b));
            }
        }
        for (r, mv) in atlas.moves[i].iter().enumerate() {
            let rv = &f.ridges[r].vertices;
            for &(a, b) in f
                .comb
                .edges
                .iter()
                .filter(|(a, b)| rv.contains(a) && rv.contains(b))
            {
                let (n0, _) = locate(i, a, b)?;
                let (n1, flip) = locate(
                    mv.target,
                    image(&mv.gamma, mv.target, &f.z[a])?,
                    image(&mv.gamma, mv.target, &f.z[b])?,
                )?;
                uf.union(n0, n1, flip ^ (a > b));
            }
        }
    }
    let mut gen_of_root: HashMap<usize, usize> = HashMap::new();
    let mut gen_symbols = Vec::new();
    let mut labels = HashMap::new();
    for (k, &(i, a, b)) in nodes.iter().enumerate() {
        let (root, par) = uf.find(k);
        let label = if uf.dead[root] {
            None
        } else {
            let g = *gen_of_root.entry(root).or_insert_with(|| {
                let (ri, ra, rb) = nodes[root];
                let f = &atlas.reps[ri];
                gen_symbols.push(ModularSymbol::new(f.z[ra].clone(), f.z[rb].clone()));
                gen_symbols.len() - 1
            });
            Some((g, if par { -1 } else { 1 }))
        };
        labels.insert((i, a, b), label);
    }
    let k = gen_symbols.len();
    let mut relations = Vec::new();
    for (i, f) in atlas.reps.iter().enumerate() {
        let faces: Vec<Vec<usize>> = match f.comb.dim {
            2 => vec![(0..f.z.len()).collect()],
            3 => f.ridges.iter().map(|r| r.vertices.clone()).collect(),
            _ => return Err(Error::UnsupportedRank),
        };
        for face in faces {
            let cyc = polygon_cycle(&face, &f.comb.edges)?;
            let mut row = QVector::zeros(k);
            for j in 0..cyc.len() {
                let (a, b) = (cyc[j], cyc[(j + 1) % cyc.len()]);
                if let Some((g, s)) = labels[&(i, a.min(b), a.max(b))] {
                    row[g] += rat(if a < b { s } else { -s });
                }
            }
            if !row.is_zero() {
                relations.push(row);
            }
        }
    }
    Ok(finish(
        Level::Full,
        Labeler::Full { labels },
        gen_symbols,
        relations,
    ))
}

fn finish(
    level: Level,
    labeler: Labeler,
    gen_symbols: Vec<ModularSymbol>,
    relations: Vec<QVector>,
) -> ReducedSymbolSpace {
    let k = gen_symbols.len();
    let (echelon, basis) = if relations.is_empty() {
        (Vec::new(), (0..k).collect())
    } else {
        let (m, pivots) = rref(&QMatrix::from_vectors(&relations));
        let echelon: Vec<(usize, QVector)> = pivots
            .iter()
            .enumerate()
            .map(|(r, &p)| (p, m.row(r)))
            .collect();
        let basis = (0..k).filter(|j| !pivots.contains(j)).collect();
        (echelon, basis)
    };
    ReducedSymbolSpace {
        level,
        labeler,
        gen_symbols,
        relations,
        echelon,
        basis,
    }
}

/// Assembles generators and relations for `level` over a classified
/// rank-one atlas.
pub fn build_relation_space(atlas: &Atlas, level: Level) -> Result<ReducedSymbolSpace> {
    if !atlas.space.is_rank_one() {
        return Err(Error::UnsupportedRank);
    }
    match level {
        Level::Gamma0(n) => gamma0_space(&atlas.space, n),
        Level::Full => full_space(atlas),
    }
}
