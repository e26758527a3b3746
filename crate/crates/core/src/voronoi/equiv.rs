use std::collections::BTreeSet;

use num_bigint::BigInt;

use super::PerfectForm;
use crate::cone::{kmat_inverse, kmat_mul, ConeSpace, CuspPoint, GroupElement, KElem, KMatrix};
use crate::linalg::{QMatrix, QVector, Rational};

/// `Tr(z_i Y z_j Y)` for all pairs of minimal vectors; unchanged under the
/// group, since `z -> g z g^dagger` and `Y -> g^-dagger Y g^-1` together.
pub fn pair_invariants(space: &ConeSpace, f: &PerfectForm) -> Vec<Vec<Rational>> {
    let r = space.ring();
    let ym = space.to_matrix(&f.y);
    let zy: Vec<KMatrix> =
        f.z.iter()
            .map(|c| kmat_mul(r, &space.to_matrix(c.embed()), &ym))
            .collect();
    zy.iter()
        .map(|a| {
            zy.iter()
                .map(|b| {
                    let p = kmat_mul(r, a, b);
                    (0..p.len()).map(|i| p[i][i].a.clone()).sum()
                })
                .collect()
        })
        .collect()
}

fn signature(inv: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut rows: Vec<Vec<Rational>> = inv
        .iter()
        .map(|row| {
            let mut r = row.clone();
            r.sort();
            r
        })
        .collect();
    rows.sort();
    rows
}

fn maps_onto(
    space: &ConeSpace,
    g: &GroupElement,
    from: &PerfectForm,
    to: &BTreeSet<CuspPoint>,
) -> bool {
    from.z
        .iter()
        .all(|c| space.act_cusp(g, c).is_ok_and(|img| to.contains(&img)))
}

/// Some `gamma` with `gamma . Z_g = Z_f` (hence `y_g = gamma^* y_f`).
pub fn forms_equivalent(
    space: &ConeSpace,
    f: &PerfectForm,
    g: &PerfectForm,
) -> Option<GroupElement> {
    search(space, f, g, true).into_iter().next()
}

/// Every `gamma` with `gamma . Z_g = Z_f`, one per induced map on `V`.
pub fn all_equivalences(space: &ConeSpace, f: &PerfectForm, g: &PerfectForm) -> Vec<GroupElement> {
    search(space, f, g, false)
}

fn search(space: &ConeSpace, f: &PerfectForm, g: &PerfectForm, first: bool) -> Vec<GroupElement> {
    if f.z.len() != g.z.len() {
        return Vec::new();
    }
    let inv_f = pair_invariants(space, f);
    let inv_g = pair_invariants(space, g);
    if signature(&inv_f) != signature(&inv_g) {
        return Vec::new();
    }
    if space.n() == 2 {
        projective(space, f, g, &inv_f, &inv_g, first)
    } else {
        backtrack(space, f, g, first)
    }
}

fn push_unique(out: &mut Vec<GroupElement>, gamma: GroupElement) {
    if !out.iter().any(|h| h.induced() == gamma.induced()) {
        out.push(gamma);
    }
}

/// Rank-one spaces: a projective map of `P^1(K)` is fixed by three points.
fn projective(
    space: &ConeSpace,
    f: &PerfectForm,
    g: &PerfectForm,
    inv_f: &[Vec<Rational>],
    inv_g: &[Vec<Rational>],
    first: bool,
) -> Vec<GroupElement> {
    let r = space.ring();
    let zf = f.z_set();
    let kv = |c: &CuspPoint| space.gen_to_kvec(c.generator());
    let p: Vec<Vec<KElem>> = g.z[..3].iter().map(kv).collect();
    // coordinates of the third point in the basis of the first two
    let coords = |a: &[KElem], b: &[KElem], c: &[KElem]| -> Option<(KElem, KElem)> {
        let d = r.mul(&a[0], &b[1]).sub(&r.mul(&a[1], &b[0]));
        let al = r.div(&r.mul(&c[0], &b[1]).sub(&r.mul(&c[1], &b[0])), &d)?;
        let be = r.div(&r.mul(&a[0], &c[1]).sub(&r.mul(&a[1], &c[0])), &d)?;
        if al.is_zero() || be.is_zero() {
            return None;
        }
        Some((al, be))
    };
    let Some((alp, bep)) = coords(&p[0], &p[1], &p[2]) else {
        return Vec::new();
    };
    let pm: KMatrix = vec![
        vec![p[0][0].clone(), p[1][0].clone()],
        vec![p[0][1].clone(), p[1][1].clone()],
    ];
    let pinv = kmat_inverse(r, &pm).expect("distinct cusps are independent");
    let units = r.units();
    let mut out = Vec::new();
    let nz = f.z.len();
    for i in 0..nz {
        if inv_f[i][i] != inv_g[0][0] {
            continue;
        }
        for j in (0..nz).filter(|&j| j != i) {
            if inv_f[i][j] != inv_g[0][1] || inv_f[j][j] != inv_g[1][1] {
                continue;
            }
            for k in (0..nz).filter(|&k| k != i && k != j) {
                if inv_f[i][k] != inv_g[0][2] || inv_f[j][k] != inv_g[1][2] {
                    continue;
                }
                let q: Vec<Vec<KElem>> = [i, j, k].iter().map(|&t| kv(&f.z[t])).collect();
                let Some((al, be)) = coords(&q[0], &q[1], &q[2]) else {
                    continue;
                };
                let s1 = r.div(&al, &alp).expect("nonzero");
                let s2 = r.div(&be, &bep).expect("nonzero");
                let qd: KMatrix = vec![
                    vec![r.mul(&q[0][0], &s1), r.mul(&q[1][0], &s2)],
                    vec![r.mul(&q[0][1], &s1), r.mul(&q[1][1], &s2)],
                ];
                let m0 = kmat_mul(r, &qd, &pinv);
                let d0 = crate::cone::kmat_det(r, &m0);
                for u in &units {
                    let Some(lam) = r.div(u, &d0).and_then(|t| r.sqrt(&t)) else {
                        continue;
                    };
                    let mat: KMatrix = m0
                        .iter()
                        .map(|row| row.iter().map(|x| r.mul(&lam, x)).collect())
                        .collect();
                    let Ok(gamma) = space.group_element(mat) else {
                        continue;
                    };
                    if maps_onto(space, &gamma, g, &zf) {
                        push_unique(&mut out, gamma);
                        if first {
                            return out;
                        }
                    }
                }
            }
        }
    }
    out
}

/// `sym:n`: map a basis of generators of `Z_g` to signed generators of `Z_f`
/// compatibly with the bilinear forms, then solve for the matrix.
fn backtrack(
    space: &ConeSpace,
    f: &PerfectForm,
    g: &PerfectForm,
    first: bool,
) -> Vec<GroupElement> {
    let n = space.n();
    let gens = |pf: &PerfectForm| -> Vec<QVector> {
        pf.z.iter()
            .map(|c| QVector::from_ints(c.generator()))
            .collect()
    };
    let (vf, vg) = (gens(f), gens(g));
    let mat = |pf: &PerfectForm| -> QMatrix {
        let m = space.to_matrix(&pf.y);
        QMatrix::from_rows(
            m.iter()
                .map(|row| row.iter().map(|x| x.a.clone()).collect())
                .collect(),
        )
    };
    let (yf, yg) = (mat(f), mat(g));
    let bf: Vec<Vec<Rational>> = vf
        .iter()
        .map(|a| vf.iter().map(|b| yf.bilinear(a, b)).collect())
        .collect();
    let bg: Vec<Vec<Rational>> = vg
        .iter()
        .map(|a| vg.iter().map(|b| yg.bilinear(a, b)).collect())
        .collect();
    // greedy basis of the source generators
    let mut basis: Vec<usize> = Vec::new();
    for i in 0..vg.len() {
        let mut trial: Vec<QVector> = basis.iter().map(|&b| vg[b].clone()).collect();
        trial.push(vg[i].clone());
        if QMatrix::from_vectors(&trial).rank() == trial.len() {
            basis.push(i);
            if basis.len() == n {
                break;
            }
        }
    }
    let src = QMatrix::from_vectors(&basis.iter().map(|&b| vg[b].clone()).collect::<Vec<_>>())
        .transpose();
    let src_inv = src.inverse().expect("basis");
    let zf = f.z_set();
    let mut out = Vec::new();
    let mut assign: Vec<(usize, i64)> = Vec::new();
    let ctx = Ctx {
        space,
        g,
        vf: &vf,
        bf: &bf,
        bg: &bg,
        basis: &basis,
        src_inv: &src_inv,
        zf: &zf,
        first,
    };
    ctx.go(&mut assign, &mut out);
    out
}

struct Ctx<'a> {
    space: &'a ConeSpace,
    g: &'a PerfectForm,
    vf: &'a [QVector],
    bf: &'a [Vec<Rational>],
    bg: &'a [Vec<Rational>],
    basis: &'a [usize],
    src_inv: &'a QMatrix,
    zf: &'a BTreeSet<CuspPoint>,
    first: bool,
}

impl Ctx<'_> {
    fn go(&self, assign: &mut Vec<(usize, i64)>, out: &mut Vec<GroupElement>) -> bool {
        let d = assign.len();
        if d == self.basis.len() {
            let n = d;
            let img = QMatrix::from_vectors(
                &assign
                    .iter()
                    .map(|&(j, s)| self.vf[j].scale(&Rational::from_integer(BigInt::from(s))))
                    .collect::<Vec<_>>(),
            )
            .transpose();
            let m = img.mul(self.src_inv);
            if !m.is_integral() {
                return false;
            }
            let mat: KMatrix = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| KElem::from_rational(m[(i, j)].clone()))
                        .collect()
                })
                .collect();
            let Ok(gamma) = self.space.group_element(mat) else {
                return false;
            };
            if maps_onto(self.space, &gamma, self.g, self.zf) {
                push_unique(out, gamma);
                return self.first;
            }
            return false;
        }
        let bi = self.basis[d];
        let signs: &[i64] = if d == 0 { &[1] } else { &[1, -1] };
        for j in 0..self.vf.len() {
            if assign.iter().any(|&(k, _)| k == j) || self.bf[j][j] != self.bg[bi][bi] {
                continue;
            }
            for &s in signs {
                let ok = assign.iter().enumerate().all(|(e, &(k, se))| {
                    let want = &self.bg[self.basis[e]][bi];
                    let have = &self.bf[k][j];
                    if se * s > 0 {
                        have == want
                    } else {
                        &-have == want
                    }
                });
                if ok {
                    assign.push((j, s));
                    if self.go(assign, out) {
                        return true;
                    }
                    assign.pop();
                }
            }
        }
        false
    }
}
