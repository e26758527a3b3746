use num_bigint::BigInt;
use proptest::prelude::*;

use super::*;
use crate::linalg::{frac, rat};

fn sym2() -> ConeSpace {
    ConeSpace::parse("sym:2").unwrap()
}

fn gens(cs: &[CuspPoint]) -> Vec<Vec<i64>> {
    cs.iter()
        .map(|c| {
            c.generator()
                .iter()
                .map(|x| i64::try_from(x).unwrap())
                .collect()
        })
        .collect()
}

/// Independent brute force: all primitive generators in a box, deduped by ray.
fn brute_force(space: &ConeSpace, y: &QVector, mu: &Rational, b: i64) -> Vec<CuspPoint> {
    let k = space.generator_len();
    let mut out = std::collections::BTreeSet::new();
    let mut idx = vec![-b; k];
    loop {
        if idx.iter().any(|&x| x != 0) {
            let c = space.cusp_i64(&idx).unwrap();
            if &space.pair(c.embed(), y) <= mu {
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

#[test]
fn make_space_dimensions() {
    assert_eq!(sym2().dim(), 3);
    assert_eq!(ConeSpace::parse("sym:4").unwrap().dim(), 10);
    let h = ConeSpace::parse("herm:1").unwrap();
    assert_eq!(h.dim(), 4);
    assert_eq!((h.ring().trace, h.ring().norm), (0, 1));
    assert!(matches!(
        ConeSpace::parse("herm:12"),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(ConeSpace::parse("cube:3"), Err(Error::Parse(_))));
}

#[test]
fn trace_pairing() {
    let s = sym2();
    let id = s.identity_form();
    assert_eq!(s.inner(&id, &id).unwrap(), rat(2));
    let z = s.cusp_i64(&[1, 1]).unwrap();
    let y = QVector::from_i64(&[2, -1, 2]);
    assert_eq!(s.inner(z.embed(), &y).unwrap(), rat(2));
    assert!(s.inner(&id, &QVector::from_i64(&[1, 2])).is_err());
}

#[test]
fn hermitian_pairing_matches_trace() {
    for m in [1u64, 2, 3, 5, 7] {
        let s = ConeSpace::new(SpaceKind::Hermitian(m)).unwrap();
        let r = s.ring().clone();
        let x = QVector::from_i64(&[3, 1, -2, 5]);
        let y = QVector::from_i64(&[2, -1, 1, 4]);
        let prod = kmat_mul(&r, &s.to_matrix(&x), &s.to_matrix(&y));
        let tr = prod[0][0].add(&prod[1][1]);
        assert!(tr.b == rat(0));
        assert_eq!(s.pair(&x, &y), tr.a);
    }
}

#[test]
fn cone_membership() {
    let s = sym2();
    assert!(s.is_in_cone(&s.identity_form()));
    assert!(!s.is_in_cone(&QVector::from_i64(&[1, 2, 1])));
    assert!(!s.is_in_cone(s.cusp_i64(&[2, 3]).unwrap().embed()));
    let h = ConeSpace::parse("herm:1").unwrap();
    assert!(h.is_in_cone(&QVector::from_i64(&[2, 1, 1, 2])));
    assert!(!h.is_in_cone(&QVector::from_i64(&[1, 1, 1, 2])));
}

#[test]
fn witnesses_for_indefinite_forms() {
    let s = ConeSpace::parse("sym:3").unwrap();
    let y = QVector::from_i64(&[1, 1, 0, 1, 0, 2]);
    assert!(s.nonpositive_vector(&s.identity_form()).is_none());
    let w = s.nonpositive_vector(&y).unwrap();
    assert!(s.pair(&s.rank_one(&w), &y) <= rat(0));
    let h = ConeSpace::parse("herm:7").unwrap();
    let y = QVector::from_i64(&[1, 1, 1, 1]);
    assert!(!h.is_in_cone(&y));
    let w = h.nonpositive_vector(&y).unwrap();
    assert!(h.pair(&h.rank_one(&w), &y) <= rat(0));
}

#[test]
fn enumeration_examples() {
    let s = sym2();
    let y = QVector::new(vec![rat(1), frac(-1, 2), rat(1)]);
    let cs = s.enumerate_cusps_below(&y, &rat(2)).unwrap();
    assert_eq!(gens(&cs), vec![vec![0, 1], vec![1, 0], vec![1, 1]]);
    assert_eq!(cs, brute_force(&s, &y, &rat(2), 4));
    // next value attained is 3
    let cs3 = s.enumerate_cusps_below(&y, &frac(29, 10)).unwrap();
    assert_eq!(cs3.len(), 3);
    let cs = s
        .enumerate_cusps_below(&s.identity_form(), &rat(1))
        .unwrap();
    assert_eq!(gens(&cs), vec![vec![0, 1], vec![1, 0]]);
    assert!(s
        .enumerate_cusps_below(&s.identity_form(), &frac(1, 2))
        .unwrap()
        .is_empty());
    assert_eq!(
        s.enumerate_cusps_below(&QVector::from_i64(&[1, 2, 1]), &rat(1)),
        Err(Error::NotInCone)
    );
}

#[test]
fn hermitian_enumeration_matches_brute_force() {
    for m in [1u64, 2, 3, 5, 7] {
        let s = ConeSpace::new(SpaceKind::Hermitian(m)).unwrap();
        let y = QVector::new(vec![rat(2), frac(1, 3), frac(-1, 2), rat(3)]);
        assert!(s.is_in_cone(&y));
        let mu = rat(6);
        let fast = s.enumerate_cusps_below(&y, &mu).unwrap();
        assert_eq!(fast, brute_force(&s, &y, &mu, 4), "m = {m}");
        assert!(!fast.is_empty());
    }
}

#[test]
fn non_principal_cusps_are_found() {
    // In Z[sqrt(-5)] the ray of (2, 1 + sqrt(-5)) has content 2.
    let s = ConeSpace::parse("herm:5").unwrap();
    let c = s.cusp_i64(&[2, 0, 1, 1]).unwrap();
    let raw = s.embed_raw(c.generator());
    assert_eq!(raw, c.embed().scale(&rat(2)));
    let y = s.identity_form();
    let val = s.pair(c.embed(), &y);
    assert_eq!(val, rat(5));
    assert!(s.enumerate_cusps_below(&y, &val).unwrap().contains(&c));
    // unit and scalar multiples give the same cusp
    assert_eq!(s.cusp_i64(&[-2, 0, -1, -1]).unwrap(), c);
    assert_eq!(s.cusp_i64(&[0, 2, -5, 1]).unwrap(), c);
}

#[test]
fn group_action_examples() {
    let s = sym2();
    let x = QVector::from_i64(&[3, 1, 2]);
    let id = GroupElement::identity(&s);
    assert_eq!(s.act(&id, &x).unwrap(), x);
    let g = s.group_element_i64(&[&[0, -1], &[1, 0]]).unwrap();
    let c = s.cusp_i64(&[1, 0]).unwrap();
    assert_eq!(gens(&[s.act_cusp(&g, &c).unwrap()]), vec![vec![0, 1]]);
    assert_eq!(
        s.act(&g, c.embed()).unwrap(),
        s.cusp_i64(&[0, 1]).unwrap().embed().clone()
    );
    assert_eq!(
        s.group_element_i64(&[&[2, 0], &[0, 1]]),
        Err(Error::NonUnimodular)
    );
}

#[test]
fn cusp_normalization_over_units() {
    for m in [1u64, 2, 3, 7] {
        let s = ConeSpace::new(SpaceKind::Hermitian(m)).unwrap();
        let r = s.ring().clone();
        let v = s.gen_to_kvec(&[3, -1, 2, 5].map(BigInt::from));
        let base = s.cusp_from_kvector(&v).unwrap();
        for u in r.units() {
            let uv: Vec<KElem> = v.iter().map(|x| r.mul(&u, x)).collect();
            assert_eq!(s.cusp_from_kvector(&uv).unwrap(), base);
        }
    }
}

fn random_sl2(a: &[i64]) -> Vec<Vec<i64>> {
    // product of elementary matrices
    let mut m = vec![vec![1i64, 0], vec![0, 1]];
    for (k, &t) in a.iter().enumerate() {
        let e = if k % 2 == 0 {
            [[1, t], [0, 1]]
        } else {
            [[1, 0], [t, 1]]
        };
        m = (0..2)
            .map(|i| {
                (0..2)
                    .map(|j| m[i][0] * e[0][j] + m[i][1] * e[1][j])
                    .collect()
            })
            .collect();
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gram_is_positive(xs in proptest::collection::vec(-20i64..20, 4)) {
        let q = QVector::from_i64(&xs);
        if !q.is_zero() {
            for m in [1u64, 3, 5] {
                let s = ConeSpace::new(SpaceKind::Hermitian(m)).unwrap();
                prop_assert!(s.pair(&q, &q) > rat(0));
            }
        }
        let s = ConeSpace::parse("sym:3").unwrap();
        let q6 = QVector::from_i64(&[xs[0], xs[1], xs[2], xs[3], xs[0] - xs[1], 1]);
        prop_assert!(s.pair(&q6, &q6) > rat(0));
    }

    #[test]
    fn pairing_evaluates_form(v in proptest::collection::vec(-9i64..9, 4), y in proptest::collection::vec(-5i64..5, 4)) {
        let s = ConeSpace::parse("herm:2").unwrap();
        let r = s.ring().clone();
        let yv = QVector::from_i64(&y);
        let kv = s.gen_to_kvec(&v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
        // v^dagger Y v computed directly from the matrix
        let ym = s.to_matrix(&yv);
        let mut acc = KElem::zero();
        for i in 0..2 {
            for j in 0..2 {
                acc = acc.add(&r.mul(&r.mul(&r.conj(&kv[i]), &ym[i][j]), &kv[j]));
            }
        }
        prop_assert_eq!(s.pair(&s.rank_one(&kv), &yv), acc.a);
    }

    #[test]
    fn adjointness(t in proptest::collection::vec(-3i64..4, 4), x in proptest::collection::vec(-5i64..5, 3), y in proptest::collection::vec(-5i64..5, 3)) {
        let s = sym2();
        let m = random_sl2(&t);
        let g = s.group_element_i64(&[&m[0], &m[1]]).unwrap();
        let (x, y) = (QVector::from_i64(&x), QVector::from_i64(&y));
        let lhs = s.pair(&s.act(&g, &x).unwrap(), &y);
        let rhs = s.pair(&x, &s.act_form(&g, &y).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn enumeration_is_equivariant(t in proptest::collection::vec(-2i64..3, 3)) {
        let s = sym2();
        let m = random_sl2(&t);
        let g = s.group_element_i64(&[&m[0], &m[1]]).unwrap();
        let ginv = g.inverse(&s);
        let y = QVector::new(vec![rat(1), frac(-1, 2), rat(1)]);
        let mu = rat(3);
        let lhs: Vec<CuspPoint> = s.enumerate_cusps_below(&s.act_form(&g, &y).unwrap(), &mu).unwrap();
        let mut rhs: Vec<CuspPoint> = s
            .enumerate_cusps_below(&y, &mu)
            .unwrap()
            .iter()
            .map(|c| s.act_cusp(&ginv, c).unwrap())
            .collect();
        rhs.sort();
        prop_assert_eq!(lhs, rhs);
    }
}
