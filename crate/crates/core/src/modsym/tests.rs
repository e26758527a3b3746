use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::cone::{ConeSpace, CuspPoint, KElem};
use crate::linalg::{frac, rat, QMatrix, QVector, Rational};
use crate::voronoi::{classify, initial_perfect_form, Atlas, ClassifyOptions};

fn atlas(desc: &str) -> Atlas {
    let s = ConeSpace::parse(desc).unwrap();
    let f = initial_perfect_form(&s, 16).unwrap();
    classify(&s, f, &ClassifyOptions::default()).unwrap()
}

fn cusp(a: &Atlas, g: &[i64]) -> CuspPoint {
    a.space.cusp_i64(g).unwrap()
}

fn sym(a: &Atlas, u: &[i64], v: &[i64]) -> ModularSymbol {
    ModularSymbol::new(cusp(a, u), cusp(a, v))
}

fn ints(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

fn det2(s: &ModularSymbol) -> BigInt {
    let (u, v) = (s.u.generator(), s.v.generator());
    &u[0] * &v[1] - &u[1] * &v[0]
}

fn random_q(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(
        rng.gen_range(1..400i64).into(),
        rng.gen_range(1..400i64).into(),
    )
}

#[test]
fn continued_fractions() {
    assert_eq!(cf_expand(&frac(12, 5)), ints(&[2, 2, 2]));
    assert_eq!(cf_expand(&rat(7)), ints(&[7]));
    assert_eq!(cf_expand(&frac(1, 3)), ints(&[0, 3]));
}

#[test]
fn manin_chain_of_twelve_fifths() {
    let s = ConeSpace::parse("sym:2").unwrap();
    let c = |g: &[i64]| s.cusp_i64(g).unwrap();
    let chain = manin_reduce(&s, &frac(12, 5)).unwrap();
    let want = [
        ModularSymbol::new(c(&[0, 1]), c(&[1, 0])),
        ModularSymbol::new(c(&[1, 0]), c(&[2, 1])),
        ModularSymbol::new(c(&[2, 1]), c(&[5, 2])),
        ModularSymbol::new(c(&[5, 2]), c(&[12, 5])),
    ];
    assert_eq!(chain, want);
    assert_eq!(
        manin_reduce(&s, &rat(1)).unwrap(),
        vec![ModularSymbol::new(c(&[0, 1]), c(&[1, 1]))]
    );
}

#[test]
fn manin_terms_are_unimodular() {
    let s = ConeSpace::parse("sym:2").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let q = random_q(&mut rng);
        let chain = manin_reduce(&s, &q).unwrap();
        assert!(telescopes(
            &chain,
            &s.cusp_i64(&[0, 1]).unwrap(),
            &cusp_of_rational(&s, &q).unwrap()
        ));
        for t in &chain {
            assert_eq!(det2(t).magnitude(), &1u32.into(), "{q}: {t:?}");
        }
    }
}

#[test]
fn chain_bookkeeping() {
    let a = atlas("sym:2");
    let s = sym(&a, &[0, 1], &[1, 0]);
    let mut c = SymbolChain::new();
    c.add_term(&s, 1);
    c.add_term(&s.reversed(), 1);
    assert!(c.is_empty());
    c.add_term(&s, 2);
    assert_eq!(c.len(), 1);
    let b = c.boundary();
    assert_eq!(b[&s.v], 2);
    assert_eq!(b[&s.u], -2);
}

#[test]
fn reduce_symbol_recovers_manin_chain() {
    let a = atlas("sym:2");
    let u = cusp(&a, &[0, 1]);
    assert!(reduce_symbol(&a, &u, &u).unwrap().is_empty());
    let v = cusp(&a, &[12, 5]);
    let got = reduce_symbol(&a, &u, &v).unwrap();
    assert_eq!(got, manin_reduce(&a.space, &frac(12, 5)).unwrap());
}

#[test]
fn partitions() {
    let a = atlas("sym:2");
    let (inf, zero) = (cusp(&a, &[1, 0]), cusp(&a, &[0, 1]));
    let pts = sufficiently_fine_partition(&a, &inf, &zero).unwrap();
    assert_eq!(pts.len(), 1);
    assert!(pts[0].face.contains(&inf) && pts[0].face.contains(&zero));

    let v = cusp(&a, &[12, 5]);
    let pts = sufficiently_fine_partition(&a, &inf, &v).unwrap();
    let seen: Vec<&CuspPoint> = pts.iter().flat_map(|p| p.face.iter()).collect();
    for g in [&[1, 0], &[2, 1], &[5, 2]] {
        assert!(seen.contains(&&cusp(&a, g)));
    }
    assert!(partition_depth(&pts) <= 8);
}

#[test]
fn reducedness() {
    let a = atlas("sym:2");
    assert!(is_voronoi_reduced(&a, &sym(&a, &[1, 0], &[0, 1])).unwrap());
    assert!(!is_voronoi_reduced(&a, &sym(&a, &[0, 1], &[2, 1])).unwrap());
    for f in &a.reps {
        for &(i, j) in &f.comb.edges {
            assert!(
                is_voronoi_reduced(&a, &ModularSymbol::new(f.z[i].clone(), f.z[j].clone()))
                    .unwrap()
            );
        }
    }
    let e = sym(&a, &[1, 0], &[1, 1]);
    assert_eq!(edge_rewrite(&a, &e).unwrap(), vec![e]);
}

#[test]
fn octahedron_diagonal_rewrites_to_two_edges() {
    let a = atlas("herm:1");
    let f = &a.reps[0];
    let edges = &f.comb.edges;
    let (i, j) = (0..f.z.len())
        .flat_map(|i| (i + 1..f.z.len()).map(move |j| (i, j)))
        .find(|&(i, j)| !edges.contains(&(i, j)))
        .unwrap();
    let s = ModularSymbol::new(f.z[i].clone(), f.z[j].clone());
    let path = edge_rewrite(&a, &s).unwrap();
    assert_eq!(path.len(), 2);
    assert!(telescopes(&path, &s.u, &s.v));
}

#[test]
fn triangle_relation_is_zero() {
    let a = atlas("sym:2");
    let tri = [
        sym(&a, &[0, 1], &[1, 0]),
        sym(&a, &[1, 0], &[1, 1]),
        sym(&a, &[1, 1], &[0, 1]),
    ];
    for level in [Level::Gamma0(1), Level::Full, Level::Gamma0(11)] {
        let sp = build_relation_space(&a, level).unwrap();
        assert!(sp.class_of_edges(&a, &tri).unwrap().is_zero(), "{level:?}");
    }
    assert_eq!(build_relation_space(&a, Level::Gamma0(1)).unwrap().dim(), 0);
}

#[test]
fn gamma0_eleven_has_dimension_three() {
    let a = atlas("sym:2");
    let sp = build_relation_space(&a, Level::Gamma0(11)).unwrap();
    assert_eq!(sp.num_generators(), 12);
    assert_eq!(sp.dim(), 3);
    for i in 0..sp.dim() {
        let b = sp.basis_symbol(i);
        let e = QVector::unit(3, i);
        assert_eq!(sp.class_of_edges(&a, std::slice::from_ref(b)).unwrap(), e);
    }
}

#[test]
fn higher_rank_is_unsupported() {
    let a = atlas("sym:3");
    assert!(matches!(
        build_relation_space(&a, Level::Full),
        Err(crate::Error::UnsupportedRank)
    ));
}

#[test]
fn symbol_relations_hold_in_quotient() {
    for (desc, level) in [("sym:2", Level::Gamma0(11)), ("herm:1", Level::Full)] {
        let a = atlas(desc);
        let sp = build_relation_space(&a, level).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = a.space.generator_len();
        let rand_cusp = |rng: &mut ChaCha8Rng| loop {
            let g: Vec<i64> = (0..n).map(|_| rng.gen_range(-6..=6)).collect();
            if let Ok(c) = a.space.cusp_i64(&g) {
                return c;
            }
        };
        for _ in 0..12 {
            let (u, v, w) = (
                rand_cusp(&mut rng),
                rand_cusp(&mut rng),
                rand_cusp(&mut rng),
            );
            let path = [
                ModularSymbol::new(u.clone(), v.clone()),
                ModularSymbol::new(v, w.clone()),
                ModularSymbol::new(w, u.clone()),
            ];
            assert!(sp.class_of_path(&a, &path).unwrap().is_zero(), "{desc}");
            let s = &path[0];
            let lex = sp.class_of_symbol(&a, s).unwrap();
            assert_eq!(sp.class_of_symbol(&a, &s.reversed()).unwrap(), lex.neg());
            let mut edges = Vec::new();
            for t in reduce_symbol_with(&a, &s.u, &s.v, TieBreak::Random(rng.gen())).unwrap() {
                edges.extend(edge_rewrite(&a, &t).unwrap());
            }
            assert!(telescopes(&edges, &s.u, &s.v));
            assert_eq!(sp.class_of_edges(&a, &edges).unwrap(), lex, "{desc}");
        }
    }
}

fn poly(coeffs: &[i64]) -> Vec<Rational> {
    coeffs.iter().map(|&c| rat(c)).collect()
}

#[test]
fn characteristic_polynomials() {
    let m = QMatrix::from_i64(&[&[2, 1], &[0, 3]]);
    assert_eq!(charpoly(&m), poly(&[6, -5, 1]));
    assert_eq!(charpoly(&QMatrix::identity(3)), poly(&[-1, 3, -3, 1]));
    assert_eq!(
        rational_roots(&poly(&[6, -5, 1])),
        vec![(rat(2), 1), (rat(3), 1)]
    );
    // (x + 2)^2 (x - 3) x
    assert_eq!(
        rational_roots(&poly(&[0, -12, -8, 1, 1])),
        vec![(rat(-2), 2), (rat(0), 1), (rat(3), 1)]
    );
    // 2x^2 - x: roots 0 and 1/2
    assert_eq!(
        rational_roots(&poly(&[0, -1, 2])),
        vec![(rat(0), 1), (frac(1, 2), 1)]
    );
    assert!(rational_roots(&poly(&[2, 0, 1])).is_empty());
}

#[test]
fn hecke_cosets() {
    for p in [2u64, 3, 5, 7, 13] {
        assert_eq!(gamma0_hecke_operator(p).len(), p as usize + 1);
    }
    let s = ConeSpace::parse("herm:1").unwrap();
    // 1 + i has norm 2, 3 is inert of norm 9
    let t = principal_hecke_operator(&s, &KElem::from_ints(&1.into(), &1.into())).unwrap();
    assert_eq!(t.len(), 3);
    let t = principal_hecke_operator(&s, &KElem::from_int(3)).unwrap();
    assert_eq!(t.len(), 10);
    assert!(principal_hecke_operator(&s, &KElem::zero()).is_err());
}

#[test]
fn hecke_on_level_eleven() {
    let a = atlas("sym:2");
    let sp = build_relation_space(&a, Level::Gamma0(11)).unwrap();
    assert_eq!(
        hecke_matrix(&sp, &a, &HeckeOperator::identity()).unwrap(),
        QMatrix::identity(3)
    );
    let t2 = hecke_matrix(&sp, &a, &gamma0_hecke_operator(2)).unwrap();
    let t3 = hecke_matrix(&sp, &a, &gamma0_hecke_operator(3)).unwrap();
    assert_eq!(t2.mul(&t3), t3.mul(&t2));
    // (x + 2)^2 (x - 3)
    assert_eq!(charpoly(&t2), poly(&[-12, -8, 1, 1]));
    let bad = HeckeOperator {
        matrices: vec![vec![vec![KElem::zero(); 2]; 2]],
    };
    assert!(matches!(
        hecke_matrix(&sp, &a, &bad),
        Err(crate::Error::BadCoset(_))
    ));
}

#[test]
fn gaussian_relation_space_is_pinned() {
    let a = atlas("herm:1");
    let sp = build_relation_space(&a, Level::Full).unwrap();
    // every edge of the octahedron is reversed by a stabilizer element,
    // so all edge symbols are 2-torsion
    assert_eq!(sp.num_generators(), 0);
    assert_eq!(sp.dim(), 0);
    assert!(sp
        .relations()
        .iter()
        .all(|r| r.len() == sp.num_generators()));
}
