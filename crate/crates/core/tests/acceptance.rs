//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so that every line is printed; exits nonzero if any fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use voronoi_modsym::cone::{ConeSpace, CuspPoint};
use voronoi_modsym::linalg::{frac, rat, QVector, Rational};
use voronoi_modsym::modsym::{
    build_relation_space, charpoly, edge_rewrite, gamma0_hecke_operator, hecke_matrix,
    is_voronoi_reduced, manin_reduce, rational_roots, reduce_symbol, telescopes, Level,
    ModularSymbol,
};
use voronoi_modsym::voronoi::{
    classify, initial_perfect_form, neighbor_across_ridge, reduce_point, rho, sample_s, Atlas,
    ClassifyOptions,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn atlas(desc: &str) -> Atlas {
    let s = ConeSpace::parse(desc).unwrap();
    classify(
        &s,
        initial_perfect_form(&s, 16).unwrap(),
        &ClassifyOptions::default(),
    )
    .unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    ensure(
        t.elapsed() < limit,
        format!("took {:?}, limit {:?}", t.elapsed(), limit),
    )
}

fn unimodular(s: &ModularSymbol) -> bool {
    let (u, v) = (s.u.generator(), s.v.generator());
    (&u[0] * &v[1] - &u[1] * &v[0]).abs() == BigInt::from(1)
}

fn twelve_fifths_chain() -> Outcome {
    let t = Instant::now();
    let a = atlas("sym:2");
    let zero = a.space.cusp_i64(&[0, 1]).unwrap();
    let q = a.space.cusp_i64(&[12, 5]).unwrap();
    let chain = reduce_symbol(&a, &zero, &q).unwrap();
    let c = |g: &[i64]| a.space.cusp_i64(g).unwrap();
    let caption = vec![
        ModularSymbol::new(c(&[0, 1]), c(&[1, 0])),
        ModularSymbol::new(c(&[1, 0]), c(&[2, 1])),
        ModularSymbol::new(c(&[2, 1]), c(&[5, 2])),
        ModularSymbol::new(c(&[5, 2]), c(&[12, 5])),
    ];
    ensure(telescopes(&chain, &zero, &q), "chain does not telescope")?;
    ensure(chain.iter().all(unimodular), "non-unimodular term")?;
    ensure(chain == caption, format!("chain {chain:?}"))?;
    ensure(
        manin_reduce(&a.space, &frac(12, 5)).unwrap() == caption,
        "oracle chain differs from caption",
    )?;
    let sp = build_relation_space(&a, Level::Gamma0(11)).unwrap();
    ensure(
        sp.class_of_edges(&a, &chain).unwrap() == sp.class_of_edges(&a, &caption).unwrap(),
        "classes differ",
    )?;
    within(t, Duration::from_secs(1))?;
    Ok(format!(
        "[0,inf]+[inf,2]+[2,5/2]+[5/2,12/5] term-for-term in {:?}",
        t.elapsed()
    ))
}

fn oracle_equivalence() -> Outcome {
    let t = Instant::now();
    let a = atlas("sym:2");
    let sp = build_relation_space(&a, Level::Gamma0(11)).unwrap();
    let zero = a.space.cusp_i64(&[0, 1]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut terms = 0;
    for _ in 0..200 {
        let q = Rational::new(
            rng.gen_range(1..=1000i64).into(),
            rng.gen_range(1..=1000i64).into(),
        );
        let target = a
            .space
            .cusp_from_generator(&[q.numer().clone(), q.denom().clone()])
            .unwrap();
        let ours = reduce_symbol(&a, &zero, &target).unwrap();
        let oracle = manin_reduce(&a.space, &q).unwrap();
        ensure(
            ours.iter().chain(&oracle).all(unimodular),
            format!("non-unimodular term for {q}"),
        )?;
        ensure(
            telescopes(&ours, &zero, &target),
            format!("no telescoping for {q}"),
        )?;
        let lhs = sp.class_of_edges(&a, &ours).unwrap();
        ensure(
            lhs == sp.class_of_edges(&a, &oracle).unwrap(),
            format!("classes differ for {q}"),
        )?;
        terms += ours.len();
    }
    within(t, Duration::from_secs(60))?;
    Ok(format!(
        "200 rationals, {terms} unimodular terms, in {:?}",
        t.elapsed()
    ))
}

fn perfect_form_counts() -> Outcome {
    let mut msg = Vec::new();
    let a2 = atlas("sym:2");
    ensure(
        a2.num_reps() == 1 && a2.reps[0].z.len() == 3,
        "sym:2 is not one class with |Z| = 3",
    )?;
    let a3 = atlas("sym:3");
    // pinned after the first verified traversal
    ensure(
        a3.num_reps() == 1,
        format!("sym:3 has {} classes", a3.num_reps()),
    )?;
    a3.verify().map_err(|e| e.to_string())?;
    msg.push(format!("sym:3 1 class |Z| {}", a3.reps[0].z.len()));
    let t = Instant::now();
    let a4 = atlas("sym:4");
    let el = t.elapsed();
    ensure(a4.num_reps() >= 2, "sym:4 has a single class")?;
    let mut zs: Vec<usize> = a4.reps.iter().map(|f| f.z.len()).collect();
    zs.sort();
    // pinned after the first verified traversal
    ensure(zs == vec![10, 12], format!("sym:4 classes with |Z| {zs:?}"))?;
    a4.verify().map_err(|e| e.to_string())?;
    within(t, Duration::from_secs(600))?;
    msg.push(format!(
        "sym:4 {} classes |Z| {zs:?} in {el:?}",
        a4.num_reps()
    ));
    Ok(format!("sym:2 1 class |Z| 3; {}", msg.join("; ")))
}

fn gaussian_octahedron() -> Outcome {
    let t = Instant::now();
    let a = atlas("herm:1");
    ensure(a.num_reps() == 1, format!("{} classes", a.num_reps()))?;
    let fv = a.reps[0].comb.f_vector();
    ensure(fv == (6, 12, 8), format!("f-vector {fv:?}"))?;
    a.verify().map_err(|e| e.to_string())?;
    within(t, Duration::from_secs(60))?;
    Ok(format!("1 class, f-vector (6,12,8), in {:?}", t.elapsed()))
}

fn random_pd_point(n: usize, rng: &mut ChaCha8Rng) -> QVector {
    // B^T B + I / k with small random integer B
    let b: Vec<Vec<i64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-6..=6)).collect())
        .collect();
    let k = rng.gen_range(1..=9i64);
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            let dot: i64 = (0..n).map(|r| b[r][i] * b[r][j]).sum();
            out.push(rat(dot) + if i == j { frac(1, k) } else { rat(0) });
        }
    }
    QVector::new(out)
}

fn reduction_soundness() -> Outcome {
    let t = Instant::now();
    let mut steps = 0;
    for (desc, n) in [("sym:2", 2), ("sym:3", 3)] {
        let a = atlas(desc);
        let s = &a.space;
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        for _ in 0..1000 {
            let x = random_pd_point(n, &mut rng);
            ensure(s.is_in_cone(&x), "sample not positive definite")?;
            let red = reduce_point(&a, &x).map_err(|e| format!("{desc}: {e}"))?;
            ensure(
                red.mus.windows(2).all(|w| w[1] < w[0]),
                format!("{desc}: mu not strictly decreasing"),
            )?;
            ensure(
                red.certificate_holds(),
                format!("{desc}: certificate fails"),
            )?;
            // independent check: the transported point is on the inner side of every ridge
            let f = &a.reps[red.rep];
            let gx = s.act(&red.gamma, &x).unwrap();
            ensure(gx == red.point, "stored point differs")?;
            ensure(
                f.ridges
                    .iter()
                    .all(|r| !s.pair(&gx, &r.normal).is_negative()),
                format!("{desc}: transported point outside the facet cone"),
            )?;
            steps += red.mus.len() - 1;
        }
    }
    within(t, Duration::from_secs(120))?;
    Ok(format!(
        "2000 points, {steps} walk steps, in {:?}",
        t.elapsed()
    ))
}

fn neighbor_algebra() -> Outcome {
    let mut checked = 0;
    let mut sampled = 0;
    for desc in ["sym:2", "sym:3", "herm:1"] {
        let a = atlas(desc);
        let s = &a.space;
        for f in &a.reps {
            for r in 0..f.ridges.len() {
                let step = neighbor_across_ridge(s, f, r, 64).map_err(|e| e.to_string())?;
                let back = neighbor_across_ridge(s, &step.form, step.back_ridge, 64)
                    .map_err(|e| e.to_string())?;
                ensure(
                    back.form.y == f.y,
                    format!("{desc}: involution fails at ridge {r}"),
                )?;
                let v = &f.ridges[r].normal;
                let ze = f.ridge_cusps(r);
                for z in step.form.z.iter().filter(|z| !ze.contains(*z)) {
                    ensure(
                        rho(s, z, f, v).unwrap() == step.rho_bar,
                        format!("{desc}: rho(z) != rho_bar"),
                    )?;
                }
                let zg: BTreeSet<CuspPoint> = step.form.z.iter().cloned().collect();
                for x in sample_s(s, f, r, 3) {
                    let rx = rho(s, &x, f, v).unwrap();
                    ensure(
                        rx >= step.rho_bar,
                        format!("{desc}: sampled rho below rho_bar"),
                    )?;
                    ensure(
                        (rx == step.rho_bar) == zg.contains(&x),
                        format!("{desc}: rho_bar attained off Z_G"),
                    )?;
                    sampled += 1;
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} ridges, {sampled} sampled members of S"))
}

/// `#E(F_p)` for `y^2 + y = x^3 - x^2 - 10x - 20`, point at infinity included.
fn count_points(p: i64) -> i64 {
    let mut n = 1;
    for x in 0..p {
        for y in 0..p {
            if (y * y + y - (x * x * x - x * x - 10 * x - 20)).rem_euclid(p) == 0 {
                n += 1;
            }
        }
    }
    n
}

fn hecke_eigenvalues() -> Outcome {
    let t = Instant::now();
    let a = atlas("sym:2");
    let sp = build_relation_space(&a, Level::Gamma0(11)).unwrap();
    let mut found = Vec::new();
    for p in [2i64, 3, 5, 7, 13] {
        let ap = p + 1 - count_points(p);
        let m = hecke_matrix(&sp, &a, &gamma0_hecke_operator(p as u64)).unwrap();
        let roots = rational_roots(&charpoly(&m));
        ensure(
            roots.contains(&(rat(ap), 2)),
            format!("p = {p}: oracle a_p = {ap}, roots {roots:?}"),
        )?;
        found.push(format!("a_{p}={ap}"));
    }
    within(t, Duration::from_secs(60))?;
    Ok(format!("{} in {:?}", found.join(" "), t.elapsed()))
}

fn hecke_structure() -> Outcome {
    let a = atlas("sym:2");
    let sp = build_relation_space(&a, Level::Gamma0(11)).unwrap();
    for p in [2u64, 3, 5, 7, 13] {
        ensure(
            gamma0_hecke_operator(p).len() == p as usize + 1,
            format!("T_{p} coset count"),
        )?;
    }
    let t2 = hecke_matrix(&sp, &a, &gamma0_hecke_operator(2)).unwrap();
    let t3 = hecke_matrix(&sp, &a, &gamma0_hecke_operator(3)).unwrap();
    ensure(t2.mul(&t3) == t3.mul(&t2), "T2 T3 != T3 T2")?;
    Ok("T2 T3 = T3 T2 exactly; T_p has p+1 cosets".into())
}

fn bianchi_smoke() -> Outcome {
    let t = Instant::now();
    let s = ConeSpace::parse("herm:5").unwrap();
    let a = classify(
        &s,
        initial_perfect_form(&s, 16).unwrap(),
        &ClassifyOptions::default(),
    )
    .map_err(|e| format!("classification: {e}"))?;
    for f in &a.reps {
        f.verify(&s).map_err(|e| e.to_string())?;
    }
    a.verify().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut rand_cusp = || loop {
        let g: Vec<i64> = (0..4).map(|_| rng.gen_range(-4..=4)).collect();
        if let Ok(c) = s.cusp_i64(&g) {
            return c;
        }
    };
    let mut terms = 0;
    let mut pairs = 0;
    while pairs < 100 {
        let (u, v) = (rand_cusp(), rand_cusp());
        if u == v {
            continue;
        }
        pairs += 1;
        let chain = reduce_symbol(&a, &u, &v).map_err(|e| format!("{u:?} {v:?}: {e}"))?;
        ensure(telescopes(&chain, &u, &v), "chain does not telescope")?;
        for sym in &chain {
            ensure(
                is_voronoi_reduced(&a, sym).unwrap(),
                format!("{sym:?} not reduced"),
            )?;
            let path = edge_rewrite(&a, sym).map_err(|e| e.to_string())?;
            ensure(
                telescopes(&path, &sym.u, &sym.v),
                "edge rewrite does not telescope",
            )?;
        }
        terms += chain.len();
    }
    let zs: Vec<usize> = a.reps.iter().map(|f| f.z.len()).collect();
    Ok(format!(
        "{} classes |Z| {zs:?}; 100 pairs, {terms} reduced terms, in {:?}",
        a.num_reps(),
        t.elapsed()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("twelve-fifths chain", twelve_fifths_chain),
        ("oracle equivalence", oracle_equivalence),
        ("perfect-form counts", perfect_form_counts),
        ("gaussian octahedron", gaussian_octahedron),
        ("reduction soundness", reduction_soundness),
        ("neighbor algebra", neighbor_algebra),
        ("hecke eigenvalues at level 11", hecke_eigenvalues),
        ("hecke structure", hecke_structure),
        ("bianchi smoke herm:5", bianchi_smoke),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match out {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({why})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
