//! `vmsym`: classify Voronoi facets, reduce points and symbols, compute
//! Hecke eigenvalues.
//!
//! Exit codes: 0 success, 2 parse or configuration error, 3 verification
//! failure, 4 resource guard, 1 anything else.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use voronoi_modsym::cone::{ConeSpace, CuspPoint, KElem, SpaceKind};
use voronoi_modsym::linalg::{fmt_rational, parse_rational, QMatrix, QVector, Rational};
use voronoi_modsym::modsym::{
    build_relation_space, charpoly, gamma0_hecke_operator, hecke_matrix, is_voronoi_reduced,
    principal_hecke_operator, rational_roots, reduce_symbol_with, telescopes, Level, ModularSymbol,
    TieBreak,
};
use voronoi_modsym::serial::{cache_path, load_atlas, save_atlas};
use voronoi_modsym::voronoi::{
    classify, initial_perfect_form, reduce_point, smallest_containing_face, Atlas, ClassifyOptions,
};
use voronoi_modsym::{Error, Result};

#[derive(Parser)]
#[command(
    name = "vmsym",
    version,
    about = "Exact Voronoi reduction and modular symbols"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify perfect forms (facets of the Voronoi polyhedron) up to the group.
    Classify(Common),
    /// Reduce a point of the cone to a facet representative.
    ReducePoint {
        #[command(flatten)]
        common: Common,
        /// Coordinates of the point, comma separated rationals.
        #[arg(long)]
        point: String,
    },
    /// Rewrite [u, v] as a sum of Voronoi-reduced symbols.
    ReduceSymbol {
        #[command(flatten)]
        common: Common,
        /// Generator of u, comma separated integers (base-ring coordinates).
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        /// Pick intermediate cusps at random (seeded by --seed) instead of lexicographically.
        #[arg(long)]
        random_tie_break: bool,
    },
    /// Hecke matrices, characteristic polynomials and rational eigenvalues.
    Hecke {
        #[command(flatten)]
        common: Common,
        /// Level N of Gamma_0(N) (sym:2 only).
        #[arg(long)]
        level: Option<u64>,
        /// Primes, as a range `a..b` (inclusive) or a comma separated list.
        #[arg(long, default_value = "2..13")]
        primes: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Verify {
    None,
    Certificates,
    Full,
}

#[derive(Args)]
struct Common {
    /// `sym:n` or `herm:m`.
    #[arg(long)]
    space: String,
    /// Directory for atlas files; entries are re-verified when loaded.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "certificates")]
    verify: Verify,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Doublings allowed in the seed search beyond a ridge.
    #[arg(long, default_value_t = 64)]
    max_norm: u64,
    /// Refuse spaces of larger real dimension.
    #[arg(long, default_value_t = 10)]
    max_dim: usize,
    /// Refuse to continue past this many facet classes.
    #[arg(long, default_value_t = 64)]
    max_reps: usize,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_)
        | Error::InvalidParameter(_)
        | Error::DimensionMismatch { .. }
        | Error::NotInCone => 2,
        Error::Verification(_) | Error::PerfectionFailure(_) | Error::NotReduced => 3,
        Error::ResourceGuard(_) | Error::SeedSearchExhausted { .. } => 4,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match exit_code(e) {
        2 => "parse error",
        3 => "verification failure",
        4 => "resource guard",
        _ => "error",
    }
}

fn parse_list<T>(s: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    s.split(',').map(|x| f(x.trim())).collect()
}

fn parse_int(s: &str) -> Result<BigInt> {
    s.parse()
        .map_err(|_| Error::Parse(format!("bad integer {s:?}")))
}

fn parse_primes(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::Parse(format!("bad prime list {s:?}"));
    let nums: Vec<u64> = if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|_| bad())?;
        (a..=b).collect()
    } else {
        parse_list(s, |x| x.parse::<u64>().map_err(|_| bad()))?
    };
    Ok(nums
        .into_iter()
        .filter(|&n| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
        .collect())
}

fn gen_json(c: &CuspPoint) -> Value {
    Value::Array(
        c.generator()
            .iter()
            .map(|x| {
                x.to_string()
                    .parse::<Value>()
                    .unwrap_or(json!(x.to_string()))
            })
            .collect(),
    )
}

fn vec_json(v: &QVector) -> Value {
    json!(v.iter().map(fmt_rational).collect::<Vec<_>>())
}

fn mat_json(m: &QMatrix) -> Value {
    json!((0..m.rows())
        .map(|i| vec_json(&m.row(i)))
        .collect::<Vec<_>>())
}

fn obtain_atlas(c: &Common) -> Result<Atlas> {
    let space = ConeSpace::parse(&c.space)?;
    if space.dim() > c.max_dim {
        return Err(Error::ResourceGuard(format!(
            "{} has dimension {} > --max-dim {}",
            c.space,
            space.dim(),
            c.max_dim
        )));
    }
    let path = c.cache_dir.as_ref().map(|d| cache_path(d, &space));
    if let Some(p) = path.as_ref().filter(|p| p.exists()) {
        match load_atlas(p) {
            Ok(a) => return Ok(a),
            Err(e) => eprintln!("note: discarding cached atlas {}: {e}", p.display()),
        }
    }
    let opts = ClassifyOptions {
        max_norm: c.max_norm,
        max_reps: c.max_reps,
        parallel: true,
    };
    let atlas = classify(&space, initial_perfect_form(&space, c.max_norm)?, &opts)?;
    if c.verify == Verify::Full {
        atlas.verify()?;
    }
    if let Some(p) = path {
        save_atlas(&atlas, &p)?;
    }
    Ok(atlas)
}

fn cmd_classify(c: &Common) -> Result<Value> {
    let atlas = obtain_atlas(c)?;
    if c.verify == Verify::Full {
        atlas.verify()?;
    }
    let reps: Vec<Value> = atlas
        .reps
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let (v, e, r) = f.comb.f_vector();
            json!({
                "index": i,
                "minimal_vectors": f.z.len(),
                "ridges": f.ridges.len(),
                "f_vector": [v, e, r],
                "form": vec_json(&f.y),
                "moves": atlas.moves[i].iter().map(|m| m.target).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(json!({ "space": atlas.space.descriptor(), "classes": atlas.num_reps(), "reps": reps }))
}

fn cmd_reduce_point(c: &Common, point: &str) -> Result<Value> {
    let x = QVector::new(parse_list(point, parse_rational)?);
    let space = ConeSpace::parse(&c.space)?;
    if x.len() != space.dim() {
        return Err(Error::Parse(format!(
            "point needs {} coordinates, got {}",
            space.dim(),
            x.len()
        )));
    }
    let atlas = obtain_atlas(c)?;
    let red = reduce_point(&atlas, &x)?;
    if c.verify != Verify::None && !red.certificate_holds() {
        return Err(Error::Verification("reduction certificate fails".into()));
    }
    let face = smallest_containing_face(&atlas, &x, &red)?;
    let gamma: Vec<Vec<Vec<String>>> = red
        .gamma
        .mat()
        .iter()
        .map(|r| {
            r.iter()
                .map(|e| vec![fmt_rational(&e.a), fmt_rational(&e.b)])
                .collect()
        })
        .collect();
    Ok(json!({
        "space": atlas.space.descriptor(),
        "facet_class": red.rep,
        "mu": fmt_rational(red.mu()),
        "mu_sequence": red.mus.iter().map(fmt_rational).collect::<Vec<_>>(),
        "gamma": gamma,
        "reduced_point": vec_json(&red.point),
        "certificate": red.certificate.iter().map(fmt_rational).collect::<Vec<_>>(),
        "face": face.iter().map(gen_json).collect::<Vec<_>>(),
    }))
}

fn cmd_reduce_symbol(c: &Common, u: &str, v: &str, random: bool) -> Result<Value> {
    let space = ConeSpace::parse(&c.space)?;
    let cu = space.cusp_from_generator(&parse_list(u, parse_int)?)?;
    let cv = space.cusp_from_generator(&parse_list(v, parse_int)?)?;
    let atlas = obtain_atlas(c)?;
    let tie = if random {
        TieBreak::Random(c.seed)
    } else {
        TieBreak::Lex
    };
    let chain = reduce_symbol_with(&atlas, &cu, &cv, tie)?;
    if c.verify != Verify::None {
        if !telescopes(&chain, &cu, &cv) {
            return Err(Error::Verification("chain does not telescope".into()));
        }
        for s in &chain {
            if !is_voronoi_reduced(&atlas, s)? {
                return Err(Error::Verification(format!("{s:?} is not Voronoi-reduced")));
            }
        }
    }
    let term = |s: &ModularSymbol| json!({ "u": gen_json(&s.u), "v": gen_json(&s.v), "coeff": 1 });
    Ok(json!({
        "space": atlas.space.descriptor(),
        "u": gen_json(&cu),
        "v": gen_json(&cv),
        "chain": chain.iter().map(term).collect::<Vec<_>>(),
    }))
}

/// A generator of a principal prime above `p`, if there is one.
fn principal_prime_above(space: &ConeSpace, p: u64) -> Option<KElem> {
    let ring = space.ring();
    let (t, n) = (ring.trace, ring.norm);
    // norm of a + b omega is a^2 + t a b + n b^2
    let bound = (2.0 * (p as f64).sqrt()) as i64 + 2;
    for b in 0..=bound {
        for a in -bound..=bound {
            if a * a + t * a * b + n * b * b == p as i64 {
                return Some(KElem::from_ints(&a.into(), &b.into()));
            }
        }
    }
    // inert primes are principal
    let pi = p as i64;
    let splits = (0..pi).any(|x| (x * x - t * x + n).rem_euclid(pi) == 0);
    (!splits).then(|| KElem::from_int(pi))
}

fn cmd_hecke(c: &Common, level: Option<u64>, primes: &str) -> Result<Value> {
    let space = ConeSpace::parse(&c.space)?;
    let primes = parse_primes(primes)?;
    let lvl = match (space.kind(), level) {
        (SpaceKind::Symmetric(2), Some(n)) => Level::Gamma0(n),
        (SpaceKind::Symmetric(2), None) => Level::Gamma0(1),
        (SpaceKind::Hermitian(_), None) => Level::Full,
        (SpaceKind::Hermitian(_), Some(_)) => {
            return Err(Error::InvalidParameter(
                "--level applies to sym:2 only".into(),
            ))
        }
        _ => return Err(Error::UnsupportedRank),
    };
    let atlas = obtain_atlas(c)?;
    let rel = build_relation_space(&atlas, lvl)?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for p in primes {
        let op = match lvl {
            Level::Gamma0(n) if n % p == 0 => {
                skipped.push(json!({ "p": p, "reason": "divides the level" }));
                continue;
            }
            Level::Gamma0(_) => gamma0_hecke_operator(p),
            Level::Full => match principal_prime_above(&space, p) {
                Some(pi) => principal_hecke_operator(&space, &pi)?,
                None => {
                    skipped.push(json!({ "p": p, "reason": "no principal prime above p" }));
                    continue;
                }
            },
        };
        let m = hecke_matrix(&rel, &atlas, &op)?;
        let cp = charpoly(&m);
        let roots: Vec<Value> = rational_roots(&cp)
            .into_iter()
            .map(|(r, k)| json!({ "value": fmt_rational(&r), "multiplicity": k }))
            .collect();
        rows.push(json!({
            "p": p,
            "prime": format!("{:?}", op.matrices[0][0][0]),
            "cosets": op.len(),
            "matrix": mat_json(&m),
            "charpoly": cp.iter().map(fmt_rational).collect::<Vec<_>>(),
            "eigenvalues": roots,
        }));
    }
    let level_json = match lvl {
        Level::Gamma0(n) => json!(n),
        Level::Full => json!("full"),
    };
    Ok(json!({
        "space": atlas.space.descriptor(),
        "level": level_json,
        "dimension": rel.dim(),
        "generators": rel.num_generators(),
        "operators": rows,
        "skipped": skipped,
    }))
}

fn poly_string(coeffs: &[Value]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .rev()
        .filter_map(|(k, c)| {
            let q: Rational = parse_rational(c.as_str()?).ok()?;
            if q == Rational::from_integer(0.into()) {
                return None;
            }
            let q = if q.is_integer() {
                q.to_integer().to_string()
            } else {
                q.to_string()
            };
            let x = if k == 1 {
                "x".to_string()
            } else {
                format!("x^{k}")
            };
            Some(match (k, q.as_str()) {
                (0, _) => q,
                (_, "1") => x,
                (_, "-1") => format!("-{x}"),
                _ => format!("{q}*{x}"),
            })
        })
        .collect();
    terms.join(" + ").replace("+ -", "- ")
}

fn frac_str(v: &Value) -> String {
    let s = v.as_str().unwrap_or_default();
    s.strip_suffix("/1").unwrap_or(s).to_string()
}

fn print_human(cmd: &Command, out: &Value) {
    match cmd {
        Command::Classify(_) => {
            println!(
                "{}: {} facet class(es)",
                out["space"].as_str().unwrap_or(""),
                out["classes"]
            );
            println!(
                "{:>5} {:>5} {:>7} {:>14}  moves",
                "class", "|Z|", "ridges", "f-vector"
            );
            for r in out["reps"].as_array().into_iter().flatten() {
                let fv = &r["f_vector"];
                println!(
                    "{:>5} {:>5} {:>7} {:>14}  {}",
                    r["index"].to_string(),
                    r["minimal_vectors"].to_string(),
                    r["ridges"].to_string(),
                    format!("({},{},{})", fv[0], fv[1], fv[2]),
                    r["moves"]
                );
            }
        }
        Command::ReducePoint { .. } => {
            println!("facet class {}", out["facet_class"]);
            println!("mu = {}", frac_str(&out["mu"]));
            let seq: Vec<String> = out["mu_sequence"]
                .as_array()
                .into_iter()
                .flatten()
                .map(frac_str)
                .collect();
            println!("mu sequence: {}", seq.join(" > "));
            println!("face: {}", out["face"]);
        }
        Command::ReduceSymbol { .. } => {
            let terms: Vec<String> = out["chain"]
                .as_array()
                .into_iter()
                .flatten()
                .map(|t| format!("[{}, {}]", t["u"], t["v"]))
                .collect();
            println!(
                "[{}, {}] = {}",
                out["u"],
                out["v"],
                if terms.is_empty() {
                    "0".into()
                } else {
                    terms.join(" + ")
                }
            );
        }
        Command::Hecke { .. } => {
            println!(
                "{} level {}: dimension {}",
                out["space"].as_str().unwrap_or(""),
                out["level"],
                out["dimension"]
            );
            for s in out["skipped"].as_array().into_iter().flatten() {
                println!(
                    "p = {}: skipped ({})",
                    s["p"],
                    s["reason"].as_str().unwrap_or("")
                );
            }
            for r in out["operators"].as_array().into_iter().flatten() {
                let eig: Vec<String> = r["eigenvalues"]
                    .as_array()
                    .into_iter()
                    .flatten()
                    .map(|e| format!("{} (x{})", frac_str(&e["value"]), e["multiplicity"]))
                    .collect();
                let cp = poly_string(r["charpoly"].as_array().map(Vec::as_slice).unwrap_or(&[]));
                println!(
                    "p = {:>3}  cosets {:>3}  charpoly {}  eigenvalues {}",
                    r["p"].to_string(),
                    r["cosets"].to_string(),
                    cp,
                    eig.join(", ")
                );
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, result) = match &cli.command {
        Command::Classify(c) => (c, cmd_classify(c)),
        Command::ReducePoint { common, point } => (common, cmd_reduce_point(common, point)),
        Command::ReduceSymbol {
            common,
            u,
            v,
            random_tie_break,
        } => (common, cmd_reduce_symbol(common, u, v, *random_tie_break)),
        Command::Hecke {
            common,
            level,
            primes,
        } => (common, cmd_hecke(common, *level, primes)),
    };
    match result {
        Ok(out) => {
            if common.json {
                println!("{}", serde_json::to_string_pretty(&out).expect("json"));
            } else {
                print_human(&cli.command, &out);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = exit_code(&e);
            if common.json {
                let err =
                    json!({ "error": error_kind(&e), "message": e.to_string(), "exit_code": code });
                eprintln!("{err}");
            } else if e.to_string().starts_with(error_kind(&e)) {
                eprintln!("{e}");
            } else {
                eprintln!("{}: {e}", error_kind(&e));
            }
            ExitCode::from(code)
        }
    }
}
