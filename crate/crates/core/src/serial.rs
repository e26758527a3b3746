//! Atlas persistence. Rationals are written as `"num/den"` strings; loading
//! rebuilds every facet from its form and re-verifies the whole atlas, so a
//! cache file is trusted only as far as it checks out.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cone::{ConeSpace, KElem, KMatrix};
use crate::error::{Error, Result};
use crate::linalg::{fmt_rational, parse_rational, QVector};
use crate::voronoi::{Atlas, Move, PerfectForm};

const FORMAT: u32 = 1;

#[derive(Serialize, Deserialize)]
struct AtlasFile {
    format: u32,
    space: String,
    reps: Vec<RepFile>,
}

#[derive(Serialize, Deserialize)]
struct RepFile {
    y: Vec<String>,
    /// Canonical generators of the minimal vectors, for reading only; checked on load.
    z: Vec<Vec<String>>,
    moves: Vec<MoveFile>,
}

#[derive(Serialize, Deserialize)]
struct MoveFile {
    target: usize,
    /// Entries as `[a, b]` for `a + b omega`.
    gamma: Vec<Vec<[String; 2]>>,
    neighbor_y: Vec<String>,
}

fn vec_out(v: &QVector) -> Vec<String> {
    v.iter().map(fmt_rational).collect()
}

fn vec_in(v: &[String]) -> Result<QVector> {
    Ok(QVector::new(
        v.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?,
    ))
}

fn mat_out(m: &KMatrix) -> Vec<Vec<[String; 2]>> {
    m.iter()
        .map(|r| {
            r.iter()
                .map(|x| [fmt_rational(&x.a), fmt_rational(&x.b)])
                .collect()
        })
        .collect()
}

fn mat_in(m: &[Vec<[String; 2]>]) -> Result<KMatrix> {
    m.iter()
        .map(|r| {
            r.iter()
                .map(|[a, b]| Ok(KElem::new(parse_rational(a)?, parse_rational(b)?)))
                .collect()
        })
        .collect()
}

pub fn atlas_to_json(atlas: &Atlas) -> String {
    let file = AtlasFile {
        format: FORMAT,
        space: atlas.space.descriptor(),
        reps: atlas
            .reps
            .iter()
            .zip(&atlas.moves)
            .map(|(f, row)| RepFile {
                y: vec_out(&f.y),
                z: f.z
                    .iter()
                    .map(|c| c.generator().iter().map(|x| x.to_string()).collect())
                    .collect(),
                moves: row
                    .iter()
                    .map(|m| MoveFile {
                        target: m.target,
                        gamma: mat_out(m.gamma.mat()),
                        neighbor_y: vec_out(&m.neighbor_y),
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("plain data serializes");
    s.push('\n');
    s
}

/// Parses and fully re-verifies an atlas.
pub fn atlas_from_json(text: &str) -> Result<Atlas> {
    let file: AtlasFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("atlas file: {e}")))?;
    if file.format != FORMAT {
        return Err(Error::Parse(format!(
            "unknown atlas format {}",
            file.format
        )));
    }
    let space = ConeSpace::parse(&file.space)?;
    let mut reps = Vec::with_capacity(file.reps.len());
    let mut moves = Vec::with_capacity(file.reps.len());
    for (i, r) in file.reps.iter().enumerate() {
        let f = PerfectForm::from_form(&space, &vec_in(&r.y)?)?;
        let z: Vec<Vec<String>> =
            f.z.iter()
                .map(|c| c.generator().iter().map(|x| x.to_string()).collect())
                .collect();
        if z != r.z {
            return Err(Error::Verification(format!(
                "rep {i}: stored minimal vectors do not match the form"
            )));
        }
        let row = r
            .moves
            .iter()
            .map(|m| {
                Ok(Move {
                    target: m.target,
                    gamma: space.group_element(mat_in(&m.gamma)?)?,
                    neighbor_y: vec_in(&m.neighbor_y)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        reps.push(f);
        moves.push(row);
    }
    let atlas = Atlas { space, reps, moves };
    atlas.verify()?;
    Ok(atlas)
}

/// `<dir>/atlas-<kind>-<param>.json`.
pub fn cache_path(dir: &Path, space: &ConeSpace) -> PathBuf {
    dir.join(format!(
        "atlas-{}.json",
        space.descriptor().replace(':', "-")
    ))
}

pub fn save_atlas(atlas: &Atlas, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::Io(e.to_string()))?;
    }
    fs::write(path, atlas_to_json(atlas)).map_err(|e| Error::Io(e.to_string()))
}

pub fn load_atlas(path: &Path) -> Result<Atlas> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
    atlas_from_json(&text)
}
