use rayon::prelude::*;

use super::{forms_equivalent, neighbor_across_ridge, NeighborStep, PerfectForm};
use crate::cone::{ConeSpace, GroupElement};
use crate::error::{Error, Result};
use crate::linalg::QVector;

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    /// Doublings allowed when searching for a seed beyond a ridge.
    pub max_norm: u64,
    /// Give up once more than this many classes have been found.
    pub max_reps: usize,
    pub parallel: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            max_norm: 64,
            max_reps: 64,
            parallel: true,
        }
    }
}

/// Leaving `reps[from]` across ridge `r` lands on the facet with form
/// `neighbor_y`; `gamma` carries that facet onto `reps[target]`.
#[derive(Clone, Debug)]
pub struct Move {
    pub target: usize,
    pub gamma: GroupElement,
    pub neighbor_y: QVector,
}

#[derive(Clone, Debug)]
pub struct Atlas {
    pub space: ConeSpace,
    pub reps: Vec<PerfectForm>,
    /// `moves[i][r]` for ridge `r` of `reps[i]`.
    pub moves: Vec<Vec<Move>>,
}

pub fn classify(space: &ConeSpace, seed: PerfectForm, opts: &ClassifyOptions) -> Result<Atlas> {
    let mut reps = vec![seed];
    let mut moves: Vec<Vec<Move>> = Vec::new();
    let mut i = 0;
    while i < reps.len() {
        let f = reps[i].clone();
        let step = |r: usize| neighbor_across_ridge(space, &f, r, opts.max_norm);
        let steps: Vec<Result<NeighborStep>> = if opts.parallel {
            (0..f.ridges.len()).into_par_iter().map(step).collect()
        } else {
            (0..f.ridges.len()).map(step).collect()
        };
        let mut row = Vec::with_capacity(steps.len());
        for s in steps {
            let s = s?;
            let found = reps
                .iter()
                .enumerate()
                .find_map(|(t, rep)| forms_equivalent(space, rep, &s.form).map(|g| (t, g)));
            let (target, gamma) = match found {
                Some(hit) => hit,
                None => {
                    if reps.len() >= opts.max_reps {
                        return Err(Error::ResourceGuard(format!(
                            "more than {} facet classes",
                            opts.max_reps
                        )));
                    }
                    reps.push(s.form.clone());
                    (reps.len() - 1, GroupElement::identity(space))
                }
            };
            row.push(Move {
                target,
                gamma,
                neighbor_y: s.form.y,
            });
        }
        moves.push(row);
        i += 1;
    }
    Ok(Atlas {
        space: space.clone(),
        reps,
        moves,
    })
}

impl Atlas {
    pub fn num_reps(&self) -> usize {
        self.reps.len()
    }

    /// Re-verifies every rep and every move: `gamma^* y_target` must equal
    /// the stored neighbor form, which must share the ridge with its source.
    pub fn verify(&self) -> Result<()> {
        let s = &self.space;
        if self.moves.len() != self.reps.len() {
            return Err(Error::Verification("move table does not match reps".into()));
        }
        for (i, f) in self.reps.iter().enumerate() {
            f.verify(s)?;
            if self.moves[i].len() != f.ridges.len() {
                return Err(Error::Verification(format!(
                    "rep {i} has a ridge without a move"
                )));
            }
            for (r, mv) in self.moves[i].iter().enumerate() {
                let target = self
                    .reps
                    .get(mv.target)
                    .ok_or_else(|| Error::Verification("bad target".into()))?;
                if s.act_form(&mv.gamma, &target.y)? != mv.neighbor_y {
                    return Err(Error::Verification(format!(
                        "move ({i}, {r}) does not transport the neighbor"
                    )));
                }
                let ridge_ok = f
                    .ridge_cusps(r)
                    .iter()
                    .all(|c| s.pair(c.embed(), &mv.neighbor_y) == crate::linalg::rat(1));
                let beyond = s.pair(&f.ridges[r].normal, &mv.neighbor_y)
                    != s.pair(&f.ridges[r].normal, &f.y);
                if !ridge_ok || !beyond {
                    return Err(Error::Verification(format!(
                        "move ({i}, {r}) does not cross its ridge"
                    )));
                }
            }
        }
        Ok(())
    }
}
