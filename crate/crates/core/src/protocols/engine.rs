use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measurement::{gbm_branches, gbm_sample, Post};
use crate::statealg::PureState;

/// Largest outcome tree enumerated exhaustively.
pub const BRANCH_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Born-rule sampling, one branch per trial.
    Sample { trials: usize },
    /// Every branch when the tree has at most [`BRANCH_LIMIT`] leaves,
    /// otherwise stratified sampling with `budget` leaves.
    AllBranches { budget: usize },
}

impl Mode {
    pub fn all() -> Self {
        Mode::AllBranches { budget: 200 }
    }
}

/// How much of the outcome tree a run touched.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coverage {
    pub exhaustive: bool,
    pub visited: usize,
    pub total: u128,
}

/// A fully measured branch.
#[derive(Debug, Clone)]
pub struct Leaf {
    pub outcomes: Vec<(usize, usize)>,
    pub probability: f64,
    pub state: PureState,
}

pub(crate) fn tree_size(d: usize, steps: usize) -> u128 {
    (d as u128 * d as u128).saturating_pow(steps as u32)
}

fn walk(state: &PureState, pairs: &[(String, String)], prefix: &mut Vec<(usize, usize)>, prob: f64, out: &mut Vec<Leaf>) -> Result<()> {
    let Some((head, rest)) = pairs.split_first() else {
        out.push(Leaf { outcomes: prefix.clone(), probability: prob, state: state.clone() });
        return Ok(());
    };
    for b in gbm_branches(state, (&head.0, &head.1), Post::Remove)? {
        let Some(post) = b.post_state else { continue };
        prefix.push((b.outcome.m, b.outcome.n));
        walk(&post, rest, prefix, prob * b.outcome.probability, out)?;
        prefix.pop();
    }
    Ok(())
}

fn sample_from<R: Rng + ?Sized>(state: &PureState, pairs: &[(String, String)], mut prefix: Vec<(usize, usize)>, mut prob: f64, rng: &mut R) -> Result<Leaf> {
    let mut cur = state.clone();
    for (a, b) in pairs {
        let br = gbm_sample(&cur, (a, b), Post::Remove, rng)?;
        prefix.push((br.outcome.m, br.outcome.n));
        prob *= br.outcome.probability;
        cur = br.post_state.expect("sampled branch has a state");
    }
    Ok(Leaf { outcomes: prefix, probability: prob, state: cur })
}

/// Measures `pairs` in order, removing each measured pair.
pub(crate) fn sample_leaf<R: Rng + ?Sized>(state: &PureState, pairs: &[(String, String)], rng: &mut R) -> Result<Leaf> {
    sample_from(state, pairs, Vec::new(), 1.0, rng)
}

/// Every branch of measuring `pairs`, or a stratified sample when too large.
///
/// Strata are the outcomes of the first measurement; each receives an equal
/// share of `budget` Born-rule samples of the remaining measurements.
pub(crate) fn all_leaves<R: Rng + ?Sized>(state: &PureState, pairs: &[(String, String)], budget: usize, rng: &mut R) -> Result<(Vec<Leaf>, Coverage)> {
    let total = tree_size(state.d(), pairs.len());
    if total <= BRANCH_LIMIT as u128 {
        let mut out = Vec::new();
        walk(state, pairs, &mut Vec::new(), 1.0, &mut out)?;
        let visited = out.len();
        return Ok((out, Coverage { exhaustive: true, visited, total }));
    }
    let (head, rest) = pairs.split_first().ok_or_else(|| Error::InvalidArgument("no measurements".into()))?;
    let strata: Vec<_> = gbm_branches(state, (&head.0, &head.1), Post::Remove)?
        .into_iter()
        .filter(|b| b.post_state.is_some())
        .collect();
    let per = budget.div_ceil(strata.len()).max(1);
    let mut out = Vec::with_capacity(per * strata.len());
    let mut seen = std::collections::HashSet::new();
    for b in &strata {
        let post = b.post_state.as_ref().expect("filtered");
        for _ in 0..per {
            let leaf = sample_from(post, rest, vec![(b.outcome.m, b.outcome.n)], b.outcome.probability, rng)?;
            seen.insert(leaf.outcomes.clone());
            out.push(leaf);
        }
    }
    log::info!("outcome tree has {total} leaves; stratified sample of {} ({} distinct)", out.len(), seen.len());
    Ok((out, Coverage { exhaustive: false, visited: seen.len(), total }))
}
