//! Projective generalized Bell-basis measurement (GBM) on a labeled pair.
//!
//! Outcomes are listed row-major in `(m, n)`. Branches whose probability is
//! below [`ZERO_PROBABILITY`] carry no post-measurement state.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::opsbasis::{bell_state, modd, omega_pow};
use crate::statealg::{DensityOperator, PureState, Register};
use crate::{Matrix, C64};

pub const ZERO_PROBABILITY: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GbmOutcome {
    pub m: usize,
    pub n: usize,
    pub probability: f64,
    pub pair: (String, String),
}

/// What happens to the measured pair afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Post {
    /// Keep the pair, collapsed onto the observed Bell state.
    #[default]
    Retain,
    /// Drop the pair from the register.
    Remove,
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub outcome: GbmOutcome,
    pub post_state: Option<PureState>,
}

/// Pair moved to the front, the rest of the register, and `d^{rest}`.
fn front_pair(state: &PureState, pair: (&str, &str)) -> Result<(PureState, Register, usize)> {
    if pair.0 == pair.1 {
        return Err(Error::InvalidArgument(format!("GBM pair repeats `{}`", pair.0)));
    }
    let reg = state.register();
    reg.position(pair.0)?;
    reg.position(pair.1)?;
    let rest_labels = reg.complement(&[pair.0, pair.1]);
    let mut order = vec![pair.0.to_string(), pair.1.to_string()];
    order.extend(rest_labels.iter().cloned());
    let ordered = state.reorder(&order)?;
    let rest = if rest_labels.is_empty() { None } else { Some(reg.select(&rest_labels)?) };
    let rest_dim = reg.dim() / (reg.d() * reg.d());
    Ok((ordered, rest.unwrap_or_else(|| reg.clone()), rest_dim))
}

/// Unnormalized `⟨B^{m,n}|_{pair} ψ⟩` over the remaining qudits.
fn contract(ordered: &[C64], d: usize, rest_dim: usize, m: usize, n: usize) -> Vec<C64> {
    let norm = 1.0 / (d as f64).sqrt();
    let mut out = vec![C64::new(0.0, 0.0); rest_dim];
    for j in 0..d {
        let w = omega_pow(d, -((j * m) as i64)) * norm;
        let base = (j * d + (j + n) % d) * rest_dim;
        for (o, a) in out.iter_mut().zip(&ordered[base..base + rest_dim]) {
            *o += w * a;
        }
    }
    out
}

fn finish(state: &PureState, pair: (&str, &str), rest: &Register, m: usize, n: usize, amps: Vec<C64>, post: Post) -> Result<Branch> {
    let probability: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    let outcome = GbmOutcome { m, n, probability, pair: (pair.0.to_string(), pair.1.to_string()) };
    if probability < ZERO_PROBABILITY {
        return Ok(Branch { outcome, post_state: None });
    }
    let scale = 1.0 / probability.sqrt();
    let whole_pair = state.register().len() == 2;
    let post_state = match post {
        Post::Remove if whole_pair => {
            return Err(Error::InvalidArgument("removing the measured pair would empty the register".into()))
        }
        Post::Remove => PureState::normalized(rest.clone(), amps.into_iter().map(|z| z * scale).collect())?,
        Post::Retain => {
            let b = bell_state(state.d(), m, n, pair)?;
            if whole_pair {
                b.reorder(state.labels())?
            } else {
                let rest_state = PureState::normalized(rest.clone(), amps.into_iter().map(|z| z * scale).collect())?;
                b.tensor(&rest_state)?.reorder(state.labels())?
            }
        }
    };
    Ok(Branch { outcome, post_state: Some(post_state) })
}

/// All `d²` branches of a GBM on `pair`.
pub fn gbm_branches(state: &PureState, pair: (&str, &str), post: Post) -> Result<Vec<Branch>> {
    let d = state.d();
    let (ordered, rest, rest_dim) = front_pair(state, pair)?;
    let mut out = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            let amps = contract(ordered.amps(), d, rest_dim, m, n);
            out.push(finish(state, pair, &rest, m, n, amps, post)?);
        }
    }
    Ok(out)
}

/// The single branch `(m, n)`.
pub fn project_bell(state: &PureState, pair: (&str, &str), m: usize, n: usize, post: Post) -> Result<Branch> {
    let d = state.d();
    if m >= d || n >= d {
        return Err(Error::IndexOutOfRange { what: "Bell index", value: m.max(n), d });
    }
    let (ordered, rest, rest_dim) = front_pair(state, pair)?;
    let amps = contract(ordered.amps(), d, rest_dim, m, n);
    finish(state, pair, &rest, m, n, amps, post)
}

/// One Born-rule draw.
pub fn gbm_sample<R: Rng + ?Sized>(state: &PureState, pair: (&str, &str), post: Post, rng: &mut R) -> Result<Branch> {
    let branches = gbm_branches(state, pair, post)?;
    let r: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = None;
    for (i, b) in branches.iter().enumerate() {
        if b.post_state.is_none() {
            continue;
        }
        acc += b.outcome.probability;
        last = Some(i);
        if r < acc {
            return Ok(branches.into_iter().nth(i).unwrap());
        }
    }
    // rounding left r above the cumulative total
    let i = last.ok_or_else(|| Error::Verification("every GBM branch has zero probability".into()))?;
    Ok(branches.into_iter().nth(i).unwrap())
}

/// Conditional state of the rest of `rho` after outcome `(m, n)` on `pair`,
/// with the outcome probability. `None` below [`ZERO_PROBABILITY`].
pub fn project_bell_density(rho: &DensityOperator, pair: (&str, &str), m: usize, n: usize) -> Result<(f64, Option<DensityOperator>)> {
    let d = rho.d();
    if pair.0 == pair.1 {
        return Err(Error::InvalidArgument(format!("GBM pair repeats `{}`", pair.0)));
    }
    let reg = rho.register();
    let rest_labels = reg.complement(&[pair.0, pair.1]);
    if rest_labels.is_empty() {
        return Err(Error::InvalidArgument("density GBM needs qudits outside the pair".into()));
    }
    let mut order = vec![pair.0.to_string(), pair.1.to_string()];
    order.extend(rest_labels.iter().cloned());
    let ordered = rho.reorder(&order)?;
    let rest_dim = reg.dim() / (d * d);
    let norm = 1.0 / (d as f64).sqrt();
    // ⟨B^{m,n}| has entries ω^{−jm}/√d at pair index (j, j+n)
    let taps: Vec<(usize, C64)> = (0..d)
        .map(|j| (j * d + (j + n) % d, omega_pow(d, -((j * m) as i64)) * norm))
        .collect();
    let mat = ordered.matrix();
    let out = Matrix::from_fn(rest_dim, rest_dim, |i, k| {
        let mut acc = C64::new(0.0, 0.0);
        for &(a, wa) in &taps {
            for &(b, wb) in &taps {
                acc += wa * wb.conj() * mat[(a * rest_dim + i, b * rest_dim + k)];
            }
        }
        acc
    });
    let p = out.trace().re;
    if p < ZERO_PROBABILITY {
        return Ok((p, None));
    }
    let rest = reg.select(&rest_labels)?;
    let cond = DensityOperator::from_matrix(rest, out * C64::new(1.0 / p, 0.0))?;
    Ok((p, Some(cond)))
}

/// Max amplitude gap between `|B^{m,n}⟩_{XY}|B^{m',n'}⟩_{X'Y'}` and
/// `(1/d) Σ ω^{m''n''} |B^{m+m'', n'+n''}⟩_{XY'} |B^{m'−m'', n−n''}⟩_{X'Y}`.
pub fn swap_identity_check(d: usize, m: usize, n: usize, mp: usize, np: usize) -> Result<f64> {
    let order = ["X", "Y", "X'", "Y'"];
    let lhs = bell_state(d, m, n, ("X", "Y"))?.tensor(&bell_state(d, mp, np, ("X'", "Y'"))?)?;
    let mut rhs = vec![C64::new(0.0, 0.0); lhs.amps().len()];
    let (mi, ni, mpi, npi) = (m as i64, n as i64, mp as i64, np as i64);
    for m2 in 0..d as i64 {
        for n2 in 0..d as i64 {
            let a = bell_state(d, modd(mi + m2, d), modd(npi + n2, d), ("X", "Y'"))?;
            let b = bell_state(d, modd(mpi - m2, d), modd(ni - n2, d), ("X'", "Y"))?;
            let term = a.tensor(&b)?.reorder(&order)?;
            let w = omega_pow(d, m2 * n2) / d as f64;
            for (r, t) in rhs.iter_mut().zip(term.amps()) {
                *r += w * t;
            }
        }
    }
    Ok(lhs.amps().iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::telecloning_channel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eigenstate_has_certain_outcome() {
        let b = bell_state(3, 1, 0, ("X", "Y")).unwrap();
        let br = gbm_branches(&b, ("X", "Y"), Post::Retain).unwrap();
        assert_eq!(br.len(), 9);
        for (i, x) in br.iter().enumerate() {
            assert_eq!((x.outcome.m, x.outcome.n), (i / 3, i % 3));
            let want = if (x.outcome.m, x.outcome.n) == (1, 0) { 1.0 } else { 0.0 };
            assert!((x.outcome.probability - want).abs() < 1e-12);
            assert_eq!(x.post_state.is_some(), want > 0.0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            let s = gbm_sample(&b, ("X", "Y"), Post::Retain, &mut rng).unwrap();
            assert_eq!((s.outcome.m, s.outcome.n), (1, 0));
        }
    }

    #[test]
    fn telecloning_outcomes_are_uniform() {
        let x = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let phi = PureState::qudit(2, "t", &x).unwrap();
        let st = phi.tensor(&telecloning_channel(2, 2).unwrap()).unwrap();
        for b in gbm_branches(&st, ("t", "t'"), Post::Remove).unwrap() {
            assert!((b.outcome.probability - 0.25).abs() < 1e-12);
            let post = b.post_state.unwrap();
            assert_eq!(post.labels(), ["1", "2", "A_1"]);
        }
    }

    #[test]
    fn completeness_and_repeatability() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let reg = Register::new(3, ["a", "b", "c", "e"]).unwrap();
        for _ in 0..5 {
            let psi = PureState::random(reg.clone(), &mut rng).unwrap();
            let br = gbm_branches(&psi, ("c", "a"), Post::Retain).unwrap();
            let total: f64 = br.iter().map(|b| b.outcome.probability).sum();
            assert!((total - 1.0).abs() < 1e-12);
            for b in br.iter().filter(|b| b.post_state.is_some()) {
                let again = gbm_branches(b.post_state.as_ref().unwrap(), ("c", "a"), Post::Retain).unwrap();
                let idx = b.outcome.m * 3 + b.outcome.n;
                assert!((again[idx].outcome.probability - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_given_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = PureState::random(Register::new(2, ["a", "b", "c"]).unwrap(), &mut rng).unwrap();
        let run = |seed| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            (0..10)
                .map(|_| {
                    let b = gbm_sample(&psi, ("a", "b"), Post::Remove, &mut r).unwrap();
                    (b.outcome.m, b.outcome.n)
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(42), run(42));
    }

    #[test]
    fn retain_and_remove_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = PureState::random(Register::new(2, ["a", "b", "c"]).unwrap(), &mut rng).unwrap();
        let kept = project_bell(&psi, ("c", "a"), 1, 1, Post::Retain).unwrap();
        let gone = project_bell(&psi, ("c", "a"), 1, 1, Post::Remove).unwrap();
        let rest = kept.post_state.unwrap().partial_trace(&["b"]).unwrap();
        let direct = crate::DensityOperator::from_pure(&gone.post_state.unwrap()).unwrap();
        assert!(rest.max_deviation(&direct).unwrap() < 1e-12);
    }

    #[test]
    fn relabel_commutes_with_measurement() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = PureState::random(Register::new(2, ["a", "b", "c"]).unwrap(), &mut rng).unwrap();
        let map = [("a", "p"), ("b", "q"), ("c", "r")];
        let first = gbm_branches(&psi, ("a", "c"), Post::Remove).unwrap();
        let second = gbm_branches(&psi.relabel(&map).unwrap(), ("p", "r"), Post::Remove).unwrap();
        for (x, y) in first.iter().zip(&second) {
            assert!((x.outcome.probability - y.outcome.probability).abs() < 1e-14);
            if let (Some(s), Some(t)) = (&x.post_state, &y.post_state) {
                assert!(s.relabel(&[("b", "q")]).unwrap().max_deviation(t).unwrap() < 1e-14);
            }
        }
    }

    #[test]
    fn density_projection_matches_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let psi = PureState::random(Register::new(2, ["a", "b", "c"]).unwrap(), &mut rng).unwrap();
        let rho = DensityOperator::from_pure(&psi).unwrap();
        for m in 0..2 {
            for n in 0..2 {
                let b = project_bell(&psi, ("a", "b"), m, n, Post::Remove).unwrap();
                let (p, cond) = project_bell_density(&rho, ("a", "b"), m, n).unwrap();
                assert!((p - b.outcome.probability).abs() < 1e-12);
                let want = DensityOperator::from_pure(&b.post_state.unwrap()).unwrap();
                assert!(cond.unwrap().max_deviation(&want).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn swap_identity_exhaustive_small_d() {
        for d in [2usize, 3] {
            for i in 0..d.pow(4) {
                let (m, n, mp, np) = (i / d.pow(3), (i / d / d) % d, (i / d) % d, i % d);
                assert!(swap_identity_check(d, m, n, mp, np).unwrap() < 1e-12);
            }
        }
        assert!(swap_identity_check(5, 0, 0, 0, 0).unwrap() < 1e-12);
        assert!(swap_identity_check(5, 3, 1, 4, 2).unwrap() < 1e-12);
    }
}
