//! Many-to-one remote information concentration.
//!
//! The clone state on `1…N, A_1…A_{N−1}` meets a channel on
//! `A'_1, 1', …, A'_N, N'`. Bob_s measures `(s, s')`, Charlie_s measures
//! `(A'_s, A_s)`, and Bob_N measures `(N, A'_N)` last. Diana adds up the
//! announced outcomes and applies `R^{x,y}` to `N'`.

use rand::Rng;
use serde::Serialize;

use super::engine::{all_leaves, sample_leaf, Coverage, Leaf, Mode};
use super::registry::PartyRegistry;
use super::transcript::{message_bits, Correction, LegCorrection, Message, Transcript};
use crate::channels::{channel_labels, clone_labels, ChannelResource};
use crate::error::{Error, Result};
use crate::opsbasis::{bell_state, modd, omega_pow, WeylOp};
use crate::statealg::{guard_pure, inner, PureState};
use crate::C64;

/// One party's Bell measurement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasurementStep {
    pub party: String,
    pub pair: (String, String),
}

impl MeasurementStep {
    fn new(party: String, a: String, b: String) -> Self {
        Self { party, pair: (a, b) }
    }
}

/// Bob_1…Bob_{N−1}, Charlie_1…Charlie_{N−1}, then Bob_N.
pub fn ric_plan(n_parties: usize) -> Vec<MeasurementStep> {
    let mut plan: Vec<MeasurementStep> = (1..n_parties)
        .map(|s| MeasurementStep::new(format!("Bob_{s}"), s.to_string(), format!("{s}'")))
        .collect();
    plan.extend((1..n_parties).map(|s| MeasurementStep::new(format!("Charlie_{s}"), format!("A'_{s}"), format!("A_{s}"))));
    plan.push(MeasurementStep::new(format!("Bob_{n_parties}"), n_parties.to_string(), format!("A'_{n_parties}")));
    plan
}

/// `(x, y) = (u'' + u' − u, v'' + v' − v) mod d`, with `u'`, `v'` the sums of
/// the Bob/Charlie outcome components and `(u'', v'')` Bob_N's outcome.
pub fn deduce_correction(outcomes: &[(usize, usize)], bob_n: (usize, usize), u: usize, v: usize, d: usize) -> Result<(usize, usize)> {
    let check = |what: &'static str, value: usize| {
        if value >= d {
            Err(Error::IndexOutOfRange { what, value, d })
        } else {
            Ok(())
        }
    };
    for &(m, n) in outcomes {
        check("outcome m", m)?;
        check("outcome n", n)?;
    }
    check("u''", bob_n.0)?;
    check("v''", bob_n.1)?;
    check("u", u)?;
    check("v", v)?;
    let up: usize = outcomes.iter().map(|o| o.0).sum();
    let vp: usize = outcomes.iter().map(|o| o.1).sum();
    Ok((
        modd((bob_n.0 + up) as i64 - u as i64, d),
        modd((bob_n.1 + vp) as i64 - v as i64, d),
    ))
}

#[derive(Debug, Clone)]
pub struct RicBranch {
    pub transcript: Transcript,
    /// Diana's corrected qudit.
    pub output: PureState,
}

#[derive(Debug, Clone)]
pub struct RicRun {
    pub branches: Vec<RicBranch>,
    pub coverage: Coverage,
}

impl RicRun {
    pub fn min_fidelity(&self) -> f64 {
        self.branches.iter().map(|b| b.transcript.fidelity).fold(f64::INFINITY, f64::min)
    }

    /// Sum of branch probabilities (1 for an exhaustive run).
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.transcript.branch_probability).sum()
    }
}

/// Runs RIC with the fixed measurement order. `reference` is the original
/// one-qudit state used for fidelities.
pub fn run_ric<R: Rng + ?Sized>(clone: &PureState, reference: &PureState, channel: &ChannelResource, mode: Mode, rng: &mut R) -> Result<RicRun> {
    let n = clone.register().len().div_ceil(2);
    run_ric_with_plan(clone, reference, channel, &ric_plan(n), mode, rng)
}

/// Runs RIC with an explicit measurement order over the same pairs.
pub fn run_ric_with_plan<R: Rng + ?Sized>(clone: &PureState, reference: &PureState, channel: &ChannelResource, plan: &[MeasurementStep], mode: Mode, rng: &mut R) -> Result<RicRun> {
    let d = clone.d();
    let len = clone.register().len();
    if len < 3 || len.is_multiple_of(2) {
        return Err(Error::RegisterMismatch(format!("clone state has {len} qudits, expected 2N−1")));
    }
    let n = len.div_ceil(2);
    if clone.labels() != clone_labels(n).as_slice() {
        return Err(Error::RegisterMismatch(format!("clone labels {:?}", clone.labels())));
    }
    if reference.register().len() != 1 || reference.d() != d {
        return Err(Error::RegisterMismatch("reference must be one qudit of the clone dimension".into()));
    }
    if channel.d() != d {
        return Err(Error::DimensionMismatch(channel.d(), d));
    }
    guard_pure("RIC run", d, 4 * n - 1)?;
    let registry = PartyRegistry::ric(n);
    check_plan(plan, &ric_plan(n))?;
    let (u, v) = channel.residues();
    let diana = format!("{n}'");
    let pairs: Vec<(String, String)> = plan.iter().map(|s| s.pair.clone()).collect();

    let finish = |leaf: Leaf, weight: f64, tuple: Option<Vec<usize>>| -> Result<RicBranch> {
        let mut others = Vec::with_capacity(plan.len() - 1);
        let mut bob_n = (0, 0);
        let mut messages = Vec::with_capacity(plan.len());
        for (step, &(m, nn)) in plan.iter().zip(&leaf.outcomes) {
            if step.party == format!("Bob_{n}") {
                bob_n = (m, nn);
            } else {
                others.push((m, nn));
            }
            messages.push(Message { from: step.party.clone(), to: "Diana".into(), m, n: nn, bits: message_bits(d) });
        }
        let (x, y) = deduce_correction(&others, bob_n, u, v, d)?;
        let out = leaf.state.apply_local(&WeylOp::r(d, x, y)?.matrix(), &diana)?;
        let fidelity = inner(reference.amps(), out.amps()).norm_sqr();
        let transcript = Transcript {
            parties: registry.clone(),
            messages,
            correction: Correction { x, y, legs: vec![LegCorrection { target: diana.clone(), x, y }] },
            branch_probability: leaf.probability * weight,
            fidelity,
            channel_tuple: tuple,
        };
        Ok(RicBranch { transcript, output: out })
    };

    let mut branches = Vec::new();
    let coverage = match (channel, mode) {
        (ChannelResource::Pure { state, .. }, Mode::AllBranches { budget }) => {
            let joint = clone.tensor(state)?;
            let (leaves, cov) = all_leaves(&joint, &pairs, budget, rng)?;
            for leaf in leaves {
                branches.push(finish(leaf, 1.0, None)?);
            }
            cov
        }
        (ChannelResource::Pure { state, .. }, Mode::Sample { trials }) => {
            let joint = clone.tensor(state)?;
            for _ in 0..trials {
                branches.push(finish(sample_leaf(&joint, &pairs, rng)?, 1.0, None)?);
            }
            Coverage { exhaustive: false, visited: trials, total: super::engine::tree_size(d, pairs.len()) }
        }
        (ChannelResource::Mixed(mix), Mode::AllBranches { budget }) => {
            let mut visited = 0;
            let mut exhaustive = true;
            for (k, w) in mix.terms() {
                if *w == 0.0 {
                    continue;
                }
                let state = crate::channels::product_bell_channel(d, n, u, v, k)?;
                let joint = clone.tensor(&state)?;
                let (leaves, cov) = all_leaves(&joint, &pairs, budget, rng)?;
                visited += cov.visited;
                exhaustive &= cov.exhaustive;
                for leaf in leaves {
                    branches.push(finish(leaf, *w, Some(k.clone()))?);
                }
            }
            let total = super::engine::tree_size(d, pairs.len()) * mix.terms().len() as u128;
            Coverage { exhaustive, visited, total }
        }
        (ChannelResource::Mixed(mix), Mode::Sample { trials }) => {
            for _ in 0..trials {
                let (k, state) = mix.sample(rng)?;
                let joint = clone.tensor(&state)?;
                let leaf = sample_leaf(&joint, &pairs, rng)?;
                branches.push(finish(leaf, 1.0, Some(k))?);
            }
            let total = super::engine::tree_size(d, pairs.len()) * mix.terms().len() as u128;
            Coverage { exhaustive: false, visited: trials, total }
        }
    };
    Ok(RicRun { branches, coverage })
}

fn check_plan(plan: &[MeasurementStep], reference: &[MeasurementStep]) -> Result<()> {
    let mut a: Vec<_> = plan.iter().map(|s| (&s.party, &s.pair)).collect();
    let mut b: Vec<_> = reference.iter().map(|s| (&s.party, &s.pair)).collect();
    a.sort();
    b.sort();
    if a != b {
        return Err(Error::InvalidArgument("measurement plan must contain exactly the RIC measurements".into()));
    }
    Ok(())
}

/// Checks the single-qudit teleportation step behind the correction rule:
/// `U^{−m,n}|φ⟩_N |B^{k,k'}⟩_{A'N'}` equals
/// `(1/d) Σ_{x,y} ω^{−n(x+k−m) + (y−k')k} |B^{x+k−m, y−k'−n}⟩_{N A'} U^{−x,y}|φ⟩_{N'}`.
/// Returns the max amplitude deviation.
pub fn teleportation_identity_check(x_amps: &[C64], m: usize, n: usize, k: usize, kp: usize) -> Result<f64> {
    let d = x_amps.len();
    let (mi, ni, ki, kpi) = (m as i64, n as i64, k as i64, kp as i64);
    let phi = PureState::qudit(d, "N", x_amps)?;
    let lhs = phi
        .apply_local(&WeylOp::u_signed(d, -mi, ni).matrix(), "N")?
        .tensor(&bell_state(d, k, kp, ("A'", "N'"))?)?;
    let phi_out = phi.relabel(&[("N", "N'")])?;
    let mut rhs = vec![C64::new(0.0, 0.0); lhs.amps().len()];
    for x in 0..d as i64 {
        for y in 0..d as i64 {
            let w = omega_pow(d, -ni * (x + ki - mi) + (y - kpi) * ki) / d as f64;
            let b = bell_state(d, modd(x + ki - mi, d), modd(y - kpi - ni, d), ("N", "A'"))?;
            let tail = phi_out.apply_local(&WeylOp::u_signed(d, -x, y).matrix(), "N'")?;
            let term = b.tensor(&tail)?;
            for (r, t) in rhs.iter_mut().zip(term.amps()) {
                *r += w * t;
            }
        }
    }
    Ok(lhs.amps().iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
}

/// Every label of the joint RIC register, clone part first.
pub fn joint_labels(n_parties: usize) -> Vec<String> {
    let mut l = clone_labels(n_parties);
    l.extend(channel_labels(n_parties));
    l
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{ghz_channel, product_bell_channel, ChannelSpec};
    use crate::protocols::decomposition::clone_state;
    use crate::statealg::Register;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn input(d: usize, seed: u64) -> PureState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PureState::random(Register::new(d, ["phi"]).unwrap(), &mut rng).unwrap()
    }

    #[test]
    fn correction_arithmetic() {
        assert_eq!(deduce_correction(&[(0, 0), (0, 0)], (0, 0), 0, 0, 2).unwrap(), (0, 0));
        assert_eq!(deduce_correction(&[(2, 0), (0, 1)], (1, 2), 0, 0, 3).unwrap(), (0, 0));
        assert_eq!(deduce_correction(&[(1, 1)], (1, 0), 1, 0, 3).unwrap(), (1, 1));
        assert!(deduce_correction(&[(3, 0)], (0, 0), 0, 0, 3).is_err());
    }

    #[test]
    fn ghz_channel_all_branches_d2() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let phi = input(2, 1);
        let clone = clone_state(phi.amps(), 2).unwrap();
        let ch = ChannelResource::Pure { state: ghz_channel(2, 2).unwrap(), u: 0, v: 0 };
        let run = run_ric(&clone, &phi, &ch, Mode::all(), &mut rng).unwrap();
        assert!(run.coverage.exhaustive);
        assert_eq!(run.coverage.total, 64);
        assert!((run.total_probability() - 1.0).abs() < 1e-10);
        assert!((run.min_fidelity() - 1.0).abs() < 1e-9);
        for b in &run.branches {
            assert_eq!(b.transcript.messages.len(), 3);
            assert!((b.transcript.total_bits() - 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn alternate_order_gives_the_same_branch_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let phi = input(3, 3);
        let clone = clone_state(phi.amps(), 2).unwrap();
        let ch = ChannelResource::Pure { state: ghz_channel(3, 2).unwrap(), u: 0, v: 0 };
        let fixed = run_ric(&clone, &phi, &ch, Mode::all(), &mut rng).unwrap();
        let mut plan = ric_plan(2);
        plan.reverse();
        let alt = run_ric_with_plan(&clone, &phi, &ch, &plan, Mode::all(), &mut rng).unwrap();
        assert!((alt.min_fidelity() - 1.0).abs() < 1e-9);
        let key = |r: &RicRun| {
            let mut v: Vec<(Vec<_>, i64)> = r
                .branches
                .iter()
                .map(|b| {
                    let mut msgs: Vec<_> = b.transcript.messages.iter().map(|m| (m.from.clone(), m.m, m.n)).collect();
                    msgs.sort();
                    (msgs, (b.transcript.branch_probability * 1e12).round() as i64)
                })
                .collect();
            v.sort();
            v
        };
        assert_eq!(key(&fixed), key(&alt));
    }

    #[test]
    fn correction_rule_succeeds_exactly_when_last_shift_is_self_inverse() {
        // The announced-outcome rule recovers φ on every branch iff 2·k_{2N} ≡ 0 (mod d).
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let phi = input(3, 5);
        let clone = clone_state(phi.amps(), 2).unwrap();
        for c in crate::channels::enumerate_constrained_tuples(3, 2, 0, 0) {
            let ch = ChannelResource::Pure { state: product_bell_channel(3, 2, 0, 0, &c).unwrap(), u: 0, v: 0 };
            let run = run_ric(&clone, &phi, &ch, Mode::all(), &mut rng).unwrap();
            let ok = (run.min_fidelity() - 1.0).abs() < 1e-9;
            assert_eq!(ok, (2 * c[3]) % 3 == 0, "tuple {c:?}");
        }
        for c in crate::channels::enumerate_constrained_tuples(2, 2, 0, 0) {
            let phi2 = input(2, 6);
            let clone2 = clone_state(phi2.amps(), 2).unwrap();
            let ch = ChannelResource::Pure { state: product_bell_channel(2, 2, 0, 0, &c).unwrap(), u: 0, v: 0 };
            let run = run_ric(&clone2, &phi2, &ch, Mode::all(), &mut rng).unwrap();
            assert!((run.min_fidelity() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn nonzero_residues_d2() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let phi = input(2, 9);
        let clone = clone_state(phi.amps(), 2).unwrap();
        for (u, v) in [(1, 0), (0, 1), (1, 1)] {
            for c in crate::channels::enumerate_constrained_tuples(2, 2, u, v) {
                let ch = ChannelResource::Pure { state: product_bell_channel(2, 2, u, v, &c).unwrap(), u, v };
                let run = run_ric(&clone, &phi, &ch, Mode::all(), &mut rng).unwrap();
                assert!((run.min_fidelity() - 1.0).abs() < 1e-9, "u={u} v={v} c={c:?}");
            }
        }
    }

    #[test]
    fn mixed_channel_sampled_d2() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let phi = input(2, 11);
        let clone = clone_state(phi.amps(), 2).unwrap();
        let ch = ChannelSpec::preset("smolin", 2, 2).unwrap().build().unwrap();
        let run = run_ric(&clone, &phi, &ch, Mode::Sample { trials: 50 }, &mut rng).unwrap();
        assert_eq!(run.branches.len(), 50);
        assert!((run.min_fidelity() - 1.0).abs() < 1e-9);
        assert!(run.branches.iter().all(|b| b.transcript.channel_tuple.is_some()));
    }

    #[test]
    fn teleportation_identity_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for d in [2, 3] {
            let x = PureState::random(Register::new(d, ["q"]).unwrap(), &mut rng).unwrap().into_amps();
            for i in 0..d.pow(4) {
                let (m, n, k, kp) = (i / d.pow(3), (i / d / d) % d, (i / d) % d, i % d);
                assert!(teleportation_identity_check(&x, m, n, k, kp).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn register_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let phi = input(2, 14);
        let ch = ChannelResource::Pure { state: ghz_channel(2, 2).unwrap(), u: 0, v: 0 };
        assert!(run_ric(&phi, &phi, &ch, Mode::all(), &mut rng).is_err());
        let clone3 = clone_state(input(3, 1).amps(), 2).unwrap();
        assert!(run_ric(&clone3, &input(3, 1), &ch, Mode::all(), &mut rng).is_err());
    }
}
