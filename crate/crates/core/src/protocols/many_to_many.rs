//! Many-to-many concentration.
//!
//! The GHZ variant swaps the last channel pair for a GHZ state on
//! `A'_N, N'_1 … N'_L`, so Diana ends with `Σ x_j |j⟩^{⊗L}`. The
//! multi-qudit variant starts from `L` information qudits riding on a
//! `B̄`-weighted background and a product Bell channel, and Diana ends with
//! `|φ⟩^{⊗L}`.

use rand::Rng;

use super::decomposition::{bbar_covariance_deviation, CloneFamily};
use super::engine::{all_leaves, sample_leaf, tree_size, Coverage, Leaf, Mode};
use super::registry::PartyRegistry;
use super::ric::{deduce_correction, ric_plan, RicBranch, RicRun};
use super::transcript::{message_bits, Correction, LegCorrection, Message, Transcript};
use crate::channels::{channel_labels, check_tuple, clone_labels, product_bell_channel, BetaVector};
use crate::error::{Error, Result};
use crate::opsbasis::{bell_state, ghz_state, omega_pow, WeylOp};
use crate::statealg::{guard_pure, inner, PureState, Register};
use crate::{Matrix, C64};

fn leg_labels(n_parties: usize, legs: usize) -> Vec<String> {
    (1..=legs).map(|i| format!("{n_parties}'_{i}")).collect()
}

/// `Σ √P_k ⊗_{s<N} |B^{k…}⟩_{A'_s s'} ⊗ |G^{k_{2N−1},k_{2N}}⟩_{A'_N N'_1…N'_L}`.
pub fn mm_ghz_channel(d: usize, n_parties: usize, legs: usize, u: usize, v: usize, table: &[(Vec<usize>, f64)]) -> Result<PureState> {
    if legs == 0 {
        return Err(Error::InvalidArgument("L must be at least 1".into()));
    }
    let mut labels = channel_labels(n_parties);
    labels.pop();
    labels.extend(leg_labels(n_parties, legs));
    let register = Register::new(d, labels.clone())?;
    guard_pure("GHZ-extended channel", d, register.len())?;
    let total: f64 = table.iter().map(|t| t.1).sum();
    if table.is_empty() || (total - 1.0).abs() > 1e-9 {
        return Err(Error::WeightSum(total));
    }
    let mut ghz_labels = vec![format!("A'_{n_parties}")];
    ghz_labels.extend(leg_labels(n_parties, legs));
    let mut amps = vec![C64::new(0.0, 0.0); register.dim()];
    for (k, p) in table {
        if *p < 0.0 {
            return Err(Error::InvalidArgument(format!("negative weight {p} for {k:?}")));
        }
        check_tuple(d, n_parties, u, v, k)?;
        let mut term = ghz_state(d, &ghz_labels, k[2 * n_parties - 2], k[2 * n_parties - 1])?;
        for s in (1..n_parties).rev() {
            let b = bell_state(d, k[2 * s - 2], k[2 * s - 1], (&format!("A'_{s}"), &format!("{s}'")))?;
            term = b.tensor(&term)?;
        }
        let sp = p.sqrt();
        for (a, t) in amps.iter_mut().zip(term.reorder(&labels)?.amps()) {
            *a += t * sp;
        }
    }
    PureState::new(register, amps)
}

fn run_leaves<R: Rng + ?Sized>(joint: &PureState, pairs: &[(String, String)], mode: Mode, rng: &mut R) -> Result<(Vec<Leaf>, Coverage)> {
    match mode {
        Mode::AllBranches { budget } => all_leaves(joint, pairs, budget, rng),
        Mode::Sample { trials } => {
            let leaves = (0..trials).map(|_| sample_leaf(joint, pairs, rng)).collect::<Result<Vec<_>>>()?;
            Ok((leaves, Coverage { exhaustive: false, visited: trials, total: tree_size(joint.d(), pairs.len()) }))
        }
    }
}

/// GHZ variant: the clone state of `x` is concentrated into
/// `Σ x_j |j⟩^{⊗L}` on `N'_1 … N'_L`. Diana applies `R^{x,y}` on `N'_1`
/// and `R^{0,y}` on the other legs.
#[allow(clippy::too_many_arguments)]
pub fn run_mm_ghz<R: Rng + ?Sized>(x: &[C64], n_parties: usize, legs: usize, u: usize, v: usize, table: &[(Vec<usize>, f64)], mode: Mode, rng: &mut R) -> Result<RicRun> {
    let d = x.len();
    guard_pure("many-to-many GHZ run", d, 4 * n_parties - 2 + legs)?;
    let clone = super::decomposition::clone_state(x, n_parties)?;
    let channel = mm_ghz_channel(d, n_parties, legs, u, v, table)?;
    let joint = clone.tensor(&channel)?;
    let registry = PartyRegistry::mm_ghz(n_parties, legs);
    registry.check_partition(joint.register())?;
    let plan = ric_plan(n_parties);
    let pairs: Vec<(String, String)> = plan.iter().map(|s| s.pair.clone()).collect();
    let out_labels = leg_labels(n_parties, legs);
    let target = fanout(x, &out_labels)?;
    let (leaves, coverage) = run_leaves(&joint, &pairs, mode, rng)?;
    let mut branches = Vec::with_capacity(leaves.len());
    for leaf in leaves {
        let (others, last) = leaf.outcomes.split_at(leaf.outcomes.len() - 1);
        let (cx, cy) = deduce_correction(others, last[0], u, v, d)?;
        let first = WeylOp::r(d, cx, cy)?.matrix();
        let rest = WeylOp::r(d, 0, cy)?.matrix();
        let ops: Vec<(&str, &Matrix)> = out_labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), if i == 0 { &first } else { &rest }))
            .collect();
        let out = leaf.state.apply_locals(&ops)?;
        let legs_corr = out_labels
            .iter()
            .enumerate()
            .map(|(i, l)| LegCorrection { target: l.clone(), x: if i == 0 { cx } else { 0 }, y: cy })
            .collect();
        let messages = plan
            .iter()
            .zip(&leaf.outcomes)
            .map(|(s, &(m, n))| Message { from: s.party.clone(), to: "Diana".into(), m, n, bits: message_bits(d) })
            .collect();
        let fidelity = inner(target.amps(), out.amps()).norm_sqr();
        let transcript = Transcript {
            parties: registry.clone(),
            messages,
            correction: Correction { x: cx, y: cy, legs: legs_corr },
            branch_probability: leaf.probability,
            fidelity,
            channel_tuple: None,
        };
        branches.push(RicBranch { transcript, output: out });
    }
    Ok(RicRun { branches, coverage })
}

/// `Σ x_j |j⟩^{⊗L}`.
fn fanout(x: &[C64], labels: &[String]) -> Result<PureState> {
    let d = x.len();
    let register = Register::new(d, labels.iter().cloned())?;
    let mut amps = vec![C64::new(0.0, 0.0); register.dim()];
    for (j, xj) in x.iter().enumerate() {
        amps[register.index_of(&vec![j; labels.len()])] = *xj;
    }
    PureState::new(register, amps)
}

/// Where the `B̄` background of the multi-qudit input comes from.
#[derive(Debug, Clone)]
pub enum BbarSource<'a> {
    /// The clone decomposition of `N − L + 1` clones.
    CloneFamily(&'a CloneFamily),
    /// Random states projected onto the covariance eigenspaces, seeded.
    RandomOrthonormal { seed: u64 },
}

fn random_bbar(d: usize, pairs: usize, seed: u64) -> Result<Vec<PureState>> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let labels = clone_labels(pairs + 1)
        .into_iter()
        .filter(|l| l != &(pairs + 1).to_string())
        .collect::<Vec<_>>();
    let register = Register::new(d, labels.clone())?;
    let seed_state = PureState::random(register.clone(), &mut rng)?;
    let mut out = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            let mut acc = vec![C64::new(0.0, 0.0); register.dim()];
            for k in 0..d {
                for l in 0..d {
                    let rc = WeylOp::r(d, k, l)?.matrix();
                    let ra = WeylOp::r_signed(d, -(k as i64), l as i64).matrix();
                    let ops: Vec<(&str, &Matrix)> = labels
                        .iter()
                        .enumerate()
                        .map(|(i, lab)| (lab.as_str(), if i < pairs { &rc } else { &ra }))
                        .collect();
                    let moved = seed_state.apply_locals(&ops)?;
                    let w = omega_pow(d, (n * k) as i64 - (l * m) as i64);
                    for (a, t) in acc.iter_mut().zip(moved.amps()) {
                        *a += w * t;
                    }
                }
            }
            out.push(PureState::normalized(register.clone(), acc)?);
        }
    }
    Ok(out)
}

/// `(1/√d) Σ_{m,n} β_n |B̄_{mn}⟩ ⊗ (U^{−m,n}|φ⟩)^{⊗L}` on
/// `1…N, A_1…A_{N−L}`; information qudits are `N−L+1 … N`.
pub fn synth_distributed_state(x: &[C64], n_parties: usize, legs: usize, beta: &BetaVector, source: BbarSource<'_>) -> Result<PureState> {
    let d = x.len();
    if legs == 0 || legs > n_parties {
        return Err(Error::InvalidArgument(format!("need 1 ≤ L ≤ N (got L = {legs}, N = {n_parties})")));
    }
    if beta.d() != d {
        return Err(Error::DimensionMismatch(beta.d(), d));
    }
    let pairs = n_parties - legs;
    let mut labels: Vec<String> = (1..=n_parties).map(|s| s.to_string()).collect();
    labels.extend((1..=pairs).map(|s| format!("A_{s}")));
    guard_pure("distributed state", d, labels.len())?;
    let info: Vec<String> = (pairs + 1..=n_parties).map(|q| q.to_string()).collect();
    let phi = PureState::qudit(d, "q", x)?;

    if pairs == 0 {
        let mut st = phi.relabel(&[("q", info[0].as_str())])?;
        for l in &info[1..] {
            st = st.tensor(&phi.relabel(&[("q", l.as_str())])?)?;
        }
        return Ok(st);
    }

    let bbar: Vec<PureState> = match source {
        BbarSource::CloneFamily(f) => {
            if f.d() != d || f.n_clones() != pairs + 1 {
                return Err(Error::InvalidArgument(format!(
                    "clone family has d = {}, N = {}; need d = {d}, N = {}",
                    f.d(),
                    f.n_clones(),
                    pairs + 1
                )));
            }
            f.bbar_states().to_vec()
        }
        BbarSource::RandomOrthonormal { seed } => random_bbar(d, pairs, seed)?,
    };
    let dev = bbar_covariance_deviation(d, &bbar, pairs)?;
    if dev > 1e-9 {
        return Err(Error::Verification(format!("B̄ set breaks covariance by {dev:e}")));
    }
    let norm = 1.0 / (d as f64).sqrt();
    let mut acc = vec![C64::new(0.0, 0.0); d.pow(labels.len() as u32)];
    for m in 0..d {
        for n in 0..d {
            let w = beta.values()[n] * norm;
            if w == 0.0 {
                continue;
            }
            let moved = phi.apply_local(&WeylOp::u_signed(d, -(m as i64), n as i64).matrix(), "q")?;
            let mut term = bbar[m * d + n].clone();
            for l in &info {
                term = term.tensor(&moved.relabel(&[("q", l.as_str())])?)?;
            }
            for (a, t) in acc.iter_mut().zip(term.reorder(&labels)?.amps()) {
                *a += t * w;
            }
        }
    }
    PureState::new(Register::new(d, labels)?, acc)
}

/// Multi-qudit variant over `|B^{0,0}⟩^{⊗N}`: Bob_s measures `(s, s')` and
/// Charlie_s `(A'_s, A_s)` for `s ≤ N−L`; each information qudit `q`
/// measures `(q, A'_q)`. Diana corrects leg `q'` with `R^{u''_q+u', v''_q+v'}`.
pub fn run_mm_multiqudit<R: Rng + ?Sized>(distributed: &PureState, reference: &PureState, n_parties: usize, legs: usize, mode: Mode, rng: &mut R) -> Result<RicRun> {
    let d = distributed.d();
    if legs == 0 || legs > n_parties {
        return Err(Error::InvalidArgument(format!("need 1 ≤ L ≤ N (got L = {legs}, N = {n_parties})")));
    }
    if reference.register().len() != 1 || reference.d() != d {
        return Err(Error::RegisterMismatch("reference must be one qudit of the input dimension".into()));
    }
    let pairs_bg = n_parties - legs;
    guard_pure("many-to-many multi-qudit run", d, 4 * n_parties - legs)?;
    let channel = product_bell_channel(d, n_parties, 0, 0, &vec![0; 2 * n_parties])?;
    let joint = distributed.tensor(&channel)?;
    let registry = PartyRegistry::mm_multiqudit(n_parties, legs);
    registry.check_partition(joint.register())?;

    let mut plan: Vec<(String, (String, String))> = (1..=pairs_bg)
        .map(|s| (format!("Bob_{s}"), (s.to_string(), format!("{s}'"))))
        .collect();
    plan.extend((1..=pairs_bg).map(|s| (format!("Charlie_{s}"), (format!("A'_{s}"), format!("A_{s}")))));
    plan.extend((pairs_bg + 1..=n_parties).map(|q| (format!("Bob_{q}"), (q.to_string(), format!("A'_{q}")))));
    let pairs: Vec<(String, String)> = plan.iter().map(|p| p.1.clone()).collect();
    let out_labels: Vec<String> = (pairs_bg + 1..=n_parties).map(|q| format!("{q}'")).collect();
    let mut target = reference.relabel(&[(reference.labels()[0].as_str(), out_labels[0].as_str())])?;
    for l in &out_labels[1..] {
        target = target.tensor(&reference.relabel(&[(reference.labels()[0].as_str(), l.as_str())])?)?;
    }

    let (leaves, coverage) = run_leaves(&joint, &pairs, mode, rng)?;
    let mut branches = Vec::with_capacity(leaves.len());
    for leaf in leaves {
        let (bg, info) = leaf.outcomes.split_at(2 * pairs_bg);
        let mut corr = Vec::with_capacity(legs);
        for (label, &own) in out_labels.iter().zip(info) {
            let (x, y) = deduce_correction(bg, own, 0, 0, d)?;
            corr.push(LegCorrection { target: label.clone(), x, y });
        }
        let mats: Vec<Matrix> = corr.iter().map(|c| WeylOp::r(d, c.x, c.y).map(|w| w.matrix())).collect::<Result<_>>()?;
        let ops: Vec<(&str, &Matrix)> = corr.iter().zip(&mats).map(|(c, m)| (c.target.as_str(), m)).collect();
        let out = leaf.state.reorder(&out_labels)?.apply_locals(&ops)?;
        let fidelity = inner(target.amps(), out.amps()).norm_sqr();
        let messages = plan
            .iter()
            .zip(&leaf.outcomes)
            .map(|(p, &(m, n))| Message { from: p.0.clone(), to: "Diana".into(), m, n, bits: message_bits(d) })
            .collect();
        let transcript = Transcript {
            parties: registry.clone(),
            messages,
            correction: Correction { x: corr[0].x, y: corr[0].y, legs: corr },
            branch_probability: leaf.probability,
            fidelity,
            channel_tuple: None,
        };
        branches.push(RicBranch { transcript, output: out });
    }
    Ok(RicRun { branches, coverage })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::ChannelResource;
    use crate::protocols::decomposition::clone_state;
    use crate::protocols::ric::run_ric;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn x_amps(d: usize, seed: u64) -> Vec<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PureState::random(Register::new(d, ["q"]).unwrap(), &mut rng).unwrap().into_amps()
    }

    fn zero_table(n: usize) -> Vec<(Vec<usize>, f64)> {
        vec![(vec![0; 2 * n], 1.0)]
    }

    #[test]
    fn ghz_variant_all_branches() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = x_amps(2, 1);
        let table: Vec<_> = crate::channels::enumerate_constrained_tuples(2, 2, 0, 0)
            .into_iter()
            .map(|k| (k, 0.25))
            .collect();
        let run = run_mm_ghz(&x, 2, 2, 0, 0, &table, Mode::all(), &mut rng).unwrap();
        assert!(run.coverage.exhaustive);
        assert!((run.min_fidelity() - 1.0).abs() < 1e-9);
        assert!((run.total_probability() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ghz_variant_single_leg_matches_ric() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = x_amps(3, 3);
        let a = run_mm_ghz(&x, 2, 1, 0, 0, &zero_table(2), Mode::all(), &mut rng).unwrap();
        let phi = PureState::qudit(3, "phi", &x).unwrap();
        let clone = clone_state(&x, 2).unwrap();
        let ch = ChannelResource::Pure { state: product_bell_channel(3, 2, 0, 0, &[0, 0, 0, 0]).unwrap(), u: 0, v: 0 };
        let b = run_ric(&clone, &phi, &ch, Mode::all(), &mut rng).unwrap();
        assert_eq!(a.branches.len(), b.branches.len());
        for (p, q) in a.branches.iter().zip(&b.branches) {
            assert!((p.transcript.branch_probability - q.transcript.branch_probability).abs() < 1e-12);
            assert_eq!(p.transcript.correction.x, q.transcript.correction.x);
            assert_eq!(p.transcript.correction.y, q.transcript.correction.y);
            assert!((p.transcript.fidelity - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn ghz_variant_basis_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let e0 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let run = run_mm_ghz(&e0, 2, 3, 0, 0, &zero_table(2), Mode::Sample { trials: 10 }, &mut rng).unwrap();
        for b in &run.branches {
            assert!((b.output.amp(&[0, 0, 0]).norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn distributed_state_reduces_to_clone_state() {
        for (d, n) in [(2, 2), (3, 2), (2, 3)] {
            let fam = CloneFamily::extract(d, n).unwrap();
            let x = x_amps(d, 7);
            let st = synth_distributed_state(&x, n, 1, fam.beta(), BbarSource::CloneFamily(&fam)).unwrap();
            let want = clone_state(&x, n).unwrap();
            assert!(st.max_deviation(&want).unwrap() < 1e-12);
        }
    }

    #[test]
    fn random_source_is_normalized_and_covariant() {
        let beta = BetaVector::new(vec![0.6, 0.8]).unwrap();
        let x = x_amps(2, 8);
        let st = synth_distributed_state(&x, 3, 2, &beta, BbarSource::RandomOrthonormal { seed: 3 }).unwrap();
        assert!((st.norm_sqr() - 1.0).abs() < 1e-12);
        let bbar = random_bbar(2, 1, 3).unwrap();
        assert!(bbar_covariance_deviation(2, &bbar, 1).unwrap() < 1e-12);
    }

    #[test]
    fn multiqudit_variant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (d, n, l) in [(2, 2, 2), (2, 2, 1), (2, 3, 2), (3, 2, 1)] {
            let x = x_amps(d, 10);
            let fam;
            let (beta, src) = if n > l {
                fam = CloneFamily::extract(d, n - l + 1).unwrap();
                (fam.beta().clone(), BbarSource::CloneFamily(&fam))
            } else {
                let mut b = vec![0.0; d];
                b[0] = 1.0;
                (BetaVector::new(b).unwrap(), BbarSource::RandomOrthonormal { seed: 0 })
            };
            let st = synth_distributed_state(&x, n, l, &beta, src).unwrap();
            let phi = PureState::qudit(d, "phi", &x).unwrap();
            let run = run_mm_multiqudit(&st, &phi, n, l, Mode::all(), &mut rng).unwrap();
            assert!((run.min_fidelity() - 1.0).abs() < 1e-9, "d={d} N={n} L={l}");
            for b in &run.branches {
                let bits = (2 * n - l) as f64 * 2.0 * (d as f64).log2();
                assert!((b.transcript.total_bits() - bits).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn multiqudit_random_background() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = x_amps(2, 12);
        let beta = BetaVector::new(vec![0.8, 0.6]).unwrap();
        let st = synth_distributed_state(&x, 3, 2, &beta, BbarSource::RandomOrthonormal { seed: 5 }).unwrap();
        let phi = PureState::qudit(2, "phi", &x).unwrap();
        let run = run_mm_multiqudit(&st, &phi, 3, 2, Mode::all(), &mut rng).unwrap();
        assert!((run.min_fidelity() - 1.0).abs() < 1e-9);
    }
}
