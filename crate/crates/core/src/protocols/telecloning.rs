//! 1→N telecloning: Alice measures `(t, t')` in the Bell basis, announces
//! `(m, n)`, each Bob applies `R^{m,n}` and each Charlie `R^{−m,n}`.

use rand::Rng;

use super::decomposition::clone_state;
use super::engine::Mode;
use super::registry::PartyRegistry;
use super::transcript::{message_bits, Correction, LegCorrection, Message, Transcript};
use crate::channels::{clone_labels, telecloning_channel};
use crate::error::{Error, Result};
use crate::measurement::{gbm_branches, gbm_sample, Branch, Post};
use crate::opsbasis::{modd, WeylOp};
use crate::statealg::{guard_pure, PureState};
use crate::{Matrix, TOL};

#[derive(Debug, Clone, Copy)]
pub struct TelecloneOptions {
    pub mode: Mode,
    /// Apply `R^{−m,n}` on the ancillas as well.
    pub ancilla_corrections: bool,
}

impl Default for TelecloneOptions {
    fn default() -> Self {
        Self { mode: Mode::all(), ancilla_corrections: true }
    }
}

#[derive(Debug, Clone)]
pub struct TelecloneBranch {
    pub transcript: Transcript,
    /// Corrected state on `1…N, A_1…A_{N−1}`.
    pub state: PureState,
    /// `⟨φ|ρ_s|φ⟩` for each clone `s`.
    pub clone_fidelities: Vec<f64>,
    /// `|⟨Σ x_j φ_j | out⟩|²`.
    pub collective_fidelity: f64,
}

/// Runs telecloning of the one-qudit `input` to `n_clones` Bobs.
pub fn run_telecloning<R: Rng + ?Sized>(input: &PureState, n_clones: usize, opts: TelecloneOptions, rng: &mut R) -> Result<Vec<TelecloneBranch>> {
    if input.register().len() != 1 {
        return Err(Error::InvalidArgument("telecloning input must be a single qudit".into()));
    }
    if (input.norm_sqr() - 1.0).abs() > TOL {
        return Err(Error::NotNormalized(input.norm_sqr()));
    }
    if n_clones < 2 {
        return Err(Error::InvalidArgument(format!("N must be at least 2 (got {n_clones})")));
    }
    let d = input.d();
    guard_pure("telecloning run", d, 2 * n_clones + 1)?;
    let t = input.relabel(&[(input.labels()[0].as_str(), "t")])?;
    let joint = t.tensor(&telecloning_channel(d, n_clones)?)?;
    let target = clone_state(input.amps(), n_clones)?;

    let picks: Vec<Branch> = match opts.mode {
        Mode::AllBranches { .. } => gbm_branches(&joint, ("t", "t'"), Post::Remove)?
            .into_iter()
            .filter(|b| b.post_state.is_some())
            .collect(),
        Mode::Sample { trials } => (0..trials)
            .map(|_| gbm_sample(&joint, ("t", "t'"), Post::Remove, rng))
            .collect::<Result<_>>()?,
    };
    picks
        .into_iter()
        .map(|b| finish_branch(d, n_clones, input, &target, b, opts.ancilla_corrections))
        .collect()
}

fn finish_branch(d: usize, n_clones: usize, input: &PureState, target: &PureState, b: Branch, ancillas: bool) -> Result<TelecloneBranch> {
    let (m, n) = (b.outcome.m, b.outcome.n);
    let post = b.post_state.expect("non-null branch");
    let rc = WeylOp::r(d, m, n)?.matrix();
    let ra = WeylOp::r_signed(d, -(m as i64), n as i64).matrix();
    let labels = clone_labels(n_clones);
    let registry = PartyRegistry::telecloning(n_clones);
    let mut ops: Vec<(&str, &Matrix)> = Vec::new();
    let mut legs = Vec::new();
    let mut messages = Vec::new();
    for (i, label) in labels.iter().enumerate() {
        let is_clone = i < n_clones;
        if !is_clone && !ancillas {
            continue;
        }
        ops.push((label, if is_clone { &rc } else { &ra }));
        let x = if is_clone { m } else { modd(-(m as i64), d) };
        legs.push(LegCorrection { target: label.clone(), x, y: n });
        let to = registry.owner_of(label).unwrap_or_default().to_string();
        messages.push(Message { from: "Alice".into(), to, m, n, bits: message_bits(d) });
    }
    let state = post.apply_locals(&ops)?;
    let clone_fidelities = (1..=n_clones)
        .map(|s| {
            let rho = state.partial_trace(&[s.to_string()])?;
            let v = nalgebra::DVector::from_column_slice(input.amps());
            Ok((v.adjoint() * rho.matrix() * &v)[(0, 0)].re)
        })
        .collect::<Result<Vec<f64>>>()?;
    let collective_fidelity = target.fidelity(&state)?;
    let transcript = Transcript {
        parties: registry,
        messages,
        correction: Correction { x: m, y: n, legs },
        branch_probability: b.outcome.probability,
        fidelity: collective_fidelity,
        channel_tuple: None,
    };
    Ok(TelecloneBranch { transcript, state, clone_fidelities, collective_fidelity })
}
