use rand::Rng;
use serde::Serialize;

use crate::channels::{bell_projector, channel_labels, smolin_like, MixedChannel};
use crate::error::{Error, Result};
use crate::measurement::{gbm_sample, project_bell_density, Post};
use crate::statealg::{hermitian_eigenvalues, Cut, DensityOperator};

/// One joint outcome of the unlocking measurements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnlockOutcome {
    pub outcomes: Vec<(usize, usize)>,
    pub probability: f64,
    /// `tr ρ²` of the conditional `(A'_1, 1')` state.
    pub purity: f64,
    /// Entropy (bits) of `A'_1` alone.
    pub entropy: f64,
    /// The Bell state `(m, n)` it overlaps best with, and that fidelity.
    pub bell: (usize, usize),
    pub bell_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnlockReport {
    pub d: usize,
    #[serde(rename = "N")]
    pub n_parties: usize,
    pub exhaustive: bool,
    pub outcomes: Vec<UnlockOutcome>,
}

impl UnlockReport {
    pub fn min_purity(&self) -> f64 {
        self.outcomes.iter().map(|o| o.purity).fold(f64::INFINITY, f64::min)
    }

    /// Largest `|S(A'_1) − log₂ d|`.
    pub fn max_entropy_gap(&self) -> f64 {
        let want = (self.d as f64).log2();
        self.outcomes.iter().map(|o| (o.entropy - want).abs()).fold(0.0, f64::max)
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }
}

fn describe_pair(rho: &DensityOperator, outcomes: Vec<(usize, usize)>, probability: f64) -> Result<UnlockOutcome> {
    let d = rho.d();
    let pair = rho.reorder(&["A'_1", "1'"])?;
    let mut best = ((0, 0), f64::NEG_INFINITY);
    for m in 0..d {
        for n in 0..d {
            let f = (bell_projector(d, m, n)? * pair.matrix()).trace().re;
            if f > best.1 {
                best = ((m, n), f);
            }
        }
    }
    Ok(UnlockOutcome {
        outcomes,
        probability,
        purity: pair.purity(),
        entropy: pair.partial_trace(&["A'_1"])?.entropy(),
        bell: best.0,
        bell_fidelity: best.1,
    })
}

fn unlocking_pairs(n_parties: usize) -> Vec<(String, String)> {
    (2..=n_parties).map(|s| (format!("A'_{s}"), format!("{s}'"))).collect()
}

/// Every outcome of the Bell measurements on `(A'_s, s')`, `s = 2…N`, on the
/// Smolin-like state, with the conditional state of `(A'_1, 1')`.
pub fn unlock_ubes(d: usize, n_parties: usize) -> Result<UnlockReport> {
    if n_parties < 2 {
        return Err(Error::InvalidArgument(format!("N must be at least 2 (got {n_parties})")));
    }
    let rho = smolin_like(d, n_parties)?;
    let pairs = unlocking_pairs(n_parties);
    let mut frontier = vec![(Vec::new(), 1.0, rho)];
    for (a, b) in &pairs {
        let mut next = Vec::new();
        for (prefix, p, state) in frontier {
            for m in 0..d {
                for n in 0..d {
                    let (q, post) = project_bell_density(&state, (a, b), m, n)?;
                    if let Some(post) = post {
                        let mut o: Vec<(usize, usize)> = prefix.clone();
                        o.push((m, n));
                        next.push((o, p * q, post));
                    }
                }
            }
        }
        frontier = next;
    }
    let outcomes = frontier
        .into_iter()
        .map(|(o, p, st)| describe_pair(&st, o, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(UnlockReport { d, n_parties, exhaustive: true, outcomes })
}

/// Sampler form: draws a Bell-product term of the Smolin-like mixture, then
/// Born-samples the unlocking measurements on it.
pub fn unlock_ubes_sampled<R: Rng + ?Sized>(d: usize, n_parties: usize, trials: usize, rng: &mut R) -> Result<UnlockReport> {
    let mix = MixedChannel::uniform(d, n_parties)?;
    let pairs = unlocking_pairs(n_parties);
    let mut outcomes = Vec::with_capacity(trials);
    for _ in 0..trials {
        let (_, mut state) = mix.sample(rng)?;
        let mut seen = Vec::new();
        let mut p = 1.0;
        for (a, b) in &pairs {
            let br = gbm_sample(&state, (a, b), Post::Remove, rng)?;
            seen.push((br.outcome.m, br.outcome.n));
            p *= br.outcome.probability;
            state = br.post_state.expect("sampled branch has a state");
        }
        outcomes.push(describe_pair(&DensityOperator::from_pure(&state)?, seen, p)?);
    }
    Ok(UnlockReport { d, n_parties, exhaustive: false, outcomes })
}

/// Smallest eigenvalue of `ρ^{T_B}` over `cut.group_b()`.
pub fn ppt_min_eigenvalue(rho: &DensityOperator, cut: &Cut) -> Result<f64> {
    Cut::new(rho.register(), cut.group_a(), cut.group_b())?;
    let pt = rho.partial_transpose(cut.group_b())?;
    Ok(hermitian_eigenvalues(&pt).into_iter().fold(f64::INFINITY, f64::min))
}

/// Cuts that keep every `(A'_s, s')` pair together, one per unordered split.
pub fn pair_grouping_cuts(n_parties: usize) -> Result<Vec<Cut>> {
    let labels = channel_labels(n_parties);
    let register = crate::statealg::Register::new(2, labels)?;
    let mut cuts = Vec::new();
    // masks containing pair 1 on side A, excluding the full set
    for mask in 0..(1usize << n_parties) - 1 {
        if mask & 1 == 0 {
            continue;
        }
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for s in 1..=n_parties {
            let side = if mask >> (s - 1) & 1 == 1 { &mut a } else { &mut b };
            side.push(format!("A'_{s}"));
            side.push(format!("{s}'"));
        }
        cuts.push(Cut::new(&register, &a, &b)?);
    }
    Ok(cuts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwapDistance {
    pub a: String,
    pub b: String,
    pub distance: f64,
}

/// `‖ρ − ρ_swapped‖_F` for swaps inside `A'_*`, inside the primed group,
/// and across them at `A'_1 ↔ 1'`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub within_a: Vec<SwapDistance>,
    pub within_prime: Vec<SwapDistance>,
    pub cross: SwapDistance,
}

impl SymmetryReport {
    pub fn max_within(&self) -> f64 {
        self.within_a.iter().chain(&self.within_prime).map(|s| s.distance).fold(0.0, f64::max)
    }
}

fn swap_distance(rho: &DensityOperator, a: &str, b: &str) -> Result<SwapDistance> {
    let swapped = rho.permute(&[(a, b), (b, a)])?;
    Ok(SwapDistance { a: a.into(), b: b.into(), distance: rho.frobenius_distance(&swapped)? })
}

pub fn symmetry_report(rho: &DensityOperator, n_parties: usize) -> Result<SymmetryReport> {
    let a: Vec<String> = (1..=n_parties).map(|s| format!("A'_{s}")).collect();
    let p: Vec<String> = (1..=n_parties).map(|s| format!("{s}'")).collect();
    let within = |group: &[String]| -> Result<Vec<SwapDistance>> {
        let mut out = Vec::new();
        for i in 0..group.len() {
            for j in i + 1..group.len() {
                out.push(swap_distance(rho, &group[i], &group[j])?);
            }
        }
        Ok(out)
    };
    Ok(SymmetryReport { within_a: within(&a)?, within_prime: within(&p)?, cross: swap_distance(rho, "A'_1", "1'")? })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub rank: usize,
    pub expected_rank: usize,
    /// Largest `|λ − 1/rank|` over the nonzero eigenvalues.
    pub flatness: f64,
}

/// Rank and flatness of the Smolin-like spectrum.
pub fn smolin_spectrum(d: usize, n_parties: usize) -> Result<SpectrumReport> {
    let rho = smolin_like(d, n_parties)?;
    let expected_rank = d.pow(2 * (n_parties as u32 - 1));
    let eigs = rho.eigenvalues();
    let nonzero: Vec<f64> = eigs.into_iter().filter(|&e| e > 1e-10).collect();
    let level = 1.0 / expected_rank as f64;
    let flatness = nonzero.iter().map(|e| (e - level).abs()).fold(0.0, f64::max);
    Ok(SpectrumReport { rank: nonzero.len(), expected_rank, flatness })
}
