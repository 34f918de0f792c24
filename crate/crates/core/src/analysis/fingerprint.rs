use serde::Serialize;

use crate::error::{Error, Result};
use crate::statealg::{Cut, PureState};

/// Invariant multisets are "different" above this gap.
pub const LU_TOLERANCE: f64 = 1e-6;

/// Local-unitary invariants of a pure state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FingerprintReport {
    /// Entropies (bits) across every 1-vs-rest and 2-vs-rest cut, sorted.
    pub cut_entropies: Vec<f64>,
    /// Spectra of single-qudit marginals, each sorted, then sorted as lists.
    pub single_spectra: Vec<Vec<f64>>,
    /// Same for two-qudit marginals.
    pub pair_spectra: Vec<Vec<f64>>,
}

fn spectrum(state: &PureState, keep: &[&str]) -> Result<Vec<f64>> {
    let mut e = state.partial_trace(keep)?.eigenvalues();
    for x in e.iter_mut() {
        if x.abs() < 1e-13 {
            *x = 0.0;
        }
    }
    e.sort_by(|a, b| b.total_cmp(a));
    Ok(e)
}

fn sort_lists(v: &mut [Vec<f64>]) {
    v.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(a.len().cmp(&b.len()))
    });
}

pub fn fingerprint(state: &PureState) -> Result<FingerprintReport> {
    let labels: Vec<&str> = state.labels().iter().map(String::as_str).collect();
    let mut single = Vec::new();
    let mut pairs = Vec::new();
    for (i, a) in labels.iter().enumerate() {
        single.push(spectrum(state, &[a])?);
        for b in &labels[i + 1..] {
            pairs.push(spectrum(state, &[a, b])?);
        }
    }
    let ent = |s: &Vec<f64>| crate::statealg::von_neumann_entropy(s);
    let mut cut_entropies: Vec<f64> = single.iter().chain(&pairs).map(ent).collect();
    cut_entropies.sort_by(f64::total_cmp);
    sort_lists(&mut single);
    sort_lists(&mut pairs);
    Ok(FingerprintReport { cut_entropies, single_spectra: single, pair_spectra: pairs })
}

fn lists_differ(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
    a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.len() != y.len() || x.iter().zip(y).any(|(p, q)| (p - q).abs() > LU_TOLERANCE))
}

/// True when some invariant multiset differs by more than [`LU_TOLERANCE`].
pub fn compare(a: &FingerprintReport, b: &FingerprintReport) -> bool {
    a.cut_entropies.len() != b.cut_entropies.len()
        || a.cut_entropies.iter().zip(&b.cut_entropies).any(|(p, q)| (p - q).abs() > LU_TOLERANCE)
        || lists_differ(&a.single_spectra, &b.single_spectra)
        || lists_differ(&a.pair_spectra, &b.pair_spectra)
}

/// Entropy (bits) across `rest : {N'}` of a channel on the RIC labels.
pub fn output_cut_entropy(state: &PureState, n_parties: usize) -> Result<f64> {
    let out = format!("{n_parties}'");
    if !state.register().contains(&out) {
        return Err(Error::UnknownLabel(out));
    }
    state.entropy_across_cut(&Cut::isolating(state.register(), &[out])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{beta_weighted_channel, ghz_channel, product_bell_channel, telecloning_as_ric_channel};
    use crate::opsbasis::WeylOp;
    use crate::protocols::CloneFamily;

    #[test]
    fn self_comparison() {
        let g = fingerprint(&ghz_channel(2, 2).unwrap()).unwrap();
        assert!(!compare(&g, &g));
        assert_eq!(g.cut_entropies.len(), 4 + 6);
        // every GHZ cut carries exactly one bit
        assert!(g.cut_entropies.iter().all(|e| (e - 1.0).abs() < 1e-12));
    }

    #[test]
    fn local_unitaries_leave_it_unchanged() {
        let st = telecloning_as_ric_channel(3, 2).unwrap();
        let moved = st
            .apply_local(&WeylOp::u(3, 1, 2).unwrap().matrix(), "A'_1")
            .unwrap()
            .apply_local(&WeylOp::r(3, 2, 0).unwrap().matrix(), "2'")
            .unwrap();
        assert!(!compare(&fingerprint(&st).unwrap(), &fingerprint(&moved).unwrap()));
    }

    #[test]
    fn ghz_and_beta_channels_differ() {
        for d in [2, 3] {
            let fam = CloneFamily::extract(d, 2).unwrap();
            let beta = beta_weighted_channel(&fam, fam.beta()).unwrap();
            let g = ghz_channel(d, 2).unwrap();
            assert!(compare(&fingerprint(&g).unwrap(), &fingerprint(&beta).unwrap()), "d={d}");
        }
    }

    #[test]
    fn output_entropy_is_one_dit() {
        for (d, n) in [(2, 2), (3, 2), (2, 3)] {
            let e = output_cut_entropy(&ghz_channel(d, n).unwrap(), n).unwrap();
            assert!((e - (d as f64).log2()).abs() < 1e-8);
            let e = output_cut_entropy(&product_bell_channel(d, n, 0, 0, &vec![0; 2 * n]).unwrap(), n).unwrap();
            assert!((e - (d as f64).log2()).abs() < 1e-8);
        }
    }
}
