use serde::Serialize;

use crate::channels::{beta_weighted_channel, general_pure_channel, ghz_table, ghz_channel, telecloning_as_ric_channel};
use crate::error::Result;
use crate::protocols::CloneFamily;

/// Builds the uniform Bell-product channel over tuples with every even
/// component zero and compares it with the GHZ channel.
pub fn verify_appendix_b(d: usize, n_parties: usize) -> Result<f64> {
    general_pure_channel(d, n_parties, 0, 0, &ghz_table(d, n_parties))?.max_deviation(&ghz_channel(d, n_parties)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AppendixC {
    pub d: usize,
    #[serde(rename = "N")]
    pub n_parties: usize,
    /// `|⟨telecloning (relabeled) | β-weighted⟩|`.
    pub overlap: f64,
    pub pass: bool,
}

/// Overlap of the relabeled telecloning channel with the β-weighted channel
/// built from the same clone family. Equal at `d = 2` only.
pub fn verify_appendix_c(d: usize, n_parties: usize) -> Result<AppendixC> {
    let family = CloneFamily::extract(d, n_parties)?;
    let beta = beta_weighted_channel(&family, family.beta())?;
    let tc = telecloning_as_ric_channel(d, n_parties)?;
    let overlap = tc.overlap(&beta)?.norm();
    let pass = if d == 2 { (overlap - 1.0).abs() <= 1e-9 } else { overlap < 1.0 - 1e-6 };
    Ok(AppendixC { d, n_parties, overlap, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghz_reduction() {
        for (d, n) in [(2, 2), (3, 2), (2, 3)] {
            assert!(verify_appendix_b(d, n).unwrap() < 1e-12);
        }
    }

    #[test]
    fn telecloning_equivalence_only_for_qubits() {
        for n in [2, 3] {
            let r = verify_appendix_c(2, n).unwrap();
            assert!(r.pass && (r.overlap - 1.0).abs() < 1e-9, "{r:?}");
        }
        let r = verify_appendix_c(3, 2).unwrap();
        assert!(r.pass && r.overlap < 1.0 - 1e-6, "{r:?}");
    }
}
