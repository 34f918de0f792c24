//! Entanglement checks on channel states: stabilizers, the GHZ and
//! telecloning equivalences, UBES unlocking, PPT evidence, swap symmetry
//! and LU-invariant fingerprints.
//!
//! Every report type serializes to a JSON fragment for the CLI report.

mod appendix;
mod check;
mod fingerprint;
mod stabilizers;
mod ubes;

pub use appendix::{verify_appendix_b, verify_appendix_c, AppendixC};
pub use check::{Check, Relation, Status};
pub use fingerprint::{compare, fingerprint, output_cut_entropy, FingerprintReport, LU_TOLERANCE};
pub use stabilizers::{stabilizer_suite, StabilizerEntry, StabilizerTable};
pub use ubes::{
    pair_grouping_cuts, ppt_min_eigenvalue, smolin_spectrum, symmetry_report, unlock_ubes, unlock_ubes_sampled, SpectrumReport,
    SwapDistance, SymmetryReport, UnlockOutcome, UnlockReport,
};

use crate::error::{Error, Result};

/// Optimal `1 → N` clone fidelity `(2N + d − 1) / (N (d + 1))`.
pub fn clone_fidelity_formula(d: usize, n_clones: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if n_clones < 2 {
        return Err(Error::InvalidArgument(format!("N must be at least 2 (got {n_clones})")));
    }
    let (d, n) = (d as f64, n_clones as f64);
    Ok((2.0 * n + d - 1.0) / (n * (d + 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fidelity_formula_values() {
        for (d, n, num, den) in [(2, 2, 5.0, 6.0), (2, 3, 7.0, 9.0), (3, 2, 3.0, 4.0), (4, 2, 7.0, 10.0), (3, 3, 2.0, 3.0)] {
            assert!((clone_fidelity_formula(d, n).unwrap() - num / den).abs() < 1e-15);
        }
        assert!(clone_fidelity_formula(1, 2).is_err());
        assert!(clone_fidelity_formula(2, 1).is_err());
    }

    #[test]
    fn fidelity_tends_to_measure_and_prepare() {
        // N → ∞ limit is 2/(d+1)
        let f = clone_fidelity_formula(3, 100_000).unwrap();
        assert!((f - 0.5).abs() < 1e-4);
    }
}
