use serde::Serialize;

use crate::error::Result;
use crate::opsbasis::{omega_pow, stabilizer_expectation, LocalExpectation, StabilizerElement};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilizerEntry {
    pub m: usize,
    pub n: usize,
    pub re: f64,
    pub im: f64,
}

/// `tr(S^{mn} ρ)` for all `m, n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilizerTable {
    pub d: usize,
    #[serde(rename = "N")]
    pub n_parties: usize,
    pub entries: Vec<StabilizerEntry>,
}

impl StabilizerTable {
    /// Largest `|tr(S^{mn} ρ) − ω^{vm − un}|`; residues `(0, 0)` compare with 1.
    pub fn max_deviation(&self, u: usize, v: usize) -> f64 {
        self.entries
            .iter()
            .map(|e| {
                let want = omega_pow(self.d, (v * e.m) as i64 - (u * e.n) as i64);
                (crate::C64::new(e.re, e.im) - want).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_deviation(0, 0) <= tol
    }
}

/// Stabilizer expectations on a state over the RIC channel labels.
pub fn stabilizer_suite<T: LocalExpectation + ?Sized>(state: &T, d: usize, n_parties: usize) -> Result<StabilizerTable> {
    let mut entries = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            let el = StabilizerElement::for_channel(d, n_parties, m, n)?;
            let z = stabilizer_expectation(state, &el)?;
            entries.push(StabilizerEntry { m, n, re: z.re, im: z.im });
        }
    }
    Ok(StabilizerTable { d, n_parties, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{channel_labels, ghz_channel, product_bell_channel, smolin_like};
    use crate::statealg::{PureState, Register};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ghz_and_smolin_are_stabilized() {
        assert!(stabilizer_suite(&ghz_channel(2, 2).unwrap(), 2, 2).unwrap().passes(1e-9));
        let t = stabilizer_suite(&smolin_like(3, 2).unwrap(), 3, 2).unwrap();
        assert_eq!(t.entries.len(), 9);
        assert!(t.passes(1e-9));
    }

    #[test]
    fn random_product_state_is_not() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut st = PureState::random(Register::new(2, ["A'_1"]).unwrap(), &mut rng).unwrap();
        for l in &channel_labels(2)[1..] {
            st = st.tensor(&PureState::random(Register::new(2, [l.as_str()]).unwrap(), &mut rng).unwrap()).unwrap();
        }
        let t = stabilizer_suite(&st, 2, 2).unwrap();
        // direct trace for S^{00} is the norm
        assert!((t.entries[0].re - 1.0).abs() < 1e-12);
        assert!(!t.passes(1e-6));
    }

    #[test]
    fn nonzero_residues_give_phases() {
        let st = product_bell_channel(3, 2, 1, 2, &[0, 1, 1, 1]).unwrap();
        let t = stabilizer_suite(&st, 3, 2).unwrap();
        assert!(t.max_deviation(1, 2) < 1e-12);
        assert!(!t.passes(1e-6));
    }
}
