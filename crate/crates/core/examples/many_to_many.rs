//! Both many-to-many variants: a GHZ-extended channel that fans the
//! concentrated amplitudes over L qudits, and L information qudits that
//! each reach Diana intact.

use qric::channels::{ghz_table, BetaVector};
use qric::protocols::{run_mm_ghz, run_mm_multiqudit, synth_distributed_state, BbarSource, CloneFamily, Mode};
use qric::{PureState, Register};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qric::Result<()> {
    let d = 2;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = PureState::random(Register::new(d, ["in"])?, &mut rng)?.into_amps();

    let (n, l) = (2, 3);
    let run = run_mm_ghz(&x, n, l, 0, 0, &ghz_table(d, n), Mode::all(), &mut rng)?;
    println!("GHZ variant  N={n} L={l}: {} branches, worst fidelity {:.12}", run.branches.len(), run.min_fidelity());

    let (n, l) = (3, 2);
    let phi = PureState::qudit(d, "phi", &x)?;
    let family = CloneFamily::extract(d, n - l + 1)?;
    for (name, source) in [
        ("clone background ", BbarSource::CloneFamily(&family)),
        ("random background", BbarSource::RandomOrthonormal { seed: 9 }),
    ] {
        let beta: &BetaVector = family.beta();
        let state = synth_distributed_state(&x, n, l, beta, source)?;
        let run = run_mm_multiqudit(&state, &phi, n, l, Mode::all(), &mut rng)?;
        let bits = run.branches[0].transcript.total_bits();
        println!("multi-qudit N={n} L={l}, {name}: worst fidelity {:.12}, {bits} classical bits", run.min_fidelity());
    }
    Ok(())
}
