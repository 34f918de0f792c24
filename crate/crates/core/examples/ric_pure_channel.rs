//! Concentrates two qubit clones back into Diana's qubit over the GHZ
//! channel, enumerating every measurement branch.

use qric::channels::ChannelSpec;
use qric::protocols::{clone_state, ric_plan, run_ric, Mode};
use qric::{PureState, Register};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qric::Result<()> {
    let (d, n) = (2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = PureState::random(Register::new(d, ["in"])?, &mut rng)?.into_amps();
    let clone = clone_state(&x, n)?;
    let phi = PureState::qudit(d, "phi", &x)?;
    let channel = ChannelSpec::preset("ghz", d, n)?.build()?;

    for step in ric_plan(n) {
        println!("{:<10} measures ({}, {})", step.party, step.pair.0, step.pair.1);
    }
    let run = run_ric(&clone, &phi, &channel, Mode::all(), &mut rng)?;
    println!("branches: {} (exhaustive: {})", run.branches.len(), run.coverage.exhaustive);
    println!("total probability: {:.12}", run.total_probability());
    println!("worst fidelity:    {:.12}", run.min_fidelity());

    let t = &run.branches[5].transcript;
    println!("sample transcript: {}", serde_json::to_string(&t.messages)?);
    println!("Diana applies R^({},{}) to 2'", t.correction.x, t.correction.y);
    Ok(())
}
