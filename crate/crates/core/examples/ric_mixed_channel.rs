//! Runs RIC over the Smolin-like mixed channel by sampling: each trial
//! draws one Bell-product term and one measurement record.

use qric::channels::MixedChannel;
use qric::channels::ChannelResource;
use qric::protocols::{clone_state, run_ric, Mode};
use qric::{PureState, Register};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qric::Result<()> {
    let (d, n) = (2, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x = PureState::random(Register::new(d, ["in"])?, &mut rng)?.into_amps();
    let clone = clone_state(&x, n)?;
    let phi = PureState::qudit(d, "phi", &x)?;
    let channel = ChannelResource::Mixed(MixedChannel::uniform(d, n)?);

    let run = run_ric(&clone, &phi, &channel, Mode::Sample { trials: 40 }, &mut rng)?;
    let perfect = run.branches.iter().filter(|b| (b.transcript.fidelity - 1.0).abs() < 1e-9).count();
    println!("{perfect}/{} sampled runs reproduce the input exactly", run.branches.len());
    for b in run.branches.iter().take(5) {
        println!("  term {:?} -> correction R^({},{})", b.transcript.channel_tuple.as_deref().unwrap_or(&[]), b.transcript.correction.x, b.transcript.correction.y);
    }
    Ok(())
}
