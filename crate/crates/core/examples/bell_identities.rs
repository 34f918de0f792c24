//! Exhaustive checks of the Bell-pair swap identity and the teleportation
//! identity behind the RIC corrections.

use qric::measurement::swap_identity_check;
use qric::protocols::teleportation_identity_check;
use qric::{PureState, Register};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qric::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for d in [2usize, 3] {
        let x = PureState::random(Register::new(d, ["in"])?, &mut rng)?.into_amps();
        let (mut swap, mut tele) = (0.0f64, 0.0f64);
        for i in 0..d.pow(4) {
            let (a, b, c, e) = (i / d.pow(3), (i / d / d) % d, (i / d) % d, i % d);
            swap = swap.max(swap_identity_check(d, a, b, c, e)?);
            tele = tele.max(teleportation_identity_check(&x, a, b, c, e)?);
        }
        println!("d={d}: swap identity {swap:.2e}, teleportation identity {tele:.2e}");
    }
    Ok(())
}
