//! Rewrites a clone state around its last clone and checks the pieces.

use qric::protocols::CloneFamily;
use qric::{PureState, Register};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qric::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (d, n) in [(2, 2), (3, 2), (2, 3)] {
        let family = CloneFamily::extract(d, n)?;
        let beta: Vec<String> = family.beta().values().iter().map(|b| format!("{b:.6}")).collect();
        let x = PureState::random(Register::new(d, ["in"])?, &mut rng)?.into_amps();
        println!("d={d} N={n}");
        println!("  beta               = [{}]", beta.join(", "));
        println!("  reconstruction     = {:.2e}", family.reconstruction_deviation(&x)?);
        println!("  B-bar orthogonality = {:.2e}", family.orthogonality_deviation());
        println!("  covariance          = {:.2e}", family.covariance_deviation()?);
        println!("  Bell-support leak   = {:.2e}", family.bell_support_leakage()?);
    }
    Ok(())
}
