//! Sends one random qutrit to two Bobs and prints what each branch delivers.

use qric::analysis::clone_fidelity_formula;
use qric::protocols::{run_telecloning, TelecloneOptions};
use qric::{PureState, Register};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qric::Result<()> {
    let (d, n) = (3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let input = PureState::random(Register::new(d, ["in"])?, &mut rng)?;

    let branches = run_telecloning(&input, n, TelecloneOptions::default(), &mut rng)?;
    println!("optimal fidelity (2N+d-1)/(N(d+1)) = {:.6}", clone_fidelity_formula(d, n)?);
    println!(" m n  probability  clone fidelities");
    for b in &branches {
        let (m, nn) = (b.transcript.correction.x, b.transcript.correction.y);
        let f: Vec<String> = b.clone_fidelities.iter().map(|f| format!("{f:.6}")).collect();
        println!(" {m} {nn}  {:.6}     {}", b.transcript.branch_probability, f.join("  "));
    }
    Ok(())
}
