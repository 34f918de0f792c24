//! When do two channel constructions coincide? The Bell-product table
//! with vanishing even entries rebuilds GHZ; the telecloning state equals
//! the beta-weighted channel only for qubits; fingerprints separate GHZ
//! from the beta-weighted channel.

use qric::analysis::{compare, fingerprint, verify_appendix_b, verify_appendix_c};
use qric::channels::{beta_weighted_channel, ghz_channel};
use qric::protocols::CloneFamily;

fn main() -> qric::Result<()> {
    for (d, n) in [(2, 2), (2, 3), (3, 2)] {
        let c = verify_appendix_c(d, n)?;
        println!("d={d} N={n}");
        println!("  Bell table vs GHZ, max deviation: {:.2e}", verify_appendix_b(d, n)?);
        println!("  |<telecloning|beta-weighted>|:    {:.9}", c.overlap);
        let family = CloneFamily::extract(d, n)?;
        let beta = beta_weighted_channel(&family, family.beta())?;
        let distinct = compare(&fingerprint(&ghz_channel(d, n)?)?, &fingerprint(&beta)?);
        println!("  GHZ and beta-weighted LU-distinguishable: {distinct}");
    }
    Ok(())
}
