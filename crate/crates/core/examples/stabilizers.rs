//! Stabilizer expectations tr(S^{mn} rho) for each channel preset.

use qric::analysis::stabilizer_suite;
use qric::channels::{ChannelResource, ChannelSpec};

fn main() -> qric::Result<()> {
    let (d, n) = (3, 2);
    for name in ["ghz", "beta", "bell-product", "smolin", "mixed-uniform", "telecloning"] {
        let channel = ChannelSpec::preset(name, d, n)?.build()?;
        let table = match &channel {
            ChannelResource::Pure { state, .. } => stabilizer_suite(state, d, n)?,
            ChannelResource::Mixed(_) => stabilizer_suite(&channel.density()?, d, n)?,
        };
        println!("{name:>14}: max |tr(S rho) - 1| = {:.2e}", table.max_deviation(0, 0));
    }
    Ok(())
}
