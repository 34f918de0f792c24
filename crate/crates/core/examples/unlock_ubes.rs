//! The Smolin-like channel: flat spectrum, PPT across pair groupings, and a
//! Bell pair on (A'_1, 1') once the other pairs are measured jointly.

use qric::analysis::{pair_grouping_cuts, ppt_min_eigenvalue, smolin_spectrum, symmetry_report, unlock_ubes};
use qric::channels::smolin_like;

fn main() -> qric::Result<()> {
    for (d, n) in [(2, 2), (3, 2)] {
        let s = smolin_spectrum(d, n)?;
        println!("d={d} N={n}: rank {} (expected {}), flatness {:.1e}", s.rank, s.expected_rank, s.flatness);

        let rho = smolin_like(d, n)?;
        for cut in pair_grouping_cuts(n)? {
            println!("  PPT {:?} : {:?} -> min eigenvalue {:.2e}", cut.group_a(), cut.group_b(), ppt_min_eigenvalue(&rho, &cut)?);
        }
        let sym = symmetry_report(&rho, n)?;
        println!("  swap distances: within groups {:.1e}, A'_1 <-> 1' {:.3}", sym.max_within(), sym.cross.distance);

        let r = unlock_ubes(d, n)?;
        for o in &r.outcomes {
            println!(
                "  outcome {:?}: p={:.4} purity={:.6} -> |B^({},{})>",
                o.outcomes, o.probability, o.purity, o.bell.0, o.bell.1
            );
        }
    }
    Ok(())
}
