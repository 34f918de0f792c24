//! Writes a channel spec to JSON, reads it back, and shows the validation
//! error for a table that breaks the residue constraint.

use qric::channels::{ChannelKind, ChannelSpec, TableEntry};

fn main() -> qric::Result<()> {
    let spec = ChannelSpec {
        kind: ChannelKind::GeneralPure,
        d: 3,
        n_parties: 2,
        u: 1,
        v: 2,
        table: vec![
            TableEntry { k: vec![0, 1, 1, 1], w: 0.5 },
            TableEntry { k: vec![1, 2, 0, 0], w: 0.5 },
        ],
        c: None,
        seed: None,
    };
    let text = spec.to_json()?;
    println!("{text}");
    let back = ChannelSpec::from_json(&text)?;
    let channel = back.build()?;
    println!("residues (u, v) = {:?}", channel.residues());

    let bad = text.replace("[\n        1,\n        2,\n        0,\n        0\n      ]", "[1, 1, 0, 0]");
    match ChannelSpec::from_json(&bad) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
