use serde::{Deserialize, Serialize};

use super::registry::PartyRegistry;

/// One classical message carrying a Bell outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub from: String,
    pub to: String,
    pub m: usize,
    pub n: usize,
    pub bits: f64,
}

/// A Weyl correction `R^{x,y}` applied to `target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegCorrection {
    pub target: String,
    pub x: usize,
    pub y: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correction {
    pub x: usize,
    pub y: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub legs: Vec<LegCorrection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub parties: PartyRegistry,
    pub messages: Vec<Message>,
    pub correction: Correction,
    pub branch_probability: f64,
    pub fidelity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel_tuple: Option<Vec<usize>>,
}

impl Transcript {
    pub fn total_bits(&self) -> f64 {
        self.messages.iter().map(|m| m.bits).sum()
    }
}

/// Cost of announcing one `d²`-ary outcome.
pub fn message_bits(d: usize) -> f64 {
    2.0 * (d as f64).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let t = Transcript {
            parties: PartyRegistry::ric(2),
            messages: vec![Message { from: "Bob_1".into(), to: "Diana".into(), m: 1, n: 0, bits: message_bits(2) }],
            correction: Correction { x: 1, y: 0, legs: vec![] },
            branch_probability: 0.25,
            fidelity: 1.0,
            channel_tuple: None,
        };
        let v: serde_json::Value = serde_json::to_value(&t).unwrap();
        for key in ["parties", "messages", "correction", "branch_probability", "fidelity"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v.get("channel_tuple").is_none());
        assert_eq!(v["messages"][0]["bits"], 2.0);
        assert_eq!(v["correction"]["x"], 1);
        let back: Transcript = serde_json::from_value(v).unwrap();
        assert_eq!(back, t);
    }
}
