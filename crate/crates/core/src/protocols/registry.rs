use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statealg::Register;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Party {
    pub name: String,
    pub labels: Vec<String>,
}

/// Which party holds which qudits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartyRegistry(Vec<Party>);

impl PartyRegistry {
    pub fn new(parties: Vec<Party>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for p in &parties {
            for l in &p.labels {
                if !seen.insert(l.clone()) {
                    return Err(Error::DuplicateLabel(l.clone()));
                }
            }
        }
        Ok(Self(parties))
    }

    fn party(name: impl Into<String>, labels: &[String]) -> Party {
        Party { name: name.into(), labels: labels.to_vec() }
    }

    /// Alice holds `t, t'`; Bob_s the clone `s`; Charlie_s the ancilla `A_s`.
    pub fn telecloning(n_clones: usize) -> Self {
        let mut parties = vec![Self::party("Alice", &["t".into(), "t'".into()])];
        parties.extend((1..=n_clones).map(|s| Self::party(format!("Bob_{s}"), &[s.to_string()])));
        parties.extend((1..n_clones).map(|s| Self::party(format!("Charlie_{s}"), &[format!("A_{s}")])));
        Self(parties)
    }

    /// RIC ownership: Bob_s `{s, s'}`, Charlie_s `{A_s, A'_s}`, Bob_N `{N, A'_N}`, Diana `{N'}`.
    pub fn ric(n_parties: usize) -> Self {
        let mut parties: Vec<Party> = (1..n_parties)
            .map(|s| Self::party(format!("Bob_{s}"), &[s.to_string(), format!("{s}'")]))
            .collect();
        parties.extend((1..n_parties).map(|s| Self::party(format!("Charlie_{s}"), &[format!("A_{s}"), format!("A'_{s}")])));
        parties.push(Self::party(format!("Bob_{n_parties}"), &[n_parties.to_string(), format!("A'_{n_parties}")]));
        parties.push(Self::party("Diana", &[format!("{n_parties}'")]));
        Self(parties)
    }

    /// RIC ownership with Diana holding `N'_1 … N'_L`.
    pub fn mm_ghz(n_parties: usize, legs: usize) -> Self {
        let mut reg = Self::ric(n_parties);
        let diana = reg.0.last_mut().expect("ric registry has Diana");
        diana.labels = (1..=legs).map(|i| format!("{n_parties}'_{i}")).collect();
        reg
    }

    /// `N − L` Bob/Charlie pairs, `L` information holders, Diana with `L` qudits.
    pub fn mm_multiqudit(n_parties: usize, legs: usize) -> Self {
        let k = n_parties - legs;
        let mut parties: Vec<Party> = (1..=k)
            .map(|s| Self::party(format!("Bob_{s}"), &[s.to_string(), format!("{s}'")]))
            .collect();
        parties.extend((1..=k).map(|s| Self::party(format!("Charlie_{s}"), &[format!("A_{s}"), format!("A'_{s}")])));
        parties.extend((k + 1..=n_parties).map(|q| Self::party(format!("Bob_{q}"), &[q.to_string(), format!("A'_{q}")])));
        let diana: Vec<String> = (k + 1..=n_parties).map(|q| format!("{q}'")).collect();
        parties.push(Self::party("Diana", &diana));
        Self(parties)
    }

    pub fn parties(&self) -> &[Party] {
        &self.0
    }

    pub fn owner_of(&self, label: &str) -> Option<&str> {
        self.0.iter().find(|p| p.labels.iter().any(|l| l == label)).map(|p| p.name.as_str())
    }

    pub fn labels_of(&self, party: &str) -> Option<&[String]> {
        self.0.iter().find(|p| p.name == party).map(|p| p.labels.as_slice())
    }

    /// Ownership must partition `register` exactly.
    pub fn check_partition(&self, register: &Register) -> Result<()> {
        let owned: usize = self.0.iter().map(|p| p.labels.len()).sum();
        for p in &self.0 {
            for l in &p.labels {
                if !register.contains(l) {
                    return Err(Error::RegisterMismatch(format!("{} owns `{l}`, which is not in the register", p.name)));
                }
            }
        }
        if owned != register.len() {
            let orphan = register.labels().iter().find(|l| self.owner_of(l).is_none());
            return Err(Error::RegisterMismatch(format!("unowned label {orphan:?}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{channel_labels, clone_labels};

    #[test]
    fn ric_registry_partitions_the_joint_register() {
        for n in 2..=4 {
            let mut labels = clone_labels(n);
            labels.extend(channel_labels(n));
            let reg = Register::new(2, labels).unwrap();
            PartyRegistry::ric(n).check_partition(&reg).unwrap();
            assert_eq!(PartyRegistry::ric(n).owner_of(&format!("{n}'")), Some("Diana"));
            assert_eq!(PartyRegistry::ric(n).owner_of("A_1"), Some("Charlie_1"));
        }
    }

    #[test]
    fn duplicates_and_gaps_are_rejected() {
        let p = |n: &str, l: &[&str]| Party { name: n.into(), labels: l.iter().map(|s| s.to_string()).collect() };
        assert!(PartyRegistry::new(vec![p("a", &["x"]), p("b", &["x"])]).is_err());
        let reg = Register::new(2, ["x", "y"]).unwrap();
        let r = PartyRegistry::new(vec![p("a", &["x"])]).unwrap();
        assert!(r.check_partition(&reg).is_err());
    }
}
