use std::collections::HashSet;

use crate::error::{Error, Result};

/// Hard cap on density-operator rows.
pub const MAX_DENSITY_DIM: usize = 1 << 12;

/// Default cap on pure-state amplitudes, overridable with `QRIC_MAX_DIM`.
pub const DEFAULT_MAX_PURE_DIM: usize = 1 << 18;

/// Current cap on pure-state amplitudes.
pub fn max_pure_dim() -> usize {
    std::env::var("QRIC_MAX_DIM")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_MAX_PURE_DIM)
}

/// `d^n` without overflow; saturates at `u128::MAX`.
pub fn full_dim(d: usize, n: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..n {
        acc = acc.saturating_mul(d as u128);
    }
    acc
}

/// Checks that a pure state of `n` qudits fits under the size guard.
pub fn guard_pure(what: &'static str, d: usize, n: usize) -> Result<usize> {
    let dim = full_dim(d, n);
    let limit = max_pure_dim();
    if dim > limit as u128 {
        return Err(Error::SizeGuard { what, dim, limit });
    }
    Ok(dim as usize)
}

/// Checks that a density operator of `n` qudits fits under the size guard.
pub fn guard_density(what: &'static str, d: usize, n: usize) -> Result<usize> {
    let dim = full_dim(d, n);
    if dim > MAX_DENSITY_DIM as u128 {
        return Err(Error::SizeGuard {
            what,
            dim,
            limit: MAX_DENSITY_DIM,
        });
    }
    Ok(dim as usize)
}

/// Ordered, uniquely labeled list of qudits sharing one dimension `d`.
///
/// The label at position 0 is the most significant dit of a basis index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Register {
    d: usize,
    labels: Vec<String>,
}

impl Register {
    pub fn new<S: Into<String>>(d: usize, labels: impl IntoIterator<Item = S>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyRegister);
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { d, labels })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Total Hilbert-space dimension `d^n`.
    pub fn dim(&self) -> usize {
        self.d.pow(self.labels.len() as u32)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Register formed by appending `other` after `self`.
    pub fn concat(&self, other: &Register) -> Result<Register> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch(self.d, other.d));
        }
        Register::new(
            self.d,
            self.labels.iter().chain(other.labels.iter()).cloned(),
        )
    }

    /// Register containing only `labels`, in the given order.
    pub fn select<S: AsRef<str>>(&self, labels: &[S]) -> Result<Register> {
        for l in labels {
            self.position(l.as_ref())?;
        }
        Register::new(self.d, labels.iter().map(|l| l.as_ref().to_string()))
    }

    /// Labels of `self` not in `labels`, in register order.
    pub fn complement<S: AsRef<str>>(&self, labels: &[S]) -> Vec<String> {
        self.labels
            .iter()
            .filter(|l| !labels.iter().any(|k| k.as_ref() == l.as_str()))
            .cloned()
            .collect()
    }

    /// Flat index of a dit string (big-endian).
    pub fn index_of(&self, dits: &[usize]) -> usize {
        debug_assert_eq!(dits.len(), self.len());
        dits.iter().fold(0, |acc, &j| acc * self.d + j)
    }

    /// Dit string of a flat index (big-endian).
    pub fn dits_of(&self, mut index: usize) -> Vec<usize> {
        let mut dits = vec![0; self.len()];
        for slot in dits.iter_mut().rev() {
            *slot = index % self.d;
            index /= self.d;
        }
        dits
    }

    /// Same register with labels renamed through `map`; unmapped labels are kept.
    pub fn renamed(&self, map: &[(&str, &str)]) -> Result<Register> {
        let labels = self.labels.iter().map(|l| {
            map.iter()
                .find(|(from, _)| *from == l)
                .map(|(_, to)| to.to_string())
                .unwrap_or_else(|| l.clone())
        });
        Register::new(self.d, labels)
    }
}

/// Bipartition of a register's labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    group_a: Vec<String>,
    group_b: Vec<String>,
}

impl Cut {
    pub fn new<S: AsRef<str>>(register: &Register, group_a: &[S], group_b: &[S]) -> Result<Self> {
        let a: Vec<String> = group_a.iter().map(|s| s.as_ref().to_string()).collect();
        let b: Vec<String> = group_b.iter().map(|s| s.as_ref().to_string()).collect();
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidCut("both sides must be non-empty".into()));
        }
        let mut seen = HashSet::new();
        for l in a.iter().chain(b.iter()) {
            if !register.contains(l) {
                return Err(Error::UnknownLabel(l.clone()));
            }
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidCut(format!("label `{l}` on both sides")));
            }
        }
        if seen.len() != register.len() {
            return Err(Error::InvalidCut("cut does not cover the register".into()));
        }
        Ok(Self {
            group_a: a,
            group_b: b,
        })
    }

    /// Cut with `group_b` given and `group_a` its complement.
    pub fn isolating<S: AsRef<str>>(register: &Register, group_b: &[S]) -> Result<Self> {
        let a = register.complement(group_b);
        let b: Vec<String> = group_b.iter().map(|s| s.as_ref().to_string()).collect();
        Cut::new(register, &a, &b)
    }

    pub fn group_a(&self) -> &[String] {
        &self.group_a
    }

    pub fn group_b(&self) -> &[String] {
        &self.group_b
    }
}

/// For a tensor of `n` axes with dimension `d`, returns `old_index` for each
/// new flat index when the new axis `i` is old axis `perm[i]`.
pub(crate) fn axis_permutation(d: usize, n: usize, perm: &[usize]) -> Vec<usize> {
    debug_assert_eq!(perm.len(), n);
    let total = d.pow(n as u32);
    let old_strides: Vec<usize> = (0..n).map(|k| d.pow((n - 1 - k) as u32)).collect();
    let strides: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; n];
    let mut old = 0usize;
    for _ in 0..total {
        out.push(old);
        // odometer increment on the new (big-endian) digits
        for pos in (0..n).rev() {
            digits[pos] += 1;
            old += strides[pos];
            if digits[pos] < d {
                break;
            }
            old -= strides[pos] * d;
            digits[pos] = 0;
        }
    }
    out
}

/// Axis order that moves `labels` (in the given order) to the front of `register`.
pub(crate) fn front_permutation<S: AsRef<str>>(register: &Register, labels: &[S]) -> Result<Vec<usize>> {
    let mut perm = Vec::with_capacity(register.len());
    for l in labels {
        let p = register.position(l.as_ref())?;
        if perm.contains(&p) {
            return Err(Error::DuplicateLabel(l.as_ref().to_string()));
        }
        perm.push(p);
    }
    for p in 0..register.len() {
        if !perm.contains(&p) {
            perm.push(p);
        }
    }
    Ok(perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn rejects_duplicates_and_small_dimension() {
        assert!(matches!(
            Register::new(2, ["a", "a"]),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(matches!(
            Register::new(1, ["a"]),
            Err(Error::InvalidDimension(1))
        ));
        assert!(matches!(
            Register::new(2, Vec::<String>::new()),
            Err(Error::EmptyRegister)
        ));
    }

    #[test]
    fn big_endian_index_matches_string_map() {
        // string-keyed oracle: dit string "j0j1..." -> enumeration order
        for d in 2..=3 {
            for n in 1..=4 {
                let reg = Register::new(d, (0..n).map(|k| format!("q{k}"))).unwrap();
                let mut oracle: HashMap<String, usize> = HashMap::new();
                let mut counter = 0;
                let mut stack = vec![String::new()];
                // breadth-first lexicographic expansion
                for _ in 0..n {
                    let mut next = Vec::new();
                    for s in &stack {
                        for j in 0..d {
                            next.push(format!("{s}{j}"));
                        }
                    }
                    stack = next;
                }
                for s in stack {
                    oracle.insert(s, counter);
                    counter += 1;
                }
                for idx in 0..reg.dim() {
                    let dits = reg.dits_of(idx);
                    let key: String = dits.iter().map(|j| j.to_string()).collect();
                    assert_eq!(oracle[&key], idx);
                    assert_eq!(reg.index_of(&dits), idx);
                }
            }
        }
    }

    #[test]
    fn axis_permutation_swaps_digits() {
        // n=2, d=3, swap axes: new index (a,b) holds old (b,a)
        let p = axis_permutation(3, 2, &[1, 0]);
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(p[a * 3 + b], b * 3 + a);
            }
        }
    }

    #[test]
    fn cut_validation() {
        let reg = Register::new(2, ["x", "y", "z"]).unwrap();
        assert!(Cut::new(&reg, &["x"], &["y", "z"]).is_ok());
        assert!(Cut::new(&reg, &["x"], &["y"]).is_err());
        assert!(Cut::new(&reg, &["x", "y"], &["y", "z"]).is_err());
        assert!(Cut::new::<&str>(&reg, &[], &["x", "y", "z"]).is_err());
        let c = Cut::isolating(&reg, &["z"]).unwrap();
        assert_eq!(c.group_a(), &["x".to_string(), "y".to_string()]);
    }

    #[test]
    fn guards_trip() {
        assert!(guard_density("rho", 2, 12).is_ok());
        assert!(matches!(
            guard_density("rho", 2, 13),
            Err(Error::SizeGuard { .. })
        ));
        assert_eq!(full_dim(3, 200), u128::MAX);
    }
}
