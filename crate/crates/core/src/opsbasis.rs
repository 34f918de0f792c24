//! Weyl operators, generalized Bell and GHZ states, symmetric occupation
//! states and the stabilizer group `S^{mn} = ⊗ U^{−m,n}_{A'_s} ⊗ U^{m,n}_{s'}`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::statealg::{guard_pure, DensityOperator, PureState, Register};
use crate::{Matrix, C64};

/// `ω^k` with `ω = e^{2πi/d}`, evaluated directly from the reduced exponent.
pub fn omega_pow(d: usize, k: i64) -> C64 {
    let r = k.rem_euclid(d as i64) as f64;
    C64::from_polar(1.0, 2.0 * PI * r / d as f64)
}

/// Reduces a signed index into `0..d`.
pub fn modd(x: i64, d: usize) -> usize {
    x.rem_euclid(d as i64) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeylKind {
    /// `U^{m,n} = Σ_k ω^{km} |k+n⟩⟨k|`
    U,
    /// `R^{m,n} = Σ_j ω^{jm} |j⟩⟨j+n|`
    R,
}

/// Symbolic phase-and-shift operator on one qudit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeylOp {
    pub d: usize,
    pub m: usize,
    pub n: usize,
    pub kind: WeylKind,
}

impl WeylOp {
    pub fn new(d: usize, m: usize, n: usize, kind: WeylKind) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if m >= d {
            return Err(Error::IndexOutOfRange { what: "m", value: m, d });
        }
        if n >= d {
            return Err(Error::IndexOutOfRange { what: "n", value: n, d });
        }
        Ok(Self { d, m, n, kind })
    }

    pub fn u(d: usize, m: usize, n: usize) -> Result<Self> {
        Self::new(d, m, n, WeylKind::U)
    }

    pub fn r(d: usize, m: usize, n: usize) -> Result<Self> {
        Self::new(d, m, n, WeylKind::R)
    }

    /// `U^{m,n}` with signed indices reduced mod `d`.
    pub fn u_signed(d: usize, m: i64, n: i64) -> Self {
        Self { d, m: modd(m, d), n: modd(n, d), kind: WeylKind::U }
    }

    /// `R^{m,n}` with signed indices reduced mod `d`.
    pub fn r_signed(d: usize, m: i64, n: i64) -> Self {
        Self { d, m: modd(m, d), n: modd(n, d), kind: WeylKind::R }
    }

    pub fn matrix(&self) -> Matrix {
        weyl_matrix(self)
    }
}

/// Dense `d×d` matrix of a Weyl operator.
pub fn weyl_matrix(op: &WeylOp) -> Matrix {
    let d = op.d;
    let mut mat = Matrix::zeros(d, d);
    for k in 0..d {
        let phase = omega_pow(d, (k * op.m) as i64);
        match op.kind {
            WeylKind::U => mat[((k + op.n) % d, k)] = phase,
            WeylKind::R => mat[(k, (k + op.n) % d)] = phase,
        }
    }
    mat
}

fn check_index(what: &'static str, value: usize, d: usize) -> Result<()> {
    if value >= d {
        return Err(Error::IndexOutOfRange { what, value, d });
    }
    Ok(())
}

/// `|B^{m,n}⟩ = (I ⊗ U^{m,n}) (1/√d) Σ_j |jj⟩` on the ordered pair `labels`.
pub fn bell_state(d: usize, m: usize, n: usize, labels: (&str, &str)) -> Result<PureState> {
    check_index("m", m, d)?;
    check_index("n", n, d)?;
    let register = Register::new(d, [labels.0, labels.1])?;
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    let norm = 1.0 / (d as f64).sqrt();
    for j in 0..d {
        amps[j * d + (j + n) % d] = omega_pow(d, (j * m) as i64) * norm;
    }
    PureState::new(register, amps)
}

/// `|G^{m,n}⟩ = (I ⊗ U^{m,n} ⊗ U^{0,n} ⊗ …) (1/√d) Σ_j |j⟩^{⊗k}`.
pub fn ghz_state<S: AsRef<str>>(d: usize, labels: &[S], m: usize, n: usize) -> Result<PureState> {
    check_index("m", m, d)?;
    check_index("n", n, d)?;
    if labels.len() < 2 {
        return Err(Error::InvalidArgument("a GHZ state needs at least two qudits".into()));
    }
    let register = Register::new(d, labels.iter().map(|l| l.as_ref().to_string()))?;
    guard_pure("GHZ state", d, register.len())?;
    let mut amps = vec![C64::new(0.0, 0.0); register.dim()];
    let norm = 1.0 / (d as f64).sqrt();
    let mut dits = vec![0; register.len()];
    for j in 0..d {
        dits[0] = j;
        for slot in dits.iter_mut().skip(1) {
            *slot = (j + n) % d;
        }
        amps[register.index_of(&dits)] = omega_pow(d, (j * m) as i64) * norm;
    }
    PureState::new(register, amps)
}

/// Particle counts `n_0 … n_{d−1}` of a symmetric state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationVector(Vec<usize>);

impl OccupationVector {
    pub fn new(counts: Vec<usize>) -> Self {
        Self(counts)
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// All occupation vectors of `total` particles over `d` levels, lexicographic.
    pub fn all(d: usize, total: usize) -> Vec<OccupationVector> {
        fn rec(d: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<OccupationVector>) {
            if cur.len() == d - 1 {
                cur.push(left);
                out.push(OccupationVector(cur.clone()));
                cur.pop();
                return;
            }
            for c in 0..=left {
                cur.push(c);
                rec(d, left - c, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(d, total, &mut Vec::with_capacity(d), &mut out);
        out
    }

    /// Same vector with one particle removed from level `j`.
    pub fn without_one(&self, j: usize) -> Option<OccupationVector> {
        let mut c = self.0.clone();
        if c.get(j).copied().unwrap_or(0) == 0 {
            return None;
        }
        c[j] -= 1;
        Some(OccupationVector(c))
    }
}

/// Distinct permutations of a multiset, lexicographic.
fn multiset_permutations(counts: &[usize]) -> Vec<Vec<usize>> {
    fn rec(counts: &mut [usize], cur: &mut Vec<usize>, len: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for level in 0..counts.len() {
            if counts[level] > 0 {
                counts[level] -= 1;
                cur.push(level);
                rec(counts, cur, len, out);
                cur.pop();
                counts[level] += 1;
            }
        }
    }
    let len = counts.iter().sum();
    let mut out = Vec::new();
    rec(&mut counts.to_vec(), &mut Vec::with_capacity(len), len, &mut out);
    out
}

/// Equal-weight normalized superposition of all orderings of an occupation multiset.
pub fn symmetric_state<S: AsRef<str>>(d: usize, occupation: &OccupationVector, labels: &[S]) -> Result<PureState> {
    if occupation.counts().len() != d {
        return Err(Error::InvalidArgument(format!(
            "occupation has {} levels, expected {d}",
            occupation.counts().len()
        )));
    }
    if occupation.total() != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "occupation sums to {}, expected {}",
            occupation.total(),
            labels.len()
        )));
    }
    let register = Register::new(d, labels.iter().map(|l| l.as_ref().to_string()))?;
    guard_pure("symmetric state", d, register.len())?;
    let perms = multiset_permutations(occupation.counts());
    let a = C64::new(1.0 / (perms.len() as f64).sqrt(), 0.0);
    let mut amps = vec![C64::new(0.0, 0.0); register.dim()];
    for p in perms {
        amps[register.index_of(&p)] = a;
    }
    PureState::new(register, amps)
}

/// `C(n, k)` as a float.
fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `α_{n_j} = √(n_j · d! · (N−1)! / (N+d−1)!)`.
pub fn alpha_coeff(d: usize, n_clones: usize, n_j: usize) -> Result<f64> {
    if n_j == 0 || n_j > n_clones {
        return Err(Error::IndexOutOfRange { what: "n_j", value: n_j, d: n_clones + 1 });
    }
    // d!(N−1)!/(N+d−1)! = 1 / C(N+d−1, d)
    Ok((n_j as f64 / binomial(n_clones + d - 1, d)).sqrt())
}

/// One stabilizer element with its label partition into the A'-group and prime group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerElement {
    pub d: usize,
    pub m: usize,
    pub n: usize,
    /// Labels receiving `U^{−m,n}`.
    pub a_group: Vec<String>,
    /// Labels receiving `U^{m,n}`.
    pub prime_group: Vec<String>,
}

impl StabilizerElement {
    pub fn new(d: usize, m: usize, n: usize, a_group: Vec<String>, prime_group: Vec<String>) -> Result<Self> {
        check_index("m", m, d)?;
        check_index("n", n, d)?;
        if a_group.len() != prime_group.len() || a_group.is_empty() {
            return Err(Error::InvalidArgument(
                "stabilizer needs two equal, non-empty label groups".into(),
            ));
        }
        Ok(Self { d, m, n, a_group, prime_group })
    }

    /// Standard RIC channel partition `A'_1…A'_N` / `1'…N'`.
    pub fn for_channel(d: usize, n_parties: usize, m: usize, n: usize) -> Result<Self> {
        let a = (1..=n_parties).map(|s| format!("A'_{s}")).collect();
        let p = (1..=n_parties).map(|s| format!("{s}'")).collect();
        Self::new(d, m, n, a, p)
    }

    /// Local factors `(label, matrix)`.
    pub fn factors(&self) -> Vec<(String, Matrix)> {
        let ua = WeylOp::u_signed(self.d, -(self.m as i64), self.n as i64).matrix();
        let up = WeylOp::u_signed(self.d, self.m as i64, self.n as i64).matrix();
        self.a_group
            .iter()
            .map(|l| (l.clone(), ua.clone()))
            .chain(self.prime_group.iter().map(|l| (l.clone(), up.clone())))
            .collect()
    }

    fn check_partition(&self, register: &Register) -> Result<()> {
        let mut all: Vec<&String> = self.a_group.iter().chain(self.prime_group.iter()).collect();
        all.sort();
        all.dedup();
        if all.len() != register.len() || all.iter().any(|l| !register.contains(l)) {
            return Err(Error::InvalidArgument(format!(
                "stabilizer partition does not cover register {:?}",
                register.labels()
            )));
        }
        Ok(())
    }
}

/// Anything a stabilizer expectation can be taken on.
pub trait LocalExpectation {
    fn register(&self) -> &Register;
    fn local_expectation(&self, ops: &[(&str, &Matrix)]) -> Result<C64>;
}

impl LocalExpectation for PureState {
    fn register(&self) -> &Register {
        PureState::register(self)
    }
    fn local_expectation(&self, ops: &[(&str, &Matrix)]) -> Result<C64> {
        PureState::local_expectation(self, ops)
    }
}

impl LocalExpectation for DensityOperator {
    fn register(&self) -> &Register {
        DensityOperator::register(self)
    }
    fn local_expectation(&self, ops: &[(&str, &Matrix)]) -> Result<C64> {
        DensityOperator::local_expectation(self, ops)
    }
}

/// `tr(S^{mn} ρ)`.
pub fn stabilizer_expectation<T: LocalExpectation + ?Sized>(state: &T, element: &StabilizerElement) -> Result<C64> {
    element.check_partition(state.register())?;
    let factors = element.factors();
    let ops: Vec<(&str, &Matrix)> = factors.iter().map(|(l, m)| (l.as_str(), m)).collect();
    state.local_expectation(&ops)
}
