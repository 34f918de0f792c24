//! Entangled resource states: the telecloning channel, the constrained
//! multi-Bell family and its special cases, mixed channels and the
//! Smolin-like state.
//!
//! RIC channels live on `A'_1, 1', …, A'_N, N'`, with Bell pair `s` on
//! `(A'_s, s')`: first index is the phase index, second the shift index.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opsbasis::{alpha_coeff, bell_state, ghz_state, modd, symmetric_state, OccupationVector};
use crate::protocols::decomposition::CloneFamily;
use crate::statealg::{guard_density, guard_pure, DensityOperator, PureState, Register};
use crate::{Matrix, C64, TOL};

/// Labels `A'_1, 1', …, A'_N, N'`.
pub fn channel_labels(n_parties: usize) -> Vec<String> {
    (1..=n_parties)
        .flat_map(|s| [format!("A'_{s}"), format!("{s}'")])
        .collect()
}

/// Clone labels `1…N` followed by ancilla labels `A_1…A_{N−1}`.
pub fn clone_labels(n_clones: usize) -> Vec<String> {
    (1..=n_clones)
        .map(|s| s.to_string())
        .chain((1..n_clones).map(|s| format!("A_{s}")))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    Telecloning,
    GeneralPure,
    Ghz,
    BetaWeighted,
    ProductBell,
    Mixed,
    SmolinLike,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub k: Vec<usize>,
    pub w: f64,
}

/// Declarative channel description; the on-disk JSON format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub d: usize,
    #[serde(rename = "N")]
    pub n_parties: usize,
    #[serde(default)]
    pub u: usize,
    #[serde(default)]
    pub v: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub table: Vec<TableEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

pub const PRESETS: [&str; 6] = ["telecloning", "ghz", "beta", "bell-product", "smolin", "mixed-uniform"];

impl ChannelSpec {
    fn bare(kind: ChannelKind, d: usize, n_parties: usize) -> Self {
        Self { kind, d, n_parties, u: 0, v: 0, table: Vec::new(), c: None, seed: None }
    }

    /// Named preset with `u = v = 0`.
    pub fn preset(name: &str, d: usize, n_parties: usize) -> Result<Self> {
        let spec = match name {
            "telecloning" => Self::bare(ChannelKind::Telecloning, d, n_parties),
            "ghz" => Self::bare(ChannelKind::Ghz, d, n_parties),
            "beta" => Self::bare(ChannelKind::BetaWeighted, d, n_parties),
            "bell-product" => Self {
                c: Some(vec![0; 2 * n_parties]),
                ..Self::bare(ChannelKind::ProductBell, d, n_parties)
            },
            "smolin" => Self::bare(ChannelKind::SmolinLike, d, n_parties),
            "mixed-uniform" => {
                let tuples = enumerate_constrained_tuples(d, n_parties, 0, 0);
                let w = 1.0 / tuples.len() as f64;
                Self {
                    table: tuples.into_iter().map(|k| TableEntry { k, w }).collect(),
                    ..Self::bare(ChannelKind::Mixed, d, n_parties)
                }
            }
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown channel preset `{other}` (expected one of {})",
                    PRESETS.join(", ")
                )))
            }
        };
        Ok(spec)
    }

    /// Parses a JSON spec, renormalizing table weights.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut spec: ChannelSpec = serde_json::from_str(text)?;
        if !spec.table.is_empty() {
            let total: f64 = spec.table.iter().map(|e| e.w).sum();
            if total.is_nan() || total <= 0.0 {
                return Err(Error::WeightSum(total));
            }
            if (total - 1.0).abs() > 1e-9 {
                log::warn!("channel table weights sum to {total}; renormalizing");
            }
            for e in &mut spec.table {
                e.w /= total;
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Range, constraint and weight checks.
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidDimension(self.d));
        }
        if self.n_parties < 2 {
            return Err(Error::InvalidArgument(format!("N must be at least 2 (got {})", self.n_parties)));
        }
        if self.u >= self.d {
            return Err(Error::IndexOutOfRange { what: "u", value: self.u, d: self.d });
        }
        if self.v >= self.d {
            return Err(Error::IndexOutOfRange { what: "v", value: self.v, d: self.d });
        }
        for e in &self.table {
            if e.w.is_nan() || e.w < 0.0 {
                return Err(Error::InvalidArgument(format!("negative weight {} for {:?}", e.w, e.k)));
            }
            check_tuple(self.d, self.n_parties, self.u, self.v, &e.k)?;
        }
        if let Some(c) = &self.c {
            check_tuple(self.d, self.n_parties, self.u, self.v, c)?;
        }
        match self.kind {
            ChannelKind::GeneralPure | ChannelKind::Mixed if self.table.is_empty() => {
                Err(Error::InvalidArgument("channel table is empty".into()))
            }
            ChannelKind::ProductBell if self.c.is_none() => {
                Err(Error::InvalidArgument("product-bell channel needs `c`".into()))
            }
            ChannelKind::Telecloning | ChannelKind::Ghz | ChannelKind::BetaWeighted | ChannelKind::SmolinLike
                if (self.u, self.v) != (0, 0) =>
            {
                Err(Error::InvalidArgument(format!("{:?} channel requires u = v = 0", self.kind)))
            }
            _ => Ok(()),
        }
    }

    fn weights(&self) -> Result<Vec<(Vec<usize>, f64)>> {
        let terms: Vec<(Vec<usize>, f64)> = self.table.iter().map(|e| (e.k.clone(), e.w)).collect();
        let total: f64 = terms.iter().map(|t| t.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::WeightSum(total));
        }
        Ok(terms)
    }

    /// The Bell-product table of a pure channel that has one.
    pub fn pure_table(&self) -> Result<Vec<(Vec<usize>, f64)>> {
        self.validate()?;
        match self.kind {
            ChannelKind::GeneralPure => self.weights(),
            ChannelKind::ProductBell => Ok(vec![(self.c.clone().unwrap_or_default(), 1.0)]),
            ChannelKind::Ghz => Ok(ghz_table(self.d, self.n_parties)),
            other => Err(Error::InvalidArgument(format!("{other:?} channel has no Bell-product table"))),
        }
    }

    /// Materializes the channel.
    pub fn build(&self) -> Result<ChannelResource> {
        self.validate()?;
        let (d, n) = (self.d, self.n_parties);
        let pure = |state| Ok(ChannelResource::Pure { state, u: self.u, v: self.v });
        match self.kind {
            ChannelKind::Telecloning => pure(telecloning_as_ric_channel(d, n)?),
            ChannelKind::GeneralPure => pure(general_pure_channel(d, n, self.u, self.v, &self.weights()?)?),
            ChannelKind::Ghz => pure(ghz_channel(d, n)?),
            ChannelKind::BetaWeighted => {
                let family = CloneFamily::extract(d, n)?;
                pure(beta_weighted_channel(&family, family.beta())?)
            }
            ChannelKind::ProductBell => {
                pure(product_bell_channel(d, n, self.u, self.v, self.c.as_deref().unwrap_or(&[]))?)
            }
            ChannelKind::Mixed => Ok(ChannelResource::Mixed(MixedChannel::new(d, n, self.u, self.v, self.weights()?)?)),
            ChannelKind::SmolinLike => Ok(ChannelResource::Mixed(MixedChannel::uniform(d, n)?)),
        }
    }
}

pub(crate) fn check_tuple(d: usize, n_parties: usize, u: usize, v: usize, k: &[usize]) -> Result<()> {
    if k.len() != 2 * n_parties {
        return Err(Error::InvalidArgument(format!(
            "tuple {k:?} has length {}, expected {}",
            k.len(),
            2 * n_parties
        )));
    }
    if let Some(&bad) = k.iter().find(|&&x| x >= d) {
        return Err(Error::IndexOutOfRange { what: "tuple entry", value: bad, d });
    }
    let odd: usize = k.iter().step_by(2).sum();
    let even: usize = k.iter().skip(1).step_by(2).sum();
    if odd % d != u || even % d != v {
        return Err(Error::ConstraintViolation { tuple: k.to_vec(), u, v, d });
    }
    Ok(())
}

/// All `2N`-tuples with `Σ k_odd ≡ u` and `Σ k_even ≡ v` (mod d), lexicographic.
pub fn enumerate_constrained_tuples(d: usize, n_parties: usize, u: usize, v: usize) -> Vec<Vec<usize>> {
    let free = 2 * (n_parties - 1);
    let count = d.pow(free as u32);
    let mut out = Vec::with_capacity(count);
    let mut prefix = vec![0usize; free];
    for idx in 0..count {
        let mut r = idx;
        for slot in prefix.iter_mut().rev() {
            *slot = r % d;
            r /= d;
        }
        let odd: usize = prefix.iter().step_by(2).sum();
        let even: usize = prefix.iter().skip(1).step_by(2).sum();
        let mut t = prefix.clone();
        t.push(modd(u as i64 - odd as i64, d));
        t.push(modd(v as i64 - even as i64, d));
        out.push(t);
    }
    out
}

/// A channel ready for a protocol run.
#[derive(Debug, Clone)]
pub enum ChannelResource {
    Pure { state: PureState, u: usize, v: usize },
    Mixed(MixedChannel),
}

impl ChannelResource {
    pub fn d(&self) -> usize {
        match self {
            ChannelResource::Pure { state, .. } => state.d(),
            ChannelResource::Mixed(m) => m.d,
        }
    }

    pub fn residues(&self) -> (usize, usize) {
        match self {
            ChannelResource::Pure { u, v, .. } => (*u, *v),
            ChannelResource::Mixed(m) => (m.u, m.v),
        }
    }

    /// Density form, subject to the density size guard.
    pub fn density(&self) -> Result<DensityOperator> {
        match self {
            ChannelResource::Pure { state, .. } => DensityOperator::from_pure(state),
            ChannelResource::Mixed(m) => m.density(),
        }
    }
}

/// `Σ C_k ⊗_s |B^{k_{2s−1},k_{2s}}⟩⟨…|` over constrained tuples.
#[derive(Debug, Clone)]
pub struct MixedChannel {
    pub d: usize,
    pub n_parties: usize,
    pub u: usize,
    pub v: usize,
    terms: Vec<(Vec<usize>, f64)>,
}

impl MixedChannel {
    pub fn new(d: usize, n_parties: usize, u: usize, v: usize, terms: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("mixed channel has no terms".into()));
        }
        let total: f64 = terms.iter().map(|t| t.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::WeightSum(total));
        }
        for (k, w) in &terms {
            if *w < 0.0 {
                return Err(Error::InvalidArgument(format!("negative weight {w} for {k:?}")));
            }
            check_tuple(d, n_parties, u, v, k)?;
        }
        guard_pure("mixed channel branch", d, 2 * n_parties)?;
        Ok(Self { d, n_parties, u, v, terms })
    }

    /// Uniform weights over every `u = v = 0` tuple.
    pub fn uniform(d: usize, n_parties: usize) -> Result<Self> {
        let tuples = enumerate_constrained_tuples(d, n_parties, 0, 0);
        let w = 1.0 / tuples.len() as f64;
        Self::new(d, n_parties, 0, 0, tuples.into_iter().map(|k| (k, w)).collect())
    }

    pub fn terms(&self) -> &[(Vec<usize>, f64)] {
        &self.terms
    }

    pub fn density(&self) -> Result<DensityOperator> {
        mixed_channel(self.d, self.n_parties, self.u, self.v, &self.terms)
    }

    /// Draws a tuple with probability `C` and returns its product-Bell state.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Vec<usize>, PureState)> {
        let dist = WeightedIndex::new(self.terms.iter().map(|t| t.1))
            .map_err(|e| Error::InvalidArgument(format!("mixed channel weights: {e}")))?;
        let k = self.terms[dist.sample(rng)].0.clone();
        let state = product_bell_channel(self.d, self.n_parties, self.u, self.v, &k)?;
        Ok((k, state))
    }
}

/// `|φ_j⟩ = Σ_{n_j ≥ 1} α_{n_j} |occ⟩_{1…N} |occ − e_j⟩_{A_1…A_{N−1}}`.
pub fn phi_state(d: usize, n_clones: usize, j: usize) -> Result<PureState> {
    if j >= d {
        return Err(Error::IndexOutOfRange { what: "j", value: j, d });
    }
    if n_clones < 2 {
        return Err(Error::InvalidArgument(format!("N must be at least 2 (got {n_clones})")));
    }
    let labels = clone_labels(n_clones);
    let register = Register::new(d, labels.clone())?;
    guard_pure("clone basis state", d, register.len())?;
    let anc_dim = d.pow((n_clones - 1) as u32);
    let mut amps = vec![C64::new(0.0, 0.0); register.dim()];
    for occ in OccupationVector::all(d, n_clones) {
        let Some(rest) = occ.without_one(j) else { continue };
        let a = alpha_coeff(d, n_clones, occ.counts()[j])?;
        let clones = symmetric_state(d, &occ, &labels[..n_clones])?;
        let ancillas = symmetric_state(d, &rest, &labels[n_clones..])?;
        let anc_nz: Vec<(usize, C64)> = ancillas
            .amps()
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm_sqr() > 0.0)
            .map(|(i, z)| (i, *z))
            .collect();
        for (ci, cz) in clones.amps().iter().enumerate().filter(|(_, z)| z.norm_sqr() > 0.0) {
            for &(ai, az) in &anc_nz {
                amps[ci * anc_dim + ai] += cz * az * a;
            }
        }
    }
    PureState::new(register, amps)
}

/// `|Φ⟩ = (1/√d) Σ_j |j⟩_{t'} |φ_j⟩` on `t', 1…N, A_1…A_{N−1}`.
pub fn telecloning_channel(d: usize, n_clones: usize) -> Result<PureState> {
    let mut labels = vec!["t'".to_string()];
    labels.extend(clone_labels(n_clones));
    let register = Register::new(d, labels)?;
    guard_pure("telecloning channel", d, register.len())?;
    let block = d.pow((2 * n_clones - 1) as u32);
    let norm = 1.0 / (d as f64).sqrt();
    let mut amps = Vec::with_capacity(register.dim());
    for j in 0..d {
        let phi = phi_state(d, n_clones, j)?;
        amps.extend(phi.amps().iter().map(|z| z * norm));
    }
    debug_assert_eq!(amps.len(), block * d);
    PureState::new(register, amps)
}

/// Telecloning channel renamed onto RIC channel labels, slot by slot:
/// clone `s → A'_s`, `A_s → s'`, `t' → A'_N`, clone `N → N'`.
pub fn telecloning_as_ric_channel(d: usize, n_parties: usize) -> Result<PureState> {
    let tc = telecloning_channel(d, n_parties)?;
    let map = appendix_c_map(n_parties);
    let pairs: Vec<(&str, &str)> = map.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    tc.relabel(&pairs)?.reorder(&channel_labels(n_parties))
}

/// Label map from the telecloning register to the RIC channel register.
pub fn appendix_c_map(n_parties: usize) -> Vec<(String, String)> {
    let mut map = vec![("t'".to_string(), format!("A'_{n_parties}"))];
    for s in 1..n_parties {
        map.push((s.to_string(), format!("A'_{s}")));
        map.push((format!("A_{s}"), format!("{s}'")));
    }
    map.push((n_parties.to_string(), format!("{n_parties}'")));
    map
}

fn product_bell_amps(d: usize, k: &[usize]) -> Result<Vec<C64>> {
    let mut amps = vec![C64::new(1.0, 0.0)];
    for pair in k.chunks(2) {
        let b = bell_state(d, pair[0], pair[1], ("x", "y"))?;
        let mut next = vec![C64::new(0.0, 0.0); amps.len() * d * d];
        for (i, a) in amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for (j, z) in b.amps().iter().enumerate() {
                next[i * d * d + j] = a * z;
            }
        }
        amps = next;
    }
    Ok(amps)
}

/// `Σ √P_k ⊗_s |B^{k_{2s−1},k_{2s}}⟩_{A'_s s'}`.
pub fn general_pure_channel(d: usize, n_parties: usize, u: usize, v: usize, table: &[(Vec<usize>, f64)]) -> Result<PureState> {
    if table.is_empty() {
        return Err(Error::InvalidArgument("channel table is empty".into()));
    }
    let register = Register::new(d, channel_labels(n_parties))?;
    guard_pure("general pure channel", d, register.len())?;
    let total: f64 = table.iter().map(|t| t.1).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::WeightSum(total));
    }
    let mut amps = vec![C64::new(0.0, 0.0); register.dim()];
    for (k, p) in table {
        if *p < 0.0 {
            return Err(Error::InvalidArgument(format!("negative weight {p} for {k:?}")));
        }
        check_tuple(d, n_parties, u, v, k)?;
        let sp = p.sqrt();
        for (a, b) in amps.iter_mut().zip(product_bell_amps(d, k)?) {
            *a += b * sp;
        }
    }
    PureState::new(register, amps)
}

/// Uniform table over tuples with every even entry zero and `Σ k_odd ≡ 0`;
/// it reproduces the GHZ channel.
pub fn ghz_table(d: usize, n_parties: usize) -> Vec<(Vec<usize>, f64)> {
    let tuples: Vec<Vec<usize>> = enumerate_constrained_tuples(d, n_parties, 0, 0)
        .into_iter()
        .filter(|k| k.iter().skip(1).step_by(2).all(|&x| x == 0))
        .collect();
    let p = 1.0 / tuples.len() as f64;
    tuples.into_iter().map(|k| (k, p)).collect()
}

/// `(1/√d) Σ_j |j⟩^{⊗2N}` on the channel labels.
pub fn ghz_channel(d: usize, n_parties: usize) -> Result<PureState> {
    ghz_state(d, &channel_labels(n_parties), 0, 0)
}

/// `⊗_s |B^{c_{2s−1},c_{2s}}⟩_{A'_s s'}`.
pub fn product_bell_channel(d: usize, n_parties: usize, u: usize, v: usize, c: &[usize]) -> Result<PureState> {
    check_tuple(d, n_parties, u, v, c)?;
    let register = Register::new(d, channel_labels(n_parties))?;
    guard_pure("product Bell channel", d, register.len())?;
    PureState::new(register, product_bell_amps(d, c)?)
}

/// Non-negative `β_0 … β_{d−1}` with `Σ β² = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaVector(Vec<f64>);

impl BetaVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|&b| b.is_nan() || b < 0.0) {
            return Err(Error::InvalidArgument(format!("β entries must be non-negative reals: {values:?}")));
        }
        let s: f64 = values.iter().map(|b| b * b).sum();
        if (s - 1.0).abs() > TOL {
            return Err(Error::NotNormalized(s));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn d(&self) -> usize {
        self.0.len()
    }
}

/// `(1/√d) Σ_{x,y} β_y |B̄_{xy}⟩ |B^{−x,−y}⟩_{A'_N N'}`.
///
/// `B̄` comes from `family`, renamed clone `s → A'_s` and ancilla `A_s → s'`.
pub fn beta_weighted_channel(family: &CloneFamily, beta: &BetaVector) -> Result<PureState> {
    let d = family.d();
    if beta.d() != d {
        return Err(Error::DimensionMismatch(beta.d(), d));
    }
    let n = family.n_clones();
    let labels = channel_labels(n);
    let register = Register::new(d, labels.clone())?;
    guard_pure("beta-weighted channel", d, register.len())?;
    let map: Vec<(String, String)> = (1..n)
        .flat_map(|s| [(s.to_string(), format!("A'_{s}")), (format!("A_{s}"), format!("{s}'"))])
        .collect();
    let pairs: Vec<(&str, &str)> = map.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let norm = 1.0 / (d as f64).sqrt();
    let mut amps = vec![C64::new(0.0, 0.0); register.dim()];
    let last = (format!("A'_{n}"), format!("{n}'"));
    for x in 0..d {
        for y in 0..d {
            let w = beta.values()[y] * norm;
            if w == 0.0 {
                continue;
            }
            let bbar = family.bbar(x, y).relabel(&pairs)?;
            let tail = bell_state(d, modd(-(x as i64), d), modd(-(y as i64), d), (&last.0, &last.1))?;
            let term = bbar.tensor(&tail)?.reorder(&labels)?;
            for (a, b) in amps.iter_mut().zip(term.amps()) {
                *a += b * w;
            }
        }
    }
    PureState::new(register, amps)
}

/// `Σ C_k ⊗_s |B^{k…}⟩⟨B^{k…}|` as a density operator.
pub fn mixed_channel(d: usize, n_parties: usize, u: usize, v: usize, terms: &[(Vec<usize>, f64)]) -> Result<DensityOperator> {
    let register = Register::new(d, channel_labels(n_parties))?;
    let dim = guard_density("mixed channel", d, register.len())?;
    let total: f64 = terms.iter().map(|t| t.1).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::WeightSum(total));
    }
    let mut pure_terms = Vec::with_capacity(terms.len());
    for (k, w) in terms {
        check_tuple(d, n_parties, u, v, k)?;
        pure_terms.push((*w, product_bell_channel(d, n_parties, u, v, k)?));
    }
    let rho = DensityOperator::mixture(register, &pure_terms)?;
    debug_assert_eq!(rho.matrix().nrows(), dim);
    Ok(rho)
}

/// Uniform mixture over every `u = v = 0` Bell-product tuple.
pub fn smolin_like(d: usize, n_parties: usize) -> Result<DensityOperator> {
    MixedChannel::uniform(d, n_parties)?.density()
}

/// Bell projector `|B^{m,n}⟩⟨B^{m,n}|` as a `d²×d²` matrix.
pub fn bell_projector(d: usize, m: usize, n: usize) -> Result<Matrix> {
    let b = bell_state(d, m, n, ("x", "y"))?;
    let v = nalgebra::DVector::from_column_slice(b.amps());
    Ok(&v * v.adjoint())
}
