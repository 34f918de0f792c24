//! Clone states `Σ x_j |φ_j⟩` and their rewriting around the last clone:
//! `|φ_j⟩ = Σ_n β_n |λ_{j_n}⟩ |j+n⟩_N`, `B̄_{mn} = (1/√d) Σ_j ω^{jm} |λ_{j_n}⟩`.

use crate::channels::{clone_labels, phi_state, BetaVector};
use crate::error::{Error, Result};
use crate::opsbasis::{bell_state, omega_pow, WeylOp};
use crate::statealg::{guard_pure, PureState, Register};
use crate::{Matrix, C64};

/// `Σ_j x_j |φ_j⟩` on `1…N, A_1…A_{N−1}`.
pub fn clone_state(x: &[C64], n_clones: usize) -> Result<PureState> {
    let d = x.len();
    let s: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    if (s - 1.0).abs() > crate::TOL {
        return Err(Error::NotNormalized(s));
    }
    let mut amps: Option<Vec<C64>> = None;
    let mut register = None;
    for (j, xj) in x.iter().enumerate() {
        let phi = phi_state(d, n_clones, j)?;
        let acc = amps.get_or_insert_with(|| vec![C64::new(0.0, 0.0); phi.amps().len()]);
        for (a, p) in acc.iter_mut().zip(phi.amps()) {
            *a += xj * p;
        }
        register.get_or_insert_with(|| phi.register().clone());
    }
    let register = register.ok_or(Error::InvalidDimension(d))?;
    PureState::new(register, amps.unwrap_or_default())
}

/// Fixes qudit `label` to `value`; unnormalized amplitudes over the rest.
fn slice_dit(state: &PureState, label: &str, value: usize) -> Result<(Register, Vec<C64>)> {
    let reg = state.register();
    let rest = reg.complement(&[label]);
    let mut order = rest.clone();
    order.push(label.to_string());
    let ordered = state.reorder(&order)?;
    let d = reg.d();
    let amps = ordered.amps().iter().skip(value).step_by(d).cloned().collect();
    Ok((reg.select(&rest)?, amps))
}

/// Clone basis states with their last-clone decomposition.
#[derive(Debug, Clone)]
pub struct CloneFamily {
    d: usize,
    n_clones: usize,
    phis: Vec<PureState>,
    beta: BetaVector,
    lambdas: Vec<PureState>,
    bbar: Vec<PureState>,
}

impl CloneFamily {
    /// Builds `φ_j`, factors out clone `N`, and checks the reconstruction
    /// on every basis input.
    pub fn extract(d: usize, n_clones: usize) -> Result<Self> {
        guard_pure("clone family", d, 2 * n_clones - 1)?;
        let phis: Vec<PureState> = (0..d).map(|j| phi_state(d, n_clones, j)).collect::<Result<_>>()?;
        let last = n_clones.to_string();
        let mut raw = Vec::with_capacity(d * d);
        let mut rest_reg = None;
        for (j, phi) in phis.iter().enumerate() {
            for n in 0..d {
                let (reg, amps) = slice_dit(phi, &last, (j + n) % d)?;
                rest_reg.get_or_insert(reg);
                raw.push(amps);
            }
        }
        let rest_reg = rest_reg.expect("d ≥ 2");
        let mut beta = vec![0.0; d];
        for (n, b) in beta.iter_mut().enumerate() {
            let norms: Vec<f64> = (0..d).map(|j| crate::statealg::inner(&raw[j * d + n], &raw[j * d + n]).re.sqrt()).collect();
            let spread = norms.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - norms.iter().cloned().fold(f64::INFINITY, f64::min);
            if spread > 1e-12 {
                return Err(Error::Verification(format!("β_{n} depends on j: {norms:?}")));
            }
            if norms[0] < 1e-14 {
                return Err(Error::Verification(format!("β_{n} vanishes")));
            }
            *b = norms[0];
        }
        let lambdas: Vec<PureState> = raw
            .iter()
            .enumerate()
            .map(|(i, a)| PureState::normalized(rest_reg.clone(), a.iter().map(|z| z / beta[i % d]).collect()))
            .collect::<Result<_>>()?;
        let norm = 1.0 / (d as f64).sqrt();
        let mut bbar = Vec::with_capacity(d * d);
        for m in 0..d {
            for n in 0..d {
                let mut acc = vec![C64::new(0.0, 0.0); rest_reg.dim()];
                for j in 0..d {
                    let w = omega_pow(d, (j * m) as i64) * norm;
                    for (a, l) in acc.iter_mut().zip(lambdas[j * d + n].amps()) {
                        *a += w * l;
                    }
                }
                // orthogonal but not unit-norm in general
                bbar.push(PureState::from_raw(rest_reg.clone(), acc)?);
            }
        }
        let family = Self { d, n_clones, phis, beta: BetaVector::new(beta)?, lambdas, bbar };
        for j in 0..d {
            let mut x = vec![C64::new(0.0, 0.0); d];
            x[j] = C64::new(1.0, 0.0);
            let dev = family.reconstruction_deviation(&x)?;
            if dev > 1e-9 {
                return Err(Error::Verification(format!("reconstruction of e_{j} off by {dev:e}")));
            }
        }
        Ok(family)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_clones(&self) -> usize {
        self.n_clones
    }

    pub fn phi(&self, j: usize) -> &PureState {
        &self.phis[j]
    }

    pub fn beta(&self) -> &BetaVector {
        &self.beta
    }

    /// `|λ_{j_n}⟩` on `1…N−1, A_1…A_{N−1}`.
    pub fn lambda(&self, j: usize, n: usize) -> &PureState {
        &self.lambdas[j * self.d + n]
    }

    /// `|B̄_{mn}⟩` on `1…N−1, A_1…A_{N−1}`, unnormalized.
    pub fn bbar(&self, m: usize, n: usize) -> &PureState {
        &self.bbar[m * self.d + n]
    }

    pub fn bbar_states(&self) -> &[PureState] {
        &self.bbar
    }

    /// `(1/√d) Σ_{m,n} β_n |B̄_{mn}⟩ U^{−m,n} |φ⟩_N` in clone-label order.
    pub fn reconstruct(&self, x: &[C64]) -> Result<PureState> {
        let d = self.d;
        if x.len() != d {
            return Err(Error::DimensionMismatch(x.len(), d));
        }
        let last = self.n_clones.to_string();
        let phi = PureState::qudit(d, &last, x)?;
        let labels = clone_labels(self.n_clones);
        let mut acc = vec![C64::new(0.0, 0.0); d.pow(labels.len() as u32)];
        let norm = 1.0 / (d as f64).sqrt();
        for m in 0..d {
            for n in 0..d {
                let u = WeylOp::u_signed(d, -(m as i64), n as i64).matrix();
                let term = self.bbar(m, n).tensor(&phi.apply_local(&u, &last)?)?.reorder(&labels)?;
                let w = self.beta.values()[n] * norm;
                for (a, t) in acc.iter_mut().zip(term.amps()) {
                    *a += t * w;
                }
            }
        }
        PureState::from_raw(Register::new(d, labels)?, acc)
    }

    /// Max amplitude gap between [`clone_state`] and [`Self::reconstruct`].
    pub fn reconstruction_deviation(&self, x: &[C64]) -> Result<f64> {
        clone_state(x, self.n_clones)?.max_deviation(&self.reconstruct(x)?)
    }

    /// Largest off-diagonal `|⟨B̄_a|B̄_b⟩|`.
    pub fn orthogonality_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.bbar.iter().enumerate() {
            for b in &self.bbar[i + 1..] {
                worst = worst.max(crate::statealg::inner(a.amps(), b.amps()).norm());
            }
        }
        worst
    }

    /// Largest `|(1/d) Σ_m ‖B̄_{mn}‖² − 1|` over `n`.
    pub fn parseval_deviation(&self) -> f64 {
        let d = self.d;
        (0..d)
            .map(|n| ((0..d).map(|m| self.bbar(m, n).norm_sqr()).sum::<f64>() / d as f64 - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Max deviation of `R^{k,l}` on clones ⊗ `R^{−k,l}` on ancillas acting on
    /// `B̄_{mn}` from `ω^{lm−nk} B̄_{mn}`.
    pub fn covariance_deviation(&self) -> Result<f64> {
        bbar_covariance_deviation(self.d, &self.bbar, self.n_clones - 1)
    }

    /// Weight of each `B̄_{mn}` outside Bell tuples on pairs `(s, A_s)` with
    /// `Σ k_odd ≡ m` and `Σ k_even ≡ n`.
    pub fn bell_support_leakage(&self) -> Result<f64> {
        let d = self.d;
        let pairs = self.n_clones - 1;
        let labels = self.bbar[0].labels().to_vec();
        let mut worst: f64 = 0.0;
        for m in 0..d {
            for n in 0..d {
                let target = self.bbar(m, n);
                let mut outside = 0.0;
                for idx in 0..d.pow(2 * pairs as u32) {
                    let k: Vec<usize> = (0..2 * pairs).rev().map(|p| (idx / d.pow(p as u32)) % d).collect();
                    let odd: usize = k.iter().step_by(2).sum();
                    let even: usize = k.iter().skip(1).step_by(2).sum();
                    if odd % d == m && even % d == n {
                        continue;
                    }
                    let mut prod: Option<PureState> = None;
                    for s in 1..=pairs {
                        let b = bell_state(d, k[2 * s - 2], k[2 * s - 1], (&s.to_string(), &format!("A_{s}")))?;
                        prod = Some(match prod {
                            None => b,
                            Some(p) => p.tensor(&b)?,
                        });
                    }
                    let prod = prod.expect("at least one pair").reorder(&labels)?;
                    outside += prod.overlap(target)?.norm_sqr();
                }
                worst = worst.max(outside / target.norm_sqr());
            }
        }
        Ok(worst)
    }
}

/// Covariance check for a `B̄` set on `pairs` clones followed by `pairs` ancillas.
pub(crate) fn bbar_covariance_deviation(d: usize, bbar: &[PureState], pairs: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..d {
        for l in 0..d {
            let rc = WeylOp::r(d, k, l)?.matrix();
            let ra = WeylOp::r_signed(d, -(k as i64), l as i64).matrix();
            for m in 0..d {
                for n in 0..d {
                    let state = &bbar[m * d + n];
                    let ops: Vec<(&str, &Matrix)> = state
                        .labels()
                        .iter()
                        .enumerate()
                        .map(|(i, lab)| (lab.as_str(), if i < pairs { &rc } else { &ra }))
                        .collect();
                    let out = state.apply_locals(&ops)?;
                    let ph = omega_pow(d, (l * m) as i64 - (n * k) as i64);
                    let dev = out
                        .amps()
                        .iter()
                        .zip(state.amps())
                        .map(|(a, b)| (a - b * ph).norm())
                        .fold(0.0, f64::max);
                    worst = worst.max(dev);
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_x(d: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
        PureState::random(Register::new(d, ["t"]).unwrap(), rng).unwrap().into_amps()
    }

    #[test]
    fn beta_values_for_two_clones() {
        // hand factorization: β_0² = (d+3)/(2(d+1)), β_{n≠0}² = 1/(2(d+1))
        for d in [2usize, 3, 4] {
            let fam = CloneFamily::extract(d, 2).unwrap();
            let df = d as f64;
            let b = fam.beta().values();
            assert!((b[0] - ((df + 3.0) / (2.0 * (df + 1.0))).sqrt()).abs() < 1e-12);
            for v in &b[1..] {
                assert!((v - (1.0 / (2.0 * (df + 1.0))).sqrt()).abs() < 1e-12);
            }
        }
        let b = CloneFamily::extract(2, 2).unwrap().beta().values().to_vec();
        assert!((b[0] - (5.0f64 / 6.0).sqrt()).abs() < 1e-12);
        assert!((b[1] - (1.0f64 / 6.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (d, n) in [(2, 2), (2, 3), (3, 2)] {
            let fam = CloneFamily::extract(d, n).unwrap();
            for _ in 0..20 {
                let x = random_x(d, &mut rng);
                assert!(fam.reconstruction_deviation(&x).unwrap() < 1e-9);
            }
        }
    }

    #[test]
    fn bbar_structure() {
        for (d, n) in [(2, 2), (2, 3), (3, 2)] {
            let fam = CloneFamily::extract(d, n).unwrap();
            assert!(fam.orthogonality_deviation() < 1e-12);
            assert!(fam.parseval_deviation() < 1e-12);
            assert!(fam.covariance_deviation().unwrap() < 1e-12);
            assert!(fam.bell_support_leakage().unwrap() < 1e-20);
        }
    }

    #[test]
    fn clone_state_basics() {
        let e0 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let c = clone_state(&e0, 2).unwrap();
        assert!(c.max_deviation(&phi_state(2, 2, 0).unwrap()).unwrap() < 1e-15);
        assert!(clone_state(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)], 2).is_err());
    }
}
