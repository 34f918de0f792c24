use rand::Rng;
use rand_distr::StandardNormal;

use super::density::DensityOperator;
use super::linalg::{apply_on_axis, hermitian_eigenvalues, von_neumann_entropy};
use super::register::{axis_permutation, front_permutation, guard_pure, Cut, Register};
use crate::error::{Error, Result};
use crate::{Matrix, C64, TOL};

/// Dense normalized amplitude vector over a labeled register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    register: Register,
    amps: Vec<C64>,
}

impl PureState {
    /// Wraps `amps`, rejecting vectors whose squared norm is not 1 within [`TOL`].
    pub fn new(register: Register, amps: Vec<C64>) -> Result<Self> {
        let state = Self::from_raw(register, amps)?;
        let n2 = state.norm_sqr();
        if (n2 - 1.0).abs() > TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(state)
    }

    /// Wraps `amps` and rescales them to unit norm.
    pub fn normalized(register: Register, amps: Vec<C64>) -> Result<Self> {
        let mut state = Self::from_raw(register, amps)?;
        let n = state.norm_sqr().sqrt();
        if n < 1e-300 {
            return Err(Error::NotNormalized(0.0));
        }
        state.amps.iter_mut().for_each(|a| *a /= n);
        Ok(state)
    }

    pub(crate) fn from_raw(register: Register, amps: Vec<C64>) -> Result<Self> {
        guard_pure("pure state", register.d(), register.len())?;
        if amps.len() != register.dim() {
            return Err(Error::RegisterMismatch(format!(
                "{} amplitudes for a register of dimension {}",
                amps.len(),
                register.dim()
            )));
        }
        Ok(Self { register, amps })
    }

    /// Computational basis state `|dits⟩`.
    pub fn basis(register: Register, dits: &[usize]) -> Result<Self> {
        if dits.len() != register.len() {
            return Err(Error::RegisterMismatch(format!(
                "{} dits for {} qudits",
                dits.len(),
                register.len()
            )));
        }
        if let Some(&j) = dits.iter().find(|&&j| j >= register.d()) {
            return Err(Error::IndexOutOfRange {
                what: "dit",
                value: j,
                d: register.d(),
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); register.dim()];
        amps[register.index_of(dits)] = C64::new(1.0, 0.0);
        Self::new(register, amps)
    }

    /// Single-qudit state from its `d` amplitudes.
    pub fn qudit(d: usize, label: &str, amps: &[C64]) -> Result<Self> {
        Self::new(Register::new(d, [label])?, amps.to_vec())
    }

    /// Haar-like random state (normalized complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(register: Register, rng: &mut R) -> Result<Self> {
        guard_pure("random state", register.d(), register.len())?;
        let amps = (0..register.dim())
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(register, amps)
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn d(&self) -> usize {
        self.register.d()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn labels(&self) -> &[String] {
        self.register.labels()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Amplitude of the basis string `dits`.
    pub fn amp(&self, dits: &[usize]) -> C64 {
        self.amps[self.register.index_of(dits)]
    }

    /// Kronecker composition; `other`'s labels follow `self`'s.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let register = self.register.concat(&other.register)?;
        guard_pure("tensor product", register.d(), register.len())?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(PureState { register, amps })
    }

    /// Applies a `d×d` operator to the qudit `target` by stride arithmetic.
    pub fn apply_local(&self, op: &Matrix, target: &str) -> Result<PureState> {
        check_op(op, self.d())?;
        let axis = self.register.position(target)?;
        let amps = apply_on_axis(self.d(), self.register.len(), axis, op, &self.amps);
        Ok(PureState {
            register: self.register.clone(),
            amps,
        })
    }

    /// Applies a product of single-qudit operators.
    pub fn apply_locals(&self, ops: &[(&str, &Matrix)]) -> Result<PureState> {
        let mut amps = self.amps.clone();
        for (label, op) in ops {
            check_op(op, self.d())?;
            let axis = self.register.position(label)?;
            amps = apply_on_axis(self.d(), self.register.len(), axis, op, &amps);
        }
        Ok(PureState {
            register: self.register.clone(),
            amps,
        })
    }

    /// `⟨ψ| ⊗ops |ψ⟩`.
    pub fn local_expectation(&self, ops: &[(&str, &Matrix)]) -> Result<C64> {
        let moved = self.apply_locals(ops)?;
        Ok(inner(&self.amps, &moved.amps))
    }

    /// Same amplitudes, labels reordered to `order` (contents move with labels).
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<PureState> {
        if order.len() != self.register.len() {
            return Err(Error::RegisterMismatch(
                "reorder needs every label exactly once".into(),
            ));
        }
        let perm = front_permutation(&self.register, order)?;
        let map = axis_permutation(self.d(), self.register.len(), &perm);
        let amps = map.iter().map(|&old| self.amps[old]).collect();
        Ok(PureState {
            register: self.register.select(order)?,
            amps,
        })
    }

    /// Renames labels without moving amplitudes.
    pub fn relabel(&self, map: &[(&str, &str)]) -> Result<PureState> {
        Ok(PureState {
            register: self.register.renamed(map)?,
            amps: self.amps.clone(),
        })
    }

    /// Relabels subsystems through the bijection `map` and restores the
    /// original label order, so subsystem contents follow their new names.
    pub fn permute(&self, map: &[(&str, &str)]) -> Result<PureState> {
        check_bijection(&self.register, map)?;
        let renamed = self.relabel(map)?;
        renamed.reorder(self.register.labels())
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &PureState) -> Result<C64> {
        if self.register != other.register {
            return Err(Error::RegisterMismatch(format!(
                "{:?} vs {:?}",
                self.register.labels(),
                other.register.labels()
            )));
        }
        Ok(inner(&self.amps, &other.amps))
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    /// True when `|⟨self|other⟩| ≥ 1 − tol`.
    pub fn equal_up_to_phase(&self, other: &PureState, tol: f64) -> Result<bool> {
        Ok(self.overlap(other)?.norm() >= 1.0 - tol)
    }

    /// Largest amplitude difference against `other` (registers must match).
    pub fn max_deviation(&self, other: &PureState) -> Result<f64> {
        if self.register != other.register {
            return Err(Error::RegisterMismatch(format!(
                "{:?} vs {:?}",
                self.register.labels(),
                other.register.labels()
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Reduced density operator on `keep`, in the given label order.
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOperator> {
        let (kept, m) = self.split_matrix(keep)?;
        DensityOperator::from_matrix_unchecked(kept, &m * m.adjoint())
    }

    /// Amplitudes reshaped as a `dim(keep) × dim(rest)` matrix.
    fn split_matrix<S: AsRef<str>>(&self, keep: &[S]) -> Result<(Register, Matrix)> {
        if keep.is_empty() {
            return Err(Error::InvalidArgument("partial trace keeps no qudits".into()));
        }
        let kept = self.register.select(keep)?;
        super::register::guard_density("reduced state", self.d(), kept.len())?;
        let perm = front_permutation(&self.register, keep)?;
        let map = axis_permutation(self.d(), self.register.len(), &perm);
        let rows = kept.dim();
        let cols = self.amps.len() / rows;
        let m = Matrix::from_fn(rows, cols, |i, j| self.amps[map[i * cols + j]]);
        Ok((kept, m))
    }

    /// Von Neumann entropy (bits) of the reduced state on `cut.group_b()`.
    pub fn entropy_across_cut(&self, cut: &Cut) -> Result<f64> {
        Cut::new(&self.register, cut.group_a(), cut.group_b())?;
        // the smaller side gives the same spectrum with less work
        let side = if cut.group_b().len() <= cut.group_a().len() {
            cut.group_b()
        } else {
            cut.group_a()
        };
        let (_, m) = self.split_matrix(side)?;
        let rho = &m * m.adjoint();
        Ok(von_neumann_entropy(&hermitian_eigenvalues(&rho)))
    }
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn check_op(op: &Matrix, d: usize) -> Result<()> {
    if op.nrows() != d || op.ncols() != d {
        return Err(Error::OperatorShape {
            rows: op.nrows(),
            cols: op.ncols(),
            d,
        });
    }
    Ok(())
}

pub(crate) fn check_bijection(register: &Register, map: &[(&str, &str)]) -> Result<()> {
    let mut from = std::collections::HashSet::new();
    let mut to = std::collections::HashSet::new();
    for (a, b) in map {
        if !register.contains(a) {
            return Err(Error::UnknownLabel(a.to_string()));
        }
        if !register.contains(b) {
            return Err(Error::NotBijective(format!("target `{b}` is not in the register")));
        }
        if !from.insert(*a) || !to.insert(*b) {
            return Err(Error::NotBijective(format!("`{a}` -> `{b}` repeats a label")));
        }
    }
    if from != to {
        return Err(Error::NotBijective("mapped labels do not close on themselves".into()));
    }
    Ok(())
}
