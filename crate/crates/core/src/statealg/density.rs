use super::linalg::{apply_on_axis, hermitian_eigenvalues, von_neumann_entropy};
use super::pure::{check_bijection, PureState};
use super::register::{axis_permutation, front_permutation, guard_density, Register};
use crate::error::{Error, Result};
use crate::{Matrix, C64, TOL};

/// Dense Hermitian, unit-trace, positive semidefinite matrix over a register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    register: Register,
    mat: Matrix,
}

impl DensityOperator {
    /// Validated constructor: Hermitian, trace one and eigenvalues ≥ −[`TOL`].
    pub fn from_matrix(register: Register, mat: Matrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(register, mat)?;
        let herm = (&rho.mat - rho.mat.adjoint()).camax();
        if herm > TOL {
            return Err(Error::Verification(format!("matrix is not Hermitian ({herm:e})")));
        }
        let tr = rho.trace();
        if (tr - 1.0).abs() > TOL {
            return Err(Error::Verification(format!("trace is {tr}, expected 1")));
        }
        let min = rho.eigenvalues()[0];
        if min < -TOL {
            return Err(Error::Verification(format!("negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(register: Register, mat: Matrix) -> Result<Self> {
        let dim = guard_density("density operator", register.d(), register.len())?;
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::RegisterMismatch(format!(
                "{}x{} matrix for a register of dimension {dim}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { register, mat })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(state: &PureState) -> Result<Self> {
        let register = state.register().clone();
        guard_density("density operator", register.d(), register.len())?;
        let v = nalgebra::DVector::from_column_slice(state.amps());
        Self::from_matrix_unchecked(register, &v * v.adjoint())
    }

    /// `Σ w_i |ψ_i⟩⟨ψ_i|`; weights must sum to one.
    pub fn mixture(register: Register, terms: &[(f64, PureState)]) -> Result<Self> {
        let dim = guard_density("mixture", register.d(), register.len())?;
        let total: f64 = terms.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::WeightSum(total));
        }
        let mut mat = Matrix::zeros(dim, dim);
        for (w, psi) in terms {
            if psi.register() != &register {
                return Err(Error::RegisterMismatch("mixture term register differs".into()));
            }
            let a = psi.amps();
            let nz: Vec<usize> = (0..dim).filter(|&i| a[i].norm_sqr() > 0.0).collect();
            for &i in &nz {
                for &j in &nz {
                    mat[(i, j)] += a[i] * a[j].conj() * *w;
                }
            }
        }
        Self::from_matrix_unchecked(register, mat)
    }

    /// `I / d^n`.
    pub fn maximally_mixed(register: Register) -> Result<Self> {
        let dim = guard_density("maximally mixed state", register.d(), register.len())?;
        Self::from_matrix_unchecked(register, Matrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0))
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn d(&self) -> usize {
        self.register.d()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Ascending spectrum.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
    }

    pub fn entropy(&self) -> f64 {
        von_neumann_entropy(&self.eigenvalues())
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&l| l > tol).count()
    }

    /// Reduced operator on `keep`, in the given order.
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOperator> {
        if keep.is_empty() {
            return Err(Error::InvalidArgument("partial trace keeps no qudits".into()));
        }
        let kept = self.register.select(keep)?;
        let ordered = self.reorder_with_front(keep)?;
        let dk = kept.dim();
        let dr = self.mat.nrows() / dk;
        let m = &ordered.mat;
        let out = Matrix::from_fn(dk, dk, |i, j| (0..dr).map(|r| m[(i * dr + r, j * dr + r)]).sum());
        Self::from_matrix_unchecked(kept, out)
    }

    fn reorder_with_front<S: AsRef<str>>(&self, front: &[S]) -> Result<DensityOperator> {
        let perm = front_permutation(&self.register, front)?;
        let order: Vec<String> = perm.iter().map(|&p| self.register.labels()[p].clone()).collect();
        self.reorder(&order)
    }

    /// Same operator with the tensor order changed to `order`.
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<DensityOperator> {
        if order.len() != self.register.len() {
            return Err(Error::RegisterMismatch(
                "reorder needs every label exactly once".into(),
            ));
        }
        let perm = front_permutation(&self.register, order)?;
        let map = axis_permutation(self.d(), self.register.len(), &perm);
        let n = map.len();
        let mat = Matrix::from_fn(n, n, |i, j| self.mat[(map[i], map[j])]);
        Ok(DensityOperator {
            register: self.register.select(order)?,
            mat,
        })
    }

    pub fn relabel(&self, map: &[(&str, &str)]) -> Result<DensityOperator> {
        Ok(DensityOperator {
            register: self.register.renamed(map)?,
            mat: self.mat.clone(),
        })
    }

    /// Subsystem relabeling by a bijection, keeping the original label order.
    pub fn permute(&self, map: &[(&str, &str)]) -> Result<DensityOperator> {
        check_bijection(&self.register, map)?;
        self.relabel(map)?.reorder(self.register.labels())
    }

    /// Partial transpose over `labels`.
    pub fn partial_transpose<S: AsRef<str>>(&self, labels: &[S]) -> Result<Matrix> {
        for l in labels {
            self.register.position(l.as_ref())?;
        }
        let rest = self.register.complement(labels);
        let mut order: Vec<String> = rest;
        order.extend(labels.iter().map(|l| l.as_ref().to_string()));
        let ordered = self.reorder(&order)?;
        let db = self.d().pow(labels.len() as u32);
        let n = ordered.mat.nrows();
        let m = &ordered.mat;
        Ok(Matrix::from_fn(n, n, |i, j| {
            let (a, b) = (i / db, i % db);
            let (a2, b2) = (j / db, j % db);
            m[(a * db + b2, a2 * db + b)]
        }))
    }

    /// `tr(ρ · ⊗ops)`.
    pub fn local_expectation(&self, ops: &[(&str, &Matrix)]) -> Result<C64> {
        let n = self.register.len();
        let d = self.d();
        let mut axes = Vec::with_capacity(ops.len());
        for (label, op) in ops {
            if op.nrows() != d || op.ncols() != d {
                return Err(Error::OperatorShape {
                    rows: op.nrows(),
                    cols: op.ncols(),
                    d,
                });
            }
            axes.push((self.register.position(label)?, *op));
        }
        let dim = self.mat.nrows();
        let mut total = C64::new(0.0, 0.0);
        let mut col = vec![C64::new(0.0, 0.0); dim];
        for j in 0..dim {
            for (i, slot) in col.iter_mut().enumerate() {
                *slot = self.mat[(i, j)];
            }
            let mut v = col.clone();
            for (axis, op) in &axes {
                v = apply_on_axis(d, n, *axis, op, &v);
            }
            total += v[j];
        }
        Ok(total)
    }

    /// `‖self − other‖_F`.
    pub fn frobenius_distance(&self, other: &DensityOperator) -> Result<f64> {
        if self.register != other.register {
            return Err(Error::RegisterMismatch("frobenius distance".into()));
        }
        Ok((&self.mat - &other.mat).norm())
    }

    /// Largest absolute entry difference against `other`.
    pub fn max_deviation(&self, other: &DensityOperator) -> Result<f64> {
        if self.register != other.register {
            return Err(Error::RegisterMismatch("max deviation".into()));
        }
        Ok((&self.mat - &other.mat).camax())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opsbasis::bell_state;

    #[test]
    fn validation_rejects_bad_matrices() {
        let reg = Register::new(2, ["q"]).unwrap();
        let bad_trace = Matrix::identity(2, 2);
        assert!(DensityOperator::from_matrix(reg.clone(), bad_trace).is_err());
        let mut non_herm = Matrix::identity(2, 2) * C64::new(0.5, 0.0);
        non_herm[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityOperator::from_matrix(reg.clone(), non_herm).is_err());
        let mut neg = Matrix::zeros(2, 2);
        neg[(0, 0)] = C64::new(1.5, 0.0);
        neg[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(DensityOperator::from_matrix(reg, neg).is_err());
    }

    #[test]
    fn partial_trace_of_bell_density() {
        let b = bell_state(2, 0, 0, ("X", "Y")).unwrap();
        let rho = DensityOperator::from_pure(&b).unwrap();
        let red = rho.partial_trace(&["Y"]).unwrap();
        assert!((red.matrix() - Matrix::identity(2, 2) * C64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        assert!((red.entropy() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_transpose_of_bell_has_negative_eigenvalue() {
        for d in [2, 3] {
            let b = bell_state(d, 0, 0, ("X", "Y")).unwrap();
            let rho = DensityOperator::from_pure(&b).unwrap();
            let pt = rho.partial_transpose(&["Y"]).unwrap();
            let eig = hermitian_eigenvalues(&pt);
            assert!((eig[0] + 1.0 / d as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn local_expectation_matches_pure() {
        let b = bell_state(3, 1, 2, ("X", "Y")).unwrap();
        let rho = DensityOperator::from_pure(&b).unwrap();
        let u = crate::opsbasis::WeylOp::u(3, 2, 1).unwrap().matrix();
        let v = crate::opsbasis::WeylOp::u(3, 1, 1).unwrap().matrix();
        let ops = [("X", &u), ("Y", &v)];
        let a = b.local_expectation(&ops).unwrap();
        let r = rho.local_expectation(&ops).unwrap();
        assert!((a - r).norm() < 1e-12);
    }

    #[test]
    fn permute_density_matches_pure_permute() {
        let mut rng = rand::rng();
        let psi = PureState::random(Register::new(2, ["a", "b", "c"]).unwrap(), &mut rng).unwrap();
        let map = [("a", "c"), ("c", "b"), ("b", "a")];
        let via_pure = DensityOperator::from_pure(&psi.permute(&map).unwrap()).unwrap();
        let via_rho = DensityOperator::from_pure(&psi).unwrap().permute(&map).unwrap();
        assert!(via_pure.max_deviation(&via_rho).unwrap() < 1e-14);
    }
}
