use nalgebra::SymmetricEigen;

use crate::{Matrix, C64};

/// Applies a `d×d` operator to axis `axis` of an `n`-qudit amplitude tensor.
pub(crate) fn apply_on_axis(d: usize, n: usize, axis: usize, op: &Matrix, amps: &[C64]) -> Vec<C64> {
    let inner = d.pow((n - 1 - axis) as u32);
    let block = inner * d;
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    let mut col = vec![C64::new(0.0, 0.0); d];
    for base in (0..amps.len()).step_by(block) {
        for off in 0..inner {
            for (j, slot) in col.iter_mut().enumerate() {
                *slot = amps[base + j * inner + off];
            }
            for i in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for (j, v) in col.iter().enumerate() {
                    let e = op[(i, j)];
                    if e.re != 0.0 || e.im != 0.0 {
                        acc += e * v;
                    }
                }
                out[base + i * inner + off] = acc;
            }
        }
    }
    out
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &Matrix) -> Vec<f64> {
    // symmetrise to suppress rounding asymmetry before the Hermitian solver
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut eig: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().cloned().collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}

/// `−Σ λ log₂ λ` over the strictly positive part of a spectrum.
pub fn von_neumann_entropy(eigs: &[f64]) -> f64 {
    eigs.iter()
        .filter(|&&l| l > 1e-14)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}
