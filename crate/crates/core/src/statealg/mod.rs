//! Labeled multi-qudit pure states and density operators.
//!
//! Everything here is immutable: operations return new values. Local
//! operators are applied by stride arithmetic, never by materialising the
//! full `d^n × d^n` operator.

mod density;
mod linalg;
mod pure;
mod register;

pub use density::DensityOperator;
pub use linalg::{hermitian_eigenvalues, von_neumann_entropy};
pub use pure::PureState;
pub use register::{
    full_dim, guard_density, guard_pure, max_pure_dim, Cut, Register, DEFAULT_MAX_PURE_DIM,
    MAX_DENSITY_DIM,
};

pub(crate) use pure::inner;
