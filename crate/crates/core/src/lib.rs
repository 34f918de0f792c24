//! # qric
//!
//! Dense qudit simulation of 1→N universal telecloning and its reverse,
//! many-to-one remote information concentration (RIC), together with the
//! verification machinery for the entangled resource states involved.
//!
//! The crate is organised bottom-up:
//!
//! - [`statealg`]: labeled registers, pure states, density operators,
//!   partial traces, relabeling and entropies.
//! - [`opsbasis`]: Weyl operators `U^{m,n}` / `R^{m,n}`, generalized Bell and
//!   GHZ states, symmetric occupation states and the stabilizer group.
//! - [`channels`]: every entangled resource state the protocols consume,
//!   plus the JSON channel-spec format.
//! - [`measurement`]: projective generalized Bell-basis measurement.
//! - [`protocols`]: telecloning, clone-state decomposition, RIC and the two
//!   many-to-many variants, each producing classical transcripts.
//! - [`analysis`]: stabilizer suites, state equivalences, unlocking of the
//!   bound entangled channel, PPT evidence, symmetry and LU fingerprints.
//! - [`cli`]: the `qric` command-line front end (JSON reports).
//!
//! Indices are big-endian: the label at register position 0 is the most
//! significant dit.

#![forbid(unsafe_code)]

pub mod analysis;
pub mod channels;
pub mod cli;
pub mod error;
pub mod measurement;
pub mod opsbasis;
pub mod protocols;
pub mod statealg;

pub use error::{Error, Result};
pub use statealg::{Cut, DensityOperator, PureState, Register};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix used for local operators and density matrices.
pub type Matrix = nalgebra::DMatrix<C64>;

/// Default absolute tolerance for comparisons of double-precision amplitudes.
pub const TOL: f64 = 1e-10;
