//! The quartic nilpotent group and the quasi-exactly-solvable quartic
//! anharmonic oscillator built from its generators.
//!
//! Module map:
//!
//! - [`group`]: group law, inverses, Heisenberg embedding, Casimir values,
//!   equivalence/scaling of representation labels, automorphisms.
//! - [`rep`]: generators `X0..X3` acting on polynomials and the unitary
//!   irreducible representation acting on sampled functions.
//! - [`potential`]: the parity-symmetric quartic potential.
//! - [`qes`]: recursion matrix, energies, coefficient vectors, continuity
//!   matching, closed forms and the `c = 0` branch.
//! - [`wavefunction`]: closed-form eigenfunctions with analytic derivatives.
//! - [`oracle`]: finite-difference spectral solver used as an independent check.
//! - [`em_field`]: fields of the reducible representation and 2D synthesis.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod em_field;
pub mod error;
pub mod group;
pub mod oracle;
pub mod poly;
pub mod potential;
pub mod qes;
pub mod rep;
pub mod tridiag;
pub mod wavefunction;

pub use error::{Error, Result};
pub use group::{BetaVector, GroupElement};
pub use potential::PotentialParams;
pub use qes::{Parity, QesProblem, QesSolution};
pub use wavefunction::WavefunctionSpec;
