//! Discrete analytic (DA) function calculus on finite patches of rhombic
//! lattices.
//!
//! The crate is organized around five layers:
//!
//! * [`lattice`] — rhombic lattice patches: construction, validation, paths,
//!   leashes, tracks and the derived direction/forbidden/pole sets.
//! * [`calculus`] — DA functions and the basic calculus: discrete integrals,
//!   the Cauchy–Riemann residual, forward/backward shift operators, the
//!   eigenfunctions `e_t`, the pseudo-power basis `z^(n)` and the Duffin
//!   basis, plus the convolution product of DA polynomials.
//! * [`realization`] — state-space calculus for rational DA functions:
//!   spectrum checks, path-product resolvents, realization evaluation and
//!   algebra, the `tau` transform and minimal realizations from Markov data.
//! * [`rational`] — user-facing rational DA functions: reproducing kernels,
//!   polynomial quotient certificates and the shift-invariance rank test.
//! * [`verify`] — the consolidated property-verification suite used by the
//!   `dalat verify` command.

pub mod calculus;
pub mod error;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod numeric;
pub mod rational;
pub mod realization;
pub mod series;
pub mod verify;

pub use calculus::{DaFunction, DaPolynomial};
pub use error::{Error, Result};
pub use lattice::{DirectionData, Lattice, LatticeKind, Path, Track, ValidationReport, VertexId};
pub use numeric::Tolerance;
pub use rational::RationalDa;
pub use realization::{Realization, ScalarRational};

/// Double-precision complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix used for DA function values and realizations.
pub type CMatrix = nalgebra::DMatrix<C64>;
