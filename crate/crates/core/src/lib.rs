//! Energy bounds for systems of `N` identical ultrarelativistic bosons with
//! attractive pair potentials.
//!
//! * [`potentials`]: the power-law family `sgn(q) c r^q`.
//! * [`onebody`]: spectral ground-state solver for `a √(λp² + μ²) + b V(r)`.
//! * [`nbody`]: lower and Gaussian upper bounds on the `N`-body energy.
//! * [`theorem1`]: Monte Carlo checks of the massless kinetic identity on
//!   zero-total-momentum ensembles.

pub mod nbody;
pub mod onebody;
pub mod potentials;
pub mod quadrature;
pub mod theorem1;

pub use onebody::{
    solve, GroundStateResult, OneBodyProblem, SolverConfig, SolverError, SystemParams,
};
pub use potentials::{PotentialError, PotentialKind, PotentialSpec};
