//! Bounds on the ground energy of
//!
//! ```text
//! H = Σ_i √(p_i² + m²) + Σ_{i<j} V(r_ij),   Σ_i p_i = 0,
//! ```
//!
//! for `N` identical bosons.
//!
//! The lower bound is the ground energy of the one-body operator
//! `N √(λ p² + m²) + γ V(r)`. It is a theorem for `m = 0` and a few special
//! cases, and a conjecture otherwise; every record carries which.
//!
//! The upper bound is the expectation of `H` in the translation-invariant
//! Gaussian `Φ ∝ exp(-(α/2) Σ_{i<j} r_ij²)`, minimized over `α`. In `Φ` each
//! momentum `p_i` has per-component variance `α(N-1)/2` and each `r_ij` has
//! per-component variance `1/(αN)`, so for `m = 0`
//!
//! ```text
//! ⟨H⟩(α) = A √α + B α^{-q/2}
//! A = N √(8/π) √((N-1)/2)
//! B = γ c (2/N)^{q/2} Γ((3+q)/2) / Γ(3/2)
//! ```
//!
//! with minimum at `α* = (qB/A)^{2/(1+q)}`. For `q = 1` this is
//! `4N ((N-1)³ / (2Nπ²))^{1/4} √c`.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::onebody::{
    search::minimize_scale, solve, unit_ground_state, GroundStateResult, OneBodyProblem,
    SolverConfig, SolverError, SystemParams,
};
use crate::potentials::{PotentialKind, PotentialSpec};
use crate::quadrature::maxwell_rule;

/// Largest relative gap tolerated between the closed-form and directly
/// solved lower bound of a linear massless row.
pub const CLOSED_FORM_AGREEMENT: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("N = {particles}: lower bound {lower} exceeds upper bound {upper}")]
    Inverted {
        particles: usize,
        lower: f64,
        upper: f64,
    },
    #[error(
        "N = {particles}: closed-form lower bound {closed_form} and direct solve {solved} \
         differ by {relative:.3e} (relative)"
    )]
    ClosedFormMismatch {
        particles: usize,
        closed_form: f64,
        solved: f64,
        relative: f64,
    },
}

/// `(λ, γ) = (2(N-1)/N, N(N-1)/2)`.
pub fn reduced_couplings(particles: usize) -> Result<(f64, u64), BoundsError> {
    let params = SystemParams::new(particles, 0.0).map_err(|_| {
        BoundsError::Domain(format!(
            "particle number must be at least 2, got {particles}"
        ))
    })?;
    Ok((params.lambda(), params.gamma()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConjectureStatus {
    Proven,
    Conjectured,
}

impl ConjectureStatus {
    pub fn label(self) -> &'static str {
        match self {
            ConjectureStatus::Proven => "PROVEN",
            ConjectureStatus::Conjectured => "CONJECTURED",
        }
    }
}

/// Why a lower bound is known to hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProofBasis {
    /// `m = 0`, every `N` and every attractive `V`. Covers the older
    /// `N = 4, m = 0` result.
    Massless,
    /// The reduction is exact for two bodies.
    TwoBody,
    ThreeBody,
    Harmonic,
    Coulomb,
}

impl ProofBasis {
    pub fn note(self) -> &'static str {
        match self {
            ProofBasis::Massless => "massless bosons: holds for every N and attractive V",
            ProofBasis::TwoBody => "N = 2: the one-body reduction is exact",
            ProofBasis::ThreeBody => "N = 3: holds for every mass and potential",
            ProofBasis::Harmonic => "harmonic potential: holds for every mass and N",
            ProofBasis::Coulomb => "Coulomb potential: holds for every mass and N",
        }
    }
}

pub const CONJECTURE_CAVEAT: &str = "lower bound assumes <H> >= <H_c>, which is proven only for \
     m = 0, N <= 3, harmonic and Coulomb potentials";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct StatusDecision {
    pub status: ConjectureStatus,
    pub basis: Option<ProofBasis>,
}

impl StatusDecision {
    pub fn caveat(&self) -> Option<&'static str> {
        match self.status {
            ConjectureStatus::Proven => None,
            ConjectureStatus::Conjectured => Some(CONJECTURE_CAVEAT),
        }
    }
}

/// Status of the lower bound for `(m, N, kind)`. With `kind == None` only
/// the potential-independent cases can prove it.
pub fn decide_status(mass: f64, particles: usize, kind: Option<PotentialKind>) -> StatusDecision {
    let basis = if mass == 0.0 {
        Some(ProofBasis::Massless)
    } else if particles == 2 {
        Some(ProofBasis::TwoBody)
    } else if particles == 3 {
        Some(ProofBasis::ThreeBody)
    } else {
        match kind {
            Some(PotentialKind::Harmonic) => Some(ProofBasis::Harmonic),
            Some(PotentialKind::Coulomb) => Some(ProofBasis::Coulomb),
            _ => None,
        }
    };
    StatusDecision {
        status: if basis.is_some() {
            ConjectureStatus::Proven
        } else {
            ConjectureStatus::Conjectured
        },
        basis,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBound {
    pub energy: f64,
    pub decision: StatusDecision,
    pub solver: GroundStateResult,
}

/// Ground energy of `N √(λ p² + m²) + γ V(r)` with its proof status.
pub fn lower_bound(
    params: &SystemParams,
    potential: &PotentialSpec,
    config: &SolverConfig,
) -> Result<LowerBound, BoundsError> {
    let problem = OneBodyProblem::reduced(params, *potential);
    let solver = solve(&problem, config)?;
    Ok(LowerBound {
        energy: solver.energy,
        decision: decide_status(params.mass(), params.particles(), Some(potential.kind())),
        solver,
    })
}

/// `e`, the ground energy of `|p| + r`, from the memoized solver.
pub fn linear_constant(config: &SolverConfig) -> Result<f64, BoundsError> {
    Ok(unit_ground_state(1.0, config)?.energy)
}

/// `N ((N-1)³ / (2N))^{1/4} e` for `V = r`; scale by `√c` for `V = c r`.
pub fn lower_bound_linear_closed_form(particles: usize) -> Result<f64, BoundsError> {
    lower_bound_linear_closed_form_with(particles, &SolverConfig::default())
}

pub fn lower_bound_linear_closed_form_with(
    particles: usize,
    config: &SolverConfig,
) -> Result<f64, BoundsError> {
    let n = checked_particles(particles)?;
    Ok(n * ((n - 1.0).powi(3) / (2.0 * n)).powf(0.25) * linear_constant(config)?)
}

/// `4N ((N-1)³ / (2Nπ²))^{1/4}` for `V = r`; scale by `√c` for `V = c r`.
pub fn gaussian_upper_bound_linear_closed_form(particles: usize) -> Result<f64, BoundsError> {
    let n = checked_particles(particles)?;
    Ok(4.0 * n * ((n - 1.0).powi(3) / (2.0 * n * PI * PI)).powf(0.25))
}

fn checked_particles(particles: usize) -> Result<f64, BoundsError> {
    reduced_couplings(particles)?;
    Ok(particles as f64)
}

/// Coefficients `(A, B)` of the massless Gaussian energy `A √α + B α^{-q/2}`.
fn gaussian_coefficients(params: &SystemParams, potential: &PotentialSpec) -> (f64, f64) {
    let n = params.particles() as f64;
    let q = potential.exponent();
    let a = n * (8.0 / PI).sqrt() * ((n - 1.0) / 2.0).sqrt();
    let radial = (0.5 * q * (2.0 / n).ln() + ln_gamma(0.5 * (3.0 + q)) - ln_gamma(1.5)).exp();
    let b = params.gamma() as f64 * potential.coupling() * radial;
    (a, b)
}

/// Scale-optimized Gaussian upper bound on the `N`-body ground energy.
///
/// Closed form for `m = 0`; for `m > 0` the one-particle kinetic mean
/// `⟨√(p² + m²)⟩` over the Maxwell distribution is integrated numerically
/// and `α` minimized by line search. Needs a confining potential, `q > 0`.
pub fn gaussian_upper_bound(
    params: &SystemParams,
    potential: &PotentialSpec,
) -> Result<f64, BoundsError> {
    potential.validate().map_err(SolverError::from)?;
    let q = potential.exponent();
    if q <= 0.0 {
        return Err(BoundsError::Unsupported(format!(
            "Gaussian upper bound needs a confining exponent q > 0, got {q}"
        )));
    }
    let (a, b) = gaussian_coefficients(params, potential);
    let alpha_massless = (q * b / a).powf(2.0 / (1.0 + q));
    let massless = a * alpha_massless.sqrt() + b * alpha_massless.powf(-0.5 * q);
    if params.mass() == 0.0 {
        return Ok(massless);
    }

    let n = params.particles() as f64;
    let m = params.mass();
    let rule = maxwell_rule(128);
    // |p_1| = √(2 σ²) x with x Maxwell-distributed, σ² = α(N-1)/2.
    let energy = |alpha: f64| -> Result<f64, SolverError> {
        let width = (alpha * (n - 1.0)).sqrt();
        let kinetic = 4.0 / PI.sqrt()
            * rule.integrate(|x| {
                let p = width * x;
                x * x * (-x * x).exp() * (p * p + m * m).sqrt()
            });
        Ok(n * kinetic + b * alpha.powf(-0.5 * q))
    };
    // The massive optimum lies at larger α (softer kinetic cost), so the
    // bracket leans upward from the massless one.
    let found = minimize_scale(energy, (0.1 * alpha_massless, 1e3 * alpha_massless), 16)?;
    Ok(found.energy)
}

/// One row of a bounds table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsRecord {
    pub particles: usize,
    pub mass: f64,
    pub potential: PotentialSpec,
    pub lower: f64,
    pub lower_status: ConjectureStatus,
    pub proof: Option<ProofBasis>,
    pub caveat: Option<String>,
    /// `None` where the Gaussian bound is not available (`q <= 0`).
    pub upper: Option<f64>,
    pub ratio: Option<f64>,
    pub lower_method: String,
    pub upper_method: String,
    pub solver: GroundStateResult,
}

fn bounds_row(
    particles: usize,
    potential: &PotentialSpec,
    mass: f64,
    config: &SolverConfig,
) -> Result<BoundsRecord, BoundsError> {
    let params = SystemParams::new(particles, mass)?;
    let solved = lower_bound(&params, potential, config)?;
    let closed_form = potential.kind() == PotentialKind::Linear && mass == 0.0;

    let (lower, lower_method) = if closed_form {
        let root_c = potential.coupling().sqrt();
        let lower = lower_bound_linear_closed_form_with(particles, config)? * root_c;
        let relative = ((lower - solved.energy) / lower).abs();
        if relative > CLOSED_FORM_AGREEMENT {
            return Err(BoundsError::ClosedFormMismatch {
                particles,
                closed_form: lower,
                solved: solved.energy,
                relative,
            });
        }
        let method = format!(
            "closed form N((N-1)^3/(2N))^(1/4) e sqrt(c); direct solve agrees to {relative:.1e}"
        );
        (lower, method)
    } else {
        let method = format!(
            "Rayleigh-Ritz ground energy of N sqrt(lambda p^2 + m^2) + gamma V(r), basis {}",
            solved.solver.basis_size
        );
        (solved.energy, method)
    };

    let (upper, upper_method) = match gaussian_upper_bound(&params, potential) {
        Ok(_) if closed_form => (
            Some(gaussian_upper_bound_linear_closed_form(particles)? * potential.coupling().sqrt()),
            "closed form 4N((N-1)^3/(2N pi^2))^(1/4) sqrt(c)".to_string(),
        ),
        Ok(value) if mass == 0.0 => (
            Some(value),
            "Gaussian trial state, closed-form moments".to_string(),
        ),
        Ok(value) => (
            Some(value),
            "Gaussian trial state, numerical kinetic moment".to_string(),
        ),
        Err(BoundsError::Unsupported(reason)) => (None, reason),
        Err(other) => return Err(other),
    };

    if let Some(upper) = upper {
        if lower > upper {
            return Err(BoundsError::Inverted {
                particles,
                lower,
                upper,
            });
        }
    }

    Ok(BoundsRecord {
        particles,
        mass,
        potential: *potential,
        lower,
        lower_status: solved.decision.status,
        proof: solved.decision.basis,
        caveat: solved.decision.caveat().map(str::to_string),
        upper,
        ratio: upper.map(|u| u / lower),
        lower_method,
        upper_method,
        solver: solved.solver,
    })
}

/// One record per `N` in `range`, computed in parallel and returned in
/// order of `N`. Rows fail individually; a bad range fails the table.
pub fn bounds_table(
    range: RangeInclusive<usize>,
    potential: &PotentialSpec,
    mass: f64,
    config: &SolverConfig,
) -> Result<Vec<Result<BoundsRecord, BoundsError>>, BoundsError> {
    let (lo, hi) = (*range.start(), *range.end());
    if lo < 2 || hi < lo {
        return Err(BoundsError::Domain(format!(
            "particle range must satisfy 2 <= N_min <= N_max, got {lo}..{hi}"
        )));
    }
    potential.validate().map_err(SolverError::from)?;
    SystemParams::new(lo, mass)?;
    config.validate()?;
    Ok(range
        .into_par_iter()
        .map(|n| bounds_row(n, potential, mass, config))
        .collect())
}
