pub mod bounds;
pub mod solve;
pub mod verify;

use std::ops::RangeInclusive;

use urb_core::nbody::BoundsError;
use urb_core::onebody::{SolverConfig, SolverError};
use urb_core::PotentialSpec;

use crate::args::SolverArgs;
use crate::error::CliError;

pub fn parse_potential(descriptor: &str) -> Result<PotentialSpec, CliError> {
    descriptor
        .parse()
        .map_err(|e| CliError::Input(format!("--potential: {e}")))
}

pub fn parse_mass(mass: f64, flag: &str) -> Result<f64, CliError> {
    if mass >= 0.0 && mass.is_finite() {
        Ok(mass)
    } else {
        Err(CliError::Input(format!(
            "{flag} must be finite and non-negative, got {mass}"
        )))
    }
}

pub fn solver_config(args: &SolverArgs) -> Result<SolverConfig, CliError> {
    let mut config = SolverConfig::default();
    if let Some(n) = args.basis {
        config.basis_size = n;
        config.quadrature_order = config.quadrature_order.max(4 * n);
        config.max_basis_size = config.max_basis_size.max(n);
    }
    if let Some(max) = args.max_basis {
        config.max_basis_size = max;
    }
    if let Some(q) = args.quad {
        config.quadrature_order = q;
    }
    if let Some(tol) = args.tol {
        config.tolerance = tol;
    }
    config
        .validate()
        .map_err(|e| CliError::Input(e.to_string()))?;
    Ok(config)
}

fn parse_count(s: &str, flag: &str) -> Result<usize, CliError> {
    let bad = || CliError::Input(format!("{flag}: `{s}` is not a positive integer"));
    let s = s.trim();
    if let Ok(n) = s.parse::<usize>() {
        return if n >= 1 { Ok(n) } else { Err(bad()) };
    }
    // Scientific notation such as 1e6.
    let x: f64 = s.parse().map_err(|_| bad())?;
    if x >= 1.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(bad())
    }
}

/// `a..b`, `a..=b` or `a`.
pub fn parse_range(s: &str, flag: &str) -> Result<RangeInclusive<usize>, CliError> {
    let s = s.trim();
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let lo = parse_count(lo, flag)?;
    let hi = parse_count(hi, flag)?;
    if lo < 2 || hi < lo {
        return Err(CliError::Input(format!(
            "{flag}: range must satisfy 2 <= N_min <= N_max, got `{s}`"
        )));
    }
    Ok(lo..=hi)
}

/// Comma-separated values or ranges.
pub fn parse_list(s: &str, flag: &str) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        out.extend(parse_range(part, flag)?);
    }
    if out.is_empty() {
        return Err(CliError::Input(format!("{flag}: empty list")));
    }
    Ok(out)
}

pub fn parse_samples(s: &str) -> Result<usize, CliError> {
    parse_count(s, "--samples")
}

pub fn solver_error_kind(e: &SolverError) -> &'static str {
    match e {
        SolverError::InvalidConfig(_) => "InvalidConfig",
        SolverError::InvalidProblem(_) => "InvalidProblem",
        SolverError::CouplingAboveCritical { .. } => "CouplingAboveCritical",
        SolverError::NoBoundState(_) => "NoBoundState",
        SolverError::BracketExhausted { .. } => "BracketExhausted",
        SolverError::NumericalFailure { .. } => "NumericalFailure",
        SolverError::Unsupported(_) => "Unsupported",
        SolverError::Potential(_) => "InvalidPotential",
    }
}

pub fn bounds_error_kind(e: &BoundsError) -> &'static str {
    match e {
        BoundsError::Domain(_) => "Domain",
        BoundsError::Unsupported(_) => "Unsupported",
        BoundsError::Solver(inner) => solver_error_kind(inner),
        BoundsError::Inverted { .. } => "BoundsInverted",
        BoundsError::ClosedFormMismatch { .. } => "ClosedFormMismatch",
    }
}

/// Whether a solver error reflects bad input rather than the numerics.
pub fn is_input_error(e: &SolverError) -> bool {
    matches!(
        e,
        SolverError::InvalidConfig(_) | SolverError::InvalidProblem(_) | SolverError::Potential(_)
    )
}
