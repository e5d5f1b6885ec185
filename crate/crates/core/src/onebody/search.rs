//! One-dimensional minimization over the oscillator length scale.
//!
//! The energy is assumed unimodal in `ln b`. A uniform scan over the bracket
//! locates the basin; if the lowest scan point sits on an edge the bracket
//! is widened by a factor of two on that side, up to a fixed number of
//! times. Golden-section search then refines inside the basin.

use super::SolverError;

/// Scan points per bracket.
const SCAN_POINTS: usize = 13;
/// Interval length in `ln b` at which golden-section stops.
const LOG_TOLERANCE: f64 = 1e-6;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleMinimum {
    pub scale: f64,
    pub energy: f64,
    /// Final bracket after any expansions.
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

pub fn minimize_scale<F>(
    mut energy: F,
    bracket: (f64, f64),
    max_expansions: usize,
) -> Result<ScaleMinimum, SolverError>
where
    F: FnMut(f64) -> Result<f64, SolverError>,
{
    let (mut low, mut high) = bracket;
    let mut evaluations = 0;
    let mut eval = |u: f64, count: &mut usize| {
        *count += 1;
        energy(u.exp())
    };

    let mut expansions = 0;
    let (left, mid, right, f_mid) = loop {
        let (lo, hi) = (low.ln(), high.ln());
        let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
        let mut best = (0, f64::INFINITY);
        for i in 0..SCAN_POINTS {
            let f = eval(lo + step * i as f64, &mut evaluations)?;
            if f < best.1 {
                best = (i, f);
            }
        }
        if !best.1.is_finite() {
            return Err(SolverError::NumericalFailure {
                detail: "non-finite energy over the whole scale bracket".into(),
            });
        }
        let at_low = best.0 == 0;
        let at_high = best.0 == SCAN_POINTS - 1;
        if !(at_low || at_high) {
            let i = best.0 as f64;
            break (
                lo + step * (i - 1.0),
                lo + step * i,
                lo + step * (i + 1.0),
                best.1,
            );
        }
        if expansions == max_expansions {
            return Err(SolverError::BracketExhausted {
                low,
                high,
                expansions,
            });
        }
        expansions += 1;
        if at_low {
            low *= 0.5;
        } else {
            high *= 2.0;
        }
    };

    // Golden section on [left, right]; `mid` only seeds the best value.
    let (mut a, mut b) = (left, right);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c, &mut evaluations)?;
    let mut fd = eval(d, &mut evaluations)?;
    while b - a > LOG_TOLERANCE {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c, &mut evaluations)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d, &mut evaluations)?;
        }
    }
    let (mut u_best, mut f_best) = if fc < fd { (c, fc) } else { (d, fd) };
    if f_mid < f_best {
        u_best = mid;
        f_best = f_mid;
    }

    Ok(ScaleMinimum {
        scale: u_best.exp(),
        energy: f_best,
        bracket: (low, high),
        evaluations,
    })
}
