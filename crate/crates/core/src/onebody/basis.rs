//! `l = 0` radial harmonic-oscillator functions at unit length scale,
//!
//! ```text
//! ψ_k(x) = N_k e^{-x²/2} L_k^{1/2}(x²),   ∫ ψ_i ψ_j x² dx = δ_ij,
//! ```
//!
//! and their matrix elements. The position-space function at scale `b` is
//! `b^{-3/2} ψ_k(r/b)`; its Fourier transform is `(-1)^k b^{3/2} ψ_k(p b)`,
//! so momentum-space matrix elements reuse the same functions with the
//! phase `(-1)^{i+j}`.

use nalgebra::DMatrix;
use statrs::function::gamma::ln_gamma;

/// `ψ_0(x), …, ψ_{n-1}(x)` from the normalized Laguerre recurrence.
pub fn oscillator_functions(n: usize, x: f64, out: &mut [f64]) {
    debug_assert!(out.len() >= n);
    if n == 0 {
        return;
    }
    let t = x * x;
    // ψ_0 = √2 e^{-t/2} / √Γ(3/2)
    out[0] = (0.5 * (2.0f64.ln() - t - ln_gamma(1.5))).exp();
    if n == 1 {
        return;
    }
    out[1] = (1.5 - t) * out[0] / 1.5f64.sqrt();
    for k in 1..n - 1 {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.5 - t) * out[k] - (kf * (kf + 0.5)).sqrt() * out[k - 1])
            / ((kf + 1.0) * (kf + 1.5)).sqrt();
    }
}

/// `n × nodes` table of `(-1)^i ψ_i(x_k)`: the momentum-space phase is
/// folded into the rows.
pub fn signed_table(n: usize, nodes: &[f64]) -> DMatrix<f64> {
    let mut table = DMatrix::zeros(n, nodes.len());
    let mut column = vec![0.0; n];
    for (k, &x) in nodes.iter().enumerate() {
        oscillator_functions(n, x, &mut column);
        for (i, v) in column.iter().enumerate() {
            table[(i, k)] = if i % 2 == 0 { *v } else { -*v };
        }
    }
    table
}

/// Closed form of `⟨ψ_i| x^q |ψ_j⟩` at unit scale, valid for any `q > -3`.
///
/// Expanding `L_i^{1/2}` in `L^{β}` with `β = (1+q)/2` gives
///
/// ```text
/// ⟨i|x^q|j⟩ = Σ_{k ≤ min(i,j)} c_{i-k} c_{j-k} Γ(k+β+1)/k!  /  √(h_i h_j)
/// c_m = (-1)^m binom(q/2, m),    h_i = Γ(i+3/2)/i!
/// ```
///
/// For `q ∈ {-1, 1}` every term of the sum has the same sign and for `q = 2`
/// the matrix is tridiagonal, so there is no cancellation.
pub fn power_matrix_closed_form(n: usize, q: f64) -> DMatrix<f64> {
    let beta = 0.5 * (1.0 + q);
    let half_q = 0.5 * q;

    let mut c = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut h = vec![0.0; n];
    if n > 0 {
        c[0] = 1.0;
        g[0] = ln_gamma(beta + 1.0).exp();
        h[0] = ln_gamma(1.5).exp();
    }
    for m in 1..n {
        let mf = m as f64;
        c[m] = c[m - 1] * (mf - 1.0 - half_q) / mf;
        g[m] = g[m - 1] * (mf + beta) / mf;
        h[m] = h[m - 1] * (mf + 0.5) / mf;
    }

    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let sum: f64 = (0..=i).map(|k| c[i - k] * c[j - k] * g[k]).sum();
            let v = sum / (h[i] * h[j]).sqrt();
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;
    use std::f64::consts::PI;

    /// Composite Gauss–Legendre on [0, 30], fine enough for n ≤ 20.
    fn brute_force(n: usize, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let (gx, gw) = gauss_legendre(20);
        let h = 0.05;
        let mut m = DMatrix::zeros(n, n);
        let mut psi = vec![0.0; n];
        for p in 0..600 {
            for (u, w) in gx.iter().zip(&gw) {
                let x = p as f64 * h + 0.5 * h * (u + 1.0);
                oscillator_functions(n, x, &mut psi);
                let weight = 0.5 * h * w * x * x * f(x);
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] += weight * psi[i] * psi[j];
                    }
                }
            }
        }
        m
    }

    #[test]
    fn functions_are_orthonormal() {
        let s = brute_force(20, |_| 1.0);
        let err = (s - DMatrix::identity(20, 20)).abs().max();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn ground_state_moments() {
        // ⟨r⟩ = 2/√π, ⟨r²⟩ = 3/2, ⟨1/r⟩ = 2/√π for the unit oscillator.
        assert!((power_matrix_closed_form(1, 1.0)[(0, 0)] - 2.0 / PI.sqrt()).abs() < 1e-14);
        assert!((power_matrix_closed_form(1, 2.0)[(0, 0)] - 1.5).abs() < 1e-14);
        assert!((power_matrix_closed_form(1, -1.0)[(0, 0)] - 2.0 / PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_brute_force() {
        for q in [-1.0, -0.5, 0.5, 1.0, 1.5, 2.0] {
            let closed = power_matrix_closed_form(16, q);
            let brute = brute_force(16, |x| x.powf(q));
            let err = (closed - brute).abs().max();
            // x^{2+q} is not smooth at 0 for fractional q; the reference
            // rule loses a few digits in its first panel there.
            let tol = if q.fract() == 0.0 { 1e-11 } else { 1e-9 };
            assert!(err < tol, "q = {q}: {err}");
        }
    }

    #[test]
    fn harmonic_oscillator_is_diagonal() {
        // (p² + r²)/2 at unit scale has eigenvalues 2k + 3/2 in this basis;
        // ⟨p²⟩ = (-1)^{i+j} ⟨r²⟩ by the Fourier symmetry of the functions.
        let r2 = power_matrix_closed_form(12, 2.0);
        let p2 = DMatrix::from_fn(12, 12, |i, j| {
            if (i + j) % 2 == 0 {
                r2[(i, j)]
            } else {
                -r2[(i, j)]
            }
        });
        let h = (r2 + p2) * 0.5;
        for i in 0..12 {
            for j in 0..12 {
                let want = if i == j { 2.0 * i as f64 + 1.5 } else { 0.0 };
                assert!((h[(i, j)] - want).abs() < 1e-13);
            }
        }
    }
}
