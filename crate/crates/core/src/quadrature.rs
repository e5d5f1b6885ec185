//! Gauss rules on the half line for the oscillator-basis matrix elements.
//!
//! Every rule is stored in "weight-absorbed" form: nodes `x_k` and factors
//! `omega_k = w_k / W(x_k)` such that `∫ F(x) dx ≈ Σ omega_k F(x_k)` whenever
//! `F = W · P` with `P` a polynomial of degree `< 2Q`. Keeping the weight
//! inside `F` avoids the under/overflow of `w_k` and `P(x_k)` at the
//! outermost nodes. The factors are obtained from the Christoffel function,
//! `1 / omega_k = Σ_j φ_j(x_k)²`, where `φ_j = π_j √W` are the orthonormal
//! functions of the weight, evaluated by their three-term recurrence.
//!
//! Two weights are needed:
//! * `x² e^{-x²}` on `[0, ∞)` (Maxwell weight), whose recurrence
//!   coefficients have no closed form and are computed by a discretized
//!   Stieltjes procedure on a composite Gauss–Legendre grid;
//! * `t^α e^{-t}` on `[0, ∞)` (generalized Laguerre), closed-form
//!   coefficients.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;
use statrs::function::gamma::ln_gamma;

/// Nodes and weight-absorbed factors of a Gauss rule.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    omega: Vec<f64>,
}

impl GaussRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `w_k / W(x_k)`.
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ omega_k F(x_k)` in fixed node order.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.omega)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Three-term recurrence `x π_k = √b_{k+1} π_{k+1} + a_k π_k + √b_k π_{k-1}`
/// of the orthonormal polynomials of a weight.
struct Recurrence {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Recurrence {
    /// Builds the rule from the first `a.len()` coefficients; `ln_phi0(x)`
    /// must return `ln √(W(x) / μ₀)`. The Christoffel sum is carried with a
    /// separate log scale since `φ₀` underflows at the outer nodes of the
    /// larger rules.
    fn into_rule(self, ln_phi0: impl Fn(f64) -> f64) -> GaussRule {
        let q = self.a.len();
        let jacobi = DMatrix::from_fn(q, q, |i, j| {
            if i == j {
                self.a[i]
            } else if i + 1 == j {
                self.b[j].sqrt()
            } else if j + 1 == i {
                self.b[i].sqrt()
            } else {
                0.0
            }
        });
        let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
        nodes.sort_by(f64::total_cmp);

        let omega = nodes
            .iter()
            .map(|&x| {
                let mut ln_scale = ln_phi0(x);
                let mut prev = 0.0;
                let mut cur = 1.0;
                let mut sum = 1.0;
                for k in 0..q - 1 {
                    let back = if k == 0 { 0.0 } else { self.b[k].sqrt() * prev };
                    let next = ((x - self.a[k]) * cur - back) / self.b[k + 1].sqrt();
                    prev = cur;
                    cur = next;
                    sum += cur * cur;
                    let size = cur.abs();
                    if size > 1e100 {
                        prev /= size;
                        cur /= size;
                        sum /= size * size;
                        ln_scale += size.ln();
                    }
                }
                (-2.0 * ln_scale - sum.ln()).exp()
            })
            .collect();
        GaussRule { nodes, omega }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 0 { 0.0 } else { p0 };
            dp = nf * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Panel width and order of the discretization behind the Maxwell rule.
const STIELTJES_PANEL: f64 = 0.25;
const STIELTJES_ORDER: usize = 24;
/// Geometric halvings of the first panel. Gauss nodes crowd the hard edge
/// at 0 like `1/Q²`; without grading the smallest nodes lock onto
/// discretization points.
const STIELTJES_GRADING: usize = 12;

fn maxwell_rule_uncached(order: usize) -> GaussRule {
    // The orthonormal functions of degree < 2Q are negligible beyond the
    // largest zero √(2Q) by a wide margin at +12.
    let x_max = (2.0 * order as f64).sqrt() + 12.0;
    let panels = (x_max / STIELTJES_PANEL).ceil() as usize;
    let mut edges = vec![0.0];
    edges.extend(
        (1..=STIELTJES_GRADING)
            .rev()
            .map(|j| STIELTJES_PANEL * 0.5f64.powi(j as i32)),
    );
    edges.extend((1..=panels).map(|p| p as f64 * STIELTJES_PANEL));

    let (gl_x, gl_w) = gauss_legendre(STIELTJES_ORDER);
    let mut xs = Vec::with_capacity(edges.len() * STIELTJES_ORDER);
    let mut sqrt_w = Vec::with_capacity(edges.len() * STIELTJES_ORDER);
    for pair in edges.windows(2) {
        let (left, width) = (pair[0], pair[1] - pair[0]);
        for (u, w) in gl_x.iter().zip(&gl_w) {
            let x = left + 0.5 * width * (u + 1.0);
            xs.push(x);
            // √(h w x² e^{-x²}) formed directly: the weight itself underflows
            // near x = 27, inside the support of the larger rules.
            sqrt_w.push((0.5 * width * w).sqrt() * x * (-0.5 * x * x).exp());
        }
    }

    // Stieltjes in the weighted form u_k = π_k √w, which stays O(1).
    let norm = sqrt_w.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut cur: Vec<f64> = sqrt_w.iter().map(|v| v / norm).collect();
    let mut prev = vec![0.0; xs.len()];
    let mut a = Vec::with_capacity(order);
    let mut b = vec![0.0f64; order];
    for k in 0..order {
        let ak: f64 = xs.iter().zip(&cur).map(|(x, u)| x * u * u).sum();
        a.push(ak);
        if k + 1 == order {
            break;
        }
        let bk_sqrt = b[k].sqrt();
        let mut next: Vec<f64> = xs
            .iter()
            .zip(cur.iter().zip(&prev))
            .map(|(x, (u, v))| (x - ak) * u - bk_sqrt * v)
            .collect();
        let bn: f64 = next.iter().map(|v| v * v).sum();
        let s = bn.sqrt();
        next.iter_mut().for_each(|v| *v /= s);
        b[k + 1] = bn;
        prev = std::mem::replace(&mut cur, next);
    }

    // μ₀ = ∫ x² e^{-x²} dx = √π / 4
    let mu0 = PI.sqrt() / 4.0;
    Recurrence { a, b }.into_rule(|x| x.ln() - 0.5 * x * x - 0.5 * mu0.ln())
}

fn laguerre_rule_uncached(order: usize, alpha: f64) -> GaussRule {
    let a = (0..order).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
    let b = (0..order).map(|k| k as f64 * (k as f64 + alpha)).collect();
    let ln_mu0 = ln_gamma(alpha + 1.0);
    Recurrence { a, b }.into_rule(move |t| 0.5 * (alpha * t.ln() - t - ln_mu0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum RuleKey {
    Maxwell(usize),
    Laguerre(usize, u64),
}

fn cache() -> &'static RwLock<HashMap<RuleKey, Arc<GaussRule>>> {
    static RULES: OnceLock<RwLock<HashMap<RuleKey, Arc<GaussRule>>>> = OnceLock::new();
    RULES.get_or_init(Default::default)
}

fn cached(key: RuleKey, build: impl FnOnce() -> GaussRule) -> Arc<GaussRule> {
    if let Some(rule) = cache().read().expect("rule cache poisoned").get(&key) {
        return Arc::clone(rule);
    }
    // Built outside the lock; a concurrent duplicate build is harmless.
    let rule = Arc::new(build());
    let mut map = cache().write().expect("rule cache poisoned");
    Arc::clone(map.entry(key).or_insert(rule))
}

/// `order`-point Gauss rule for `x² e^{-x²}` on `[0, ∞)`.
pub fn maxwell_rule(order: usize) -> Arc<GaussRule> {
    cached(RuleKey::Maxwell(order), || maxwell_rule_uncached(order))
}

/// `order`-point Gauss rule for `t^α e^{-t}` on `[0, ∞)`, `α > -1`.
pub fn laguerre_rule(order: usize, alpha: f64) -> Arc<GaussRule> {
    assert!(alpha > -1.0, "Laguerre weight needs alpha > -1");
    cached(RuleKey::Laguerre(order, alpha.to_bits()), || {
        laguerre_rule_uncached(order, alpha)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        let x18: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((x18 - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn maxwell_moments_are_exact() {
        // ∫ x^{k+2} e^{-x²} dx = Γ((k+3)/2) / 2
        for order in [8, 64, 200, 384] {
            let rule = maxwell_rule(order);
            for k in [0usize, 1, 2, 5, 9, 15] {
                let got = rule.integrate(|x| x.powi(k as i32 + 2) * (-x * x).exp());
                let want = 0.5 * gamma((k as f64 + 3.0) / 2.0);
                assert!(
                    ((got - want) / want).abs() < 1e-12,
                    "order {order}, k {k}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn maxwell_rule_is_exact_to_high_degree() {
        // Degree-(2Q-1) monomials are integrated exactly; compare in logs
        // since Γ overflows for the larger degrees.
        for (order, k) in [(40, 78), (384, 200), (384, 500), (384, 760)] {
            let rule = maxwell_rule(order);
            let kf = k as f64;
            let shift = ln_gamma((kf + 3.0) / 2.0) - 2f64.ln();
            let got = rule.integrate(|x| ((kf + 2.0) * x.ln() - x * x - shift).exp());
            assert!((got - 1.0).abs() < 1e-10, "order {order}, k {k}: {got}");
        }
    }

    #[test]
    fn maxwell_rule_resolves_the_origin() {
        // x^{1/2} is not a polynomial; at this order its error is dominated
        // by the nodes crowding x = 0 (5e-13 with an ungraded grid).
        let want = 0.5 * gamma(1.75);
        let got = maxwell_rule(384).integrate(|x| x.powf(2.5) * (-x * x).exp());
        assert!(((got - want) / want).abs() < 1e-13, "{got} vs {want}");
    }

    #[test]
    fn laguerre_moments_are_exact() {
        for alpha in [0.0, 0.5, 1.0, 1.25, 1.5] {
            let rule = laguerre_rule(384, alpha);
            for k in [0i32, 1, 3, 10] {
                let got = rule.integrate(|t| t.powf(alpha + k as f64) * (-t).exp());
                let want = gamma(alpha + k as f64 + 1.0);
                assert!(((got - want) / want).abs() < 1e-12, "alpha {alpha}, k {k}");
            }
        }
    }

    #[test]
    fn rules_are_cached() {
        let a = maxwell_rule(16);
        let b = maxwell_rule(16);
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(a.len(), 16);
        assert!(a.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(a.nodes()[0] > 0.0);
    }
}
