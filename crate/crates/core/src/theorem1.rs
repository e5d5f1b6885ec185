//! Monte Carlo checks of the massless kinetic identity
//!
//! ```text
//! δ(m, N) = Σ_i √(|p_i|² + m²) - (2/(N-1)) Σ_{i<j} √((N-1)/(2N) |p_i - p_j|² + m²)
//! ⟨δ(0, N)⟩ = 0
//! ```
//!
//! and of the mean-angle relations behind it, over classical ensembles of
//! zero-total-momentum configurations.
//!
//! Each configuration draws `N` i.i.d. vectors and projects them to zero
//! sum by subtracting their mean, which keeps the law exchange symmetric.
//! For the mixture family the component is drawn once per configuration,
//! so each configuration is an isotropic Gaussian one and `⟨δ(0, N)⟩ = 0`
//! holds exactly for the mixture as well. For these two families the
//! scaled pair difference `√((N-1)/(2N)) (p_i - p_j)` even has the law of
//! `p_i`, so `⟨δ(m, N)⟩ = 0` for every `m`.
//!
//! Standard errors come from batch means. Batch `b` draws from
//! `ChaCha8(seed)` on stream `b`; batches run in parallel and are merged in
//! batch order, so results depend only on `(family, N, m, count, seed)`.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Batches used for standard errors when `count` allows.
pub const DEFAULT_BATCHES: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplingError {
    #[error("particle number must be at least 2, got {0}")]
    Particles(usize),
    #[error("sample count must be at least 1")]
    EmptySample,
    #[error("mass must be finite and non-negative, got {0}")]
    Mass(f64),
    #[error("invalid ensemble: {0}")]
    Family(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub sigma: f64,
}

/// Law of the i.i.d. vectors before the zero-sum projection.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum EnsembleFamily {
    /// Isotropic normal, per-component standard deviation `sigma`.
    Gaussian { sigma: f64 },
    /// Gaussian with `sigma` drawn per configuration from the components.
    Mixture { components: Vec<MixtureComponent> },
    /// Uniform in the ball of radius `radius`.
    Ball { radius: f64 },
}

impl EnsembleFamily {
    pub fn name(&self) -> &'static str {
        match self {
            EnsembleFamily::Gaussian { .. } => "gaussian",
            EnsembleFamily::Mixture { .. } => "mixture",
            EnsembleFamily::Ball { .. } => "ball",
        }
    }

    /// Whether `⟨δ(0, N)⟩ = 0` and `k/d = √((N-1)/(2N))` hold exactly.
    pub fn is_gaussian(&self) -> bool {
        !matches!(self, EnsembleFamily::Ball { .. })
    }

    pub fn validate(&self) -> Result<(), SamplingError> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        match self {
            EnsembleFamily::Gaussian { sigma } if !positive(*sigma) => Err(SamplingError::Family(
                format!("gaussian sigma must be positive, got {sigma}"),
            )),
            EnsembleFamily::Ball { radius } if !positive(*radius) => Err(SamplingError::Family(
                format!("ball radius must be positive, got {radius}"),
            )),
            EnsembleFamily::Mixture { components } => {
                if components.is_empty() {
                    return Err(SamplingError::Family("mixture has no components".into()));
                }
                for c in components {
                    if !positive(c.weight) || !positive(c.sigma) {
                        return Err(SamplingError::Family(format!(
                            "mixture weights and sigmas must be positive, got ({}, {})",
                            c.weight, c.sigma
                        )));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Momenta `p_1 … p_N` with `Σ p_i = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumConfig {
    momenta: Vec<Vector3<f64>>,
}

impl MomentumConfig {
    pub fn momenta(&self) -> &[Vector3<f64>] {
        &self.momenta
    }

    pub fn particles(&self) -> usize {
        self.momenta.len()
    }

    pub fn total(&self) -> Vector3<f64> {
        self.momenta.iter().sum()
    }
}

/// Pre-projection draws for one configuration, written into `out`.
struct Drawer<'a> {
    family: &'a EnsembleFamily,
    cumulative: Vec<f64>,
}

impl<'a> Drawer<'a> {
    fn new(family: &'a EnsembleFamily) -> Self {
        let cumulative = match family {
            EnsembleFamily::Mixture { components } => {
                let total: f64 = components.iter().map(|c| c.weight).sum();
                components
                    .iter()
                    .scan(0.0, |acc, c| {
                        *acc += c.weight / total;
                        Some(*acc)
                    })
                    .collect()
            }
            _ => Vec::new(),
        };
        Self { family, cumulative }
    }

    fn gaussian(rng: &mut ChaCha8Rng, sigma: f64) -> Vector3<f64> {
        Vector3::from_fn(|_, _| sigma * rng.sample::<f64, _>(StandardNormal))
    }

    fn draw(&self, rng: &mut ChaCha8Rng, out: &mut [Vector3<f64>]) {
        match self.family {
            EnsembleFamily::Gaussian { sigma } => {
                out.iter_mut()
                    .for_each(|p| *p = Self::gaussian(rng, *sigma));
            }
            EnsembleFamily::Mixture { components } => {
                let u: f64 = rng.random();
                let pick = self
                    .cumulative
                    .iter()
                    .position(|&c| u < c)
                    .unwrap_or(components.len() - 1);
                let sigma = components[pick].sigma;
                out.iter_mut().for_each(|p| *p = Self::gaussian(rng, sigma));
            }
            EnsembleFamily::Ball { radius } => {
                for p in out.iter_mut() {
                    *p = loop {
                        let v = Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0));
                        if v.norm_squared() <= 1.0 {
                            break v * *radius;
                        }
                    };
                }
            }
        }
        project_to_zero_sum(out);
    }
}

/// `p_i ← g_i - ḡ` for `i < N` and `p_N = -Σ_{i<N} p_i`, so the sum
/// vanishes to round-off and `p_2 = -p_1` exactly for `N = 2`.
fn project_to_zero_sum(p: &mut [Vector3<f64>]) {
    let n = p.len();
    let mean: Vector3<f64> = p.iter().sum::<Vector3<f64>>() / n as f64;
    let mut partial = Vector3::zeros();
    for v in p[..n - 1].iter_mut() {
        *v -= mean;
        partial += *v;
    }
    p[n - 1] = -partial;
}

fn check_inputs(
    family: &EnsembleFamily,
    particles: usize,
    count: usize,
) -> Result<(), SamplingError> {
    if particles < 2 {
        return Err(SamplingError::Particles(particles));
    }
    if count == 0 {
        return Err(SamplingError::EmptySample);
    }
    family.validate()
}

/// Sizes of the batches a run of `count` samples is split into.
fn batch_sizes(count: usize) -> Vec<usize> {
    let batches = DEFAULT_BATCHES.min(count);
    (0..batches)
        .map(|b| count / batches + usize::from(b < count % batches))
        .collect()
}

fn batch_rng(seed: u64, batch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch as u64);
    rng
}

/// Configurations in the order the estimators consume them.
pub struct Samples<'a> {
    drawer: Drawer<'a>,
    particles: usize,
    sizes: Vec<usize>,
    seed: u64,
    batch: usize,
    left_in_batch: usize,
    rng: ChaCha8Rng,
}

impl Iterator for Samples<'_> {
    type Item = MomentumConfig;

    fn next(&mut self) -> Option<MomentumConfig> {
        while self.left_in_batch == 0 {
            self.batch += 1;
            if self.batch >= self.sizes.len() {
                return None;
            }
            self.left_in_batch = self.sizes[self.batch];
            self.rng = batch_rng(self.seed, self.batch);
        }
        self.left_in_batch -= 1;
        let mut momenta = vec![Vector3::zeros(); self.particles];
        self.drawer.draw(&mut self.rng, &mut momenta);
        Some(MomentumConfig { momenta })
    }
}

/// `count` zero-sum configurations, deterministic in `seed`.
pub fn sample(
    family: &EnsembleFamily,
    particles: usize,
    seed: u64,
    count: usize,
) -> Result<Samples<'_>, SamplingError> {
    check_inputs(family, particles, count)?;
    let sizes = batch_sizes(count);
    Ok(Samples {
        drawer: Drawer::new(family),
        particles,
        left_in_batch: sizes[0],
        sizes,
        seed,
        batch: 0,
        rng: batch_rng(seed, 0),
    })
}

/// Mean and standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    /// `|value - target| <= z se`.
    pub fn within(&self, target: f64, z: f64) -> bool {
        (self.value - target).abs() <= z * self.se
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCReport {
    pub family: EnsembleFamily,
    pub particles: usize,
    pub mass: f64,
    pub samples: usize,
    pub seed: u64,
    pub batches: usize,
    /// `k = ⟨|p_1|⟩`
    pub k: Estimate,
    /// `d = ⟨|p_1 - p_2|⟩`
    pub d: Estimate,
    /// `⟨|p_1| cos φ_12⟩ / k`, with `|p_1| cos φ_12 = p_1 · p̂_2`.
    pub cos_phi: Estimate,
    /// `-1/(N-1)`
    pub cos_phi_target: f64,
    pub k_over_d: Estimate,
    /// `√((N-1)/(2N))`
    pub k_over_d_target: f64,
    /// `k/d - √((N-1)/(2N))`
    pub k_over_d_residual: Estimate,
    /// `⟨p̂_1 · (p_1 - p_2)⟩ / d`; diagnostic only.
    pub cos_theta: Estimate,
    pub delta: Estimate,
    /// `⟨Σ_i √(|p_i|² + m²)⟩`
    pub kinetic: Estimate,
    /// `se(δ) / ⟨Σ_i √(|p_i|² + m²)⟩`
    pub delta_relative_se: f64,
    /// Largest `|δ|` of a single configuration.
    pub max_abs_delta: f64,
    /// Largest `|Σ p_i| / max_i |p_i|` of a single configuration.
    pub max_zero_sum_defect: f64,
}

const N1: usize = 0;
const D12: usize = 1;
const PROJ: usize = 2;
const THETA: usize = 3;
const DELTA: usize = 4;
const KIN: usize = 5;
const FIELDS: usize = 6;

#[derive(Debug, Clone)]
struct BatchSums {
    sums: [f64; FIELDS],
    count: usize,
    max_abs_delta: f64,
    max_defect: f64,
}

impl BatchSums {
    fn mean(&self, field: usize) -> f64 {
        self.sums[field] / self.count as f64
    }
}

fn observe(p: &[Vector3<f64>], mass: f64, pair_scale: f64, pair_weight: f64) -> [f64; FIELDS] {
    let m2 = mass * mass;
    let (p1, p2) = (p[0], p[1]);
    let n1 = p1.norm();
    let n2 = p2.norm();
    let diff = p1 - p2;
    let kin: f64 = p.iter().map(|v| (v.norm_squared() + m2).sqrt()).sum();
    let mut pairs = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            pairs += (pair_scale * (p[i] - p[j]).norm_squared() + m2).sqrt();
        }
    }
    [
        n1,
        diff.norm(),
        if n2 > 0.0 { p1.dot(&p2) / n2 } else { 0.0 },
        if n1 > 0.0 { p1.dot(&diff) / n1 } else { 0.0 },
        kin - pair_weight * pairs,
        kin,
    ]
}

fn run_batch(
    drawer: &Drawer<'_>,
    particles: usize,
    mass: f64,
    seed: u64,
    batch: usize,
    size: usize,
) -> BatchSums {
    let n = particles as f64;
    let pair_scale = (n - 1.0) / (2.0 * n);
    let pair_weight = 2.0 / (n - 1.0);
    let mut rng = batch_rng(seed, batch);
    let mut p = vec![Vector3::zeros(); particles];
    let mut out = BatchSums {
        sums: [0.0; FIELDS],
        count: size,
        max_abs_delta: 0.0,
        max_defect: 0.0,
    };
    for _ in 0..size {
        drawer.draw(&mut rng, &mut p);
        let obs = observe(&p, mass, pair_scale, pair_weight);
        for (s, o) in out.sums.iter_mut().zip(obs) {
            *s += o;
        }
        out.max_abs_delta = out.max_abs_delta.max(obs[DELTA].abs());
        let largest = p.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if largest > 0.0 {
            let total: Vector3<f64> = p.iter().sum();
            out.max_defect = out.max_defect.max(total.norm() / largest);
        }
    }
    out
}

/// Grand mean and batch-means standard error of one field.
fn mean_estimate(batches: &[BatchSums], total: usize, field: usize) -> Estimate {
    let value = batches.iter().map(|b| b.sums[field]).sum::<f64>() / total as f64;
    let spread: Vec<f64> = batches.iter().map(|b| b.mean(field) - value).collect();
    Estimate {
        value,
        se: standard_error(&spread),
    }
}

/// `X̄ / Ȳ` with a delta-method standard error over batch means.
fn ratio_estimate(batches: &[BatchSums], total: usize, num: usize, den: usize) -> Estimate {
    let x = mean_estimate(batches, total, num).value;
    let y = mean_estimate(batches, total, den).value;
    let r = x / y;
    let spread: Vec<f64> = batches
        .iter()
        .map(|b| (b.mean(num) - r * b.mean(den)) / y)
        .collect();
    Estimate {
        value: r,
        se: standard_error(&spread),
    }
}

/// `sd / √B` of centred batch deviations; 0 for a single batch.
fn standard_error(deviations: &[f64]) -> f64 {
    let b = deviations.len();
    if b < 2 {
        return 0.0;
    }
    let mean = deviations.iter().sum::<f64>() / b as f64;
    let var = deviations.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (b - 1) as f64;
    (var / b as f64).sqrt()
}

/// All estimators over one run of `count` configurations.
pub fn estimate(
    family: &EnsembleFamily,
    particles: usize,
    mass: f64,
    count: usize,
    seed: u64,
) -> Result<MCReport, SamplingError> {
    check_inputs(family, particles, count)?;
    if !(mass >= 0.0 && mass.is_finite()) {
        return Err(SamplingError::Mass(mass));
    }
    let drawer = Drawer::new(family);
    let sizes = batch_sizes(count);
    let batches: Vec<BatchSums> = sizes
        .par_iter()
        .enumerate()
        .map(|(b, &size)| run_batch(&drawer, particles, mass, seed, b, size))
        .collect();

    let n = particles as f64;
    let k_over_d = ratio_estimate(&batches, count, N1, D12);
    let target = ((n - 1.0) / (2.0 * n)).sqrt();
    let kinetic = mean_estimate(&batches, count, KIN);
    let delta = mean_estimate(&batches, count, DELTA);
    Ok(MCReport {
        family: family.clone(),
        particles,
        mass,
        samples: count,
        seed,
        batches: batches.len(),
        k: mean_estimate(&batches, count, N1),
        d: mean_estimate(&batches, count, D12),
        cos_phi: ratio_estimate(&batches, count, PROJ, N1),
        cos_phi_target: -1.0 / (n - 1.0),
        k_over_d,
        k_over_d_target: target,
        k_over_d_residual: Estimate {
            value: k_over_d.value - target,
            se: k_over_d.se,
        },
        cos_theta: ratio_estimate(&batches, count, THETA, D12),
        delta_relative_se: delta.se / kinetic.value,
        delta,
        kinetic,
        max_abs_delta: batches.iter().map(|b| b.max_abs_delta).fold(0.0, f64::max),
        max_zero_sum_defect: batches.iter().map(|b| b.max_defect).fold(0.0, f64::max),
    })
}

/// `⟨δ(m, N)⟩` with its standard error.
pub fn delta_expectation(
    family: &EnsembleFamily,
    particles: usize,
    mass: f64,
    count: usize,
    seed: u64,
) -> Result<Estimate, SamplingError> {
    Ok(estimate(family, particles, mass, count, seed)?.delta)
}

/// Mean-angle statistics of the massless problem.
pub fn mean_angle_stats(
    family: &EnsembleFamily,
    particles: usize,
    count: usize,
    seed: u64,
) -> Result<MCReport, SamplingError> {
    estimate(family, particles, 0.0, count, seed)
}
