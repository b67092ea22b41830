//! Numeric integration over balls and intervals.
//!
//! Monte Carlo sampling is keyed by `(seed, batch index)`: every batch of
//! [`MC_BATCH`] samples draws from its own ChaCha stream, so the estimate is
//! bit-identical whatever the rayon pool size.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SphereSource;
use crate::error::{Error, Result};
use crate::Vec3;

/// Samples per RNG stream.
pub const MC_BATCH: u64 = 8192;

/// Smallest accepted Monte Carlo sample count.
pub const MC_MIN_SAMPLES: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadratureMethod {
    MonteCarlo,
    NestedProductRule,
}

/// Estimate plus error bar. For Monte Carlo the error is one standard error;
/// for the product rule it is the difference to a coarser rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult<T = f64> {
    pub value: T,
    pub std_error: f64,
    pub n_samples: u64,
    pub method: QuadratureMethod,
}

impl<T> QuadratureResult<T> {
    pub fn map<U>(self, f: impl FnOnce(T) -> U, error_scale: f64) -> QuadratureResult<U> {
        QuadratureResult {
            value: f(self.value),
            std_error: self.std_error * error_scale.abs(),
            n_samples: self.n_samples,
            method: self.method,
        }
    }
}

/// How a quadrature-backed amplitude is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Quadrature {
    MonteCarlo { samples: u64, seed: u64 },
    /// Gauss–Legendre in `r` and `cos θ`, trapezoid in `φ`, `order` nodes each.
    ProductRule { order: usize },
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature::MonteCarlo {
            samples: 1_000_000,
            seed: 0x5eed,
        }
    }
}

impl Quadrature {
    pub fn method(&self) -> QuadratureMethod {
        match self {
            Quadrature::MonteCarlo { .. } => QuadratureMethod::MonteCarlo,
            Quadrature::ProductRule { .. } => QuadratureMethod::NestedProductRule,
        }
    }

    /// `∫_{ball} f` with this rule.
    pub fn integrate_ball<F>(&self, f: F, ball: &SphereSource) -> Result<QuadratureResult>
    where
        F: Fn(&Vec3) -> f64 + Sync,
    {
        match *self {
            Quadrature::MonteCarlo { samples, seed } => mc_integrate_ball(f, ball, samples, seed),
            Quadrature::ProductRule { order } => product_integrate_ball(f, ball, order),
        }
    }

    /// `∫_{ball1} ∫_{ball2} f` with this rule.
    pub fn integrate_two_balls<F>(
        &self,
        f: F,
        ball1: &SphereSource,
        ball2: &SphereSource,
    ) -> Result<QuadratureResult>
    where
        F: Fn(&Vec3, &Vec3) -> f64 + Sync,
    {
        match *self {
            Quadrature::MonteCarlo { samples, seed } => {
                mc_integrate_two_balls(f, ball1, ball2, samples, seed)
            }
            Quadrature::ProductRule { order } => product_integrate_two_balls(f, ball1, ball2, order),
        }
    }
}

/// Uniform point in a ball.
pub fn sample_ball<R: Rng + ?Sized>(rng: &mut R, ball: &SphereSource) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let n = v.norm();
        if n > 0.0 {
            let u: f64 = rng.gen();
            return ball.center + v * (ball.radius * u.cbrt() / n);
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.n += 1;
        let delta = v - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (v - self.mean);
    }

    // Chan et al. pairwise combination
    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        Moments { n, mean, m2 }
    }

    fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let var = (self.m2 / (self.n - 1) as f64).max(0.0);
        (var / self.n as f64).sqrt()
    }
}

fn check_samples(n: u64) -> Result<()> {
    if n < MC_MIN_SAMPLES {
        return Err(Error::Domain(format!(
            "Monte Carlo needs at least {MC_MIN_SAMPLES} samples, got {n}"
        )));
    }
    Ok(())
}

fn batched<F>(n: u64, seed: u64, eval: F) -> Result<Moments>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let n_batches = n.div_ceil(MC_BATCH);
    let per_batch: Vec<Result<Moments>> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = MC_BATCH.min(n - b * MC_BATCH);
            let mut m = Moments::default();
            for _ in 0..count {
                m.push(eval(&mut rng)?);
            }
            Ok(m)
        })
        .collect();
    let mut total = Moments::default();
    for m in per_batch {
        total = total.merge(m?);
    }
    Ok(total)
}

/// `∫_{ball1} d³x ∫_{ball2} d³y f(x, y)` by uniform sampling of both balls.
pub fn mc_integrate_two_balls<F>(
    f: F,
    ball1: &SphereSource,
    ball2: &SphereSource,
    n: u64,
    seed: u64,
) -> Result<QuadratureResult>
where
    F: Fn(&Vec3, &Vec3) -> f64 + Sync,
{
    check_samples(n)?;
    let moments = batched(n, seed, |rng| {
        let x = sample_ball(rng, ball1);
        let y = sample_ball(rng, ball2);
        let v = f(&x, &y);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                value: v,
                x: x.into(),
                y: y.into(),
            });
        }
        Ok(v)
    })?;
    let vol = ball1.volume() * ball2.volume();
    Ok(QuadratureResult {
        value: moments.mean * vol,
        std_error: moments.std_error() * vol,
        n_samples: n,
        method: QuadratureMethod::MonteCarlo,
    })
}

/// `∫_{ball} d³x f(x)` by uniform sampling.
pub fn mc_integrate_ball<F>(f: F, ball: &SphereSource, n: u64, seed: u64) -> Result<QuadratureResult>
where
    F: Fn(&Vec3) -> f64 + Sync,
{
    check_samples(n)?;
    let moments = batched(n, seed, |rng| {
        let x = sample_ball(rng, ball);
        let v = f(&x);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                value: v,
                x: x.into(),
                y: [f64::NAN; 3],
            });
        }
        Ok(v)
    })?;
    let vol = ball.volume();
    Ok(QuadratureResult {
        value: moments.mean * vol,
        std_error: moments.std_error() * vol,
        n_samples: n,
        method: QuadratureMethod::MonteCarlo,
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor-product rule on a ball in spherical coordinates about its centre.
pub struct BallRule {
    pub points: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl BallRule {
    pub fn new(ball: &SphereSource, order: usize) -> Self {
        let order = order.max(2);
        let (xs, ws) = gauss_legendre(order);
        let n_phi = 2 * order;
        let dphi = 2.0 * PI / n_phi as f64;
        let mut points = Vec::with_capacity(order * order * n_phi);
        let mut weights = Vec::with_capacity(points.capacity());
        for (xr, wr) in xs.iter().zip(&ws) {
            let r = 0.5 * ball.radius * (xr + 1.0);
            let w_r = 0.5 * ball.radius * wr * r * r;
            for (ct, wt) in xs.iter().zip(&ws) {
                let st = (1.0 - ct * ct).max(0.0).sqrt();
                for k in 0..n_phi {
                    let phi = (k as f64 + 0.5) * dphi;
                    let dir = Vec3::new(st * phi.cos(), st * phi.sin(), *ct);
                    points.push(ball.center + dir * r);
                    weights.push(w_r * wt * dphi);
                }
            }
        }
        Self { points, weights }
    }

    pub fn integrate(&self, f: impl Fn(&Vec3) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .sum()
    }
}

/// `∫_{ball} d³x f(x)` by a nested product rule; the error bar compares against
/// the rule at roughly two thirds of the order.
pub fn product_integrate_ball<F>(f: F, ball: &SphereSource, order: usize) -> Result<QuadratureResult>
where
    F: Fn(&Vec3) -> f64,
{
    let fine = BallRule::new(ball, order);
    let coarse = BallRule::new(ball, (2 * order / 3).max(2));
    let value = fine.integrate(&f);
    let rough = coarse.integrate(&f);
    if !value.is_finite() {
        return Err(Error::Quadrature(format!(
            "product rule of order {order} produced {value}"
        )));
    }
    Ok(QuadratureResult {
        value,
        std_error: (value - rough).abs(),
        n_samples: fine.points.len() as u64,
        method: QuadratureMethod::NestedProductRule,
    })
}

/// `∫∫ f(x, y)` over two balls by the nested product rule (`order⁶·2` nodes).
pub fn product_integrate_two_balls<F>(
    f: F,
    ball1: &SphereSource,
    ball2: &SphereSource,
    order: usize,
) -> Result<QuadratureResult>
where
    F: Fn(&Vec3, &Vec3) -> f64 + Sync,
{
    let run = |order: usize| -> f64 {
        let r1 = BallRule::new(ball1, order);
        let r2 = BallRule::new(ball2, order);
        r1.points
            .par_iter()
            .zip(r1.weights.par_iter())
            .map(|(x, wx)| wx * r2.integrate(|y| f(x, y)))
            .collect::<Vec<_>>()
            .into_iter()
            .sum()
    };
    let value = run(order);
    let rough = run((2 * order / 3).max(2));
    if !value.is_finite() {
        return Err(Error::Quadrature(format!(
            "two-ball product rule of order {order} produced {value}"
        )));
    }
    let n = BallRule::new(ball1, order).points.len() as u64;
    Ok(QuadratureResult {
        value,
        std_error: (value - rough).abs(),
        n_samples: n * n,
        method: QuadratureMethod::NestedProductRule,
    })
}

const GK15_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK15_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const G7_W: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * GK15_WK[7];
    let mut gauss = fc * G7_W[3];
    for k in 0..7 {
        let x = h * GK15_NODES[k];
        let s = f(c - x) + f(c + x);
        kron += GK15_WK[k] * s;
        if k % 2 == 1 {
            gauss += G7_W[k / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) on a finite interval.
pub fn integrate_adaptive(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    const MAX_INTERVALS: usize = 2000;
    if a == b {
        return Ok((0.0, 0.0));
    }
    let (v, e) = gk15(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    loop {
        let total: f64 = intervals.iter().map(|iv| iv.2).sum();
        let err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if !total.is_finite() {
            return Err(Error::Quadrature(format!(
                "non-finite partial sum on [{a}, {b}]"
            )));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok((total, err));
        }
        if intervals.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature(format!(
                "no convergence on [{a}, {b}] after {MAX_INTERVALS} subintervals: \
                 estimate {total:e}, error {err:e}"
            )));
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// `∫_a^∞ f` via `y = a + s/(1 − s)`.
pub fn integrate_to_infinity(
    f: impl Fn(f64) -> f64,
    a: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    integrate_adaptive(
        |s| {
            if s >= 1.0 {
                return 0.0;
            }
            let one_minus = 1.0 - s;
            let y = a + s / one_minus;
            let v = f(y) / (one_minus * one_minus);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}

/// Legendre polynomial `P_n(x)`.
pub fn legendre(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    }
}
