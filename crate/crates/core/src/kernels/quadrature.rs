//! Quadrature rules: Gauss–Hermite, Gauss–Legendre and adaptive Gauss–Kronrod.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of a fixed quadrature rule, stored in `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Probabilists' Gauss–Hermite rule: `Σ wᵢ f(xᵢ) ≈ E[f(Z)]`, `Z ~ N(0, 1)`.
    pub fn hermite(n: usize) -> Self {
        let (x, w) = hermite_physicists(n);
        let scale = std::f64::consts::PI.sqrt();
        GaussRule {
            nodes: x.iter().map(|v| v * std::f64::consts::SQRT_2).collect(),
            weights: w.iter().map(|v| v / scale).collect(),
        }
    }

    /// Gauss–Legendre rule on `[-1, 1]`.
    pub fn legendre(n: usize) -> Self {
        let m = n.div_ceil(2);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..m {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut pp = 0.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (1.0, 0.0);
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
                }
                pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
                let dz = p1 / pp;
                z -= dz;
                if dz.abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * pp * pp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussRule { nodes, weights }
    }

    /// Applies a Legendre rule mapped to `[a, b]`.
    pub fn integrate<T: Scalar>(&self, f: impl Fn(T) -> T, a: T, b: T) -> T {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        let mut acc = T::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += T::lit(w) * f(mid + half * T::lit(x));
        }
        acc * half
    }
}

/// Physicists' Gauss–Hermite nodes (weight `e^{-x²}`) by Newton iteration on
/// the orthonormal Hermite recurrence.
fn hermite_physicists(n: usize) -> (Vec<f64>, Vec<f64>) {
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let (mut p1, mut p2) = (pim4, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

type RuleCache = Mutex<HashMap<(u8, usize), Arc<GaussRule>>>;

fn cached(kind: u8, n: usize) -> Arc<GaussRule> {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("quadrature cache poisoned");
    map.entry((kind, n))
        .or_insert_with(|| Arc::new(if kind == 0 { GaussRule::hermite(n) } else { GaussRule::legendre(n) }))
        .clone()
}

/// Shared probabilists' Gauss–Hermite rule with `n` nodes.
pub fn hermite_rule(n: usize) -> Arc<GaussRule> {
    cached(0, n)
}

/// Shared Gauss–Legendre rule with `n` nodes.
pub fn legendre_rule(n: usize) -> Arc<GaussRule> {
    cached(1, n)
}

/// Gauss–Hermite estimate of `E[f(X)]` for `X ~ N(mu, sigma²)`.
///
/// Returns `f(mu)` when `sigma = 0`. Exact for polynomials of degree
/// `< 2·nodes`; meant for smooth integrands.
pub fn gh_expectation<T: Scalar>(f: impl Fn(T) -> T, mu: T, sigma: T, nodes: usize) -> T {
    assert!(nodes >= 8, "gh_expectation needs at least 8 nodes");
    if sigma == T::zero() {
        return f(mu);
    }
    let rule = hermite_rule(nodes);
    let mut acc = T::zero();
    for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
        acc += T::lit(w) * f(mu + sigma * T::lit(z));
    }
    acc
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// One Gauss–Kronrod 15 panel: `(kronrod, |kronrod - gauss|)`.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Maximum bisection depth for [`integrate_adaptive`].
pub const MAX_DEPTH: u32 = 30;

/// Adaptive Gauss–Kronrod 15 integration of `f` over the finite interval `[a, b]`.
///
/// A panel is accepted once its error estimate is below `abs_tol` scaled by
/// the panel's share of the interval, or below rounding level.
pub fn integrate_adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let width = (b - a).abs();
    let mut total = 0.0;
    let mut stack = vec![(a, b, 0u32)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let (k, err) = gk15(&f, lo, hi);
        if !k.is_finite() {
            return Err(Error::Quadrature { a: lo, b: hi, depth });
        }
        let share = abs_tol * (hi - lo).abs() / width;
        if err <= share || err <= 64.0 * f64::EPSILON * k.abs() {
            total += k;
        } else if depth >= MAX_DEPTH {
            return Err(Error::Quadrature { a: lo, b: hi, depth });
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    Ok(total)
}

/// [`integrate_adaptive`] over consecutive pieces `[p₀, p₁], [p₁, p₂], …`.
pub fn integrate_pieces(f: impl Fn(f64) -> f64, points: &[f64], abs_tol: f64) -> Result<f64> {
    let pieces = points.len().saturating_sub(1).max(1);
    let mut total = 0.0;
    for w in points.windows(2) {
        total += integrate_adaptive(&f, w[0], w[1], abs_tol / pieces as f64)?;
    }
    Ok(total)
}
