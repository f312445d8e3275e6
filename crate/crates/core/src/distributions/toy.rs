use super::batch::SampleBatch;
use super::gaussian::GaussianTargetSpec;
use super::rng::{normal, rng_from_seed};
use super::spd::SpdMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use rand::Rng as _;

/// Source distribution of the toy experiment: `x₁ ~ N(yγ, I)`, and each
/// spurious coordinate is `y·|z|` with probability `corr_prob`, else `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToySourceSpec<T> {
    pub gamma: Vec<T>,
    pub corr_prob: T,
    pub d2: usize,
}

impl<T: Scalar> ToySourceSpec<T> {
    pub fn new(gamma: Vec<T>, corr_prob: T, d2: usize) -> Result<Self> {
        if gamma.is_empty() || d2 == 0 {
            return Err(Error::InvalidInput("toy spec needs d1 >= 1 and d2 >= 1".into()));
        }
        if !(corr_prob >= T::zero() && corr_prob <= T::one()) {
            return Err(Error::InvalidInput(format!("corr_prob must lie in [0, 1], got {corr_prob}")));
        }
        Ok(ToySourceSpec { gamma, corr_prob, d2 })
    }

    /// Matching target: same signal, spurious coordinates `N(0, I)`.
    pub fn target_spec(&self) -> GaussianTargetSpec<T> {
        GaussianTargetSpec::new(self.gamma.clone(), T::one(), SpdMatrix::identity(self.d2)).expect("valid toy target")
    }
}

/// Direction drawn uniformly on the sphere of radius `radius` in `ℝ^d`.
pub fn random_gamma<T: Scalar>(d: usize, radius: T, seed: u64) -> Vec<T> {
    let mut rng = rng_from_seed(seed);
    loop {
        let z: Vec<f64> = (0..d).map(|_| normal(&mut rng)).collect();
        let n = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-12 {
            return z.iter().map(|v| radius * T::lit(v / n)).collect();
        }
    }
}

/// Draws `n` source samples.
pub fn sample_source_toy<T: Scalar>(spec: &ToySourceSpec<T>, n: usize, seed: u64) -> Result<SampleBatch<T>> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let d1 = spec.gamma.len();
    let mut rng = rng_from_seed(seed);
    let mut b = SampleBatch::with_capacity(d1, spec.d2, n, seed);
    let p = spec.corr_prob.f64();
    for _ in 0..n {
        let y: i8 = if rng.gen::<bool>() { 1 } else { -1 };
        let yt = T::lit(y as f64);
        for g in &spec.gamma {
            b.x1.push(yt * *g + T::lit(normal(&mut rng)));
        }
        for _ in 0..spec.d2 {
            let z = normal(&mut rng);
            let u: f64 = rng.gen();
            b.x2.push(T::lit(if u < p { y as f64 * z.abs() } else { z }));
        }
        b.y.push(y);
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corr(b: &SampleBatch<f64>, j: usize) -> f64 {
        let n = b.n() as f64;
        let xs: Vec<f64> = (0..b.n()).map(|i| b.x2_row(i)[j]).collect();
        let ys: Vec<f64> = b.y.iter().map(|&v| v as f64).collect();
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let cov = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / n;
        let vx = xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>() / n;
        let vy = ys.iter().map(|y| (y - my).powi(2)).sum::<f64>() / n;
        cov / (vx * vy).sqrt()
    }

    #[test]
    fn no_correlation_at_zero_prob() {
        let s = ToySourceSpec::new(vec![1.0, 1.0], 0.0, 2).unwrap();
        let b = sample_source_toy(&s, 100_000, 1).unwrap();
        for j in 0..2 {
            assert!(corr(&b, j).abs() < 0.02);
        }
    }

    #[test]
    fn full_correlation_fixes_signs() {
        let s = ToySourceSpec::new(vec![1.0f64, 1.0], 1.0, 3).unwrap();
        let b = sample_source_toy(&s, 10_000, 2).unwrap();
        for i in 0..b.n() {
            for &v in b.x2_row(i) {
                assert!(v == 0.0 || v.signum() == b.y[i] as f64);
            }
        }
    }

    #[test]
    fn label_moment_of_spurious_coordinates() {
        let s = ToySourceSpec::new(vec![1.5, -0.5], 0.8, 2).unwrap();
        let n = 200_000;
        let b = sample_source_toy(&s, n, 3).unwrap();
        // E[y x₂] = 0.8·√(2/π); Var(y x₂) = 1 - E[y x₂]²
        let want = 0.8 * (2.0 / std::f64::consts::PI).sqrt();
        let se = ((1.0 - want * want) / n as f64).sqrt();
        for j in 0..2 {
            let m = (0..b.n()).map(|i| b.y[i] as f64 * b.x2_row(i)[j]).sum::<f64>() / n as f64;
            assert!((m - want).abs() < 3.0 * se, "coord {j}: {m} vs {want}");
        }
    }

    #[test]
    fn random_gamma_has_radius() {
        let g: Vec<f64> = random_gamma(2, 2.0, 4);
        assert!((crate::scalar::norm(&g) - 2.0).abs() < 1e-14);
        assert_eq!(g, random_gamma(2, 2.0, 4));
    }
}
