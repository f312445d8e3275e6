use super::gaussian::GaussianTargetSpec;
use super::logconcave::{sample_one, MixtureSignalSpec};
use super::rng::{normal, rng_from_seed};
use super::spd::SpdMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use rand::Rng as _;
use std::io::{BufRead, Write};

/// Labelled samples `(x₁, x₂, y)` stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch<T> {
    pub d1: usize,
    pub d2: usize,
    pub x1: Vec<T>,
    pub x2: Vec<T>,
    pub y: Vec<i8>,
    pub seed: u64,
}

impl<T: Scalar> SampleBatch<T> {
    pub fn with_capacity(d1: usize, d2: usize, n: usize, seed: u64) -> Self {
        SampleBatch {
            d1,
            d2,
            x1: Vec::with_capacity(n * d1),
            x2: Vec::with_capacity(n * d2),
            y: Vec::with_capacity(n),
            seed,
        }
    }

    /// Assembles a batch and checks that row counts agree and labels are ±1.
    pub fn from_parts(d1: usize, d2: usize, x1: Vec<T>, x2: Vec<T>, y: Vec<i8>, seed: u64) -> Result<Self> {
        let n = y.len();
        if x1.len() != n * d1 {
            return Err(Error::DimensionMismatch { what: "x1 entries", expected: n * d1, got: x1.len() });
        }
        if x2.len() != n * d2 {
            return Err(Error::DimensionMismatch { what: "x2 entries", expected: n * d2, got: x2.len() });
        }
        if y.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidInput("labels must be ±1".into()));
        }
        Ok(SampleBatch { d1, d2, x1, x2, y, seed })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn x1_row(&self, i: usize) -> &[T] {
        &self.x1[i * self.d1..(i + 1) * self.d1]
    }

    pub fn x2_row(&self, i: usize) -> &[T] {
        &self.x2[i * self.d2..(i + 1) * self.d2]
    }

    /// `[x₁ᵢ, x₂ᵢ]`.
    pub fn features(&self, i: usize) -> Vec<T> {
        let mut v = self.x1_row(i).to_vec();
        v.extend_from_slice(self.x2_row(i));
        v
    }

    /// Concatenation of `self` and `other` (seed of `self` kept).
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.d1 != other.d1 || self.d2 != other.d2 {
            return Err(Error::DimensionMismatch {
                what: "batch width",
                expected: self.d1 + self.d2,
                got: other.d1 + other.d2,
            });
        }
        let mut b = self.clone();
        b.x1.extend_from_slice(&other.x1);
        b.x2.extend_from_slice(&other.x2);
        b.y.extend_from_slice(&other.y);
        Ok(b)
    }

    /// Writes `y,x1_0..,x2_0..` with floats at 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header = vec!["y".to_string()];
        header.extend((0..self.d1).map(|j| format!("x1_{j}")));
        header.extend((0..self.d2).map(|j| format!("x2_{j}")));
        writeln!(w, "{}", header.join(","))?;
        for i in 0..self.n() {
            write!(w, "{}", self.y[i])?;
            for v in self.x1_row(i).iter().chain(self.x2_row(i)) {
                write!(w, ",{:.16e}", v.f64())?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Parses the format of [`SampleBatch::write_csv`].
    pub fn read_csv<R: BufRead>(r: R, seed: u64) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty CSV".into()))?
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.first() != Some(&"y") {
            return Err(Error::InvalidInput("CSV header must start with y".into()));
        }
        let d1 = cols.iter().filter(|c| c.starts_with("x1_")).count();
        let d2 = cols.iter().filter(|c| c.starts_with("x2_")).count();
        if d1 + d2 + 1 != cols.len() {
            return Err(Error::InvalidInput(format!("unexpected CSV header {header}")));
        }
        let mut b = SampleBatch::with_capacity(d1, d2, 0, seed);
        for (k, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::InvalidInput(e.to_string()))?;
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != cols.len() {
                return Err(Error::InvalidInput(format!("row {k} has {} fields", f.len())));
            }
            let parse = |s: &str| s.parse::<f64>().map_err(|_| Error::InvalidInput(format!("row {k}: bad number {s}")));
            b.y.push(parse(f[0])? as i8);
            for s in &f[1..=d1] {
                b.x1.push(T::lit(parse(s)?));
            }
            for s in &f[1 + d1..] {
                b.x2.push(T::lit(parse(s)?));
            }
        }
        SampleBatch::from_parts(b.d1, b.d2, b.x1, b.x2, b.y, seed)
    }
}

/// Target distribution: Gaussian signal, or a general 1-d log-concave
/// mixture signal with spurious covariance `Σ₂`.
#[derive(Debug, Clone)]
pub enum TargetSpec<T> {
    Gaussian(GaussianTargetSpec<T>),
    Mixture { signal: MixtureSignalSpec, sigma2: SpdMatrix<T> },
}

impl<T: Scalar> TargetSpec<T> {
    pub fn d1(&self) -> usize {
        match self {
            TargetSpec::Gaussian(g) => g.d1(),
            TargetSpec::Mixture { .. } => 1,
        }
    }

    pub fn sigma2(&self) -> &SpdMatrix<T> {
        match self {
            TargetSpec::Gaussian(g) => &g.sigma2,
            TargetSpec::Mixture { sigma2, .. } => sigma2,
        }
    }
}

impl<T: Scalar> From<GaussianTargetSpec<T>> for TargetSpec<T> {
    fn from(g: GaussianTargetSpec<T>) -> Self {
        TargetSpec::Gaussian(g)
    }
}

/// Draws `n` target samples, deterministic in `seed`.
///
/// Gaussian signal: `y` uniform on ±1, `x₁ = yγ + σ₁z`. Mixture signal:
/// component `k` with probability `τ_k`, `y` its class sign, `x₁` by
/// rejection sampling. In both cases `x₂ = L z'` with `LLᵀ = Σ₂`.
pub fn sample_target<T: Scalar>(spec: &TargetSpec<T>, n: usize, seed: u64) -> Result<SampleBatch<T>> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let sigma2 = spec.sigma2();
    let d2 = sigma2.dim();
    let d1 = spec.d1();
    let mut rng = rng_from_seed(seed);
    let mut b = SampleBatch::with_capacity(d1, d2, n, seed);
    let mut z = vec![T::zero(); d2];
    for i in 0..n {
        match spec {
            TargetSpec::Gaussian(g) => {
                let y: i8 = if rng.gen::<bool>() { 1 } else { -1 };
                let yt = T::lit(y as f64);
                for gm in &g.gamma {
                    b.x1.push(yt * *gm + g.sigma1 * T::lit(normal(&mut rng)));
                }
                b.y.push(y);
            }
            TargetSpec::Mixture { signal, .. } => {
                let u: f64 = rng.gen();
                let mut k = 0;
                let mut acc = signal.weights[0];
                while u >= acc && k + 1 < signal.weights.len() {
                    k += 1;
                    acc += signal.weights[k];
                }
                let c = &signal.components[k];
                b.x1.push(T::lit(sample_one(c, &mut rng, i)?));
                b.y.push(c.class_sign);
            }
        }
        for v in z.iter_mut() {
            *v = T::lit(normal(&mut rng));
        }
        b.x2.extend(sigma2.chol_mul(&z));
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::logconcave::LogConcaveComponent;

    fn gaussian_spec() -> GaussianTargetSpec<f64> {
        let s2 = SpdMatrix::new(2, vec![1.0, 0.3, 0.3, 0.5]).unwrap();
        GaussianTargetSpec::new(vec![1.5, -0.5], 0.8, s2).unwrap()
    }

    #[test]
    fn signal_mean_matches_gamma() {
        let spec = gaussian_spec();
        let n = 100_000;
        let b = sample_target(&spec.clone().into(), n, 1).unwrap();
        for j in 0..2 {
            let m = (0..n).map(|i| b.y[i] as f64 * b.x1_row(i)[j]).sum::<f64>() / n as f64;
            assert!((m - spec.gamma[j]).abs() < 3.0 * 0.8 / (n as f64).sqrt(), "coord {j}: {m}");
        }
    }

    #[test]
    fn spurious_covariance_and_independence() {
        let spec = gaussian_spec();
        let n = 100_000;
        let b = sample_target(&spec.clone().into(), n, 2).unwrap();
        let mut cov = [0.0; 4];
        for i in 0..n {
            let r = b.x2_row(i);
            for a in 0..2 {
                for c in 0..2 {
                    cov[a * 2 + c] += r[a] * r[c] / n as f64;
                }
            }
        }
        let diff: f64 = (0..4).map(|k| (cov[k] - spec.sigma2.get(k / 2, k % 2)).powi(2)).sum::<f64>().sqrt();
        assert!(diff < 0.05 * spec.sigma2.frobenius());
        for j in 0..2 {
            let xs: Vec<f64> = (0..n).map(|i| b.x2_row(i)[j]).collect();
            let ys: Vec<f64> = b.y.iter().map(|&v| v as f64).collect();
            let mx = xs.iter().sum::<f64>() / n as f64;
            let my = ys.iter().sum::<f64>() / n as f64;
            let c = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>();
            let vx = xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
            let vy = ys.iter().map(|y| (y - my).powi(2)).sum::<f64>();
            let corr = c / (vx * vy).sqrt();
            assert!(corr.abs() < 4.0 / (n as f64).sqrt(), "corr {corr}");
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec: TargetSpec<f64> = gaussian_spec().into();
        assert_eq!(sample_target(&spec, 500, 9).unwrap(), sample_target(&spec, 500, 9).unwrap());
        assert_ne!(sample_target(&spec, 500, 9).unwrap(), sample_target(&spec, 500, 10).unwrap());
    }

    #[test]
    fn mixture_target_labels_follow_components() {
        let signal = MixtureSignalSpec::new(
            vec![LogConcaveComponent::cos_bump(4.0, 1).unwrap(), LogConcaveComponent::cos_bump(-4.0, -1).unwrap()],
            vec![0.5, 0.5],
        )
        .unwrap();
        let spec = TargetSpec::Mixture { signal, sigma2: SpdMatrix::identity(1) };
        let b: SampleBatch<f64> = sample_target(&spec, 20_000, 4).unwrap();
        let agree = (0..b.n()).filter(|&i| (b.x1_row(i)[0] > 0.0) == (b.y[i] == 1)).count();
        assert!(agree as f64 / b.n() as f64 > 0.999);
        let pos = b.y.iter().filter(|&&y| y == 1).count() as f64 / b.n() as f64;
        assert!((pos - 0.5).abs() < 0.02);
    }

    #[test]
    fn csv_round_trip() {
        let spec: TargetSpec<f64> = gaussian_spec().into();
        let b = sample_target(&spec, 50, 3).unwrap();
        let mut buf = Vec::new();
        b.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("y,x1_0,x1_1,x2_0,x2_1\n"));
        let back = SampleBatch::<f64>::read_csv(&buf[..], 3).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn from_parts_validates() {
        assert!(SampleBatch::<f64>::from_parts(1, 1, vec![0.0], vec![0.0, 1.0], vec![1], 0).is_err());
        assert!(SampleBatch::<f64>::from_parts(1, 1, vec![0.0], vec![0.0], vec![0], 0).is_err());
    }
}
