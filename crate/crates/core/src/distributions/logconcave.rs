//! One-dimensional log-concave components, their mixtures, and a rejection
//! sampler with a Gaussian envelope.

use super::rng::{normal, rng_from_seed, Rng};
use crate::error::{Error, Result};
use crate::kernels::quadrature::integrate_adaptive;
use crate::kernels::special::erfc_f64;
use crate::scalar::Scalar;
use rand::Rng as _;
use std::fmt;
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Target tail mass outside [`LogConcaveComponent::effective_support`].
pub const TAIL_MASS: f64 = 1e-12;

/// A density on ℝ given by its log (up to a constant) and two derivatives,
/// with declared bounds `-β ≤ (log p)'' ≤ -α`.
///
/// The normalising constant is computed numerically at construction, so
/// `log_density` may be unnormalised. Functions operate in `f64`.
#[derive(Clone)]
pub struct LogConcaveComponent {
    log_density: ScalarFn,
    dlog: ScalarFn,
    d2log: ScalarFn,
    pub class_sign: i8,
    pub support_hint: (f64, f64),
    pub alpha: f64,
    pub beta: f64,
    mode: f64,
    log_norm: f64,
}

impl fmt::Debug for LogConcaveComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LogConcaveComponent")
            .field("class_sign", &self.class_sign)
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .field("mode", &self.mode)
            .finish()
    }
}

impl LogConcaveComponent {
    /// Builds a component; locates the mode by Newton's method (≤ 200
    /// iterations, started at the middle of `support_hint`) and normalises.
    pub fn new(
        log_density: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dlog: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2log: impl Fn(f64) -> f64 + Send + Sync + 'static,
        class_sign: i8,
        support_hint: (f64, f64),
        alpha: f64,
        beta: f64,
    ) -> Result<Self> {
        if class_sign != 1 && class_sign != -1 {
            return Err(Error::InvalidInput(format!("class_sign must be ±1, got {class_sign}")));
        }
        if !(alpha > 0.0) || !(beta >= alpha) || !beta.is_finite() {
            return Err(Error::InvalidInput(format!("need 0 < alpha <= beta, got alpha={alpha}, beta={beta}")));
        }
        if !(support_hint.0 < support_hint.1) {
            return Err(Error::InvalidInput("empty support hint".into()));
        }
        let mut c = LogConcaveComponent {
            log_density: Arc::new(log_density),
            dlog: Arc::new(dlog),
            d2log: Arc::new(d2log),
            class_sign,
            support_hint,
            alpha,
            beta,
            mode: 0.0,
            log_norm: 0.0,
        };
        c.mode = c.find_mode()?;
        let peak = (c.log_density)(c.mode);
        if !peak.is_finite() {
            return Err(Error::Envelope(format!("log-density not finite at mode {}", c.mode)));
        }
        let (lo, hi) = c.effective_support();
        let ld = c.log_density.clone();
        let z = integrate_adaptive(|x| (ld(x) - peak).exp(), lo, hi, 1e-13)?;
        c.log_norm = peak + z.ln();
        Ok(c)
    }

    /// `N(mean, std²)` component.
    pub fn gaussian(mean: f64, std: f64, class_sign: i8) -> Result<Self> {
        if !(std > 0.0) {
            return Err(Error::InvalidInput(format!("std must be positive, got {std}")));
        }
        let v = std * std;
        Self::new(
            move |x| -(x - mean) * (x - mean) / (2.0 * v),
            move |x| -(x - mean) / v,
            move |_| -1.0 / v,
            class_sign,
            (mean - 10.0 * std, mean + 10.0 * std),
            1.0 / v,
            1.0 / v,
        )
    }

    /// `p(x) ∝ exp(-(x-shift)² + cos(x-shift))`: 1-log-concave and 3-log-smooth.
    pub fn cos_bump(shift: f64, class_sign: i8) -> Result<Self> {
        Self::new(
            move |x| -(x - shift).powi(2) + (x - shift).cos(),
            move |x| -2.0 * (x - shift) - (x - shift).sin(),
            move |x| -2.0 - (x - shift).cos(),
            class_sign,
            (shift - 6.0, shift + 6.0),
            1.0,
            3.0,
        )
    }

    /// Density of `X + s`.
    pub fn shifted(&self, s: f64) -> Result<Self> {
        let (a, b, c) = (self.log_density.clone(), self.dlog.clone(), self.d2log.clone());
        Self::new(
            move |x| a(x - s),
            move |x| b(x - s),
            move |x| c(x - s),
            self.class_sign,
            (self.support_hint.0 + s, self.support_hint.1 + s),
            self.alpha,
            self.beta,
        )
    }

    /// Density of `c·X` for `c > 0`; curvature bounds scale by `1/c²`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::InvalidInput(format!("scale must be positive, got {c}")));
        }
        let (a, b, d) = (self.log_density.clone(), self.dlog.clone(), self.d2log.clone());
        Self::new(
            move |x| a(x / c),
            move |x| b(x / c) / c,
            move |x| d(x / c) / (c * c),
            self.class_sign,
            (self.support_hint.0 * c, self.support_hint.1 * c),
            self.alpha / (c * c),
            self.beta / (c * c),
        )
    }

    /// Same density with the opposite label.
    pub fn with_class_sign(&self, class_sign: i8) -> Result<Self> {
        let mut c = self.clone();
        if class_sign != 1 && class_sign != -1 {
            return Err(Error::InvalidInput(format!("class_sign must be ±1, got {class_sign}")));
        }
        c.class_sign = class_sign;
        Ok(c)
    }

    fn find_mode(&self) -> Result<f64> {
        let (lo, hi) = self.support_hint;
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let s = (self.dlog)(x);
            let h = (self.d2log)(x);
            if !(h < 0.0) || !s.is_finite() {
                return Err(Error::Envelope(format!("non-concave or non-finite derivative at x = {x}")));
            }
            // cap the step at the scale set by the declared concavity
            let step = (s / h).clamp(-10.0 / self.alpha.sqrt(), 10.0 / self.alpha.sqrt());
            x -= step;
            if step.abs() <= 1e-13 * x.abs().max(1.0) {
                return Ok(x);
            }
        }
        Err(Error::Envelope("mode not found within 200 Newton iterations".into()))
    }

    pub fn mode(&self) -> f64 {
        self.mode
    }

    pub fn log_density(&self, x: f64) -> f64 {
        (self.log_density)(x) - self.log_norm
    }

    pub fn density(&self, x: f64) -> f64 {
        self.log_density(x).exp()
    }

    pub fn dlog_density(&self, x: f64) -> f64 {
        (self.dlog)(x)
    }

    pub fn d2log_density(&self, x: f64) -> f64 {
        (self.d2log)(x)
    }

    /// Interval around the mode whose complement carries mass below
    /// [`TAIL_MASS`], from `p(x) ≤ p(mode)·e^{-α(x-mode)²/2}` and
    /// `p(mode) ≤ √(β/2π)`.
    pub fn effective_support(&self) -> (f64, f64) {
        let ratio = (self.beta / self.alpha).sqrt();
        let mut z = 6.0;
        while ratio * erfc_f64(z / std::f64::consts::SQRT_2) > TAIL_MASS {
            z += 0.25;
        }
        let half = z / self.alpha.sqrt();
        (self.mode - half, self.mode + half)
    }

    /// CDF by adaptive quadrature from the left end of the effective support.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.effective_support();
        if x <= lo {
            return Ok(0.0);
        }
        let x = x.min(hi);
        Ok(integrate_adaptive(|t| self.density(t), lo, x, 1e-13)?.min(1.0))
    }

    /// `∫ f(x) p(x) dx` over the effective support, split at `breaks` inside it.
    pub fn expect(&self, f: impl Fn(f64) -> f64, breaks: &[f64], tol: f64) -> Result<f64> {
        let (lo, hi) = self.effective_support();
        let mut pts = vec![lo];
        pts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
        pts.push(hi);
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        crate::kernels::quadrature::integrate_pieces(|x| f(x) * self.density(x), &pts, tol)
    }
}

/// Mixture of log-concave components with weights `τ`.
#[derive(Debug, Clone)]
pub struct MixtureSignalSpec {
    pub components: Vec<LogConcaveComponent>,
    pub weights: Vec<f64>,
}

impl MixtureSignalSpec {
    pub fn new(components: Vec<LogConcaveComponent>, weights: Vec<f64>) -> Result<Self> {
        if components.is_empty() || components.len() != weights.len() {
            return Err(Error::InvalidInput(format!("{} components but {} weights", components.len(), weights.len())));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidInput("mixture weights must be positive".into()));
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("mixture weights sum to {s}, not 1")));
        }
        Ok(MixtureSignalSpec { components, weights })
    }

    /// Single component with weight one.
    pub fn single(c: LogConcaveComponent) -> Self {
        MixtureSignalSpec { components: vec![c], weights: vec![1.0] }
    }

    /// Classes `±1` with `x₁ | y ~ N(yγ, σ₁²)`, equal weights.
    pub fn symmetric_gaussian(gamma: f64, sigma1: f64) -> Result<Self> {
        Self::new(
            vec![LogConcaveComponent::gaussian(gamma, sigma1, 1)?, LogConcaveComponent::gaussian(-gamma, sigma1, -1)?],
            vec![0.5, 0.5],
        )
    }

    pub fn tau_min(&self) -> f64 {
        self.weights.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Smallest declared concavity and largest declared smoothness.
    pub fn alpha_beta(&self) -> (f64, f64) {
        let a = self.components.iter().map(|c| c.alpha).fold(f64::INFINITY, f64::min);
        let b = self.components.iter().map(|c| c.beta).fold(0.0, f64::max);
        (a, b)
    }

    /// `Σ τ_k E_k[f]`.
    pub fn expect(&self, f: impl Fn(f64) -> f64, breaks: &[f64], tol: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (c, &w) in self.components.iter().zip(&self.weights) {
            acc += w * c.expect(&f, breaks, tol)?;
        }
        Ok(acc)
    }
}

/// Draws one sample by rejection from `N(mode, 1/α)`.
pub(crate) fn sample_one(c: &LogConcaveComponent, rng: &mut Rng, index: usize) -> Result<f64> {
    const MAX_PROPOSALS: u64 = 1_000_000;
    let peak = (c.log_density)(c.mode);
    let sd = 1.0 / c.alpha.sqrt();
    for _ in 0..MAX_PROPOSALS {
        let x = c.mode + sd * normal(rng);
        let u: f64 = rng.gen();
        let log_ratio = (c.log_density)(x) - peak + 0.5 * c.alpha * (x - c.mode).powi(2);
        if log_ratio > 1e-9 {
            return Err(Error::Envelope(format!("declared alpha = {} does not bound the density at x = {x}", c.alpha)));
        }
        if u.ln() <= log_ratio {
            return Ok(x);
        }
    }
    Err(Error::Rejection { index, proposals: MAX_PROPOSALS })
}

/// `n` i.i.d. draws from `component`, deterministic in `seed`.
pub fn sample_logconcave_1d<T: Scalar>(component: &LogConcaveComponent, n: usize, seed: u64) -> Result<Vec<T>> {
    let mut rng = rng_from_seed(seed);
    (0..n).map(|i| sample_one(component, &mut rng, i).map(T::lit)).collect()
}

/// `(α̂, β̂) = (-max (log p)'', max |(log p)''|)` over the grid `lo, lo+step, …, hi`.
pub fn estimate_concavity(component: &LogConcaveComponent, lo: f64, hi: f64, step: f64) -> Result<(f64, f64)> {
    if !(step > 0.0) || !(hi > lo) {
        return Err(Error::InvalidInput("grid needs lo < hi and step > 0".into()));
    }
    let mass = component.cdf(hi)? - component.cdf(lo)?;
    if mass < 0.999 {
        return Err(Error::InvalidInput(format!("grid [{lo}, {hi}] covers only {mass:.6} of the mass")));
    }
    let n = ((hi - lo) / step).floor() as usize;
    let (mut max_d2, mut max_abs) = (f64::NEG_INFINITY, 0.0f64);
    for i in 0..=n {
        let x = lo + i as f64 * step;
        let d2 = component.d2log_density(x);
        if d2 > 0.0 {
            return Err(Error::NonConcave { at: x, value: d2 });
        }
        max_d2 = max_d2.max(d2);
        max_abs = max_abs.max(d2.abs());
    }
    Ok((-max_d2, max_abs))
}

/// Kolmogorov–Smirnov distance between `samples` and the component CDF.
pub fn ks_distance(samples: &[f64], component: &LogConcaveComponent) -> Result<f64> {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = xs.len() as f64;
    let (lo, _) = component.effective_support();
    let mut cdf = 0.0;
    let mut prev = lo;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        if x > prev {
            cdf += integrate_adaptive(|t| component.density(t), prev, x, 1e-14)?;
            prev = x;
        }
        let f = cdf.min(1.0);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn densities_are_normalised() {
        for c in [
            LogConcaveComponent::gaussian(1.0, 2.0, 1).unwrap(),
            LogConcaveComponent::cos_bump(0.0, 1).unwrap(),
            LogConcaveComponent::cos_bump(4.0, -1).unwrap().scaled(0.5).unwrap(),
        ] {
            let (lo, hi) = c.effective_support();
            let m = integrate_adaptive(|x| c.density(x), lo - 5.0, hi + 5.0, 1e-12).unwrap();
            assert!((m - 1.0).abs() < 1e-6, "{c:?} mass {m}");
        }
    }

    #[test]
    fn gaussian_density_is_exact() {
        let c = LogConcaveComponent::gaussian(1.0, 2.0, 1).unwrap();
        let want = (-(0.25f64 / 8.0)).exp() / (2.0 * (2.0 * std::f64::consts::PI).sqrt());
        assert!((c.density(1.5) - want).abs() < 1e-12);
        assert!((c.mode() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mode_search_failure_is_reported() {
        let r = LogConcaveComponent::new(|x| x, |_| 1.0, |_| 0.0, 1, (-1.0, 1.0), 1.0, 1.0);
        assert!(matches!(r, Err(Error::Envelope(_))));
    }

    #[test]
    fn standard_gaussian_sample_mean() {
        let c = LogConcaveComponent::gaussian(0.0, 1.0, 1).unwrap();
        let xs: Vec<f64> = sample_logconcave_1d(&c, 100_000, 11).unwrap();
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!(m.abs() < 0.01, "mean {m}");
    }

    #[test]
    fn cos_bump_sampler_passes_ks() {
        let c = LogConcaveComponent::cos_bump(0.0, 1).unwrap();
        let xs: Vec<f64> = sample_logconcave_1d(&c, 100_000, 5).unwrap();
        let d = ks_distance(&xs, &c).unwrap();
        assert!(d < 0.01, "KS {d}");
    }

    #[test]
    fn shifted_component_shifts_mean() {
        let c = LogConcaveComponent::cos_bump(0.0, 1).unwrap();
        let s = c.shifted(3.0).unwrap();
        let a: Vec<f64> = sample_logconcave_1d(&c, 100_000, 2).unwrap();
        let b: Vec<f64> = sample_logconcave_1d(&s, 100_000, 3).unwrap();
        let ma = a.iter().sum::<f64>() / 1e5;
        let mb = b.iter().sum::<f64>() / 1e5;
        assert!((mb - ma - 3.0).abs() < 0.02, "{ma} {mb}");
    }

    #[test]
    fn sampler_is_deterministic() {
        let c = LogConcaveComponent::cos_bump(1.0, 1).unwrap();
        let a: Vec<f64> = sample_logconcave_1d(&c, 1000, 9).unwrap();
        let b: Vec<f64> = sample_logconcave_1d(&c, 1000, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampler_rejects_false_alpha() {
        let c = LogConcaveComponent::new(|x| -x * x / 2.0, |x| -x, |_| -1.0, 1, (-3.0, 3.0), 4.0, 4.0).unwrap();
        let r: Result<Vec<f64>> = sample_logconcave_1d(&c, 10_000, 1);
        assert!(matches!(r, Err(Error::Envelope(_))));
    }

    #[test]
    fn concavity_of_gaussian() {
        let c = LogConcaveComponent::gaussian(0.0, 2.0, 1).unwrap();
        let (a, b) = estimate_concavity(&c, -10.0, 10.0, 0.01).unwrap();
        assert!((a - 0.25).abs() < 1e-9 && (b - 0.25).abs() < 1e-9);
    }

    #[test]
    fn concavity_of_cos_bump() {
        let c = LogConcaveComponent::cos_bump(0.0, 1).unwrap();
        let (a, b) = estimate_concavity(&c, -5.0, 5.0, 0.001).unwrap();
        assert!((0.9..=1.1).contains(&a), "alpha {a}");
        assert!((2.9..=3.1).contains(&b), "beta {b}");
    }

    #[test]
    fn concavity_scales_with_input_scale() {
        let c = LogConcaveComponent::cos_bump(0.0, 1).unwrap();
        let (a, b) = estimate_concavity(&c, -5.0, 5.0, 0.001).unwrap();
        let s = c.scaled(2.0).unwrap();
        let (a2, b2) = estimate_concavity(&s, -10.0, 10.0, 0.002).unwrap();
        assert!((a2 - a / 4.0).abs() < 1e-9 && (b2 - b / 4.0).abs() < 1e-9);
    }

    #[test]
    fn concavity_detects_convexity_and_coverage() {
        let bad = LogConcaveComponent::new(
            |x| -x * x / 2.0 + 0.8 * (3.0 * x).cos(),
            |x| -x - 2.4 * (3.0 * x).sin(),
            |x| -1.0 - 7.2 * (3.0 * x).cos(),
            1,
            (-1.0, 1.0),
            1.0,
            8.2,
        );
        // the mode search itself may already fail; if not, the grid check must
        if let Ok(c) = bad {
            assert!(matches!(estimate_concavity(&c, -8.0, 8.0, 0.01), Err(Error::NonConcave { .. })));
        }
        let g = LogConcaveComponent::gaussian(0.0, 1.0, 1).unwrap();
        assert!(estimate_concavity(&g, 0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn mixture_validation() {
        let g = LogConcaveComponent::gaussian(0.0, 1.0, 1).unwrap();
        assert!(MixtureSignalSpec::new(vec![g.clone()], vec![0.9]).is_err());
        assert!(MixtureSignalSpec::new(vec![g.clone(), g.clone()], vec![1.0, 0.0]).is_err());
        let m = MixtureSignalSpec::new(vec![g.clone(), g], vec![0.25, 0.75]).unwrap();
        assert_eq!(m.tau_min(), 0.25);
    }
}
