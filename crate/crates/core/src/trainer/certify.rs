//! Approximate-local-minimum certificates, smoothness estimates and the
//! source-classifier fit.

use super::objective::Objective;
use crate::distributions::rng::{normal, rng_from_seed};
use crate::distributions::SampleBatch;
use crate::error::{Error, Result};
use crate::loss::{labeled_grad, Classifier};
use crate::scalar::{dot, norm, Scalar};
use nalgebra::DMatrix;

/// Finite-difference step of the Hessian in [`certify_local_min`].
pub const HESSIAN_STEP: f64 = 1e-4;

/// One certificate condition: `value` compared against `bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
}

/// `(ε, γ)`-approximate local minimum certificate of the purified objective
/// `w₁ ↦ L((w₁, 0))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    /// `‖w₁‖ ≥ 1 - ε`.
    pub cond1: Condition,
    /// `‖P∇_{w₁}L‖ ≤ ε` with `P = I - ŵ₁ŵ₁ᵀ`.
    pub cond2: Condition,
    /// `λ_min(P∇²LP - (w₁ᵀ∇L)P) ≥ -γ` on the tangent space.
    pub cond3: Condition,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.cond1.passed && self.cond2.passed && self.cond3.passed
    }
}

fn grad_w1<T: Scalar, O: Objective<T> + ?Sized>(obj: &O, w1: &[T], d2: usize) -> Result<Vec<f64>> {
    let c = Classifier { w1: w1.to_vec(), w2: vec![T::zero(); d2], radius: T::lit(f64::MAX) };
    Ok(obj.grad(&c)?[..w1.len()].iter().map(|v| v.f64()).collect())
}

/// Evaluates the three conditions at `w = (w₁, 0)`.
pub fn certify_local_min<T: Scalar, O: Objective<T> + ?Sized>(
    w: &Classifier<T>,
    obj: &O,
    eps: f64,
    gamma: f64,
) -> Result<Certificate> {
    if w.w2.iter().any(|v| *v != T::zero()) {
        return Err(Error::InvalidInput("certificate needs w2 = 0".into()));
    }
    let d1 = w.d1();
    let d2 = w.d2();
    let w1: Vec<f64> = w.w1.iter().map(|v| v.f64()).collect();
    let n1 = norm(&w1);
    if !(n1 > 0.0) {
        return Err(Error::InvalidInput("certificate needs w1 != 0".into()));
    }
    let u: Vec<f64> = w1.iter().map(|v| v / n1).collect();
    let g = grad_w1(obj, &w.w1, d2)?;
    let p = DMatrix::<f64>::from_fn(d1, d1, |i, j| if i == j { 1.0 } else { 0.0 } - u[i] * u[j]);
    let pg = &p * nalgebra::DVector::from_vec(g.clone());

    let cond1 = Condition { passed: n1 >= 1.0 - eps, value: n1, bound: 1.0 - eps };
    let cond2 = Condition { passed: pg.norm() <= eps, value: pg.norm(), bound: eps };

    let cond3 = if d1 == 1 {
        Condition { passed: true, value: 0.0, bound: -gamma }
    } else {
        let mut h = DMatrix::<f64>::zeros(d1, d1);
        for j in 0..d1 {
            let mut plus = w.w1.clone();
            let mut minus = w.w1.clone();
            plus[j] += T::lit(HESSIAN_STEP);
            minus[j] -= T::lit(HESSIAN_STEP);
            let gp = grad_w1(obj, &plus, d2)?;
            let gm = grad_w1(obj, &minus, d2)?;
            for i in 0..d1 {
                h[(i, j)] = (gp[i] - gm[i]) / (2.0 * HESSIAN_STEP);
            }
        }
        let h = (&h + h.transpose()) * 0.5;
        let m = &p * h * &p - &p * dot(&w1, &g);
        // Orthonormal basis of the tangent space: eigenvectors of P with eigenvalue 1.
        let pe = p.clone().symmetric_eigen();
        let cols: Vec<_> =
            (0..d1).filter(|&k| pe.eigenvalues[k] > 0.5).map(|k| pe.eigenvectors.column(k).into_owned()).collect();
        let b = DMatrix::from_columns(&cols);
        let restricted = b.transpose() * m * &b;
        let lmin = restricted.symmetric_eigen().eigenvalues.min();
        Condition { passed: lmin >= -gamma, value: lmin, bound: -gamma }
    };
    Ok(Certificate { cond1, cond2, cond3 })
}

/// Largest gradient-difference quotient `‖∇L(a) - ∇L(b)‖/‖a - b‖` over
/// `pairs` random pairs drawn uniformly from the ball of radius `radius`.
pub fn estimate_smoothness<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    radius: T,
    pairs: usize,
    seed: u64,
) -> Result<T> {
    let (d1, d2) = obj.dims();
    let d = d1 + d2;
    let mut rng = rng_from_seed(seed);
    let mut draw = || -> Result<Classifier<T>> {
        let z: Vec<f64> = (0..d).map(|_| normal(&mut rng)).collect();
        let u: f64 = rand::Rng::gen(&mut rng);
        let r = radius.f64() * u.powf(1.0 / d as f64) / norm(&z).max(1e-300);
        Classifier::from_concat(&z.iter().map(|v| T::lit(v * r)).collect::<Vec<_>>(), d1, radius)
    };
    let mut best = T::zero();
    for _ in 0..pairs {
        let (a, b) = (draw()?, draw()?);
        let (ga, gb) = (obj.grad(&a)?, obj.grad(&b)?);
        let dg: Vec<T> = ga.iter().zip(&gb).map(|(x, y)| *x - *y).collect();
        let dw: Vec<T> = a.concat().iter().zip(b.concat()).map(|(x, y)| *x - y).collect();
        let den = norm(&dw);
        if den > T::zero() {
            best = best.max(norm(&dg) / den);
        }
    }
    Ok(best)
}

/// `0.05 / smoothness` from [`estimate_smoothness`] with 100 pairs.
pub fn default_eta<T: Scalar, O: Objective<T> + ?Sized>(obj: &O, radius: T, seed: u64) -> Result<T> {
    let l = estimate_smoothness(obj, radius, 100, seed)?;
    if !(l > T::zero()) || !l.is_finite() {
        return Err(Error::InvalidInput(format!("smoothness estimate {l} is unusable")));
    }
    Ok(T::lit(0.05) / l)
}

/// Result of [`train_source`].
#[derive(Debug, Clone, PartialEq)]
pub struct SourceFit<T> {
    pub w: Classifier<T>,
    pub steps: usize,
    /// `‖w - Π(w - η∇)‖/η` at the returned point.
    pub stationarity: T,
}

/// Full-batch projected gradient descent on the labelled `ℓ_exp` loss
/// `mean e^{-yᵢwᵀxᵢ}` over the ball of radius `radius`, from `w = 0`,
/// until the projected-gradient norm is below `tol` or `max_steps`.
pub fn train_source<T: Scalar>(
    batch: &SampleBatch<T>,
    radius: T,
    eta: T,
    max_steps: usize,
    tol: T,
) -> Result<SourceFit<T>> {
    if !(eta > T::zero()) || !(radius > T::zero()) {
        return Err(Error::InvalidInput("eta and radius must be positive".into()));
    }
    let labels: Vec<T> = batch.y.iter().map(|&y| T::lit(y as f64)).collect();
    let (d1, d2) = (batch.d1, batch.d2);
    let mut w = Classifier { w1: vec![T::zero(); d1], w2: vec![T::zero(); d2], radius };
    let project = |v: Vec<T>| -> Vec<T> {
        let n = norm(&v);
        if n > radius {
            v.iter().map(|&x| x * radius / n).collect()
        } else {
            v
        }
    };
    for k in 0..=max_steps {
        let g = labeled_grad(&w, batch, &labels, None);
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "source gradient", step: k });
        }
        let cur = w.concat();
        let next = project(cur.iter().zip(&g).map(|(&a, &b)| a - eta * b).collect());
        let diff: Vec<T> = cur.iter().zip(&next).map(|(a, b)| *a - *b).collect();
        let stationarity = norm(&diff) / eta;
        if stationarity < tol || k == max_steps {
            return Ok(SourceFit { w, steps: k, stationarity });
        }
        w = Classifier { w1: next[..d1].to_vec(), w2: next[d1..].to_vec(), radius };
    }
    unreachable!("loop returns at k = max_steps")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{GaussianTargetSpec, SpdMatrix};
    use crate::trainer::config::TrainerConfig;
    use crate::trainer::objective::GaussianPopulation;
    use crate::trainer::run::run_entropy_min;

    #[test]
    fn converged_one_d_point_is_certified() {
        let spec = GaussianTargetSpec::new(vec![3.0], 1.0, SpdMatrix::identity(1)).unwrap();
        let mut obj = GaussianPopulation::new(spec);
        let w0 = Classifier::on_sphere(vec![0.9], vec![0.3], 1.0).unwrap();
        let cfg = TrainerConfig { eta: 0.5, max_steps: 10_000, stop_tol: 1e-12, ..TrainerConfig::default() };
        let t = run_entropy_min(&w0, &cfg, &mut obj).unwrap();
        let w1 = t.final_w().w1.clone();
        let w = Classifier::new(w1, vec![0.0], 1.0).unwrap();
        let c = certify_local_min(&w, &obj, 1e-3, 1e-3).unwrap();
        assert!(c.passed(), "{c:?}");
    }

    #[test]
    fn short_w1_fails_norm_condition() {
        let spec = GaussianTargetSpec::new(vec![3.0], 1.0, SpdMatrix::identity(1)).unwrap();
        let obj = GaussianPopulation::new(spec);
        let w = Classifier::new(vec![0.5], vec![0.0], 1.0).unwrap();
        let c = certify_local_min(&w, &obj, 0.4, 1e-3).unwrap();
        assert!(!c.cond1.passed);
    }

    #[test]
    fn off_optimum_direction_fails_gradient_condition() {
        let spec = GaussianTargetSpec::new(vec![3.0, 0.0], 1.0, SpdMatrix::identity(1)).unwrap();
        let obj = GaussianPopulation::new(spec);
        let w = Classifier::on_sphere(vec![0.6, 0.8], vec![0.0], 1.0).unwrap();
        let c = certify_local_min(&w, &obj, 1e-3, 1e-3).unwrap();
        assert!(!c.cond2.passed);
        assert!(c.cond2.value > 0.01);
    }

    #[test]
    fn two_d_optimum_passes_all_three() {
        let spec = GaussianTargetSpec::new(vec![2.0, 1.0], 1.0, SpdMatrix::identity(1)).unwrap();
        let obj = GaussianPopulation::new(spec);
        let n = 5f64.sqrt();
        let w = Classifier::new(vec![2.0 / n, 1.0 / n], vec![0.0], 1.0).unwrap();
        let c = certify_local_min(&w, &obj, 1e-3, 1e-3).unwrap();
        assert!(c.passed(), "{c:?}");
        assert!(c.cond3.value > 0.0);
    }

    #[test]
    fn rejects_nonzero_w2() {
        let spec = GaussianTargetSpec::new(vec![3.0], 1.0, SpdMatrix::identity(1)).unwrap();
        let w = Classifier::new(vec![0.5], vec![0.1], 1.0).unwrap();
        assert!(certify_local_min(&w, &GaussianPopulation::new(spec), 1e-3, 1e-3).is_err());
    }

    #[test]
    fn smoothness_estimate_is_positive_and_seeded() {
        let spec = GaussianTargetSpec::new(vec![2.0], 1.0, SpdMatrix::identity(1)).unwrap();
        let obj = GaussianPopulation::new(spec);
        let a = estimate_smoothness(&obj, 1.0_f64, 100, 1).unwrap();
        assert!(a > 0.0 && a.is_finite());
        assert_eq!(a, estimate_smoothness(&obj, 1.0_f64, 100, 1).unwrap());
        let eta = default_eta(&obj, 1.0_f64, 1).unwrap();
        assert!((eta - 0.05 / a).abs() < 1e-15);
    }

    #[test]
    fn source_fit_reaches_boundary_and_stationarity() {
        use crate::distributions::{sample_source_toy, ToySourceSpec};
        let spec = ToySourceSpec::new(vec![1.5, 1.0], 0.9, 2).unwrap();
        let b = sample_source_toy::<f64>(&spec, 5000, 1).unwrap();
        let fit = train_source(&b, 1.0_f64, 0.5, 10_000, 1e-8).unwrap();
        assert!(fit.stationarity < 1e-8, "{fit:?}");
        assert!((fit.w.norm() - 1.0).abs() < 1e-12);
        assert!(fit.w.w2.iter().all(|&v| v > 0.0));
    }
}
