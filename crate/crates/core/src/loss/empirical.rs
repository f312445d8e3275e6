//! Empirical losses and gradients over a [`SampleBatch`], reduced
//! deterministically (see [`super::reduce`]).

use super::classifier::Classifier;
use super::reduce::sum_rows;
use crate::distributions::SampleBatch;
use crate::kernels::smoothed::{dloss_ent, dloss_exp, loss_ent, loss_exp};
use crate::scalar::Scalar;

/// Unlabelled confidence surrogate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Surrogate {
    /// `ℓ_exp(t) = e^{-|t|}`.
    #[default]
    Exp,
    /// Binary entropy of `sigmoid(t)`, in nats.
    Ent,
}

impl Surrogate {
    #[inline]
    pub fn value<T: Scalar>(self, t: T) -> T {
        match self {
            Surrogate::Exp => loss_exp(t),
            Surrogate::Ent => loss_ent(t),
        }
    }

    #[inline]
    pub fn derivative<T: Scalar>(self, t: T) -> T {
        match self {
            Surrogate::Exp => dloss_exp(t),
            Surrogate::Ent => dloss_ent(t),
        }
    }
}

fn mean<T: Scalar>(mut v: Vec<T>, count: usize) -> Vec<T> {
    let n = T::lit(count as f64);
    v.iter_mut().for_each(|x| *x /= n);
    v
}

/// `(1/n) Σ ℓ_exp(wᵀxᵢ)`.
pub fn empirical_loss<T: Scalar>(w: &Classifier<T>, batch: &SampleBatch<T>) -> T {
    empirical_loss_with(w, batch, Surrogate::Exp)
}

pub fn empirical_loss_with<T: Scalar>(w: &Classifier<T>, batch: &SampleBatch<T>, s: Surrogate) -> T {
    let v = sum_rows(batch.n(), 1, |i, out: &mut [T]| {
        out[0] = s.value(w.margin(batch.x1_row(i), batch.x2_row(i)));
    });
    v[0] / T::lit(batch.n() as f64)
}

/// `(1/n) Σ ℓ′(wᵀxᵢ)·xᵢ` with `ℓ′_exp(0) = 0`, concatenated `[x₁, x₂]` order.
pub fn empirical_grad<T: Scalar>(w: &Classifier<T>, batch: &SampleBatch<T>) -> Vec<T> {
    empirical_grad_with(w, batch, Surrogate::Exp)
}

pub fn empirical_grad_with<T: Scalar>(w: &Classifier<T>, batch: &SampleBatch<T>, s: Surrogate) -> Vec<T> {
    let (d1, d2) = (batch.d1, batch.d2);
    let v = sum_rows(batch.n(), d1 + d2, |i, out: &mut [T]| {
        let (x1, x2) = (batch.x1_row(i), batch.x2_row(i));
        let c = s.derivative(w.margin(x1, x2));
        for (o, &x) in out.iter_mut().zip(x1.iter().chain(x2)) {
            *o = c * x;
        }
    });
    mean(v, batch.n())
}

/// Labels `sign(wᵀxᵢ)` (with `sign(0) = 0`) and margins `wᵀxᵢ`.
pub fn pseudo_labels<T: Scalar>(w: &Classifier<T>, batch: &SampleBatch<T>) -> (Vec<T>, Vec<T>) {
    let margins: Vec<T> = (0..batch.n()).map(|i| w.margin(batch.x1_row(i), batch.x2_row(i))).collect();
    let labels = margins
        .iter()
        .map(|&t| {
            if t > T::zero() {
                T::one()
            } else if t < T::zero() {
                -T::one()
            } else {
                T::zero()
            }
        })
        .collect();
    (labels, margins)
}

/// Mean of `ℓ_exp(yᵢ·wᵀxᵢ) = e^{-yᵢwᵀxᵢ}` over kept rows.
pub fn labeled_loss<T: Scalar>(w: &Classifier<T>, batch: &SampleBatch<T>, labels: &[T], keep: Option<&[bool]>) -> T {
    let kept = keep.map_or(batch.n(), |k| k.iter().filter(|&&b| b).count());
    let v = sum_rows(batch.n(), 1, |i, out: &mut [T]| {
        if keep.map_or(true, |k| k[i]) {
            out[0] = (-labels[i] * w.margin(batch.x1_row(i), batch.x2_row(i))).exp();
        }
    });
    v[0] / T::lit(kept as f64)
}

/// Gradient of [`labeled_loss`]: mean of `-yᵢ e^{-yᵢwᵀxᵢ} xᵢ` over kept rows.
pub fn labeled_grad<T: Scalar>(
    w: &Classifier<T>,
    batch: &SampleBatch<T>,
    labels: &[T],
    keep: Option<&[bool]>,
) -> Vec<T> {
    let (d1, d2) = (batch.d1, batch.d2);
    let kept = keep.map_or(batch.n(), |k| k.iter().filter(|&&b| b).count());
    let v = sum_rows(batch.n(), d1 + d2, |i, out: &mut [T]| {
        if keep.map_or(true, |k| k[i]) {
            let (x1, x2) = (batch.x1_row(i), batch.x2_row(i));
            let y = labels[i];
            let c = -y * (-y * w.margin(x1, x2)).exp();
            for (o, &x) in out.iter_mut().zip(x1.iter().chain(x2)) {
                *o = c * x;
            }
        }
    });
    mean(v, kept)
}

/// One pseudo-labelling gradient: labels from `w`, gradient at `w`.
pub fn pseudo_label_grad_empirical<T: Scalar>(w: &Classifier<T>, batch: &SampleBatch<T>) -> Vec<T> {
    let (labels, _) = pseudo_labels(w, batch);
    labeled_grad(w, batch, &labels, None)
}

/// Fraction of rows with `yᵢ·wᵀxᵢ > 0`.
pub fn empirical_accuracy<T: Scalar>(w: &Classifier<T>, batch: &SampleBatch<T>) -> T {
    let v = sum_rows(batch.n(), 1, |i, out: &mut [T]| {
        let t = w.margin(batch.x1_row(i), batch.x2_row(i));
        if T::lit(batch.y[i] as f64) * t > T::zero() {
            out[0] = T::one();
        }
    });
    v[0] / T::lit(batch.n() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sample_target, GaussianTargetSpec, SpdMatrix};
    use crate::loss::population::{population_grad_gaussian, population_loss_gaussian};

    fn batch(n: usize, seed: u64) -> SampleBatch<f64> {
        let spec = GaussianTargetSpec::new(vec![1.0, 0.5], 1.0, SpdMatrix::identity(2)).unwrap();
        sample_target(&spec.into(), n, seed).unwrap()
    }

    #[test]
    fn kink_sample_has_unit_loss() {
        let b = SampleBatch::from_parts(1, 1, vec![1.0], vec![-2.0], vec![1], 0).unwrap();
        let w = Classifier::<f64>::new(vec![0.8], vec![0.4], 1.0).unwrap();
        assert_eq!(empirical_loss(&w, &b), 1.0);
        assert_eq!(empirical_grad(&w, &b), vec![0.0, 0.0]);
    }

    #[test]
    fn duplicated_batch_same_loss() {
        let b = batch(1000, 3);
        let w = Classifier::<f64>::new(vec![0.5, 0.5], vec![0.3, -0.2], 1.0).unwrap();
        let bb = b.concat(&b).unwrap();
        assert!((empirical_loss(&w, &b) - empirical_loss(&w, &bb)).abs() < 1e-15);
    }

    #[test]
    fn single_sample_gradient() {
        let b = SampleBatch::from_parts(1, 1, vec![1.0], vec![0.5], vec![1], 0).unwrap();
        let w = Classifier::<f64>::new(vec![0.6], vec![0.8], 1.0).unwrap();
        let t: f64 = 0.6 + 0.4;
        let g = empirical_grad(&w, &b);
        assert_eq!(g, vec![-(-t).exp() * 1.0, -(-t).exp() * 0.5]);
    }

    #[test]
    fn reflected_batch_leaves_gradient_unchanged() {
        let b = batch(200, 4);
        let neg = SampleBatch::from_parts(
            2,
            2,
            b.x1.iter().map(|v| -v).collect(),
            b.x2.iter().map(|v| -v).collect(),
            b.y.clone(),
            0,
        )
        .unwrap();
        let both = b.concat(&neg).unwrap();
        let w = Classifier::<f64>::new(vec![0.5, 0.1], vec![0.3, -0.2], 1.0).unwrap();
        for (a, c) in empirical_grad(&w, &both).iter().zip(empirical_grad(&w, &b)) {
            assert!((a - c).abs() < 1e-15);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let b = batch(500, 5);
        let w = Classifier::<f64>::new(vec![0.5, 0.1], vec![0.3, -0.2], 1.0).unwrap();
        let g = empirical_grad(&w, &b);
        let v = w.concat();
        for k in 0..4 {
            let h = 1e-7;
            let mut p = v.clone();
            let mut m = v.clone();
            p[k] += h;
            m[k] -= h;
            let lp = empirical_loss(&Classifier::from_concat(&p, 2, 2.0).unwrap(), &b);
            let lm = empirical_loss(&Classifier::from_concat(&m, 2, 2.0).unwrap(), &b);
            assert!((g[k] - (lp - lm) / (2.0 * h)).abs() < 1e-6);
        }
    }

    #[test]
    fn entropy_gradient_matches_finite_differences() {
        let b = batch(300, 6);
        let w = Classifier::<f64>::new(vec![0.4, 0.2], vec![0.3, -0.5], 1.0).unwrap();
        let g = empirical_grad_with(&w, &b, Surrogate::Ent);
        let v = w.concat();
        for k in 0..4 {
            let h = 1e-6;
            let mut p = v.clone();
            let mut m = v.clone();
            p[k] += h;
            m[k] -= h;
            let lp = empirical_loss_with(&Classifier::from_concat(&p, 2, 2.0).unwrap(), &b, Surrogate::Ent);
            let lm = empirical_loss_with(&Classifier::from_concat(&m, 2, 2.0).unwrap(), &b, Surrogate::Ent);
            assert!((g[k] - (lp - lm) / (2.0 * h)).abs() < 1e-8);
        }
    }

    #[test]
    fn pseudo_gradient_is_bitwise_entropy_gradient() {
        let b = batch(5000, 7);
        let w = Classifier::<f64>::new(vec![0.5, 0.1], vec![0.3, -0.2], 1.0).unwrap();
        assert_eq!(pseudo_label_grad_empirical(&w, &b), empirical_grad(&w, &b));
    }

    #[test]
    fn large_batch_within_clt_band() {
        let spec = GaussianTargetSpec::new(vec![1.0, 0.5], 1.0, SpdMatrix::identity(2)).unwrap();
        let n = 1_000_000;
        let b = sample_target(&spec.clone().into(), n, 8).unwrap();
        let w = Classifier::<f64>::new(vec![0.5, 0.1], vec![0.3, -0.2], 1.0).unwrap();
        let emp = empirical_loss(&w, &b);
        let pop = population_loss_gaussian(&w, &spec);
        // Var ≤ E[ℓ²] ≤ E[ℓ]
        assert!((emp - pop).abs() < 3.0 * (pop / n as f64).sqrt());
        let ge = empirical_grad(&w, &b);
        let gp = population_grad_gaussian(&w, &spec);
        for (a, c) in ge.iter().zip(&gp) {
            assert!((a - c).abs() < 0.01);
        }
    }

    #[test]
    fn accuracy_counts_correct_signs() {
        let b = SampleBatch::from_parts(1, 1, vec![1.0, -1.0, 2.0], vec![0.0, 0.0, 0.0], vec![1, 1, 1], 0).unwrap();
        let w = Classifier::<f64>::new(vec![1.0], vec![0.0], 1.0).unwrap();
        assert!((empirical_accuracy(&w, &b) - 2.0 / 3.0).abs() < 1e-15);
    }
}
