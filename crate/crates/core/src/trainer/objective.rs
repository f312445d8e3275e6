//! Loss sources driven by the trainer.

use crate::distributions::{
    derive_seed, sample_target, GaussianTargetSpec, MixtureSignalSpec, SampleBatch, SpdMatrix, TargetSpec,
};
use crate::error::{Error, Result};
use crate::loss::{
    empirical_accuracy, empirical_grad_with, empirical_loss_with, population_accuracy_gaussian,
    population_accuracy_general, population_grad_gaussian, population_grad_general, population_loss_gaussian,
    population_loss_general, pseudo_label_grad_empirical, pseudo_label_grad_gaussian, safe_set_margin, Classifier,
    Surrogate,
};
use crate::scalar::Scalar;

/// A population or empirical objective `L(w)`.
pub trait Objective<T: Scalar> {
    /// `(d₁, d₂)`.
    fn dims(&self) -> (usize, usize);

    /// Moves to data index `index` (a step or a round). Objectives with
    /// fixed data ignore it.
    fn advance(&mut self, _index: usize) -> Result<()> {
        Ok(())
    }

    fn loss(&self, w: &Classifier<T>) -> Result<T>;

    /// `∇L(w)` in concatenated `[w₁, w₂]` order.
    fn grad(&self, w: &Classifier<T>) -> Result<Vec<T>>;

    /// Gradient of `ℓ_exp(yᵗ·wᵀx)` with `yᵗ = sign(wᵀx)` frozen at `w`.
    fn pseudo_label_grad(&self, w: &Classifier<T>) -> Result<Vec<T>>;

    /// Target accuracy of `sign(wᵀx)`.
    fn accuracy(&self, w: &Classifier<T>) -> Result<T>;

    /// `Σ₂` of the spurious block.
    fn sigma2(&self) -> &SpdMatrix<T>;

    /// `σ = √(w₂ᵀΣ₂w₂)`.
    fn sigma(&self, w: &Classifier<T>) -> T {
        self.sigma2().quad_form(&w.w2).max(T::zero()).sqrt()
    }

    /// Membership of the region where convergence is guaranteed, when the
    /// objective knows it.
    fn precondition(&self, _w: &Classifier<T>, _radius: T) -> Option<bool> {
        None
    }

    /// Current data, for objectives backed by samples.
    fn batch(&self) -> Option<&SampleBatch<T>> {
        None
    }
}

/// Exact Gaussian population objective.
#[derive(Debug, Clone)]
pub struct GaussianPopulation<T> {
    pub spec: GaussianTargetSpec<T>,
}

impl<T: Scalar> GaussianPopulation<T> {
    pub fn new(spec: GaussianTargetSpec<T>) -> Self {
        GaussianPopulation { spec }
    }
}

impl<T: Scalar> Objective<T> for GaussianPopulation<T> {
    fn dims(&self) -> (usize, usize) {
        (self.spec.d1(), self.spec.d2())
    }

    fn loss(&self, w: &Classifier<T>) -> Result<T> {
        Ok(population_loss_gaussian(w, &self.spec))
    }

    fn grad(&self, w: &Classifier<T>) -> Result<Vec<T>> {
        Ok(population_grad_gaussian(w, &self.spec))
    }

    fn pseudo_label_grad(&self, w: &Classifier<T>) -> Result<Vec<T>> {
        Ok(pseudo_label_grad_gaussian(w, &self.spec))
    }

    fn accuracy(&self, w: &Classifier<T>) -> Result<T> {
        Ok(population_accuracy_gaussian(w, &self.spec))
    }

    fn sigma2(&self) -> &SpdMatrix<T> {
        &self.spec.sigma2
    }

    fn precondition(&self, w: &Classifier<T>, radius: T) -> Option<bool> {
        Some(safe_set_margin(w, &self.spec, radius).0)
    }
}

/// Population objective for a 1-d log-concave mixture signal, by quadrature.
#[derive(Debug, Clone)]
pub struct GeneralPopulation<T> {
    pub signal: MixtureSignalSpec,
    pub sigma2: SpdMatrix<T>,
}

impl<T: Scalar> GeneralPopulation<T> {
    pub fn new(signal: MixtureSignalSpec, sigma2: SpdMatrix<T>) -> Self {
        GeneralPopulation { signal, sigma2 }
    }
}

impl<T: Scalar> Objective<T> for GeneralPopulation<T> {
    fn dims(&self) -> (usize, usize) {
        (1, self.sigma2.dim())
    }

    fn loss(&self, w: &Classifier<T>) -> Result<T> {
        population_loss_general(w, &self.signal, &self.sigma2)
    }

    fn grad(&self, w: &Classifier<T>) -> Result<Vec<T>> {
        population_grad_general(w, &self.signal, &self.sigma2)
    }

    /// Equal to [`Objective::grad`]: the pseudo-label gradient with labels
    /// frozen at `w` coincides with the entropy gradient pointwise in `x`.
    fn pseudo_label_grad(&self, w: &Classifier<T>) -> Result<Vec<T>> {
        self.grad(w)
    }

    fn accuracy(&self, w: &Classifier<T>) -> Result<T> {
        population_accuracy_general(w, &self.signal, &self.sigma2)
    }

    fn sigma2(&self) -> &SpdMatrix<T> {
        &self.sigma2
    }
}

/// Empirical objective on a fixed batch, or on a fresh batch per index.
#[derive(Debug, Clone)]
pub struct Empirical<T> {
    batch: SampleBatch<T>,
    sigma2: SpdMatrix<T>,
    test: Option<SampleBatch<T>>,
    surrogate: Surrogate,
    fresh: Option<(TargetSpec<T>, usize, u64)>,
    current: usize,
    reference: Option<GaussianTargetSpec<T>>,
}

impl<T: Scalar> Empirical<T> {
    /// Fixed training batch; `sigma2` is the spurious covariance used for σ.
    pub fn fixed(batch: SampleBatch<T>, sigma2: SpdMatrix<T>) -> Result<Self> {
        if batch.d2 != sigma2.dim() {
            return Err(Error::DimensionMismatch { what: "batch d2 vs Sigma2", expected: sigma2.dim(), got: batch.d2 });
        }
        Ok(Empirical { batch, sigma2, test: None, surrogate: Surrogate::Exp, fresh: None, current: 0, reference: None })
    }

    /// Draws `n` new samples from `spec` at every index `k`, seeded by
    /// `derive_seed(seed, k)`.
    pub fn fresh(spec: TargetSpec<T>, n: usize, seed: u64) -> Result<Self> {
        let batch = sample_target(&spec, n, derive_seed(seed, 0))?;
        let sigma2 = spec.sigma2().clone();
        let reference = match &spec {
            TargetSpec::Gaussian(g) => Some(g.clone()),
            TargetSpec::Mixture { .. } => None,
        };
        Ok(Empirical {
            batch,
            sigma2,
            test: None,
            surrogate: Surrogate::Exp,
            fresh: Some((spec, n, seed)),
            current: 0,
            reference,
        })
    }

    /// Accuracy is measured on `test` instead of the training batch.
    pub fn with_test(mut self, test: SampleBatch<T>) -> Result<Self> {
        if (test.d1, test.d2) != (self.batch.d1, self.batch.d2) {
            return Err(Error::InvalidInput("test batch dimensions differ from training batch".into()));
        }
        self.test = Some(test);
        Ok(self)
    }

    /// Surrogate for [`Objective::loss`] and [`Objective::grad`].
    pub fn with_surrogate(mut self, s: Surrogate) -> Self {
        self.surrogate = s;
        self
    }

    /// Gaussian spec used for the safe-set precondition flag.
    pub fn with_reference(mut self, spec: GaussianTargetSpec<T>) -> Self {
        self.reference = Some(spec);
        self
    }

    pub fn surrogate(&self) -> Surrogate {
        self.surrogate
    }
}

impl<T: Scalar> Objective<T> for Empirical<T> {
    fn dims(&self) -> (usize, usize) {
        (self.batch.d1, self.batch.d2)
    }

    fn advance(&mut self, index: usize) -> Result<()> {
        if let Some((spec, n, seed)) = &self.fresh {
            if index != self.current {
                self.batch = sample_target(spec, *n, derive_seed(*seed, index as u64))?;
                self.current = index;
            }
        }
        Ok(())
    }

    fn loss(&self, w: &Classifier<T>) -> Result<T> {
        Ok(empirical_loss_with(w, &self.batch, self.surrogate))
    }

    fn grad(&self, w: &Classifier<T>) -> Result<Vec<T>> {
        Ok(empirical_grad_with(w, &self.batch, self.surrogate))
    }

    fn pseudo_label_grad(&self, w: &Classifier<T>) -> Result<Vec<T>> {
        Ok(pseudo_label_grad_empirical(w, &self.batch))
    }

    fn accuracy(&self, w: &Classifier<T>) -> Result<T> {
        Ok(empirical_accuracy(w, self.test.as_ref().unwrap_or(&self.batch)))
    }

    fn sigma2(&self) -> &SpdMatrix<T> {
        &self.sigma2
    }

    fn precondition(&self, w: &Classifier<T>, radius: T) -> Option<bool> {
        self.reference.as_ref().map(|s| safe_set_margin(w, s, radius).0)
    }

    fn batch(&self) -> Option<&SampleBatch<T>> {
        Some(&self.batch)
    }
}
