//! Uniform deviation between empirical and population gradients.

use super::classifier::Classifier;
use super::population::population_grad_gaussian;
use super::reduce::sum_rows;
use crate::distributions::{derive_seed, rng_from_seed, sample_target, GaussianTargetSpec, SampleBatch};
use crate::error::{Error, Result};
use crate::kernels::smoothed::dloss_exp;
use crate::scalar::{dot, Scalar};
use rayon::prelude::*;
use std::io::Write;

/// One `(n, trial)` cell of a deviation study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationRow {
    pub n: usize,
    pub trial: usize,
    pub sup_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DeviationTable {
    pub rows: Vec<DeviationRow>,
}

impl DeviationTable {
    /// Distinct `n` values in first-seen order.
    pub fn ns(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.n) {
                out.push(r.n);
            }
        }
        out
    }

    fn values(&self, n: usize) -> Vec<f64> {
        self.rows.iter().filter(|r| r.n == n).map(|r| r.sup_dev).collect()
    }

    /// `(n, mean over trials)`.
    pub fn mean_by_n(&self) -> Vec<(usize, f64)> {
        self.ns()
            .into_iter()
            .map(|n| {
                let v = self.values(n);
                (n, v.iter().sum::<f64>() / v.len() as f64)
            })
            .collect()
    }

    /// `(n, median over trials)`.
    pub fn median_by_n(&self) -> Vec<(usize, f64)> {
        self.ns()
            .into_iter()
            .map(|n| {
                let mut v = self.values(n);
                v.sort_by(|a, b| a.partial_cmp(b).expect("finite deviations"));
                let m = v.len();
                let med = if m % 2 == 1 { v[m / 2] } else { 0.5 * (v[m / 2 - 1] + v[m / 2]) };
                (n, med)
            })
            .collect()
    }

    /// `n,trial,sup_dev` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,trial,sup_dev")?;
        for r in &self.rows {
            writeln!(w, "{},{},{:.16e}", r.n, r.trial, r.sup_dev)?;
        }
        Ok(())
    }
}

/// `max_w max(|⟨∇̂₁ - ∇₁, w₁⟩|, |⟨∇̂₂ - ∇₂, w₂⟩|)`; with `batch = None` the
/// population is compared with itself (the `n → ∞` limit).
pub fn sup_deviation<T: Scalar>(
    spec: &GaussianTargetSpec<T>,
    batch: Option<&SampleBatch<T>>,
    w_grid: &[Classifier<T>],
) -> T {
    let mut sup = T::zero();
    for w in w_grid {
        let (p1, p2) = w.split_dots(&population_grad_gaussian(w, spec));
        let (e1, e2) = match batch {
            None => (p1, p2),
            Some(b) => {
                let s = sum_rows(b.n(), 2, |i, out: &mut [T]| {
                    let (x1, x2) = (b.x1_row(i), b.x2_row(i));
                    let (a, c) = (dot(&w.w1, x1), dot(&w.w2, x2));
                    let d = dloss_exp(a + c);
                    out[0] = d * a;
                    out[1] = d * c;
                });
                let n = T::lit(b.n() as f64);
                (s[0] / n, s[1] / n)
            }
        };
        sup = sup.max((e1 - p1).abs()).max((e2 - p2).abs());
    }
    sup
}

/// Classifiers drawn uniformly on the sphere of radius `radius`.
pub fn random_w_grid<T: Scalar>(d1: usize, d2: usize, radius: T, count: usize, seed: u64) -> Vec<Classifier<T>> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|_| {
            let v: Vec<T> = (0..d1 + d2).map(|_| T::lit(crate::distributions::rng::normal(&mut rng))).collect();
            Classifier::on_sphere(v[..d1].to_vec(), v[d1..].to_vec(), radius).expect("non-zero draw")
        })
        .collect()
}

/// For every `n` in `n_list` and every trial, draws a fresh target batch and
/// records [`sup_deviation`] over `w_grid`.
pub fn grad_deviation<T: Scalar>(
    spec: &GaussianTargetSpec<T>,
    n_list: &[usize],
    trials: usize,
    w_grid: &[Classifier<T>],
    seed: u64,
) -> Result<DeviationTable> {
    if w_grid.is_empty() {
        return Err(Error::InvalidInput("w_grid must be non-empty".into()));
    }
    if let Some(w) = w_grid.iter().find(|w| w.norm() > w.radius * T::lit(1.0 + 1e-12)) {
        return Err(Error::InvalidInput(format!("grid classifier outside radius: {:?}", w.norm())));
    }
    let jobs: Vec<(usize, usize)> = (0..n_list.len()).flat_map(|k| (0..trials).map(move |t| (k, t))).collect();
    let rows: Result<Vec<DeviationRow>> = jobs
        .par_iter()
        .map(|&(k, t)| {
            let n = n_list[k];
            let s = derive_seed(seed, (k as u64) << 32 | t as u64);
            let b = sample_target(&spec.clone().into(), n, s)?;
            Ok(DeviationRow { n, trial: t, sup_dev: sup_deviation(spec, Some(&b), w_grid).f64() })
        })
        .collect();
    Ok(DeviationTable { rows: rows? })
}
