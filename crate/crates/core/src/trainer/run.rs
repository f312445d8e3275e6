//! Projected gradient descent and its pseudo-labelling variants.

use super::config::{TrainerConfig, Variant};
use super::objective::Objective;
use crate::distributions::rng::{normal, rng_from_seed};
use crate::error::{Error, Result};
use crate::loss::{labeled_grad, pseudo_labels, Classifier};
use crate::scalar::{norm, Scalar};
use std::io::Write;

/// State after one step (or the initial state at `step = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord<T> {
    pub step: usize,
    pub norm_w1: T,
    pub norm_w2: T,
    pub loss: T,
    pub accuracy: T,
    /// `⟨∇_{w₁}L, w₁⟩`.
    pub g1_dot: T,
    /// `⟨∇_{w₂}L, w₂⟩`.
    pub g2_dot: T,
    pub sigma: T,
    /// `‖w₂‖` of `w - η·grad` before projection; equals `norm_w2` at step 0.
    pub pre_projection_norm_w2: T,
    pub precondition: Option<bool>,
}

/// A completed run: one record and one iterate per state, initial included.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub records: Vec<TrajectoryRecord<T>>,
    pub iterates: Vec<Classifier<T>>,
    /// Steps at which the iterate was outside the objective's guaranteed region.
    pub precondition_violations: Vec<usize>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn steps(&self) -> usize {
        self.records.len() - 1
    }

    pub fn last(&self) -> &TrajectoryRecord<T> {
        self.records.last().expect("trajectory holds the initial state")
    }

    pub fn final_w(&self) -> &Classifier<T> {
        self.iterates.last().expect("trajectory holds the initial state")
    }

    /// `step,norm_w1,norm_w2,loss,accuracy,g1_dot,g2_dot,sigma` with 17
    /// significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "step,norm_w1,norm_w2,loss,accuracy,g1_dot,g2_dot,sigma")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.step,
                r.norm_w1.f64(),
                r.norm_w2.f64(),
                r.loss.f64(),
                r.accuracy.f64(),
                r.g1_dot.f64(),
                r.g2_dot.f64(),
                r.sigma.f64()
            )?;
        }
        Ok(())
    }
}

/// `R·v/‖v‖` with `v = w - η·grad`.
pub fn gd_step<T: Scalar>(w: &Classifier<T>, grad: &[T], eta: T, radius: T) -> Result<Classifier<T>> {
    step_at(w, grad, eta, radius, 0).map(|(c, _)| c)
}

fn step_at<T: Scalar>(w: &Classifier<T>, grad: &[T], eta: T, radius: T, step: usize) -> Result<(Classifier<T>, T)> {
    let (d1, d2) = (w.d1(), w.d2());
    if grad.len() != d1 + d2 {
        return Err(Error::DimensionMismatch { what: "gradient length", expected: d1 + d2, got: grad.len() });
    }
    if grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite { what: "gradient", step });
    }
    let v: Vec<T> = w.concat().iter().zip(grad).map(|(&a, &g)| a - eta * g).collect();
    let n = norm(&v);
    if !(n > T::zero()) || !n.is_finite() {
        return Err(Error::DegenerateStep { step });
    }
    let pre = norm(&v[d1..]);
    let s = radius / n;
    let out = Classifier {
        w1: v[..d1].iter().map(|&x| x * s).collect(),
        w2: v[d1..].iter().map(|&x| x * s).collect(),
        radius,
    };
    Ok((out, pre))
}

fn record<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    w: &Classifier<T>,
    step: usize,
    pre: T,
    radius: T,
) -> Result<TrajectoryRecord<T>> {
    let loss = obj.loss(w)?;
    let g = obj.grad(w)?;
    if !loss.is_finite() {
        return Err(Error::NonFinite { what: "loss", step });
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "gradient", step });
    }
    let (g1_dot, g2_dot) = w.split_dots(&g);
    Ok(TrajectoryRecord {
        step,
        norm_w1: w.norm_w1(),
        norm_w2: w.norm_w2(),
        loss,
        accuracy: obj.accuracy(w)?,
        g1_dot,
        g2_dot,
        sigma: obj.sigma(w),
        pre_projection_norm_w2: pre,
        precondition: obj.precondition(w, radius),
    })
}

struct Recorder<T> {
    traj: Trajectory<T>,
}

impl<T: Scalar> Recorder<T> {
    fn start<O: Objective<T> + ?Sized>(w0: &Classifier<T>, cfg: &TrainerConfig<T>, obj: &O) -> Result<Self> {
        cfg.validate()?;
        let (d1, d2) = obj.dims();
        if (w0.d1(), w0.d2()) != (d1, d2) {
            return Err(Error::InvalidInput(format!(
                "w0 has dims ({}, {}), objective has ({d1}, {d2})",
                w0.d1(),
                w0.d2()
            )));
        }
        Classifier::new(w0.w1.clone(), w0.w2.clone(), cfg.radius)?;
        let mut r = Recorder {
            traj: Trajectory { records: Vec::new(), iterates: Vec::new(), precondition_violations: Vec::new() },
        };
        r.push(obj, w0.clone(), 0, w0.norm_w2(), cfg.radius)?;
        Ok(r)
    }

    fn push<O: Objective<T> + ?Sized>(
        &mut self,
        obj: &O,
        w: Classifier<T>,
        step: usize,
        pre: T,
        radius: T,
    ) -> Result<()> {
        let rec = record(obj, &w, step, pre, radius)?;
        if rec.precondition == Some(false) {
            self.traj.precondition_violations.push(step);
        }
        self.traj.records.push(rec);
        self.traj.iterates.push(w);
        Ok(())
    }

    fn current(&self) -> &Classifier<T> {
        self.traj.iterates.last().expect("initial state recorded")
    }
}

fn drive<T: Scalar, O: Objective<T> + ?Sized>(
    w0: &Classifier<T>,
    cfg: &TrainerConfig<T>,
    obj: &mut O,
    mut direction: impl FnMut(&O, &Classifier<T>, usize) -> Result<Vec<T>>,
) -> Result<Trajectory<T>> {
    let mut rec = Recorder::start(w0, cfg, &*obj)?;
    for k in 0..cfg.max_steps {
        if rec.current().norm_w2() <= cfg.stop_tol {
            break;
        }
        obj.advance(k)?;
        let g = direction(&*obj, rec.current(), k + 1)?;
        let (w, pre) = step_at(rec.current(), &g, cfg.eta, cfg.radius, k + 1)?;
        rec.push(&*obj, w, k + 1, pre, cfg.radius)?;
    }
    Ok(rec.traj)
}

/// Projected gradient descent on the objective's loss.
pub fn run_entropy_min<T: Scalar, O: Objective<T> + ?Sized>(
    w0: &Classifier<T>,
    cfg: &TrainerConfig<T>,
    obj: &mut O,
) -> Result<Trajectory<T>> {
    drive(w0, cfg, obj, |o, w, _| o.grad(w))
}

/// Each step relabels with the current classifier and takes one projected
/// step on `ℓ_exp(yᵗ·wᵀx)`.
pub fn run_pseudo_step<T: Scalar, O: Objective<T> + ?Sized>(
    w0: &Classifier<T>,
    cfg: &TrainerConfig<T>,
    obj: &mut O,
) -> Result<Trajectory<T>> {
    drive(w0, cfg, obj, |o, w, _| o.pseudo_label_grad(w))
}

/// Projected gradient descent on `grad + noise_scale·z`, `z` standard normal
/// drawn from a stream seeded by `cfg.seed`.
pub fn run_noisy_gd<T: Scalar, O: Objective<T> + ?Sized>(
    w0: &Classifier<T>,
    cfg: &TrainerConfig<T>,
    obj: &mut O,
) -> Result<Trajectory<T>> {
    let mut rng = rng_from_seed(cfg.seed);
    let scale = cfg.noise_scale;
    drive(w0, cfg, obj, move |o, w, _| {
        let mut g = o.grad(w)?;
        for v in g.iter_mut() {
            *v += scale * T::lit(normal(&mut rng));
        }
        Ok(g)
    })
}

/// `max_steps` rounds: freeze `yᵗ = sign(wᵀx)`, drop rows with
/// `|wᵀx| < conf_threshold`, take `epochs_per_round` full-gradient steps on
/// the frozen-label loss. The objective is advanced once per round.
pub fn run_pseudo_rounds<T: Scalar, O: Objective<T> + ?Sized>(
    w0: &Classifier<T>,
    cfg: &TrainerConfig<T>,
    obj: &mut O,
) -> Result<Trajectory<T>> {
    let mut rec = Recorder::start(w0, cfg, &*obj)?;
    if obj.batch().is_none() {
        return Err(Error::InvalidInput("pseudo_rounds needs an empirical objective".into()));
    }
    let mut step = 0;
    'rounds: for round in 0..cfg.max_steps {
        if rec.current().norm_w2() <= cfg.stop_tol {
            break;
        }
        obj.advance(round)?;
        let batch = obj.batch().expect("checked above");
        let (labels, margins) = pseudo_labels(rec.current(), batch);
        let keep: Vec<bool> = margins.iter().map(|t| t.abs() >= cfg.conf_threshold).collect();
        if !keep.iter().any(|&k| k) {
            return Err(Error::AllSamplesDropped { round });
        }
        let mask = if keep.iter().all(|&k| k) { None } else { Some(keep.as_slice()) };
        for _ in 0..cfg.epochs_per_round {
            if step > 0 && rec.current().norm_w2() <= cfg.stop_tol {
                break 'rounds;
            }
            step += 1;
            let g = labeled_grad(rec.current(), batch, &labels, mask);
            let (w, pre) = step_at(rec.current(), &g, cfg.eta, cfg.radius, step)?;
            rec.push(&*obj, w, step, pre, cfg.radius)?;
        }
    }
    Ok(rec.traj)
}

/// Runs `cfg.variant`.
pub fn run<T: Scalar, O: Objective<T> + ?Sized>(
    w0: &Classifier<T>,
    cfg: &TrainerConfig<T>,
    obj: &mut O,
) -> Result<Trajectory<T>> {
    match cfg.variant {
        Variant::EntropyMin => run_entropy_min(w0, cfg, obj),
        Variant::PseudoStep => run_pseudo_step(w0, cfg, obj),
        Variant::PseudoRounds => run_pseudo_rounds(w0, cfg, obj),
        Variant::NoisyGd => run_noisy_gd(w0, cfg, obj),
    }
}
