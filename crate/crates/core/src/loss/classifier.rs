use crate::error::{Error, Result};
use crate::scalar::{dot, norm, Scalar};

/// Linear classifier `ŷ = w₁ᵀx₁ + w₂ᵀx₂` constrained to the ball of radius `radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier<T> {
    pub w1: Vec<T>,
    pub w2: Vec<T>,
    pub radius: T,
}

impl<T: Scalar> Classifier<T> {
    /// Checks `‖(w₁, w₂)‖ ≤ radius + 1e-12` and finiteness.
    pub fn new(w1: Vec<T>, w2: Vec<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
        }
        if w1.iter().chain(&w2).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("classifier weights must be finite".into()));
        }
        let c = Classifier { w1, w2, radius };
        let slack = T::lit(1e-12).max(radius * T::epsilon() * T::lit(8.0));
        if c.norm() > radius + slack {
            return Err(Error::InvalidInput(format!("classifier norm {} exceeds radius {radius}", c.norm())));
        }
        Ok(c)
    }

    /// `(w₁, w₂)` rescaled to norm exactly `radius`.
    pub fn on_sphere(w1: Vec<T>, w2: Vec<T>, radius: T) -> Result<Self> {
        let n = norm(&w1).hypot(norm(&w2));
        if !(n > T::zero()) {
            return Err(Error::InvalidInput("cannot normalise the zero vector".into()));
        }
        let s = radius / n;
        Self::new(w1.iter().map(|&v| v * s).collect(), w2.iter().map(|&v| v * s).collect(), radius)
    }

    /// Splits a concatenated `[w₁, w₂]` vector after `d1` entries.
    pub fn from_concat(v: &[T], d1: usize, radius: T) -> Result<Self> {
        Self::new(v[..d1].to_vec(), v[d1..].to_vec(), radius)
    }

    pub fn d1(&self) -> usize {
        self.w1.len()
    }

    pub fn d2(&self) -> usize {
        self.w2.len()
    }

    pub fn concat(&self) -> Vec<T> {
        let mut v = self.w1.clone();
        v.extend_from_slice(&self.w2);
        v
    }

    pub fn norm(&self) -> T {
        self.norm_w1().hypot(self.norm_w2())
    }

    pub fn norm_w1(&self) -> T {
        norm(&self.w1)
    }

    pub fn norm_w2(&self) -> T {
        norm(&self.w2)
    }

    /// `w₁ᵀx₁ + w₂ᵀx₂`.
    #[inline]
    pub fn margin(&self, x1: &[T], x2: &[T]) -> T {
        dot(&self.w1, x1) + dot(&self.w2, x2)
    }

    /// Inner products `(⟨g_{w₁}, w₁⟩, ⟨g_{w₂}, w₂⟩)` for a concatenated gradient.
    pub fn split_dots(&self, grad: &[T]) -> (T, T) {
        let d1 = self.d1();
        (dot(&grad[..d1], &self.w1), dot(&grad[d1..], &self.w2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enforces_radius() {
        assert!(Classifier::new(vec![0.6], vec![0.8], 1.0).is_ok());
        assert!(Classifier::new(vec![0.6], vec![0.81], 1.0).is_err());
        assert!(Classifier::new(vec![0.0], vec![0.0], 0.0).is_err());
        assert!(Classifier::new(vec![f64::NAN], vec![0.0], 1.0).is_err());
    }

    #[test]
    fn sphere_and_concat() {
        let c = Classifier::on_sphere(vec![3.0], vec![4.0, 0.0], 2.0).unwrap();
        assert!((c.norm() - 2.0_f64).abs() < 1e-15);
        let back = Classifier::from_concat(&c.concat(), 1, 2.0).unwrap();
        assert_eq!(back, c);
        let (a, b) = c.split_dots(&[1.0, 1.0, 5.0]);
        assert!((a - 1.2).abs() < 1e-15 && (b - 1.6).abs() < 1e-15);
    }
}
