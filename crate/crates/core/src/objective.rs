//! The minimization problem interface consumed by every optimizer.

use rand::RngCore;

use crate::error::{Error, Result};

/// Axis-aligned box bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let b = Bounds { lower, upper };
        b.validate()?;
        Ok(b)
    }

    /// The same interval on every one of `dim` axes.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Self {
        Bounds {
            lower: vec![lower; dim],
            upper: vec![upper; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Lengths agree, every bound is finite and `lower <= upper`.
    ///
    /// Zero-width axes are accepted: they pin a coordinate and are useful
    /// for exercising the engine deterministically.
    pub fn validate(&self) -> Result<()> {
        if self.lower.len() != self.upper.len() {
            return Err(Error::Config(format!(
                "bounds have {} lower and {} upper entries",
                self.lower.len(),
                self.upper.len()
            )));
        }
        if self.lower.is_empty() {
            return Err(Error::Config("bounds must cover at least one dimension".into()));
        }
        for (d, (&lo, &hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Config(format!(
                    "non-finite bound on dimension {d}: [{lo}, {hi}]"
                )));
            }
            if lo > hi {
                return Err(Error::Config(format!(
                    "lower bound exceeds upper bound on dimension {d}: [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    pub fn width(&self, d: usize) -> f64 {
        self.upper[d] - self.lower[d]
    }

    pub fn clamp(&self, d: usize, x: f64) -> f64 {
        x.clamp(self.lower[d], self.upper[d])
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .enumerate()
                .all(|(d, &v)| v >= self.lower[d] && v <= self.upper[d])
    }
}

/// A box-bounded minimization problem.
///
/// Implementations must be safe to evaluate from several runs at once. The
/// random source is the calling run's own stream; deterministic functions
/// ignore it, noisy ones draw their noise from it so a seeded run stays
/// reproducible.
pub trait Objective: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize {
        self.bounds().dim()
    }

    fn bounds(&self) -> &Bounds;

    /// Target optimum value used for gap reporting and ranking.
    fn f_min(&self) -> f64;

    fn evaluate(&self, x: &[f64], rng: &mut dyn RngCore) -> f64;
}

/// An objective assembled from a closure, for ad-hoc problems and tests.
pub struct FnObjective<F> {
    name: String,
    bounds: Bounds,
    f_min: f64,
    func: F,
}

impl<F> FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    pub fn new(name: impl Into<String>, bounds: Bounds, f_min: f64, func: F) -> Self {
        FnObjective {
            name: name.into(),
            bounds,
            f_min,
            func,
        }
    }
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn f_min(&self) -> f64 {
        self.f_min
    }

    fn evaluate(&self, x: &[f64], _rng: &mut dyn RngCore) -> f64 {
        (self.func)(x)
    }
}
