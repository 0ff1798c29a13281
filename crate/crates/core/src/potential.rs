//! External potentials `U(x)`.

/// A one-dimensional potential with its force.
pub trait Potential: Sync {
    fn value(&self, x: f64) -> f64;

    /// `dU/dx`. Defaults to a central difference.
    fn derivative(&self, x: f64) -> f64 {
        let h = 1e-5 * x.abs().max(1.0);
        (self.value(x + h) - self.value(x - h)) / (2.0 * h)
    }
}

/// `U = omega^2 x^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub omega: f64,
}

impl Default for Harmonic {
    fn default() -> Self {
        Harmonic { omega: 1.0 }
    }
}

impl Potential for Harmonic {
    fn value(&self, x: f64) -> f64 {
        0.5 * self.omega * self.omega * x * x
    }

    fn derivative(&self, x: f64) -> f64 {
        self.omega * self.omega * x
    }
}

/// Adapter for closures.
pub struct FnPotential<F>(pub F);

impl<F: Fn(f64) -> f64 + Sync> Potential for FnPotential<F> {
    fn value(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}
