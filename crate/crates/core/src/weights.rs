//! Weight matrices `B = diag(b1, b2)` with `b1 < 0 < b2`.

use thiserror::Error;

/// Errors raised when constructing a [`DiracWeights`] value.
#[derive(Debug, Error, PartialEq)]
pub enum WeightsError {
    /// The signs `b1 < 0 < b2` are mandatory.
    #[error("weights must satisfy b1 < 0 < b2, got b1 = {b1}, b2 = {b2}")]
    BadSigns { b1: f64, b2: f64 },
    /// A declared commensurability did not reproduce `(b1, b2)`.
    #[error("declared commensurability (n1 = {n1}, n2 = {n2}, b0 = {b0}) does not match weights")]
    BadRationality { n1: u32, n2: u32, b0: f64 },
}

/// A declared commensurability `b1 = -n1 b0`, `b2 = n2 b0` with coprime
/// positive integers `n1, n2` and `b0 > 0`.
///
/// Whether the ratio of the weights is rational is never inferred from the
/// floating-point values; callers declare it explicitly when they know it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rationality {
    pub n1: u32,
    pub n2: u32,
    pub b0: f64,
}

/// The weight pair `(b1, b2)` of the system `-i B^{-1} y' + Q y = λ y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracWeights {
    b1: f64,
    b2: f64,
    rationality: Option<Rationality>,
}

impl DiracWeights {
    /// Weights of unknown (undeclared) commensurability.
    pub fn new(b1: f64, b2: f64) -> Result<Self, WeightsError> {
        if !(b1 < 0.0 && b2 > 0.0 && b1.is_finite() && b2.is_finite()) {
            return Err(WeightsError::BadSigns { b1, b2 });
        }
        Ok(Self { b1, b2, rationality: None })
    }

    /// Weights with a declared commensurability `b1 = -n1 b0`, `b2 = n2 b0`.
    pub fn with_rationality(n1: u32, n2: u32, b0: f64) -> Result<Self, WeightsError> {
        if n1 == 0 || n2 == 0 || b0 <= 0.0 || !b0.is_finite() || gcd(n1, n2) != 1 {
            return Err(WeightsError::BadRationality { n1, n2, b0 });
        }
        let b1 = -(n1 as f64) * b0;
        let b2 = n2 as f64 * b0;
        Ok(Self { b1, b2, rationality: Some(Rationality { n1, n2, b0 }) })
    }

    /// Declare a commensurability for already-constructed weights; it must
    /// reproduce `(b1, b2)` to within relative rounding.
    pub fn declare_rationality(&mut self, n1: u32, n2: u32, b0: f64) -> Result<(), WeightsError> {
        let claimed = Self::with_rationality(n1, n2, b0)?;
        let tol = 1e-12 * (1.0 + self.b1.abs().max(self.b2));
        if (claimed.b1 - self.b1).abs() > tol || (claimed.b2 - self.b2).abs() > tol {
            return Err(WeightsError::BadRationality { n1, n2, b0 });
        }
        self.rationality = Some(Rationality { n1, n2, b0 });
        Ok(())
    }

    /// The standard Dirac weights `b2 = -b1 = 1`, declared commensurable.
    pub fn dirac() -> Self {
        Self::with_rationality(1, 1, 1.0).expect("valid by construction")
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn b2(&self) -> f64 {
        self.b2
    }

    /// The positive ratio `β = -b2 / b1`.
    pub fn beta(&self) -> f64 {
        -self.b2 / self.b1
    }

    /// Mean spacing of the unperturbed zeros, `2π / (b2 - b1)`.
    pub fn mean_gap(&self) -> f64 {
        std::f64::consts::TAU / (self.b2 - self.b1)
    }

    pub fn rationality(&self) -> Option<Rationality> {
        self.rationality
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
