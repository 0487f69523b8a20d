//! Off-diagonal matrix potentials `Q(x) = (0, q12; q21, 0)` on `[0, 1]`.

use crate::quad;
use crate::C64;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PotentialError {
    /// Sampled entries must share one uniform grid with at least two nodes.
    #[error("sampled potential needs matching grids with at least 2 nodes (got {q12} and {q21})")]
    BadSamples { q12: usize, q21: usize },
    /// The declared integrability exponent must lie in [1, 2].
    #[error("integrability exponent p = {0} outside [1, 2]")]
    BadExponent(f64),
}

/// How the potential entries are represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Zero,
    Callable,
    Sampled,
}

type EntryFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Zero,
    Callable { q12: EntryFn, q21: EntryFn },
    /// Values on the uniform grid `x_i = i / (len − 1)`, interpolated
    /// piecewise-linearly in between.
    Sampled { q12: Arc<[C64]>, q21: Arc<[C64]> },
}

/// An off-diagonal potential with a declared integrability class.
#[derive(Clone)]
pub struct Potential {
    repr: Repr,
    p_class: f64,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = self.kind();
        write!(f, "Potential {{ kind: {kind:?}, p_class: {} }}", self.p_class)
    }
}

impl Potential {
    /// The identically-zero potential.
    pub fn zero() -> Self {
        Self { repr: Repr::Zero, p_class: 2.0 }
    }

    /// Constant off-diagonal entries.
    pub fn constant(q12: C64, q21: C64) -> Self {
        if q12.norm() == 0.0 && q21.norm() == 0.0 {
            return Self::zero();
        }
        Self {
            repr: Repr::Callable {
                q12: Arc::new(move |_| q12),
                q21: Arc::new(move |_| q21),
            },
            p_class: 2.0,
        }
    }

    /// Entries given as functions of `x ∈ [0, 1]`.
    pub fn callable(
        q12: impl Fn(f64) -> C64 + Send + Sync + 'static,
        q21: impl Fn(f64) -> C64 + Send + Sync + 'static,
    ) -> Self {
        Self { repr: Repr::Callable { q12: Arc::new(q12), q21: Arc::new(q21) }, p_class: 2.0 }
    }

    /// Entries sampled on a shared uniform grid over `[0, 1]`.
    pub fn sampled(q12: Vec<C64>, q21: Vec<C64>) -> Result<Self, PotentialError> {
        if q12.len() != q21.len() || q12.len() < 2 {
            return Err(PotentialError::BadSamples { q12: q12.len(), q21: q21.len() });
        }
        Ok(Self { repr: Repr::Sampled { q12: q12.into(), q21: q21.into() }, p_class: 2.0 })
    }

    /// Override the declared integrability exponent `p ∈ [1, 2]`.
    pub fn with_p_class(mut self, p: f64) -> Result<Self, PotentialError> {
        if !(1.0..=2.0).contains(&p) {
            return Err(PotentialError::BadExponent(p));
        }
        self.p_class = p;
        Ok(self)
    }

    pub fn kind(&self) -> PotentialKind {
        match &self.repr {
            Repr::Zero => PotentialKind::Zero,
            Repr::Callable { .. } => PotentialKind::Callable,
            Repr::Sampled { .. } => PotentialKind::Sampled,
        }
    }

    pub fn p_class(&self) -> f64 {
        self.p_class
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// Evaluate `(q12(x), q21(x))` at `x ∈ [0, 1]`.
    pub fn eval(&self, x: f64) -> (C64, C64) {
        match &self.repr {
            Repr::Zero => (C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
            Repr::Callable { q12, q21 } => (q12(x), q21(x)),
            Repr::Sampled { q12, q21 } => (interp(q12, x), interp(q21, x)),
        }
    }

    /// The potential `Q* = (0, conj q21; conj q12, 0)` of the adjoint
    /// problem: entries swap and conjugate.
    pub fn adjoint(&self) -> Self {
        let repr = match &self.repr {
            Repr::Zero => Repr::Zero,
            Repr::Callable { q12, q21 } => {
                let (f12, f21) = (q12.clone(), q21.clone());
                Repr::Callable {
                    q12: Arc::new(move |x| f21(x).conj()),
                    q21: Arc::new(move |x| f12(x).conj()),
                }
            }
            Repr::Sampled { q12, q21 } => Repr::Sampled {
                q12: q21.iter().map(|z| z.conj()).collect(),
                q21: q12.iter().map(|z| z.conj()).collect(),
            },
        };
        Self { repr, p_class: self.p_class }
    }

    /// `L²` norm of the matrix, `(∫ |q12|² + |q21|²)^{1/2}`, by quadrature on
    /// the sample grid, or on a fixed fine grid for callable entries.
    pub fn l2_norm(&self) -> f64 {
        match &self.repr {
            Repr::Zero => 0.0,
            Repr::Callable { .. } => {
                let m = 1025;
                let h = 1.0 / (m - 1) as f64;
                let sq: Vec<f64> = (0..m)
                    .map(|i| {
                        let (p, q) = self.eval(i as f64 * h);
                        p.norm_sqr() + q.norm_sqr()
                    })
                    .collect();
                quad::simpson_real(&sq, h).max(0.0).sqrt()
            }
            Repr::Sampled { q12, q21 } => {
                let h = 1.0 / (q12.len() - 1) as f64;
                // Trapezoid keeps arbitrary (also even) grid sizes exact
                // enough for a norm estimate.
                let sq =
                    |v: &[C64]| -> f64 {
                        let mut s = 0.0;
                        for i in 0..v.len() - 1 {
                            s += 0.5 * h * (v[i].norm_sqr() + v[i + 1].norm_sqr());
                        }
                        s
                    };
                (sq(q12) + sq(q21)).sqrt()
            }
        }
    }
}

fn interp(samples: &[C64], x: f64) -> C64 {
    let m = samples.len();
    let t = x.clamp(0.0, 1.0) * (m - 1) as f64;
    let i = (t.floor() as usize).min(m - 2);
    let frac = t - i as f64;
    samples[i] * (1.0 - frac) + samples[i + 1] * frac
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_potential_reports_itself() {
        let q = Potential::zero();
        assert!(q.is_zero());
        assert_eq!(q.kind(), PotentialKind::Zero);
        assert_eq!(q.eval(0.3), (c(0.0, 0.0), c(0.0, 0.0)));
        assert_eq!(q.l2_norm(), 0.0);
    }

    #[test]
    fn constant_entries_evaluate_everywhere() {
        let q = Potential::constant(c(0.5, 0.5), c(-0.25, 0.0));
        for x in [0.0, 0.37, 1.0] {
            assert_eq!(q.eval(x), (c(0.5, 0.5), c(-0.25, 0.0)));
        }
        // ||Q||² = |q12|² + |q21|² integrated over [0,1].
        let want = (0.5f64 + 0.0625).sqrt();
        assert!((q.l2_norm() - want).abs() < 1e-10);
    }

    #[test]
    fn sampled_entries_interpolate_linearly() {
        let q12 = vec![c(0.0, 0.0), c(1.0, 1.0), c(2.0, 0.0)];
        let q21 = vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)];
        let q = Potential::sampled(q12, q21).unwrap();
        assert_eq!(q.kind(), PotentialKind::Sampled);
        let (a, b) = q.eval(0.25);
        assert!((a - c(0.5, 0.5)).norm() < 1e-15);
        assert!((b - c(1.0, 0.0)).norm() < 1e-15);
        let (a, _) = q.eval(1.0);
        assert!((a - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn sampled_grids_must_match() {
        let r = Potential::sampled(vec![c(0.0, 0.0)], vec![c(0.0, 0.0)]);
        assert!(matches!(r, Err(PotentialError::BadSamples { .. })));
        let r = Potential::sampled(vec![c(0.0, 0.0); 3], vec![c(0.0, 0.0); 4]);
        assert!(matches!(r, Err(PotentialError::BadSamples { .. })));
    }

    #[test]
    fn adjoint_swaps_and_conjugates() {
        let q = Potential::constant(c(0.3, 0.2), c(0.1, -0.4));
        let adj = q.adjoint();
        let (a, b) = adj.eval(0.5);
        assert_eq!(a, c(0.1, 0.4));
        assert_eq!(b, c(0.3, -0.2));
        // Involution.
        let back = adj.adjoint();
        assert_eq!(back.eval(0.7), q.eval(0.7));
    }

    #[test]
    fn exponent_class_is_validated() {
        assert!(Potential::zero().with_p_class(1.0).is_ok());
        assert!(Potential::zero().with_p_class(2.0).is_ok());
        assert!(matches!(
            Potential::zero().with_p_class(0.9),
            Err(PotentialError::BadExponent(_))
        ));
        assert!(matches!(
            Potential::zero().with_p_class(2.5),
            Err(PotentialError::BadExponent(_))
        ));
    }

    #[test]
    fn callable_l2_norm_quadrature() {
        // q12 = sin(πx), q21 = 0: ∫ sin² = 1/2.
        let q = Potential::callable(
            |x| C64::new((std::f64::consts::PI * x).sin(), 0.0),
            |_| C64::new(0.0, 0.0),
        );
        assert!((q.l2_norm() - 0.5f64.sqrt()).abs() < 1e-8);
    }
}
