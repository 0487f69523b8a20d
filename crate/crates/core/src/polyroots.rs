//! Roots of complex polynomials via companion-matrix eigenvalues, with
//! Newton refinement, root clustering, and a multiple-root detector.
//!
//! Coefficients are stored in ascending order of powers: `coeffs[k]` is the
//! coefficient of `ζ^k`.

use crate::C64;
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolyError {
    /// All coefficients vanish (or only the constant term remains).
    #[error("polynomial is constant; it has no roots to compute")]
    Constant,
    /// The eigenvalue iteration on the companion matrix did not converge.
    #[error("companion-matrix eigenvalue iteration failed to converge")]
    NoConvergence,
}

/// Evaluate the polynomial and its derivative at `z` by Horner's scheme.
pub fn eval_with_derivative(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All roots of the polynomial, unordered, with multiplicity (repeated
/// entries). Exact closed forms handle degrees one and two; higher degrees go
/// through companion-matrix eigenvalues refined by a few Newton steps.
pub fn roots(coeffs: &[C64]) -> Result<Vec<C64>, PolyError> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(PolyError::Constant);
    }
    // Trim numerically-zero leading coefficients to find the true degree.
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].norm() <= 1e-14 * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Err(PolyError::Constant);
    }
    let lead = coeffs[deg];
    let monic: Vec<C64> = coeffs[..deg].iter().map(|c| c / lead).collect();

    let mut out = match deg {
        1 => vec![-monic[0]],
        2 => quadratic_roots(monic[1], monic[0]),
        _ => {
            let eigs = companion_eigenvalues(&monic)?;
            let full: Vec<C64> = coeffs[..=deg].to_vec();
            eigs.into_iter().map(|z| newton_polish(&full, z)).collect()
        }
    };
    // A deterministic order helps downstream consumers and tests.
    out.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
    Ok(out)
}

/// Numerically stable quadratic formula for `ζ^2 + p ζ + q`.
fn quadratic_roots(p: C64, q: C64) -> Vec<C64> {
    let disc = (p * p - 4.0 * q).sqrt();
    // Pick the sign that avoids cancellation in -p ∓ disc.
    let s = if (p + disc).norm() >= (p - disc).norm() { disc } else { -disc };
    let z1 = -(p + s) / 2.0;
    if z1.norm() == 0.0 {
        return vec![z1, -p - z1];
    }
    vec![z1, q / z1]
}

fn companion_eigenvalues(monic_low: &[C64]) -> Result<Vec<C64>, PolyError> {
    let n = monic_low.len();
    let m = DMatrix::<C64>::from_fn(n, n, |i, j| {
        if j + 1 == n {
            -monic_low[i]
        } else if i == j + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let eigs = m.eigenvalues().ok_or(PolyError::NoConvergence)?;
    Ok(eigs.iter().copied().collect())
}

/// A few safeguarded Newton steps; returns the start point when the
/// derivative is too small to trust (e.g. near a multiple root).
fn newton_polish(coeffs: &[C64], start: C64) -> C64 {
    let mut z = start;
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for _ in 0..8 {
        let (p, dp) = eval_with_derivative(coeffs, z);
        if dp.norm() <= 1e-13 * scale {
            break;
        }
        let step = p / dp;
        // Reject wild steps: the eigenvalue start is already close.
        if step.norm() > 0.5 * (1.0 + z.norm()) {
            break;
        }
        z -= step;
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// Group nearby roots into `(representative, multiplicity)` clusters. Roots
/// within `tol` of a cluster representative join that cluster; the
/// representative is the cluster mean.
pub fn cluster_roots(roots: &[C64], tol: f64) -> Vec<(C64, usize)> {
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for &r in roots {
        match clusters.iter_mut().find(|(c, _)| (r - *c).norm() <= tol) {
            Some((c, k)) => {
                // Running mean keeps the representative centered.
                *c = (*c * (*k as f64) + r) / (*k as f64 + 1.0);
                *k += 1;
            }
            None => clusters.push((r, 1)),
        }
    }
    clusters
}

/// Detect a multiple root through the degree of gcd(P, P') computed by a
/// Euclidean remainder sequence with relative truncation `tol`.
pub fn has_multiple_root(coeffs: &[C64], tol: f64) -> bool {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return false;
    }
    let p: Vec<C64> = coeffs.to_vec();
    let dp: Vec<C64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect();
    gcd_degree(p, dp, tol) >= 1
}

fn trim(mut v: Vec<C64>, tol: f64) -> Vec<C64> {
    let scale = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    while v.len() > 1 && v.last().unwrap().norm() <= tol * scale {
        v.pop();
    }
    if scale == 0.0 {
        v.truncate(1);
    }
    v
}

/// Degree of gcd(p, q) by the Euclidean algorithm. Both operands are kept
/// normalized to unit max coefficient, so a remainder whose coefficients all
/// fall below `tol` counts as zero.
fn gcd_degree(p: Vec<C64>, q: Vec<C64>, tol: f64) -> usize {
    let mut a = normalize(trim(p, tol));
    let mut b = normalize(trim(q, tol));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.len() == 1 {
            // gcd(a, const): a nonzero constant is a trivial gcd; a zero
            // divisor means the previous divisor (now `a`) was the gcd.
            return if b[0].norm() <= tol { a.len() - 1 } else { 0 };
        }
        let r = poly_rem(&a, &b);
        let r_scale = r.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if r_scale <= tol {
            // b divides a to working precision.
            return b.len() - 1;
        }
        a = b;
        b = normalize(trim(r, tol));
    }
}

fn normalize(mut v: Vec<C64>) -> Vec<C64> {
    let scale = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale > 0.0 {
        for c in &mut v {
            *c /= scale;
        }
    }
    v
}

/// Remainder of polynomial division `a mod b` (ascending coefficients,
/// `deg a >= deg b >= 1`).
fn poly_rem(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db];
    while r.len() > db {
        let da = r.len() - 1;
        let f = r[da] / lead;
        for k in 0..=db {
            let sub = f * b[k];
            r[da - db + k] -= sub;
        }
        // The top term cancels by construction.
        r.pop();
        while r.len() > db && r.last().unwrap().norm() == 0.0 {
            if r.len() == 1 {
                break;
            }
            r.pop();
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn real_poly(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::from(x)).collect()
    }

    #[test]
    fn quartic_roots_of_unity() {
        // ζ^4 - 1 = 0.
        let roots = roots(&real_poly(&[-1.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(roots.len(), 4);
        for r in &roots {
            assert!((r.powi(4) - c(1.0, 0.0)).norm() < 1e-12);
        }
        let closest = |target: C64| roots.iter().map(|r| (r - target).norm()).fold(1.0, f64::min);
        for target in [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)] {
            assert!(closest(target) < 1e-12);
        }
    }

    #[test]
    fn clustered_triple_root() {
        // (ζ - 1)^3 = ζ^3 - 3ζ^2 + 3ζ - 1.
        let roots = roots(&real_poly(&[-1.0, 3.0, -3.0, 1.0])).unwrap();
        let clusters = cluster_roots(&roots, 1e-3);
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].1, 3);
        assert!((clusters[0].0 - c(1.0, 0.0)).norm() < 1e-4);
    }

    #[test]
    fn multiple_root_detection() {
        // Simple roots only.
        assert!(!has_multiple_root(&real_poly(&[-1.0, 0.0, 0.0, 0.0, 1.0]), 1e-10));
        // (ζ - 1)^2 (ζ + 2) = ζ^3 - 3ζ + 2.
        assert!(has_multiple_root(&real_poly(&[2.0, -3.0, 0.0, 1.0]), 1e-10));
        // (ζ^2 + 1)^2 = ζ^4 + 2ζ^2 + 1 has two double roots.
        assert!(has_multiple_root(&real_poly(&[1.0, 0.0, 2.0, 0.0, 1.0]), 1e-10));
        // Quadratic with distinct roots.
        assert!(!has_multiple_root(&real_poly(&[1.0, 1.0, 1.0]), 1e-10));
    }

    #[test]
    fn quadratic_closed_form_is_stable() {
        // ζ^2 - 2e6 ζ + 1: classic cancellation example.
        let r = roots(&real_poly(&[1.0, -2e6, 1.0])).unwrap();
        let small = r.iter().map(|z| z.norm()).fold(f64::MAX, f64::min);
        assert!((small - 5e-7).abs() / 5e-7 < 1e-9);
    }

    #[test]
    fn complex_coefficients() {
        // (ζ - i)(ζ - (2 + i)) = ζ^2 - (2 + 2i)ζ + (2i - 1).
        let coeffs = vec![c(-1.0, 2.0), c(-2.0, -2.0), c(1.0, 0.0)];
        let r = roots(&coeffs).unwrap();
        let hit = |t: C64| r.iter().any(|z| (z - t).norm() < 1e-12);
        assert!(hit(c(0.0, 1.0)) && hit(c(2.0, 1.0)));
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(matches!(roots(&real_poly(&[3.0])), Err(PolyError::Constant)));
        assert!(matches!(roots(&real_poly(&[0.0, 0.0])), Err(PolyError::Constant)));
    }
}
