//! Composite Simpson quadrature and `L²([0,1]; C²)` inner products.

use crate::C64;

/// Composite Simpson rule over uniformly spaced samples with step `h`.
///
/// Requires an odd number of samples (an even number of subintervals) and at
/// least three of them.
pub fn simpson(values: &[C64], h: f64) -> C64 {
    assert!(values.len() >= 3 && values.len() % 2 == 1, "need an odd sample count >= 3");
    let mut acc = values[0] + values[values.len() - 1];
    for (i, v) in values.iter().enumerate().skip(1).take(values.len() - 2) {
        acc += v * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (h / 3.0)
}

/// Real-valued counterpart of [`simpson`].
pub fn simpson_real(values: &[f64], h: f64) -> f64 {
    assert!(values.len() >= 3 && values.len() % 2 == 1, "need an odd sample count >= 3");
    let mut acc = values[0] + values[values.len() - 1];
    for (i, v) in values.iter().enumerate().skip(1).take(values.len() - 2) {
        acc += v * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (h / 3.0)
}

/// Inner product `(f, g) = ∫₀¹ (f₁ conj(g₁) + f₂ conj(g₂)) dx` of two
/// two-component functions sampled on the same uniform grid.
pub fn inner_product(f: &[[C64; 2]], g: &[[C64; 2]], h: f64) -> C64 {
    assert_eq!(f.len(), g.len());
    let prod: Vec<C64> =
        f.iter().zip(g).map(|(a, b)| a[0] * b[0].conj() + a[1] * b[1].conj()).collect();
    simpson(&prod, h)
}

/// Squared `L²` norm of a two-component function sampled on a uniform grid.
pub fn norm_sq(f: &[[C64; 2]], h: f64) -> f64 {
    let prod: Vec<f64> = f.iter().map(|a| a[0].norm_sqr() + a[1].norm_sqr()).collect();
    simpson_real(&prod, h)
}

/// Cumulative trapezoid antiderivative of samples on a uniform grid: returns
/// `F` with `F[0] = 0` and `F[k] ≈ ∫₀^{x_k}`.
pub fn cumulative_trapezoid(values: &[C64], h: f64) -> Vec<C64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = C64::new(0.0, 0.0);
    out.push(acc);
    for pair in values.windows(2) {
        acc += (pair[0] + pair[1]) * (h / 2.0);
        out.push(acc);
    }
    out
}

/// Round a requested grid size up to the nearest odd value `>= 3`, so the
/// composite Simpson rule applies directly.
pub fn odd_grid(m: usize) -> usize {
    let m = m.max(3);
    if m % 2 == 1 {
        m
    } else {
        m + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // Simpson is exact through degree three.
        let xs = grid(9);
        let vals: Vec<C64> = xs.iter().map(|&x| C64::new(x * x * x - x, 2.0 * x)).collect();
        let got = simpson(&vals, 1.0 / 8.0);
        assert!((got - C64::new(-0.25, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn integrates_oscillatory_exponentials() {
        let xs = grid(513);
        let vals: Vec<C64> = xs.iter().map(|&x| (C64::new(0.0, 7.0) * x).exp()).collect();
        let exact = ((C64::new(0.0, 7.0)).exp() - 1.0) / C64::new(0.0, 7.0);
        assert!((simpson(&vals, 1.0 / 512.0) - exact).norm() < 1e-10);
    }

    #[test]
    fn inner_product_of_orthogonal_modes_vanishes() {
        let xs = grid(513);
        let h = 1.0 / 512.0;
        let f: Vec<[C64; 2]> =
            xs.iter().map(|&x| [(C64::new(0.0, std::f64::consts::TAU) * x).exp(), 0.0.into()]).collect();
        let g: Vec<[C64; 2]> = xs.iter().map(|_| [C64::new(1.0, 0.0), 0.0.into()]).collect();
        assert!(inner_product(&f, &g, h).norm() < 1e-12);
        assert!((norm_sq(&f, h) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cumulative_trapezoid_matches_antiderivative() {
        let xs = grid(2001);
        let vals: Vec<C64> = xs.iter().map(|&x| C64::new(x, -x * x)).collect();
        let integral = cumulative_trapezoid(&vals, 1.0 / 2000.0);
        let last = integral.last().unwrap();
        assert!((last - C64::new(0.5, -1.0 / 3.0)).norm() < 1e-6);
    }
}
