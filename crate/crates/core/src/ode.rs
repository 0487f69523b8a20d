//! Fixed-step integration of the fundamental system `Φ' = iB(λ − Q(x))Φ`,
//! `Φ(0) = I`.
//!
//! The stiff diagonal part is removed analytically: with
//! `D(x) = diag(e^{i b1 λ x}, e^{i b2 λ x})` and `Φ = D Ψ`, the remainder
//! satisfies
//!
//! ```text
//! Ψ'(x) = −i ( 0,                      b1 q12(x) e(x)
//!              b2 q21(x) / e(x),       0              ) Ψ(x),
//! ```
//!
//! where `e(x) = e^{i (b2−b1) λ x}`. For `Q = 0` the scheme is exact; for
//! `Q ≠ 0` a classical fourth-order step integrates Ψ, and the substep count
//! doubles until `Φ(1, λ)` settles below the requested tolerance.

use crate::potential::Potential;
use crate::weights::DiracWeights;
use crate::C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OdeError {
    /// Halving steps hit the hard cap without meeting the tolerance:
    /// the potential is too rough or |Im λ| too extreme for this grid.
    #[error("step control exceeded {max} substeps without converging")]
    StepUnderflow { max: usize },
}

pub type Mat2 = [[C64; 2]; 2];

pub fn mat_identity() -> Mat2 {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    [[one, zero], [zero, one]]
}

pub fn mat_det(m: &Mat2) -> C64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn frob(m: &Mat2) -> f64 {
    m.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn mat_diff_frob(p: &Mat2, q: &Mat2) -> f64 {
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            s += (p[i][j] - q[i][j]).norm_sqr();
        }
    }
    s.sqrt()
}

/// Result of one integration: Ψ and Φ sampled on the output grid.
pub struct Integrated {
    pub grid: Vec<f64>,
    /// Φ(x_i, λ) on the output grid.
    pub values: Vec<Mat2>,
    /// Φ(1, λ).
    pub phi_at_1: Mat2,
    /// Substeps actually used (diagnostic).
    pub substeps: usize,
}

/// Hard cap on substeps before reporting failure.
const MAX_SUBSTEPS: usize = 1 << 22;
/// Resynchronize the multiplicatively-updated phase factor this often.
const RESYNC_EVERY: usize = 128;

/// Integrate with step doubling until `Φ(1, λ)` changes by less than `tol`
/// (relative to its size), sampling `Φ` on a uniform grid of `m_out ≥ 2`
/// points.
pub fn integrate(
    q: &Potential,
    w: &DiracWeights,
    lambda: C64,
    m_out: usize,
    tol: f64,
) -> Result<Integrated, OdeError> {
    assert!(m_out >= 2, "output grid needs at least 2 points");
    let intervals = m_out - 1;

    if q.is_zero() {
        // Ψ ≡ I: the sampled diagonal is exact.
        let grid: Vec<f64> = (0..m_out).map(|i| i as f64 / intervals as f64).collect();
        let values: Vec<Mat2> = grid.iter().map(|&x| diag_at(w, lambda, x)).collect();
        let phi_at_1 = values[values.len() - 1];
        return Ok(Integrated { grid, values, phi_at_1, substeps: 0 });
    }

    // Initial substep count: resolve the residual oscillation rate
    // (b2 − b1)|λ| and the potential's size, then round up to a multiple of
    // the output intervals so samples land on substep boundaries.
    let rate = (w.b2() - w.b1()) * (lambda.norm() + 1.0) + 8.0 * q.l2_norm();
    let base = (2.0 * rate).ceil().max(64.0) as usize;
    let mut per_interval = base.div_ceil(intervals).max(1);

    let mut coarse = run_fixed(q, w, lambda, m_out, per_interval);
    loop {
        if per_interval.saturating_mul(2).saturating_mul(intervals) > MAX_SUBSTEPS {
            return Err(OdeError::StepUnderflow { max: MAX_SUBSTEPS });
        }
        per_interval *= 2;
        let fine = run_fixed(q, w, lambda, m_out, per_interval);
        let diff = mat_diff_frob(&coarse.phi_at_1, &fine.phi_at_1);
        if diff <= tol * (1.0 + frob(&fine.phi_at_1)) {
            return Ok(fine);
        }
        coarse = fine;
    }
}

fn diag_at(w: &DiracWeights, lambda: C64, x: f64) -> Mat2 {
    let i = C64::i();
    let zero = C64::new(0.0, 0.0);
    [[(i * w.b1() * lambda * x).exp(), zero], [zero, (i * w.b2() * lambda * x).exp()]]
}

/// One pass with a fixed number of substeps per output interval.
fn run_fixed(
    q: &Potential,
    w: &DiracWeights,
    lambda: C64,
    m_out: usize,
    per_interval: usize,
) -> Integrated {
    let intervals = m_out - 1;
    let n = intervals * per_interval;
    let h = 1.0 / n as f64;
    let i = C64::i();
    let (b1, b2) = (w.b1(), w.b2());
    let rate = i * (b2 - b1) * lambda;

    // Phase factor e(x) at substep boundaries and midpoints, advanced
    // multiplicatively and resynchronized periodically against drift.
    let e_half = (rate * (0.5 * h)).exp();
    let mut e_cur = C64::new(1.0, 0.0);

    // Ψ' = A(x) Ψ with A(x) = −i [[0, b1 q12 e], [b2 q21 / e, 0]].
    let apply = |x: f64, e: C64, m: &Mat2| -> Mat2 {
        let (q12, q21) = q.eval(x);
        let p = -i * b1 * q12 * e;
        let r = -i * b2 * q21 / e;
        [
            [p * m[1][0], p * m[1][1]],
            [r * m[0][0], r * m[0][1]],
        ]
    };

    let mut psi = mat_identity();
    let mut grid = Vec::with_capacity(m_out);
    let mut values = Vec::with_capacity(m_out);
    grid.push(0.0);
    values.push(mat_identity());

    for step in 0..n {
        if step % RESYNC_EVERY == 0 {
            e_cur = (rate * (step as f64 * h)).exp();
        }
        let x = step as f64 * h;
        let e_mid = e_cur * e_half;
        let e_end = e_mid * e_half;

        let k1 = apply(x, e_cur, &psi);
        let mut stage = add_scaled(&psi, &k1, 0.5 * h);
        let k2 = apply(x + 0.5 * h, e_mid, &stage);
        stage = add_scaled(&psi, &k2, 0.5 * h);
        let k3 = apply(x + 0.5 * h, e_mid, &stage);
        stage = add_scaled(&psi, &k3, h);
        let k4 = apply(x + h, e_end, &stage);

        for r in 0..2 {
            for c in 0..2 {
                psi[r][c] +=
                    h / 6.0 * (k1[r][c] + 2.0 * k2[r][c] + 2.0 * k3[r][c] + k4[r][c]);
            }
        }
        e_cur = e_end;

        if (step + 1) % per_interval == 0 {
            let x_out = (step + 1) as f64 * h;
            let d = diag_at(w, lambda, x_out);
            grid.push(x_out);
            values.push(mat_mul_diag(&d, &psi));
        }
    }

    let phi_at_1 = values[values.len() - 1];
    Integrated { grid, values, phi_at_1, substeps: n }
}

fn add_scaled(base: &Mat2, k: &Mat2, s: f64) -> Mat2 {
    let mut out = *base;
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] += s * k[r][c];
        }
    }
    out
}

/// `D · Ψ` for diagonal `D`.
fn mat_mul_diag(d: &Mat2, psi: &Mat2) -> Mat2 {
    [
        [d[0][0] * psi[0][0], d[0][0] * psi[0][1]],
        [d[1][1] * psi[1][0], d[1][1] * psi[1][1]],
    ]
}
