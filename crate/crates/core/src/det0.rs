//! The unperturbed characteristic function Δ0, its zero set, and derived
//! sequence diagnostics.
//!
//! For canonical conditions `(a, b, c, d)` and weights `B = diag(b1, b2)`,
//!
//! ```text
//! Δ0(λ) = d + a e^{i(b1+b2)λ} + (ad − bc) e^{i b1 λ} + e^{i b2 λ}
//!        = (1 + a e^{i b1 λ}) (d + e^{i b2 λ}) − bc e^{i b1 λ}.
//! ```
//!
//! Zeros form the unperturbed spectrum. Three solvers cover the cases:
//! closed form for diagonal conditions (`b = c = 0`), polynomial reduction
//! for commensurable weights, and argument-principle contours in general.

use crate::bc::{self, CanonicalBc};
use crate::contour::{self, ContourError, Rect};
use crate::polyroots::{self, PolyError};
use crate::weights::DiracWeights;
use crate::{tol_det, C64, MULT_TOL};
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Det0Error {
    /// The operation requires regular boundary conditions.
    #[error("boundary conditions are not regular")]
    NotRegular,
    /// The solver was asked to handle conditions outside its case.
    #[error("solver does not apply: {0}")]
    WrongCase(&'static str),
    /// Contour machinery failed after all retries.
    #[error("contour zero search failed: {0}")]
    Contour(#[from] ContourError),
    /// The polynomial reduction produced an unusable polynomial.
    #[error("polynomial reduction failed: {0}")]
    Poly(#[from] PolyError),
}

/// Which solver produced an eigenvalue record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    PolynomialReduction,
    Contour,
}

/// One zero of Δ0 (or of the perturbed characteristic function), with its
/// index in the global ordering, multiplicity, and achieved residual.
#[derive(Debug, Clone, Copy)]
pub struct Eigenvalue {
    /// Index in the ordering by nondecreasing `Re`, ties by nondecreasing
    /// `Im`; index 0 sits at the zero with smallest `|Re|`, and indices
    /// advance by multiplicity across a multiple zero.
    pub n: i64,
    pub value: C64,
    pub multiplicity: usize,
    /// `|Δ0(value)|` (or the perturbed analogue) at the reported location.
    pub residual: f64,
    pub method: Method,
}

/// Truncation of the doubly infinite zero sequence.
#[derive(Debug, Clone, Copy)]
pub enum SpectrumWindow {
    /// Keep indices `−n_side ..= n_side`.
    Indexed { n_side: u32 },
    /// Keep zeros with `Re λ` in the closed interval.
    ReRange { min: f64, max: f64 },
}

impl SpectrumWindow {
    /// Real-axis search range wide enough to cover the window.
    fn search_range(&self, w: &DiracWeights) -> (f64, f64) {
        match *self {
            SpectrumWindow::Indexed { n_side } => {
                assert!(n_side >= 1, "window must span at least one index per side");
                let r = (n_side as f64 + 2.5) * w.mean_gap();
                (-r, r)
            }
            SpectrumWindow::ReRange { min, max } => {
                assert!(min < max, "window interval must be nonempty");
                (min, max)
            }
        }
    }

    /// Final filter applied after indexing.
    fn keep(&self, ev: &Eigenvalue) -> bool {
        match *self {
            SpectrumWindow::Indexed { n_side } => ev.n.unsigned_abs() <= n_side as u64,
            SpectrumWindow::ReRange { min, max } => ev.value.re >= min && ev.value.re <= max,
        }
    }
}

/// Evaluate Δ0 as the four-term exponential sum.
pub fn delta0(lambda: C64, bc: &CanonicalBc, w: &DiracWeights) -> C64 {
    let i = C64::i();
    bc.d + bc.a * (i * (w.b1() + w.b2()) * lambda).exp()
        + bc.u() * (i * w.b1() * lambda).exp()
        + (i * w.b2() * lambda).exp()
}

/// Analytic derivative of Δ0.
pub fn delta0_prime(lambda: C64, bc: &CanonicalBc, w: &DiracWeights) -> C64 {
    let i = C64::i();
    let (b1, b2) = (w.b1(), w.b2());
    i * (b1 + b2) * bc.a * (i * (b1 + b2) * lambda).exp()
        + i * b1 * bc.u() * (i * b1 * lambda).exp()
        + i * b2 * (i * b2 * lambda).exp()
}

/// Sum of the moduli of the four terms of Δ0 — a natural magnitude scale on
/// a horizontal line at height `Im λ = t`.
fn term_scale(bc: &CanonicalBc, w: &DiracWeights, t: f64) -> f64 {
    bc.d.norm()
        + bc.a.norm() * (-(w.b1() + w.b2()) * t).exp()
        + bc.u().norm() * (-w.b1() * t).exp()
        + (-w.b2() * t).exp()
}

/// Certified height of the horizontal strip containing all zeros of Δ0.
///
/// Above height `t` the term `u e^{i b1 λ}` dominates the other three, and
/// below `−t` the term `e^{i b2 λ}` does; both margins grow monotonically
/// with `t`, so a doubling search plus bisection finds the smallest
/// certified height.
pub fn strip_height(bc: &CanonicalBc, w: &DiracWeights) -> Result<f64, Det0Error> {
    if !bc::is_regular(bc) {
        return Err(Det0Error::NotRegular);
    }
    let (b1, b2) = (w.b1(), w.b2());
    let (a, d, u) = (bc.a.norm(), bc.d.norm(), bc.u().norm());
    let above = |t: f64| u * (-b1 * t).exp() > d + a * ((-b1 - b2) * t).exp() + (-b2 * t).exp();
    let below = |t: f64| (b2 * t).exp() > d + a * ((b1 + b2) * t).exp() + u * (b1 * t).exp();
    let certified = |t: f64| above(t) && below(t);

    let mut hi = 1.0;
    while !certified(hi) {
        hi *= 2.0;
        assert!(hi < 1e9, "strip certification diverged for a regular condition set");
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if certified(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn make_record(lambda: C64, mult: usize, bc: &CanonicalBc, w: &DiracWeights, m: Method) -> Eigenvalue {
    Eigenvalue {
        n: 0,
        value: lambda,
        multiplicity: mult,
        residual: delta0(lambda, bc, w).norm(),
        method: m,
    }
}

/// Sort by (Re, Im), merge coincident values, and assign indices so that
/// index 0 lands on the zero with smallest `|Re|` and indices advance by
/// multiplicity.
fn order_and_index(mut evs: Vec<Eigenvalue>, window: &SpectrumWindow) -> Vec<Eigenvalue> {
    evs.sort_by(|p, q| (p.value.re, p.value.im).partial_cmp(&(q.value.re, q.value.im)).unwrap());
    // Duplicate suppression across solver branches.
    let mut merged: Vec<Eigenvalue> = Vec::with_capacity(evs.len());
    for ev in evs {
        match merged.last_mut() {
            Some(last) if (last.value - ev.value).norm() <= 1e-9 => {
                last.multiplicity += ev.multiplicity;
                last.residual = last.residual.max(ev.residual);
            }
            _ => merged.push(ev),
        }
    }
    if merged.is_empty() {
        return merged;
    }
    let origin = merged
        .iter()
        .enumerate()
        .min_by(|(_, p), (_, q)| {
            p.value.re.abs().partial_cmp(&q.value.re.abs()).unwrap()
        })
        .map(|(i, _)| i)
        .unwrap();
    merged[origin].n = 0;
    for i in (origin + 1)..merged.len() {
        merged[i].n = merged[i - 1].n + merged[i - 1].multiplicity as i64;
    }
    for i in (0..origin).rev() {
        merged[i].n = merged[i + 1].n - merged[i].multiplicity as i64;
    }
    merged.retain(|ev| window.keep(ev));
    merged
}

/// Zeros for diagonal conditions `(a, 0, 0, d)`, `ad ≠ 0`: the union of two
/// arithmetic progressions
/// `λ_{1,n} = (arg(−a⁻¹) + 2πn)/b1 + i ln|a|/b1` and
/// `λ_{2,n} = (arg(−d) + 2πn)/b2 − i ln|d|/b2`.
pub fn zeros_closed_form(
    bc: &CanonicalBc,
    w: &DiracWeights,
    window: &SpectrumWindow,
) -> Result<Vec<Eigenvalue>, Det0Error> {
    let thr = tol_det(1.0 + bc.a.norm() + bc.b.norm() + bc.c.norm() + bc.d.norm());
    if bc.b.norm() > thr || bc.c.norm() > thr {
        return Err(Det0Error::WrongCase("closed form requires b = c = 0"));
    }
    if bc.a.norm() <= thr || bc.d.norm() <= thr {
        return Err(Det0Error::WrongCase("closed form requires a d ≠ 0"));
    }
    let (lo, hi) = window.search_range(w);
    let mut evs = Vec::new();
    let mut progression = |rate: f64, phase: f64, height: f64| {
        // Re λ = (phase + 2πn)/rate; generate all n with Re λ in [lo, hi].
        let bound1 = (lo * rate - phase) / TAU;
        let bound2 = (hi * rate - phase) / TAU;
        let n_lo = bound1.min(bound2).floor() as i64 - 1;
        let n_hi = bound1.max(bound2).ceil() as i64 + 1;
        for n in n_lo..=n_hi {
            let re = (phase + TAU * n as f64) / rate;
            if re >= lo - 1e-12 && re <= hi + 1e-12 {
                evs.push(make_record(C64::new(re, height), 1, bc, w, Method::ClosedForm));
            }
        }
    };
    progression(w.b1(), (-bc.a.inv()).arg(), bc.a.norm().ln() / w.b1());
    progression(w.b2(), (-bc.d).arg(), -bc.d.norm().ln() / w.b2());
    Ok(order_and_index(evs, window))
}

/// Zeros through the polynomial reduction available for commensurable
/// weights `b1 = −n1 b0`, `b2 = n2 b0`: with `ζ = e^{i b0 λ}`,
/// `Δ0(λ) e^{−i b1 λ} = ζ^{n1+n2} + a ζ^{n2} + d ζ^{n1} + (ad − bc)`, and
/// every polynomial root `μ` unfolds to the progression
/// `λ = (arg μ + 2πm)/b0 − i ln|μ|/b0`.
pub fn zeros_polynomial(
    bc: &CanonicalBc,
    w: &DiracWeights,
    window: &SpectrumWindow,
) -> Result<Vec<Eigenvalue>, Det0Error> {
    let Some(rat) = w.rationality() else {
        return Err(Det0Error::WrongCase("polynomial reduction requires declared rationality"));
    };
    if !bc::is_regular(bc) {
        return Err(Det0Error::NotRegular);
    }
    let poly = bc::reduced_polynomial(bc, rat.n1 as usize, rat.n2 as usize);
    let roots = polyroots::roots(&poly)?;
    let clusters = polyroots::cluster_roots(&roots, MULT_TOL);
    let (lo, hi) = window.search_range(w);
    let mut evs = Vec::new();
    for (mu, mult) in clusters {
        let phase = mu.arg();
        let height = -mu.norm().ln() / rat.b0;
        let n_lo = ((lo * rat.b0 - phase) / TAU).floor() as i64 - 1;
        let n_hi = ((hi * rat.b0 - phase) / TAU).ceil() as i64 + 1;
        for m in n_lo..=n_hi {
            let re = (phase + TAU * m as f64) / rat.b0;
            if re >= lo - 1e-12 && re <= hi + 1e-12 {
                let rec = make_record(
                    C64::new(re, height),
                    mult,
                    bc,
                    w,
                    Method::PolynomialReduction,
                );
                evs.push(rec);
            }
        }
    }
    Ok(order_and_index(evs, window))
}

/// Zeros by argument-principle search over the certified strip.
pub fn zeros_contour(
    bc: &CanonicalBc,
    w: &DiracWeights,
    window: &SpectrumWindow,
) -> Result<Vec<Eigenvalue>, Det0Error> {
    let h = strip_height(bc, w)?;
    let (lo, hi) = window.search_range(w);
    let f = |z: C64| delta0(z, bc, w);
    let df = |z: C64| delta0_prime(z, bc, w);
    let freq = w.b2() - w.b1();

    // Zeros can sit exactly on natural window boundaries (e.g. Re = 0 edges
    // or integer multiples of the mean gap), so the search box is nudged
    // outward on retries until the boundary is clean.
    let mut margin = 1.0;
    let mut located = None;
    for attempt in 0..5 {
        let pad = attempt as f64 * 1.37e-3 * w.mean_gap();
        let rect = Rect::new((lo - pad, hi + pad), (-h - margin, h + margin));
        let scale = term_scale(bc, w, h + margin).max(term_scale(bc, w, -h - margin));
        match contour::zeros_in_rect(&f, &df, &rect, freq, scale, MULT_TOL) {
            Ok(z) => {
                located = Some(z);
                break;
            }
            Err(ContourError::ZeroOnBoundary) => {
                margin += 0.25;
                continue;
            }
            Err(e) if attempt == 4 => return Err(e.into()),
            Err(_) => continue,
        }
    }
    let located = located.ok_or(Det0Error::Contour(ContourError::ZeroOnBoundary))?;
    let evs = located
        .into_iter()
        .map(|z| make_record(z.z, z.multiplicity, bc, w, Method::Contour))
        .collect();
    Ok(order_and_index(evs, window))
}

/// Dispatch to the most specific zero solver: closed form for diagonal
/// conditions, polynomial reduction for commensurable weights, contours
/// otherwise.
pub fn unperturbed_zeros(
    bc: &CanonicalBc,
    w: &DiracWeights,
    window: &SpectrumWindow,
) -> Result<Vec<Eigenvalue>, Det0Error> {
    if !bc::is_regular(bc) {
        return Err(Det0Error::NotRegular);
    }
    let thr = tol_det(1.0 + bc.a.norm() + bc.b.norm() + bc.c.norm() + bc.d.norm());
    if bc.b.norm() <= thr && bc.c.norm() <= thr && bc.a.norm() > thr && bc.d.norm() > thr {
        return zeros_closed_form(bc, w, window);
    }
    if w.rationality().is_some() {
        return zeros_polynomial(bc, w, window);
    }
    zeros_contour(bc, w, window)
}

/// The sequences `e_{1n} = e^{i b1 λ_n}`, `e_{2n} = e^{−i b2 λ_n}`, and
/// `z_n = (1 + d e_{2n}) conj(1 + a e_{1n})` evaluated along a zero list.
#[derive(Debug, Clone)]
pub struct ZeroSequences {
    pub e1: Vec<C64>,
    pub e2: Vec<C64>,
    pub z: Vec<C64>,
}

/// Evaluate the derived sequences at each zero. For every simple (or
/// exactly-known multiple) zero the factorization identity
/// `(1 + a e1)(1 + d e2) = bc · e1 e2` is asserted to 1e−8; cluster centers
/// found by the contour solver are exempt since their location error
/// propagates into the identity.
pub fn derive_sequences(zeros: &[Eigenvalue], bc: &CanonicalBc, w: &DiracWeights) -> ZeroSequences {
    assert!(!zeros.is_empty(), "derive_sequences needs at least one zero");
    let i = C64::i();
    let mut out = ZeroSequences {
        e1: Vec::with_capacity(zeros.len()),
        e2: Vec::with_capacity(zeros.len()),
        z: Vec::with_capacity(zeros.len()),
    };
    let regular = bc::is_regular(bc);
    for ev in zeros {
        let e1 = (i * w.b1() * ev.value).exp();
        let e2 = (-i * w.b2() * ev.value).exp();
        let one = C64::new(1.0, 0.0);
        let z = (one + bc.d * e2) * (one + bc.a * e1).conj();
        if regular && !(ev.method == Method::Contour && ev.multiplicity > 1) {
            let gap = (one + bc.a * e1) * (one + bc.d * e2) - bc.b * bc.c * e1 * e2;
            let scale = 1.0 + (bc.a * e1).norm() + (bc.d * e2).norm() + (bc.b * bc.c * e1 * e2).norm();
            assert!(
                gap.norm() <= 1e-8 * scale,
                "zero record violates the factorization identity: |gap| = {:.3e}",
                gap.norm()
            );
        }
        out.e1.push(e1);
        out.e2.push(e2);
        out.z.push(z);
    }
    out
}

/// Gap and density statistics of a zero window.
#[derive(Debug, Clone, Copy)]
pub struct SeparationStats {
    /// Minimum pairwise distance over the outer half of the window; zero
    /// when the outer half holds a multiple zero.
    pub min_gap: f64,
    /// Largest number of zeros (with multiplicity) whose `Re` fall in any
    /// sliding window of width 2.
    pub incompressibility_d: usize,
    /// Whether the outer-half minimum gap clears the separation tolerance.
    pub is_asymptotically_separated: bool,
}

/// Default separation tolerance: one thousandth of the mean zero spacing.
pub fn default_sep_tol(w: &DiracWeights) -> f64 {
    1e-3 * w.mean_gap()
}

/// Compute separation statistics with the default tolerance.
pub fn separation_stats(zeros: &[Eigenvalue], w: &DiracWeights) -> SeparationStats {
    separation_stats_with(zeros, default_sep_tol(w))
}

/// Compute separation statistics with an explicit tolerance. The outer half
/// of the window (first and last quarters in the index ordering) stands in
/// for the asymptotic regime.
pub fn separation_stats_with(zeros: &[Eigenvalue], sep_tol: f64) -> SeparationStats {
    assert!(zeros.len() >= 2, "separation statistics need at least two zeros");
    let quarter = (zeros.len() / 4).max(1);
    let outer: Vec<&Eigenvalue> = zeros[..quarter]
        .iter()
        .chain(zeros[zeros.len() - quarter..].iter())
        .collect();
    let mut min_gap = f64::INFINITY;
    for (i, p) in outer.iter().enumerate() {
        if p.multiplicity > 1 {
            min_gap = 0.0;
        }
        for other in &outer[i + 1..] {
            min_gap = min_gap.min((p.value - other.value).norm());
        }
    }
    let mut res: Vec<f64> = Vec::new();
    for ev in zeros {
        for _ in 0..ev.multiplicity {
            res.push(ev.value.re);
        }
    }
    res.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut d = 0;
    let mut j = 0;
    for i in 0..res.len() {
        while res[i] - res[j] > 2.0 {
            j += 1;
        }
        d = d.max(i - j + 1);
    }
    SeparationStats {
        min_gap,
        incompressibility_d: d,
        is_asymptotically_separated: min_gap > sep_tol,
    }
}

/// Greedy ε-ball clustering of the outer half of a sequence: an estimate of
/// how many limit points the sequence accumulates around.
pub fn limit_point_census(seq: &[C64], eps: f64) -> usize {
    assert!(seq.len() >= 16, "census needs at least 16 terms");
    let q = seq.len() / 4;
    let outer: Vec<C64> = seq[..q].iter().chain(seq[seq.len() - q..].iter()).copied().collect();
    let mut reps: Vec<C64> = Vec::new();
    for z in outer {
        if !reps.iter().any(|r| (z - r).norm() <= eps) {
            reps.push(z);
        }
    }
    reps.len()
}

/// Count fractional parts `{β m}` for `m ∈ [−M, M]` falling in each closed
/// interval.
pub fn weyl_census(beta: f64, m: u32, intervals: &[(f64, f64)]) -> Vec<usize> {
    assert!(m >= 1);
    for (a, b) in intervals {
        assert!(
            (0.0..=1.0).contains(a) && (0.0..=1.0).contains(b) && a <= b,
            "census intervals must satisfy 0 ≤ a ≤ b ≤ 1"
        );
    }
    let mut counts = vec![0usize; intervals.len()];
    for k in -(m as i64)..=(m as i64) {
        let frac = (beta * k as f64).rem_euclid(1.0);
        for (slot, (a, b)) in counts.iter_mut().zip(intervals) {
            if frac >= *a && frac <= *b {
                *slot += 1;
            }
        }
    }
    counts
}
