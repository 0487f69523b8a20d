//! Two-point boundary conditions: canonical form, regularity, strict
//! regularity, adjoint conditions, and self-adjointness.
//!
//! A condition pair is `U_j(y) = a_j1 y1(0) + a_j2 y2(0) + a_j3 y1(1) +
//! a_j4 y2(1) = 0`, `j = 1, 2`. Whenever the minor built from columns 1 and 4
//! is invertible the pair is equivalent to the canonical form
//! `y1(0) + b y2(0) + a y1(1) = 0`, `d y2(0) + c y1(1) + y2(1) = 0`.

use crate::det0;
use crate::weights::DiracWeights;
use crate::{tol_det, C64, TOL_SA};
use thiserror::Error;

/// Errors raised by the boundary-condition algebra.
#[derive(Debug, Error)]
pub enum BcError {
    /// The 2x4 functional matrix does not have full rank.
    #[error("boundary functional matrix is rank deficient")]
    RankDeficient,
    /// The minor at columns (1, 4) vanishes, so no canonical form exists.
    #[error("minor at columns (1,4) is singular; conditions cannot be canonicalized")]
    NotCanonicalizable,
    /// The operation requires regular boundary conditions.
    #[error("boundary conditions are not regular")]
    NotRegular,
    /// The two self-adjointness criteria disagree, which indicates a defect
    /// in this crate rather than in the input.
    #[error("self-adjointness criteria disagree (relations: {relations}, matrix: {matrix})")]
    InternalInconsistency { relations: bool, matrix: bool },
}

/// A raw pair of boundary functionals, stored as the 2x4 coefficient matrix
/// over the value vector `(y1(0), y2(0), y1(1), y2(1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawBc {
    rows: [[C64; 4]; 2],
}

impl RawBc {
    /// Validates that the functional matrix has full rank.
    pub fn new(rows: [[C64; 4]; 2]) -> Result<Self, BcError> {
        let bc = Self { rows };
        let scale = bc.max_entry();
        let full_rank = (1..=4)
            .flat_map(|j| (1..=4).map(move |k| (j, k)))
            .filter(|(j, k)| j < k)
            .any(|(j, k)| bc.minor(j, k).norm() > tol_det(scale * scale));
        if full_rank {
            Ok(bc)
        } else {
            Err(BcError::RankDeficient)
        }
    }

    pub fn rows(&self) -> &[[C64; 4]; 2] {
        &self.rows
    }

    /// Determinant of the 2x2 submatrix formed by columns `j` and `k`
    /// (1-indexed).
    pub fn minor(&self, j: usize, k: usize) -> C64 {
        let (j, k) = (j - 1, k - 1);
        self.rows[0][j] * self.rows[1][k] - self.rows[0][k] * self.rows[1][j]
    }

    fn max_entry(&self) -> f64 {
        self.rows.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Canonical boundary conditions `y1(0) + b y2(0) + a y1(1) = 0`,
/// `d y2(0) + c y1(1) + y2(1) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalBc {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl CanonicalBc {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { a, b, c, d }
    }

    /// Convenience constructor from real coefficients.
    pub fn from_reals(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    /// The determinant `u = ad - bc`; regularity means `u != 0`.
    pub fn u(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    /// The canonical functional rows over `(y1(0), y2(0), y1(1), y2(1))`.
    pub fn rows(&self) -> [[C64; 4]; 2] {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        [[one, self.b, self.a, zero], [zero, self.d, self.c, one]]
    }

    fn max_coeff(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm()).max(self.d.norm())
    }

    /// Threshold under which a canonical coefficient is treated as zero in
    /// structural case dispatch.
    fn zero_thr(&self) -> f64 {
        tol_det(self.max_coeff())
    }
}

/// Reduce a raw condition pair to canonical form by inverting the minor at
/// columns (1, 4).
pub fn canonicalize(raw: &RawBc) -> Result<CanonicalBc, BcError> {
    let j14 = raw.minor(1, 4);
    let scale = raw.max_entry();
    if j14.norm() <= tol_det(scale * scale) {
        return Err(BcError::NotCanonicalizable);
    }
    let r = raw.rows();
    // Left-multiply by the inverse of [[a11, a14], [a21, a24]].
    let b = (r[1][3] * r[0][1] - r[0][3] * r[1][1]) / j14;
    let a = (r[1][3] * r[0][2] - r[0][3] * r[1][2]) / j14;
    let d = (-r[1][0] * r[0][1] + r[0][0] * r[1][1]) / j14;
    let c = (-r[1][0] * r[0][2] + r[0][0] * r[1][2]) / j14;
    Ok(CanonicalBc { a, b, c, d })
}

/// Regularity test: the canonical determinant `u = ad - bc` must not vanish.
pub fn is_regular(bc: &CanonicalBc) -> bool {
    bc.u().norm() > tol_det(1.0 + bc.max_coeff() * bc.max_coeff())
}

/// Verdict of the strict-regularity classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Strictly regular by an analytic criterion.
    YesAnalytic,
    /// Not strictly regular, by an analytic criterion.
    NoAnalytic,
    /// Strictly regular as judged by numeric zero separation.
    YesNumeric,
    /// Not strictly regular as judged by numeric zero separation.
    NoNumeric,
    /// The numeric fallback could not certify either way.
    Unknown,
}

impl Verdict {
    /// True for both analytic and numeric "strictly regular" outcomes.
    pub fn is_strictly_regular(&self) -> Option<bool> {
        match self {
            Verdict::YesAnalytic | Verdict::YesNumeric => Some(true),
            Verdict::NoAnalytic | Verdict::NoNumeric => Some(false),
            Verdict::Unknown => None,
        }
    }
}

/// Which criterion decided the strict-regularity verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrictCase {
    /// `a = d = 0`, `bc != 0`: fully separated conditions.
    Separated,
    /// Antiperiodic conditions (`a = d = 1`, `b = c = 0`) with commensurable
    /// weights: decided by the parity of `n1 - n2`.
    Antiperiodic,
    /// `b = c = 0` with commensurable weights: modulus/argument test.
    QuasiPeriodicCommensurable,
    /// `b = c = 0` with undeclared (irrational) weight ratio: modulus test.
    QuasiPeriodicIncommensurable,
    /// Equal weight moduli (`b2 = -b1`): discriminant test on `(a-d)^2 + 4bc`.
    EqualWeights,
    /// `a = 0`, `bc != 0` with commensurable weights: closed power identity.
    PartiallySeparatedCommensurable,
    /// `a = 0`, `bc != 0`, real `bc` and `d`, irrational ratio: threshold test.
    PartiallySeparatedIncommensurable,
    /// Commensurable weights, general coefficients: multiple-root test of the
    /// reduced polynomial.
    CommensurablePolynomial,
    /// Numeric fallback on computed zero separation.
    Numeric,
}

/// A strict-regularity verdict together with the criterion that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrictVerdict {
    pub verdict: Verdict,
    pub case: StrictCase,
}

fn yes(case: StrictCase, strict: bool) -> StrictVerdict {
    let verdict = if strict { Verdict::YesAnalytic } else { Verdict::NoAnalytic };
    StrictVerdict { verdict, case }
}

/// Classify regular boundary conditions as strictly regular or not, using the
/// most specific analytic criterion available and falling back to a numeric
/// separation test otherwise.
pub fn classify_strict(bc: &CanonicalBc, w: &DiracWeights) -> Result<StrictVerdict, BcError> {
    if !is_regular(bc) {
        return Err(BcError::NotRegular);
    }
    let thr = bc.zero_thr();
    let (a, b, c, d) = (bc.a, bc.b, bc.c, bc.d);
    let bc_prod = b * c;
    let a_zero = a.norm() <= thr;
    let d_zero = d.norm() <= thr;
    let b_zero = b.norm() <= thr;
    let c_zero = c.norm() <= thr;
    let rat = w.rationality();
    let equal_weights = (w.beta() - 1.0).abs() <= 1e-12;

    if a_zero && d_zero {
        // bc != 0 is implied by regularity.
        return Ok(yes(StrictCase::Separated, true));
    }

    if b_zero && c_zero {
        // Diagonal ("quasi-periodic") conditions; regularity gives ad != 0.
        if let Some(r) = rat {
            let one = C64::new(1.0, 0.0);
            if (a - one).norm() <= thr && (d - one).norm() <= thr {
                let strict = (r.n1 as i64 - r.n2 as i64).rem_euclid(2) == 1;
                return Ok(yes(StrictCase::Antiperiodic, strict));
            }
            let moduli = w.b1() * d.norm().ln() + w.b2() * a.norm().ln();
            let angle = r.n1 as f64 * (-d).arg() - r.n2 as f64 * (-a).arg();
            let angle_dist = distance_to_multiple(angle, std::f64::consts::TAU);
            let strict = moduli.abs() > tol_det(w.b1().abs() + w.b2())
                || angle_dist > 1e-12 * (1.0 + r.n1 as f64 + r.n2 as f64);
            return Ok(yes(StrictCase::QuasiPeriodicCommensurable, strict));
        }
        let moduli = w.b1() * d.norm().ln() + w.b2() * a.norm().ln();
        let strict = moduli.abs() > tol_det(w.b1().abs() + w.b2());
        return Ok(yes(StrictCase::QuasiPeriodicIncommensurable, strict));
    }

    if equal_weights {
        let disc = (a - d) * (a - d) + 4.0 * bc_prod;
        let scale = (a.norm() + d.norm() + 1.0).powi(2) + 4.0 * bc_prod.norm();
        let strict = disc.norm() > tol_det(scale);
        return Ok(yes(StrictCase::EqualWeights, strict));
    }

    if a_zero {
        // bc != 0 here, since a = 0 and regularity force it.
        if let Some(r) = rat {
            let (n1, n2) = (r.n1 as i32, r.n2 as i32);
            let lhs = (n1 as f64).powi(n1) * (n2 as f64).powi(n2) * (-d).powi(n1 + n2);
            let rhs = ((n1 + n2) as f64).powi(n1 + n2) * (-bc_prod).powi(n2);
            let strict = (lhs - rhs).norm() > tol_det(lhs.norm() + rhs.norm());
            return Ok(yes(StrictCase::PartiallySeparatedCommensurable, strict));
        }
        let real_inputs = bc_prod.im.abs() <= thr && d.im.abs() <= thr && d.re.abs() > thr;
        if real_inputs {
            let alpha = -w.b1() / w.b2();
            let threshold =
                -(alpha + 1.0) * (bc_prod.norm() * alpha.powf(-alpha)).powf(1.0 / (alpha + 1.0));
            let strict = (d.re - threshold).abs() > tol_det(d.norm() + threshold.abs());
            return Ok(yes(StrictCase::PartiallySeparatedIncommensurable, strict));
        }
    }

    if let Some(r) = rat {
        let poly = reduced_polynomial(bc, r.n1 as usize, r.n2 as usize);
        let strict = !crate::polyroots::has_multiple_root(&poly, 1e-10);
        return Ok(yes(StrictCase::CommensurablePolynomial, strict));
    }

    Ok(numeric_fallback(bc, w))
}

/// Coefficients (ascending powers) of the polynomial `P(ζ) = ζ^{n1+n2} +
/// a ζ^{n2} + d ζ^{n1} + (ad - bc)` that carries the zeros of the
/// unperturbed characteristic function for commensurable weights.
pub(crate) fn reduced_polynomial(bc: &CanonicalBc, n1: usize, n2: usize) -> Vec<C64> {
    let mut coeffs = vec![C64::new(0.0, 0.0); n1 + n2 + 1];
    coeffs[0] = bc.u();
    coeffs[n1] += bc.d;
    coeffs[n2] += bc.a;
    coeffs[n1 + n2] += C64::new(1.0, 0.0);
    coeffs
}

fn distance_to_multiple(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    r.min(period - r)
}

/// Number of zeros per side used by the numeric separation fallback.
const NUMERIC_WINDOW: u32 = 64;

fn numeric_fallback(bc: &CanonicalBc, w: &DiracWeights) -> StrictVerdict {
    let case = StrictCase::Numeric;
    let window = det0::SpectrumWindow::Indexed { n_side: NUMERIC_WINDOW };
    let zeros = match det0::zeros_contour(bc, w, &window) {
        Ok(z) => z,
        Err(_) => return StrictVerdict { verdict: Verdict::Unknown, case },
    };
    let stats = det0::separation_stats(&zeros, w);
    let verdict =
        if stats.is_asymptotically_separated { Verdict::YesNumeric } else { Verdict::NoNumeric };
    StrictVerdict { verdict, case }
}

/// The boundary functionals of the adjoint problem, as raw rows
/// `(conj(a) y1(0) + y1(1) + conj(c)/β y2(1), β conj(b) y1(0) + y2(0) +
/// conj(d) y2(1))`.
pub fn adjoint_bc(bc: &CanonicalBc, w: &DiracWeights) -> RawBc {
    let beta = w.beta();
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let rows = [
        [bc.a.conj(), zero, one, bc.c.conj() / beta],
        [beta * bc.b.conj(), one, zero, bc.d.conj()],
    ];
    RawBc::new(rows).expect("adjoint rows always contain an identity minor")
}

/// Residuals of the three coefficient relations characterizing self-adjoint
/// canonical conditions: `|a|^2 + β|b|^2 = 1`, `|c|^2 + β|d|^2 = β`,
/// `a conj(c) + β b conj(d) = 0`.
pub fn sa_relation_residuals(bc: &CanonicalBc, beta: f64) -> [f64; 3] {
    [
        (bc.a.norm_sqr() + beta * bc.b.norm_sqr() - 1.0).abs(),
        (bc.c.norm_sqr() + beta * bc.d.norm_sqr() - beta).abs(),
        (bc.a * bc.c.conj() + beta * bc.b * bc.d.conj()).norm(),
    ]
}

/// Self-adjointness via the coefficient relations.
pub fn sa_relations_test(bc: &CanonicalBc, beta: f64) -> bool {
    sa_relation_residuals(bc, beta).iter().all(|r| *r <= TOL_SA)
}

/// Self-adjointness via the matrix identity `C B C* = D B D*`, where
/// `C y(0) + D y(1) = 0` is the canonical condition pair.
pub fn sa_matrix_test(bc: &CanonicalBc, w: &DiracWeights) -> bool {
    let (b1, b2) = (w.b1(), w.b2());
    let (a, b, c, d) = (bc.a, bc.b, bc.c, bc.d);
    // C = [[1, b], [0, d]], D = [[a, 0], [c, 1]], B = diag(b1, b2).
    let cbc = [
        [C64::from(b1) + b2 * b.norm_sqr(), b2 * b * d.conj()],
        [b2 * b.conj() * d, C64::from(b2 * d.norm_sqr())],
    ];
    let dbd = [
        [C64::from(b1 * a.norm_sqr()), b1 * a * c.conj()],
        [b1 * a.conj() * c, C64::from(b1 * c.norm_sqr() + b2)],
    ];
    let mut frob = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            frob += (cbc[i][j] - dbd[i][j]).norm_sqr();
        }
    }
    // Normalize by the weight scale so the two criteria agree on thresholds.
    frob.sqrt() / b1.abs().max(b2) <= TOL_SA
}

/// Decide self-adjointness of the boundary conditions, evaluating both the
/// coefficient relations and the matrix identity and insisting they agree.
pub fn is_self_adjoint(bc: &CanonicalBc, w: &DiracWeights) -> Result<bool, BcError> {
    let relations = sa_relations_test(bc, w.beta());
    let matrix = sa_matrix_test(bc, w);
    if relations != matrix {
        return Err(BcError::InternalInconsistency { relations, matrix });
    }
    Ok(relations)
}

/// Full classification record for a canonical condition pair.
#[derive(Debug, Clone)]
pub struct Classification {
    pub regular: bool,
    pub strict: Option<StrictVerdict>,
    pub self_adjoint: bool,
    pub adjoint: RawBc,
}

/// Assemble the regularity, strict-regularity, self-adjointness, and adjoint
/// data for a condition pair in one record.
pub fn classification(bc: &CanonicalBc, w: &DiracWeights) -> Result<Classification, BcError> {
    let regular = is_regular(bc);
    let strict = if regular { Some(classify_strict(bc, w)?) } else { None };
    Ok(Classification {
        regular,
        strict,
        self_adjoint: is_self_adjoint(bc, w)?,
        adjoint: adjoint_bc(bc, w),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn raw(rows: [[f64; 4]; 2]) -> RawBc {
        let rows = rows.map(|r| r.map(|x| C64::from(x)));
        RawBc::new(rows).unwrap()
    }

    #[test]
    fn canonicalize_separated_endpoint_conditions() {
        let bc = canonicalize(&raw([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]])).unwrap();
        assert_eq!(bc, CanonicalBc::from_reals(0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn canonicalize_scales_rows() {
        let bc = canonicalize(&raw([[1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 3.0]])).unwrap();
        assert!((bc.a.norm(), bc.d.norm()) == (0.0, 0.0));
        assert!((bc.b - c(1.0, 0.0)).norm() < 1e-15);
        assert!((bc.c - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn canonicalize_rejects_singular_corner_minor() {
        let raw = raw([[1.0, 0.0, -1.0, 0.0], [1.0, 0.0, 1.0, 0.0]]);
        assert!(matches!(canonicalize(&raw), Err(BcError::NotCanonicalizable)));
    }

    #[test]
    fn canonicalize_is_idempotent_on_canonical_rows() {
        let bc = CanonicalBc::new(c(0.3, -0.4), c(1.0, 0.2), c(-0.7, 0.0), c(0.1, 0.9));
        let again = canonicalize(&RawBc::new(bc.rows()).unwrap()).unwrap();
        assert!((again.a - bc.a).norm() < 1e-15);
        assert!((again.b - bc.b).norm() < 1e-15);
        assert!((again.c - bc.c).norm() < 1e-15);
        assert!((again.d - bc.d).norm() < 1e-15);
    }

    #[test]
    fn regularity_follows_the_determinant() {
        assert!(is_regular(&CanonicalBc::from_reals(0.0, 1.0, 1.0, 0.0)));
        assert!(is_regular(&CanonicalBc::from_reals(1.0, 0.0, 0.0, 1.0)));
        assert!(!is_regular(&CanonicalBc::from_reals(0.0, 1.0, 0.0, 0.0)));
    }

    #[test]
    fn equal_weight_discriminant_detects_degeneracy() {
        let w = DiracWeights::dirac();
        // (a-d)^2 = -4bc exactly: a = 1+t, d = 1-t, b = t, c = -t.
        let t = 0.5;
        let bc = CanonicalBc::from_reals(1.0 + t, t, -t, 1.0 - t);
        let v = classify_strict(&bc, &w).unwrap();
        assert_eq!(v.verdict, Verdict::NoAnalytic);
        assert_eq!(v.case, StrictCase::EqualWeights);

        let v = classify_strict(&CanonicalBc::from_reals(1.0, 0.0, 0.0, 1.0), &w).unwrap();
        assert_eq!(v.verdict, Verdict::NoAnalytic);
    }

    #[test]
    fn antiperiodic_parity_decides_commensurable_case() {
        let w = DiracWeights::with_rationality(1, 2, 1.0).unwrap();
        let bc = CanonicalBc::from_reals(1.0, 0.0, 0.0, 1.0);
        let v = classify_strict(&bc, &w).unwrap();
        assert_eq!(v.verdict, Verdict::YesAnalytic);
        assert_eq!(v.case, StrictCase::Antiperiodic);

        let w = DiracWeights::with_rationality(1, 3, 1.0).unwrap();
        let v = classify_strict(&bc, &w).unwrap();
        assert_eq!(v.verdict, Verdict::NoAnalytic);
    }

    #[test]
    fn separated_conditions_are_always_strict() {
        let v = classify_strict(&CanonicalBc::from_reals(0.0, 1.0, 1.0, 0.0), &DiracWeights::dirac())
            .unwrap();
        assert_eq!(v.verdict, Verdict::YesAnalytic);
        assert_eq!(v.case, StrictCase::Separated);
    }

    #[test]
    fn quasi_periodic_modulus_test() {
        // |a| != |d| separates the two zero progressions in height.
        let w = DiracWeights::dirac();
        let v = classify_strict(&CanonicalBc::from_reals(2.0, 0.0, 0.0, 0.5), &w).unwrap();
        assert_eq!(v.verdict, Verdict::YesAnalytic);
        assert_eq!(v.case, StrictCase::QuasiPeriodicCommensurable);

        let w = DiracWeights::new(-1.0, std::f64::consts::SQRT_2).unwrap();
        let v = classify_strict(&CanonicalBc::from_reals(2.0, 0.0, 0.0, 0.5), &w).unwrap();
        assert_eq!(v.case, StrictCase::QuasiPeriodicIncommensurable);
        assert_eq!(v.verdict, Verdict::YesAnalytic);
    }

    #[test]
    fn adjoint_of_separated_swap_is_the_swap() {
        let w = DiracWeights::dirac();
        let adj = adjoint_bc(&CanonicalBc::from_reals(0.0, 1.0, 1.0, 0.0), &w);
        let expect = [[0.0, 0.0, 1.0, 1.0], [1.0, 1.0, 0.0, 0.0]];
        for (row, erow) in adj.rows().iter().zip(expect) {
            for (got, want) in row.iter().zip(erow) {
                assert!((got - C64::from(want)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn adjoint_is_an_involution_on_regular_conditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let bc = random_bc(&mut rng);
            if !is_regular(&bc) {
                continue;
            }
            let w = DiracWeights::new(-rng.gen_range(0.3..2.0), rng.gen_range(0.3..2.0)).unwrap();
            let adj = canonicalize(&adjoint_bc(&bc, &w)).unwrap();
            let back = canonicalize(&adjoint_bc(&adj, &w)).unwrap();
            assert!((back.a - bc.a).norm() < 1e-12);
            assert!((back.b - bc.b).norm() < 1e-12);
            assert!((back.c - bc.c).norm() < 1e-12);
            assert!((back.d - bc.d).norm() < 1e-12);
            // The doubly-adjoint functionals span the same nullspace: the
            // stacked 4x4 functional matrix stays rank two.
            let doubled = adjoint_bc(&adj, &w);
            assert_eq!(stacked_rank(&bc.rows(), doubled.rows()), 2);
        }
    }

    fn stacked_rank(top: &[[C64; 4]; 2], bottom: &[[C64; 4]; 2]) -> usize {
        let mut m: Vec<[C64; 4]> = top.iter().chain(bottom.iter()).copied().collect();
        let mut rank = 0;
        for col in 0..4 {
            let pivot = (rank..m.len()).max_by(|&i, &j| {
                m[i][col].norm().partial_cmp(&m[j][col].norm()).unwrap()
            });
            let Some(p) = pivot else { break };
            if m[p][col].norm() < 1e-8 {
                continue;
            }
            m.swap(rank, p);
            for i in (rank + 1)..m.len() {
                let f = m[i][col] / m[rank][col];
                for c in col..4 {
                    let sub = f * m[rank][c];
                    m[i][c] -= sub;
                }
            }
            rank += 1;
        }
        rank
    }

    fn random_bc(rng: &mut ChaCha8Rng) -> CanonicalBc {
        let mut z = || C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        CanonicalBc::new(z(), z(), z(), z())
    }

    /// Draw from the closed-form family of self-adjoint coefficient tuples.
    fn random_self_adjoint(rng: &mut ChaCha8Rng, beta: f64) -> CanonicalBc {
        let t: f64 = rng.gen_range(0.0..1.0);
        let phase = |r: &mut ChaCha8Rng| {
            let th: f64 = r.gen_range(0.0..std::f64::consts::TAU);
            C64::new(th.cos(), th.sin())
        };
        let a = t * phase(rng);
        let b = ((1.0 - t * t) / beta).sqrt() * phase(rng);
        let u = phase(rng);
        let c = -beta * b.conj() * u;
        let d = a.conj() * u;
        CanonicalBc::new(a, b, c, d)
    }

    #[test]
    fn self_adjointness_examples() {
        let w = DiracWeights::dirac();
        assert!(is_self_adjoint(&CanonicalBc::from_reals(0.0, 1.0, 1.0, 0.0), &w).unwrap());
        assert!(is_self_adjoint(&CanonicalBc::from_reals(1.0, 0.0, 0.0, 1.0), &w).unwrap());
        let w2 = DiracWeights::new(-0.7, 1.9).unwrap();
        assert!(is_self_adjoint(&CanonicalBc::from_reals(1.0, 0.0, 0.0, 1.0), &w2).unwrap());
        assert!(!is_self_adjoint(&CanonicalBc::from_reals(2.0, 0.0, 0.0, 0.5), &w).unwrap());
    }

    #[test]
    fn self_adjoint_criteria_agree_on_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..200 {
            let b2 = rng.gen_range(0.2..3.0);
            let b1 = -rng.gen_range(0.2..3.0);
            let w = DiracWeights::new(b1, b2).unwrap();
            let bc = if i % 2 == 0 {
                random_bc(&mut rng)
            } else {
                random_self_adjoint(&mut rng, w.beta())
            };
            let verdict = is_self_adjoint(&bc, &w).expect("criteria must agree");
            if i % 2 == 1 {
                assert!(verdict, "constructed sample must be self-adjoint");
            }
        }
    }

    #[test]
    fn self_adjoint_conditions_equal_their_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let w = DiracWeights::new(-rng.gen_range(0.3..2.0), rng.gen_range(0.3..2.0)).unwrap();
            let bc = random_self_adjoint(&mut rng, w.beta());
            if !is_regular(&bc) {
                continue;
            }
            let adj = canonicalize(&adjoint_bc(&bc, &w)).unwrap();
            assert!((adj.a - bc.a).norm() < 1e-10);
            assert!((adj.b - bc.b).norm() < 1e-10);
            assert!((adj.c - bc.c).norm() < 1e-10);
            assert!((adj.d - bc.d).norm() < 1e-10);
        }
    }

    #[test]
    fn rank_validation_rejects_dependent_rows() {
        let row = [c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)];
        let doubled = [row, row.map(|z| 3.0 * z)];
        assert!(matches!(RawBc::new(doubled), Err(BcError::RankDeficient)));
    }
}
