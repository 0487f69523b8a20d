//! Zero counting and location for analytic functions by the argument
//! principle: adaptive phase tracking along rectangle and circle boundaries,
//! recursive subdivision, and safeguarded Newton refinement.

use crate::C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ContourError {
    /// The function is numerically zero on (or too close to) the integration
    /// path. The caller should perturb the path and retry.
    #[error("function vanishes on the integration contour")]
    ZeroOnBoundary,
    /// Phase accounting failed to close up to an integer winding, or child
    /// counts did not sum to the parent count after all retries.
    #[error("winding-number accounting is inconsistent")]
    WindingInconsistent,
    /// Phase tracking exceeded the subdivision depth limit.
    #[error("phase tracking exceeded the subdivision depth limit")]
    TooDeep,
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Rect {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Self {
        assert!(re.0 < re.1 && im.0 < im.1, "rectangle must have positive area");
        Self { re, im }
    }

    pub fn center(&self) -> C64 {
        C64::new((self.re.0 + self.re.1) / 2.0, (self.im.0 + self.im.1) / 2.0)
    }

    pub fn width(&self) -> f64 {
        self.re.1 - self.re.0
    }

    pub fn height(&self) -> f64 {
        self.im.1 - self.im.0
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, z: C64, margin: f64) -> bool {
        z.re >= self.re.0 - margin
            && z.re <= self.re.1 + margin
            && z.im >= self.im.0 - margin
            && z.im <= self.im.1 + margin
    }

    /// Corner points in positive orientation, starting at the lower left.
    fn corners(&self) -> [C64; 4] {
        [
            C64::new(self.re.0, self.im.0),
            C64::new(self.re.1, self.im.0),
            C64::new(self.re.1, self.im.1),
            C64::new(self.re.0, self.im.1),
        ]
    }

    /// Split across the longer axis at the given fraction of that axis.
    fn split(&self, frac: f64) -> (Rect, Rect) {
        if self.width() >= self.height() {
            let xm = self.re.0 + frac * self.width();
            (Rect::new((self.re.0, xm), self.im), Rect::new((xm, self.re.1), self.im))
        } else {
            let ym = self.im.0 + frac * self.height();
            (Rect::new(self.re, (self.im.0, ym)), Rect::new(self.re, (ym, self.im.1)))
        }
    }
}

/// Relative floor under which a boundary sample counts as "on a zero".
const BOUNDARY_FLOOR: f64 = 1e-13;
/// Maximum bisection depth while tracking the phase along one segment.
const MAX_PHASE_DEPTH: u32 = 40;
/// Split fractions tried in turn when a split line lands on a zero.
const SPLIT_LADDER: [f64; 6] = [0.5, 0.5137, 0.4729, 0.5533, 0.4281, 0.6151];

/// Change of `arg f` along the straight segment from `z0` to `z1`, by
/// bisection until each step turns by less than a quarter turn.
fn phase_change<F: Fn(C64) -> C64>(
    f: &F,
    z0: C64,
    z1: C64,
    f0: C64,
    f1: C64,
    floor: f64,
    depth: u32,
) -> Result<f64, ContourError> {
    if f0.norm() <= floor || f1.norm() <= floor {
        return Err(ContourError::ZeroOnBoundary);
    }
    let step = (f1 / f0).arg();
    if step.abs() < std::f64::consts::FRAC_PI_2 {
        return Ok(step);
    }
    if depth >= MAX_PHASE_DEPTH {
        return Err(ContourError::TooDeep);
    }
    let zm = (z0 + z1) / 2.0;
    let fm = f(zm);
    Ok(phase_change(f, z0, zm, f0, fm, floor, depth + 1)?
        + phase_change(f, zm, z1, fm, f1, floor, depth + 1)?)
}

/// Winding number of `f` around a closed polyline through `nodes` (the last
/// node connects back to the first). `samples_per_segment` sets the initial
/// resolution on each segment; `scale` anchors the zero-detection floor.
fn winding_closed_path<F: Fn(C64) -> C64>(
    f: &F,
    nodes: &[C64],
    samples_per_segment: &[usize],
    scale: f64,
) -> Result<i64, ContourError> {
    assert_eq!(nodes.len(), samples_per_segment.len());
    // Initial sample pass: establishes the magnitude scale on the path.
    let mut points = Vec::new();
    for (k, &start) in nodes.iter().enumerate() {
        let end = nodes[(k + 1) % nodes.len()];
        let n = samples_per_segment[k].max(2);
        for i in 0..n {
            let t = i as f64 / n as f64;
            points.push(start + (end - start) * t);
        }
    }
    let values: Vec<C64> = points.iter().map(|&z| f(z)).collect();
    let path_max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let floor = BOUNDARY_FLOOR * path_max.max(scale);

    let mut total = 0.0;
    for i in 0..points.len() {
        let j = (i + 1) % points.len();
        total += phase_change(f, points[i], points[j], values[i], values[j], floor, 0)?;
    }
    let turns = total / std::f64::consts::TAU;
    let w = turns.round();
    if (turns - w).abs() > 0.25 {
        return Err(ContourError::WindingInconsistent);
    }
    Ok(w as i64)
}

/// Number of zeros (with multiplicity) of `f` inside `rect`. `freq` bounds
/// the phase rate of `f` per unit length and controls initial sampling;
/// `scale` anchors the on-boundary zero floor.
pub fn winding_rect<F: Fn(C64) -> C64>(
    f: &F,
    rect: &Rect,
    freq: f64,
    scale: f64,
) -> Result<i64, ContourError> {
    let corners = rect.corners();
    let samples: Vec<usize> = (0..4)
        .map(|k| {
            let len = (corners[(k + 1) % 4] - corners[k]).norm();
            (4.0 + freq * len).ceil() as usize
        })
        .collect();
    winding_closed_path(f, &corners, &samples, scale)
}

/// Number of zeros (with multiplicity) of `f` inside the disk around
/// `center` of radius `radius`, approximated by a 32-gon with adaptive phase
/// tracking (exact for zero counting as long as no zero sits between the
/// polygon and the circle, which the jittered retries in callers absorb).
pub fn winding_disk<F: Fn(C64) -> C64>(
    f: &F,
    center: C64,
    radius: f64,
    freq: f64,
    scale: f64,
) -> Result<i64, ContourError> {
    let n = 32;
    let nodes: Vec<C64> = (0..n)
        .map(|k| {
            let th = std::f64::consts::TAU * k as f64 / n as f64;
            center + radius * C64::new(th.cos(), th.sin())
        })
        .collect();
    let per_seg = (2.0 + freq * radius * 0.2).ceil() as usize;
    winding_closed_path(f, &nodes, &vec![per_seg; n], scale)
}

/// Safeguarded Newton iteration for a simple zero. Returns the converged
/// zero, or `None` if the iteration stalls, leaves the guard region, or hits
/// a flat derivative.
pub fn newton<F, G>(f: &F, df: &G, start: C64, guard: &Rect, scale: f64) -> Option<C64>
where
    F: Fn(C64) -> C64,
    G: Fn(C64) -> C64,
{
    let mut z = start;
    let margin = guard.diameter();
    for _ in 0..60 {
        let fz = f(z);
        let dfz = df(z);
        if dfz.norm() * margin <= fz.norm() {
            // A full step would overshoot the guard region.
            return None;
        }
        let step = fz / dfz;
        z -= step;
        if !guard.contains(z, margin) {
            return None;
        }
        if step.norm() <= 1e-14 * (1.0 + z.norm()) {
            return (f(z).norm() <= 1e-10 * scale && guard.contains(z, 1e-9 * (1.0 + z.norm())))
                .then_some(z);
        }
    }
    None
}

/// A located zero: position, multiplicity, and whether it was resolved as an
/// unresolved cluster (center accurate only to the cluster tolerance).
#[derive(Debug, Clone, Copy)]
pub struct LocatedZero {
    pub z: C64,
    pub multiplicity: usize,
    pub clustered: bool,
}

/// Find all zeros of `f` in `rect` by winding-number subdivision.
///
/// Simple zeros are refined by Newton to near machine precision. Boxes that
/// shrink to `cluster_tol` while still holding `m > 1` zeros are reported as
/// one zero of multiplicity `m` at the box center.
pub fn zeros_in_rect<F, G>(
    f: &F,
    df: &G,
    rect: &Rect,
    freq: f64,
    scale: f64,
    cluster_tol: f64,
) -> Result<Vec<LocatedZero>, ContourError>
where
    F: Fn(C64) -> C64,
    G: Fn(C64) -> C64,
{
    let count = winding_rect(f, rect, freq, scale)?;
    if count < 0 {
        return Err(ContourError::WindingInconsistent);
    }
    let mut out = Vec::new();
    subdivide(f, df, rect, count as usize, freq, scale, cluster_tol, 0, &mut out)?;
    out.sort_by(|p, q| (p.z.re, p.z.im).partial_cmp(&(q.z.re, q.z.im)).unwrap());
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn subdivide<F, G>(
    f: &F,
    df: &G,
    rect: &Rect,
    count: usize,
    freq: f64,
    scale: f64,
    cluster_tol: f64,
    depth: u32,
    out: &mut Vec<LocatedZero>,
) -> Result<(), ContourError>
where
    F: Fn(C64) -> C64,
    G: Fn(C64) -> C64,
{
    if count == 0 {
        return Ok(());
    }
    if depth > 64 {
        return Err(ContourError::TooDeep);
    }
    if rect.diameter() <= cluster_tol {
        out.push(LocatedZero { z: rect.center(), multiplicity: count, clustered: count > 1 });
        return Ok(());
    }
    if count == 1 {
        if let Some(z) = newton(f, df, rect.center(), rect, scale) {
            out.push(LocatedZero { z, multiplicity: 1, clustered: false });
            return Ok(());
        }
        // Newton failed (e.g. the center sits near a stationary point):
        // fall through and shrink the box first.
    }
    for frac in SPLIT_LADDER {
        let (left, right) = rect.split(frac);
        let (wl, wr) = match (
            winding_rect(f, &left, freq, scale),
            winding_rect(f, &right, freq, scale),
        ) {
            (Ok(wl), Ok(wr)) => (wl, wr),
            // A zero sits on the split line (or tracking misbehaved there):
            // move the line and try again.
            _ => continue,
        };
        if wl < 0 || wr < 0 || (wl + wr) as usize != count {
            continue;
        }
        subdivide(f, df, &left, wl as usize, freq, scale, cluster_tol, depth + 1, out)?;
        subdivide(f, df, &right, wr as usize, freq, scale, cluster_tol, depth + 1, out)?;
        return Ok(());
    }
    Err(ContourError::WindingInconsistent)
}
