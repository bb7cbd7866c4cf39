//! Centered balls and cubes, and the cube family behind the uncentered approximation.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{self, AxisBox};
use crate::measure::DiscreteMeasure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Shape {
    Cube,
    Ball,
}

const SCAN_POINTS: usize = 16;
const GOLDEN_STEPS: usize = 80;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Centered<'a> {
    pub x: &'a [f64],
    pub shape: Shape,
}

impl Centered<'_> {
    fn dim(&self) -> usize {
        self.x.len()
    }

    fn distance(&self, p: &[f64]) -> f64 {
        match self.shape {
            Shape::Cube => geometry::chebyshev_distance(self.x, p),
            Shape::Ball => geometry::euclidean_distance(self.x, p),
        }
    }

    /// Volume of the shape of radius (half side) `r`.
    pub(crate) fn volume(&self, r: f64) -> f64 {
        let n = self.dim();
        match self.shape {
            Shape::Cube => libm::pow(2.0 * r, n as f64),
            Shape::Ball => geometry::unit_ball_volume(n) * libm::pow(r, n as f64),
        }
    }

    pub(crate) fn check(&self, m: &DiscreteMeasure) -> Result<()> {
        if self.shape == Shape::Ball && self.dim() > 2 && m.cells().iter().any(|c| c.weight > 0.0) {
            return Err(Error::ModeUnavailable { mode: "centered balls with cells", dim: self.dim() });
        }
        Ok(())
    }

    /// Mass of the shape of radius `r`; atoms on the boundary count only if `closed`.
    pub(crate) fn mass(&self, m: &DiscreteMeasure, r: f64, closed: bool) -> f64 {
        let mut total = 0.0;
        for a in m.atoms().iter().filter(|a| a.weight > 0.0) {
            let d = self.distance(&a.location);
            if d < r || (closed && d == r) {
                total += a.weight;
            }
        }
        for c in m.cells().iter().filter(|c| c.weight > 0.0) {
            let part = match (self.shape, self.dim()) {
                (Shape::Cube, _) | (Shape::Ball, 1) => c.cell.overlap_volume(&AxisBox::cube(self.x, r)),
                (Shape::Ball, 2) => {
                    if c.cell.distance_to(self.x) >= r {
                        0.0
                    } else {
                        geometry::disk_rectangle_area(self.x, r, &c.cell)
                    }
                }
                _ => 0.0,
            };
            total += c.weight * part / c.cell.volume();
        }
        total
    }

    /// Radii where the mass function changes form.
    pub(crate) fn radii(&self, m: &DiscreteMeasure, out: &mut Vec<f64>) {
        for a in m.atoms().iter().filter(|a| a.weight > 0.0) {
            out.push(self.distance(&a.location));
        }
        for c in m.cells().iter().filter(|c| c.weight > 0.0) {
            for i in 0..self.dim() {
                out.push(libm::fabs(self.x[i] - c.cell.lo[i]));
                out.push(libm::fabs(self.x[i] - c.cell.hi[i]));
            }
            if self.shape == Shape::Ball && self.dim() == 2 {
                out.push(c.cell.distance_to(self.x));
                for corner in 0..4 {
                    let px = if corner & 1 == 0 { c.cell.lo[0] } else { c.cell.hi[0] };
                    let py = if corner & 2 == 0 { c.cell.lo[1] } else { c.cell.hi[1] };
                    out.push(geometry::euclidean_distance(self.x, &[px, py]));
                }
            }
        }
    }

    /// Mass varies smoothly (not just affinely) between radii.
    fn needs_line_search(&self, m: &DiscreteMeasure) -> bool {
        self.dim() > 1 && m.cells().iter().any(|c| c.weight > 0.0)
    }
}

fn sorted_radii(mut r: Vec<f64>) -> Vec<f64> {
    r.retain(|v| *v > 0.0 && v.is_finite());
    r.sort_by(f64::total_cmp);
    r.dedup();
    r
}

/// Maximizes `f` on `(lo, hi)` by a uniform scan followed by golden-section refinement.
fn line_search(lo: f64, hi: f64, f: &dyn Fn(f64) -> f64) -> f64 {
    let h = (hi - lo) / (SCAN_POINTS + 1) as f64;
    let mut best = (f64::NEG_INFINITY, lo);
    for i in 1..=SCAN_POINTS {
        let t = lo + h * i as f64;
        let v = f(t);
        if v > best.0 {
            best = (v, t);
        }
    }
    let (mut a, mut b) = ((best.1 - h).max(lo), (best.1 + h).min(hi));
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_STEPS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    best.0.max(fc).max(fd)
}

/// `sup_r ν(S(x, r)) / |S(x, r)|^{1−α/n}`.
pub(crate) fn centered_frac(c: Centered<'_>, nu: &DiscreteMeasure, alpha: f64) -> Result<f64> {
    c.check(nu)?;
    let n = c.dim() as f64;
    let expo = 1.0 - alpha / n;
    if nu.atoms().iter().any(|a| a.weight > 0.0 && c.distance(&a.location) == 0.0) {
        return Ok(f64::INFINITY);
    }
    let mut r = Vec::new();
    c.radii(nu, &mut r);
    let radii = sorted_radii(r);
    let value = |r: f64, closed: bool| c.mass(nu, r, closed) / libm::pow(c.volume(r), expo);
    let mut best = 0.0f64;
    for &r in &radii {
        best = best.max(value(r, true));
    }
    if c.needs_line_search(nu) {
        for w in radii.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if c.mass(nu, lo, true) == c.mass(nu, hi, false) {
                continue;
            }
            best = best.max(line_search(lo, hi, &|t| value(t, true)));
        }
    }
    Ok(best)
}

fn ratio(n: f64, s: f64) -> Option<f64> {
    if s > 0.0 {
        Some(n / s)
    } else if n > 0.0 {
        Some(f64::INFINITY)
    } else {
        None
    }
}

/// `sup_r ν(S(x, r)) / σ(S(x, r))`, with one-sided limits at every radius.
pub(crate) fn centered_ratio(c: Centered<'_>, nu: &DiscreteMeasure, sigma: &DiscreteMeasure) -> Result<f64> {
    c.check(nu)?;
    c.check(sigma)?;
    let mut r = Vec::new();
    c.radii(nu, &mut r);
    c.radii(sigma, &mut r);
    let radii = sorted_radii(r);
    let mut best = 0.0f64;
    let mut take = |v: Option<f64>| {
        if let Some(v) = v {
            best = best.max(v);
        }
    };
    // r → 0⁺: point masses at x, else the ratio is constant below the first radius
    let at = |m: &DiscreteMeasure| -> f64 {
        m.atoms().iter().filter(|a| a.weight > 0.0 && c.distance(&a.location) == 0.0).map(|a| a.weight).sum()
    };
    let (na, sa) = (at(nu), at(sigma));
    if na > 0.0 || sa > 0.0 {
        take(ratio(na, sa));
    } else if let Some(&r1) = radii.first() {
        take(ratio(c.mass(nu, 0.5 * r1, true), c.mass(sigma, 0.5 * r1, true)));
    }
    for &r in &radii {
        for closed in [true, false] {
            take(ratio(c.mass(nu, r, closed), c.mass(sigma, r, closed)));
        }
    }
    if c.needs_line_search(nu) || c.needs_line_search(sigma) {
        for w in radii.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let f = |t: f64| ratio(c.mass(nu, t, true), c.mass(sigma, t, true)).unwrap_or(0.0);
            best = best.max(line_search(lo, hi, &f));
        }
    }
    Ok(best)
}

/// Closed cubes containing `x`: side lengths from the centered radii (as half
/// sides and as full sides) and lower corners `x − s·j/R`, `j ∈ {0..R}^n`.
pub(crate) fn approx_cubes(x: &[f64], measures: &[&DiscreteMeasure], refinement: u32) -> Result<Vec<AxisBox>> {
    let c = Centered { x, shape: Shape::Cube };
    let mut r = Vec::new();
    for m in measures {
        c.radii(m, &mut r);
    }
    let mut sides: Vec<f64> = r.iter().flat_map(|&v| [v, 2.0 * v]).collect();
    sides = sorted_radii(core::mem::take(&mut sides));
    let res = 1usize << refinement.min(20);
    let n = x.len();
    let per_side = (res + 1)
        .checked_pow(n as u32)
        .filter(|&p| p.saturating_mul(sides.len()) <= 2_000_000)
        .ok_or(Error::InvalidParameter("uncentered approximation family is too large".into()))?;
    let mut out = Vec::with_capacity(per_side * sides.len());
    for &s in &sides {
        for idx in 0..per_side {
            let mut rem = idx;
            let mut lo = Vec::with_capacity(n);
            for xi in x {
                let j = rem % (res + 1);
                rem /= res + 1;
                lo.push(xi - s * j as f64 / res as f64);
            }
            let hi = lo.iter().map(|l| l + s).collect();
            out.push(AxisBox { lo, hi });
        }
    }
    Ok(out)
}
