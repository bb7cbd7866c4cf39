//! Boxes, balls and the few closed-form volumes the measure code relies on.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Axis-aligned box `[lo_1, hi_1] × ... × [lo_n, hi_n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    /// Builds a box, requiring `lo < hi` in every coordinate.
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        if lo.is_empty() {
            return Err(Error::InvalidParameter("box must have at least one coordinate".into()));
        }
        for (l, h) in lo.iter().zip(&hi) {
            if !(l.is_finite() && h.is_finite() && l < h) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "box bounds must satisfy lo < hi, got [{l}, {h}]"
                )));
            }
        }
        Ok(AxisBox { lo, hi })
    }

    /// Box with possibly degenerate sides (`lo ≤ hi`). Used for query boxes.
    pub fn closed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l <= h)) {
            return Err(Error::InvalidParameter("box bounds must satisfy lo <= hi".into()));
        }
        Ok(AxisBox { lo, hi })
    }

    pub fn cube(center: &[f64], half_side: f64) -> Self {
        AxisBox {
            lo: center.iter().map(|c| c - half_side).collect(),
            hi: center.iter().map(|c| c + half_side).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    pub fn contains_closed(&self, p: &[f64]) -> bool {
        p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (l, h))| l <= x && x <= h)
    }

    pub fn contains_half_open(&self, p: &[f64]) -> bool {
        p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (l, h))| l <= x && x < h)
    }

    /// Lebesgue measure of `self ∩ other`.
    pub fn overlap_volume(&self, other: &AxisBox) -> f64 {
        let mut v = 1.0;
        for i in 0..self.dim() {
            let lo = self.lo[i].max(other.lo[i]);
            let hi = self.hi[i].min(other.hi[i]);
            if hi <= lo {
                return 0.0;
            }
            v *= hi - lo;
        }
        v
    }

    pub fn intersects(&self, other: &AxisBox) -> bool {
        (0..self.dim()).all(|i| self.lo[i] <= other.hi[i] && other.lo[i] <= self.hi[i])
    }

    /// Radius of the circumscribed ball (half the diagonal).
    pub fn circumradius(&self) -> f64 {
        0.5 * libm::sqrt(self.lo.iter().zip(&self.hi).map(|(l, h)| (h - l) * (h - l)).sum())
    }

    /// Euclidean distance from `p` to the box (0 inside).
    pub fn distance_to(&self, p: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim() {
            let d = if p[i] < self.lo[i] {
                self.lo[i] - p[i]
            } else if p[i] > self.hi[i] {
                p[i] - self.hi[i]
            } else {
                0.0
            };
            s += d * d;
        }
        libm::sqrt(s)
    }

    /// Splits the box into `2^level` equal parts per axis.
    pub fn dyadic_children(&self, level: u32) -> Vec<AxisBox> {
        let parts = 1usize << level;
        let n = self.dim();
        let total = parts.pow(n as u32);
        let mut out = Vec::with_capacity(total);
        for idx in 0..total {
            let mut rem = idx;
            let mut lo = Vec::with_capacity(n);
            let mut hi = Vec::with_capacity(n);
            for i in 0..n {
                let k = rem % parts;
                rem /= parts;
                let h = (self.hi[i] - self.lo[i]) / parts as f64;
                lo.push(self.lo[i] + h * k as f64);
                hi.push(if k + 1 == parts { self.hi[i] } else { self.lo[i] + h * (k + 1) as f64 });
            }
            out.push(AxisBox { lo, hi });
        }
        out
    }
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

pub fn chebyshev_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| libm::fabs(x - y)).fold(0.0, f64::max)
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    libm::pow(PI, half) / libm::tgamma(half + 1.0)
}

/// Surface area of the unit sphere in `R^n`.
pub fn unit_sphere_area(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    2.0 * libm::pow(PI, half) / libm::tgamma(half)
}

/// Area of the disk of radius `r` centred at `center` intersected with the rectangle.
pub fn disk_rectangle_area(center: &[f64], r: f64, rect: &AxisBox) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let x0 = rect.lo[0] - center[0];
    let x1 = rect.hi[0] - center[0];
    let y0 = rect.lo[1] - center[1];
    let y1 = rect.hi[1] - center[1];
    let a = quadrant_area(x1, y1, r) - quadrant_area(x0, y1, r) - quadrant_area(x1, y0, r)
        + quadrant_area(x0, y0, r);
    a.clamp(0.0, PI * r * r)
}

/// Area of `{|p| ≤ r} ∩ {p_x ≤ x, p_y ≤ y}`.
fn quadrant_area(x: f64, y: f64, r: f64) -> f64 {
    if x <= -r || y <= -r {
        return 0.0;
    }
    let x = x.min(r);
    let y = y.min(r);
    let c = libm::sqrt((r * r - y * y).max(0.0));
    // ∫_a^b sqrt(r² - t²) dt over [a, b] ∩ [-r, x]
    let arc = |a: f64, b: f64| -> f64 {
        let b = b.min(x);
        if b <= a {
            return 0.0;
        }
        half_disk_primitive(b, r) - half_disk_primitive(a, r)
    };
    let flat = |a: f64, b: f64| -> f64 {
        let b = b.min(x);
        if b <= a {
            0.0
        } else {
            b - a
        }
    };
    if y >= 0.0 {
        2.0 * arc(-r, -c) + (y * flat(-c, c) + arc(-c, c)) + 2.0 * arc(c, r)
    } else {
        y * flat(-c, c) + arc(-c, c)
    }
}

fn half_disk_primitive(t: f64, r: f64) -> f64 {
    let t = t.clamp(-r, r);
    let s = libm::sqrt((r * r - t * t).max(0.0));
    0.5 * (t * s + r * r * libm::asin((t / r).clamp(-1.0, 1.0)))
}
