//! Upper bounds on Hausdorff content and the necessary-direction check
//! `σ(E) ≤ C (H^{n−α}(E))^q` on finite unions of balls and boxes.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{self, AxisBox};
use crate::measure::DiscreteMeasure;

/// Largest dyadic cover enumerated per piece.
const MAX_COVER: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub enum SetPiece {
    /// Closed ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// Closed box.
    Box(AxisBox),
}

impl SetPiece {
    fn dim(&self) -> usize {
        match self {
            SetPiece::Ball { center, .. } => center.len(),
            SetPiece::Box(b) => b.dim(),
        }
    }

    fn bounding_box(&self) -> AxisBox {
        match self {
            SetPiece::Ball { center, radius } => AxisBox::cube(center, *radius),
            SetPiece::Box(b) => b.clone(),
        }
    }

    fn circumradius(&self) -> f64 {
        match self {
            SetPiece::Ball { radius, .. } => *radius,
            SetPiece::Box(b) => b.circumradius(),
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            SetPiece::Ball { center, radius } => geometry::euclidean_distance(center, p) <= *radius,
            SetPiece::Box(b) => b.contains_closed(p),
        }
    }

    fn intersects_box(&self, b: &AxisBox) -> bool {
        match self {
            SetPiece::Ball { center, radius } => b.distance_to(center) <= *radius,
            SetPiece::Box(other) => other.intersects(b),
        }
    }
}

fn check_pieces(e: &[SetPiece], n: usize) -> Result<()> {
    for p in e {
        if p.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: p.dim() });
        }
        if let SetPiece::Ball { radius, .. } = p {
            if !(*radius >= 0.0 && radius.is_finite()) {
                return Err(Error::InvalidParameter("ball radius must be finite and nonnegative".into()));
            }
        }
    }
    Ok(())
}

/// Number of closed dyadic cubes of `level` meeting the piece (counted over its
/// bounding box for boxes, and exactly for balls when the count is small).
fn dyadic_cover_count(p: &SetPiece, level: u32) -> f64 {
    let b = p.bounding_box();
    let scale = libm::ldexp(1.0, level as i32);
    let ranges: Vec<(i64, i64)> = (0..b.dim())
        .map(|i| {
            let lo = libm::floor(b.lo[i] * scale) as i64;
            let hi = (libm::ceil(b.hi[i] * scale) as i64 - 1).max(lo);
            (lo, hi)
        })
        .collect();
    let total: f64 = ranges.iter().map(|(l, h)| (h - l + 1) as f64).product();
    if matches!(p, SetPiece::Box(_)) || total > MAX_COVER {
        return total;
    }
    let side = 1.0 / scale;
    let mut count = 0.0;
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        let cube = AxisBox {
            lo: idx.iter().map(|&k| k as f64 * side).collect(),
            hi: idx.iter().map(|&k| (k + 1) as f64 * side).collect(),
        };
        if p.intersects_box(&cube) {
            count += 1.0;
        }
        let mut axis = 0;
        loop {
            if axis == idx.len() {
                return count;
            }
            idx[axis] += 1;
            if idx[axis] > ranges[axis].1 {
                idx[axis] = ranges[axis].0;
                axis += 1;
            } else {
                break;
            }
        }
    }
}

/// Upper bound on `H^{n−α}(E) = inf Σ r_i^{n−α}` over ball covers of `E`: the best of
/// the pieces' own circumscribed balls, one ball around everything, and per-piece
/// covers by dyadic cubes of levels `0..=depth` (each replaced by its circumscribed ball).
pub fn hausdorff_content_upper(e: &[SetPiece], n: usize, alpha: f64, depth: u32) -> Result<f64> {
    if !(alpha >= 0.0 && alpha < n as f64) {
        return Err(Error::InvalidParameter(alloc::format!("alpha must lie in [0, n), got {alpha}")));
    }
    check_pieces(e, n)?;
    if e.is_empty() {
        return Ok(0.0);
    }
    let s = n as f64 - alpha;
    let gauge = |r: f64| libm::pow(r, s);
    let own: f64 = e.iter().map(|p| gauge(p.circumradius())).sum();

    let mut lo = e[0].bounding_box().lo;
    let mut hi = e[0].bounding_box().hi;
    for p in &e[1..] {
        let b = p.bounding_box();
        for i in 0..n {
            lo[i] = lo[i].min(b.lo[i]);
            hi[i] = hi[i].max(b.hi[i]);
        }
    }
    let bounding = gauge(AxisBox { lo, hi }.circumradius());

    let mut dyadic = 0.0;
    for p in e {
        let mut best = gauge(p.circumradius());
        for level in 0..=depth {
            let count = dyadic_cover_count(p, level);
            let r = 0.5 * libm::sqrt(n as f64) * libm::ldexp(1.0, -(level as i32));
            best = best.min(count * gauge(r));
            if count > MAX_COVER {
                break;
            }
        }
        dyadic += best;
    }
    Ok(own.min(bounding).min(dyadic))
}

/// `σ(E)`. Exact when the pieces are pairwise disjoint and ball masses are exact
/// (dimension ≤ 2 or no cells); otherwise cells enter through their quadrature samples.
pub fn union_mass(sigma: &DiscreteMeasure, e: &[SetPiece]) -> Result<(f64, bool)> {
    check_pieces(e, sigma.dim())?;
    let disjoint = e.iter().enumerate().all(|(i, p)| {
        e[i + 1..].iter().all(|r| match (p, r) {
            (SetPiece::Ball { center: c1, radius: r1 }, SetPiece::Ball { center: c2, radius: r2 }) => {
                geometry::euclidean_distance(c1, c2) > r1 + r2
            }
            (SetPiece::Box(a), SetPiece::Box(b)) => a.overlap_volume(b) == 0.0 && !a.intersects(b),
            (SetPiece::Ball { .. }, SetPiece::Box(b)) | (SetPiece::Box(b), SetPiece::Ball { .. }) => {
                let ball = if let SetPiece::Ball { .. } = p { p } else { r };
                !ball.intersects_box(b)
            }
        })
    });
    if disjoint {
        let mut total = 0.0;
        let mut exact = true;
        for p in e {
            total += match p {
                SetPiece::Box(b) => sigma.box_mass(b)?,
                SetPiece::Ball { center, radius } => {
                    let (m, ex) = sigma.ball_mass(center, *radius)?;
                    exact &= ex;
                    m
                }
            };
        }
        return Ok((total, exact));
    }
    let atoms: f64 = sigma.atoms().iter().filter(|a| e.iter().any(|p| p.contains(&a.location))).map(|a| a.weight).sum();
    let cells: f64 = sigma
        .samples()
        .iter()
        .filter(|s| e.iter().any(|p| p.contains(&s.point)))
        .map(|s| s.pieces.iter().map(|(_, w)| w).sum::<f64>())
        .sum();
    let exact = sigma.cells().iter().all(|c| c.weight == 0.0);
    Ok((atoms + cells, exact))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrostmanEntry {
    pub sigma_mass: f64,
    pub mass_exact: bool,
    pub content_upper: f64,
    /// `σ(E) > C·(content upper bound)^q`; since the content is only bounded above,
    /// a flag is a genuine violation of the condition.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrostmanReport {
    pub constant: f64,
    pub entries: Vec<FrostmanEntry>,
}

impl FrostmanReport {
    pub fn any_flagged(&self) -> bool {
        self.entries.iter().any(|e| e.flagged)
    }
}

pub fn frostman_condition_check(
    sigma: &DiscreteMeasure,
    family: &[Vec<SetPiece>],
    q: f64,
    alpha: f64,
    constant: f64,
    depth: u32,
) -> Result<FrostmanReport> {
    crate::solver::check_q(q)?;
    let n = sigma.dim();
    let mut entries = Vec::with_capacity(family.len());
    for e in family {
        let (sigma_mass, mass_exact) = union_mass(sigma, e)?;
        let content_upper = hausdorff_content_upper(e, n, alpha, depth)?;
        let flagged = sigma_mass > constant * libm::pow(content_upper, q) * (1.0 + 1e-12);
        entries.push(FrostmanEntry { sigma_mass, mass_exact, content_upper, flagged });
    }
    Ok(FrostmanReport { constant, entries })
}
