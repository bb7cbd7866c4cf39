//! Exact sups over intervals on the line.
//!
//! Between consecutive breakpoints (atoms, cell ends, the query point) the mass of
//! `[a, b]` is affine in each endpoint. Then `mass/(b−a)^β` has no interior
//! maximum in either endpoint (any stationary point is a minimum), and a ratio of
//! two affine functions is monotone, so both sups are attained at breakpoints or
//! as one-sided limits there.

use alloc::vec::Vec;

use crate::measure::DiscreteMeasure;

/// Cumulative distribution of a measure on the line, exact between breakpoints.
#[derive(Debug, Clone)]
pub(crate) struct LineProfile {
    pts: Vec<f64>,
    /// `ν((−∞, p_k))`.
    open: Vec<f64>,
    /// `ν((−∞, p_k])`.
    closed: Vec<f64>,
    /// Cell density on `(p_k, p_{k+1})`.
    density: Vec<f64>,
    total: f64,
}

impl LineProfile {
    pub(crate) fn new(m: &DiscreteMeasure) -> Self {
        let mut pts: Vec<f64> = m.atoms().iter().filter(|a| a.weight > 0.0).map(|a| a.location[0]).collect();
        for c in m.cells().iter().filter(|c| c.weight > 0.0) {
            pts.push(c.cell.lo[0]);
            pts.push(c.cell.hi[0]);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let n = pts.len();
        let mut atom = alloc::vec![0.0; n];
        for a in m.atoms().iter().filter(|a| a.weight > 0.0) {
            let k = pts.binary_search_by(|p| p.total_cmp(&a.location[0])).expect("atom is a breakpoint");
            atom[k] += a.weight;
        }
        // density changes at cell ends
        let mut delta = alloc::vec![0.0; n];
        for c in m.cells().iter().filter(|c| c.weight > 0.0) {
            let rho = c.weight / (c.cell.hi[0] - c.cell.lo[0]);
            let lo = pts.binary_search_by(|p| p.total_cmp(&c.cell.lo[0])).expect("cell end is a breakpoint");
            let hi = pts.binary_search_by(|p| p.total_cmp(&c.cell.hi[0])).expect("cell end is a breakpoint");
            delta[lo] += rho;
            delta[hi] -= rho;
        }
        let mut density = alloc::vec![0.0; n];
        let mut open = alloc::vec![0.0; n];
        let mut closed = alloc::vec![0.0; n];
        let mut rho = 0.0;
        let mut run = 0.0;
        for k in 0..n {
            open[k] = run;
            run += atom[k];
            closed[k] = run;
            rho += delta[k];
            density[k] = if k + 1 < n { rho.max(0.0) } else { 0.0 };
            if k + 1 < n {
                run += density[k] * (pts[k + 1] - pts[k]);
            }
        }
        LineProfile { pts, open, closed, density, total: run }
    }

    pub(crate) fn breakpoints(&self) -> &[f64] {
        &self.pts
    }

    pub(crate) fn total(&self) -> f64 {
        self.total
    }

    /// `ν((−∞, t])` if `closed`, else `ν((−∞, t))`.
    pub(crate) fn upto(&self, t: f64, closed: bool) -> f64 {
        match self.pts.binary_search_by(|p| p.total_cmp(&t)) {
            Ok(k) => {
                if closed {
                    self.closed[k]
                } else {
                    self.open[k]
                }
            }
            Err(0) => 0.0,
            Err(k) if k == self.pts.len() => self.total,
            Err(k) => self.closed[k - 1] + self.density[k - 1] * (t - self.pts[k - 1]),
        }
    }

    /// Mass of the interval from `a` to `b`, each end closed or open.
    pub(crate) fn mass(&self, a: f64, a_closed: bool, b: f64, b_closed: bool) -> f64 {
        (self.upto(b, b_closed) - self.upto(a, !a_closed)).max(0.0)
    }

    /// Point mass at `t`.
    pub(crate) fn atom_at(&self, t: f64) -> f64 {
        match self.pts.binary_search_by(|p| p.total_cmp(&t)) {
            Ok(k) => self.closed[k] - self.open[k],
            Err(_) => 0.0,
        }
    }
}

fn candidates(x: f64, pts: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut left: Vec<f64> = pts.iter().copied().filter(|&p| p < x).collect();
    left.push(x);
    let mut right = alloc::vec![x];
    right.extend(pts.iter().copied().filter(|&p| p > x));
    // nearest first
    left.reverse();
    (left, right)
}

/// `sup_{a ≤ x ≤ b} ν([a, b]) / (b − a)^β` for `β ∈ (0, 1]`.
pub(crate) fn uncentered_frac(profile: &LineProfile, x: f64, beta: f64) -> f64 {
    if profile.atom_at(x) > 0.0 {
        return f64::INFINITY;
    }
    let (left, right) = candidates(x, profile.breakpoints());
    let mut best = 0.0f64;
    for &a in &left {
        // every interval from here on is at least this long
        if a < x && profile.total() / libm::pow(x - a, beta) <= best {
            break;
        }
        let base = profile.upto(a, false);
        for &b in &right {
            let len = b - a;
            if len <= 0.0 {
                continue;
            }
            let lb = libm::pow(len, beta);
            let rest = profile.total() - base;
            if rest / lb <= best {
                break;
            }
            let v = (profile.upto(b, true) - base).max(0.0) / lb;
            if v > best {
                best = v;
            }
        }
    }
    best
}

/// `sup_{a ≤ x ≤ b} ν(I) / σ(I)` over intervals `I` with ends `a, b`, including
/// one-sided limits at breakpoints. `0/0` is skipped and `c/0 = ∞` for `c > 0`.
pub(crate) fn uncentered_ratio(nu: &LineProfile, sigma: &LineProfile, x: f64) -> f64 {
    let mut pts: Vec<f64> = nu.breakpoints().iter().chain(sigma.breakpoints()).copied().collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let (left, right) = candidates(x, &pts);
    let mut best = 0.0f64;
    let mut consider = |n: f64, s: f64| {
        if s > 0.0 {
            best = best.max(n / s);
        } else if n > 0.0 {
            best = f64::INFINITY;
        }
    };
    // shrinking intervals around x
    let (na, sa) = (nu.atom_at(x), sigma.atom_at(x));
    if na > 0.0 || sa > 0.0 {
        consider(na, sa);
    } else {
        let l = left.get(1).copied().unwrap_or(x - 1.0);
        let r = right.get(1).copied().unwrap_or(x + 1.0);
        let (dl, dr) = ((x - l) * 0.5, (r - x) * 0.5);
        let d = dl.min(dr);
        consider(nu.mass(x - d, true, x + d, true), sigma.mass(x - d, true, x + d, true));
    }
    for &a in &left {
        for &b in &right {
            if b <= a {
                continue;
            }
            for a_closed in [true, false] {
                if !a_closed && a == x {
                    continue;
                }
                for b_closed in [true, false] {
                    if !b_closed && b == x {
                        continue;
                    }
                    consider(nu.mass(a, a_closed, b, b_closed), sigma.mass(a, a_closed, b, b_closed));
                }
            }
        }
    }
    best
}
