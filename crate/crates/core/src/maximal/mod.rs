//! Maximal operators.
//!
//! * `M_αν(x) = sup_{S ∋ x} ν(S) / |S|^{1−α/n}` over a family of balls or cubes;
//! * `M_σν(x) = sup_{S ∋ x} ν(S) / σ(S)`;
//! * the dyadic `M_ρν(x) = sup_{Q ∋ x} ρ_Q ν(Q)`.
//!
//! Accuracy depends on the mode. Uncentered intervals in 1D and centered shapes
//! around atoms are exact. Centered shapes over cells in dimension ≥ 2 use a
//! bounded line search between consecutive radii. `UncenteredApprox` only
//! searches a finite family of cubes, so its value is a lower bound.

mod centered;
mod content;
mod dyadic;
mod iteration;
mod line;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;

use centered::{Centered, Shape};
use line::LineProfile;

pub use content::{frostman_condition_check, hausdorff_content_upper, union_mass, FrostmanEntry, FrostmanReport, SetPiece};
pub use dyadic::{
    dyadic_max, dyadic_test_function, dyadic_test_mass, dyadic_weak_constant_lower, dyadic_weak_constant_upper,
    weak_holder_constant, DyadicCube, DyadicMaximal, DyadicWeightMap,
};
pub use iteration::{
    maximal_apply, maximal_fixed_point, maximal_linearization, weak_embedding_estimate_maximal, WeakMaximalEstimate,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxQueryMode {
    CenteredBalls,
    CenteredCubes,
    /// Every interval containing `x`; dimension 1 only.
    UncenteredCubes1D,
    /// Closed cubes containing `x` with lower corners on a grid of `2^refinement`
    /// offsets per side length.
    UncenteredApprox(u32),
}

/// How much a returned value can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantics {
    Exact,
    /// Exact over the family up to a line search at relative accuracy about 1e-9.
    LineSearch,
    /// Maximum over a subfamily, hence a lower bound on the true value.
    LowerBound,
}

impl Semantics {
    pub fn as_str(self) -> &'static str {
        match self {
            Semantics::Exact => "exact",
            Semantics::LineSearch => "line-search",
            Semantics::LowerBound => "lower-bound",
        }
    }
}

impl MaxQueryMode {
    pub fn name(&self) -> &'static str {
        match self {
            MaxQueryMode::CenteredBalls => "centered-balls",
            MaxQueryMode::CenteredCubes => "centered-cubes",
            MaxQueryMode::UncenteredCubes1D => "uncentered-1d",
            MaxQueryMode::UncenteredApprox(_) => "uncentered-approx",
        }
    }

    /// Accuracy of this mode on `m`.
    pub fn semantics(&self, m: &DiscreteMeasure) -> Semantics {
        let cells = m.cells().iter().any(|c| c.weight > 0.0);
        match self {
            MaxQueryMode::UncenteredApprox(_) => Semantics::LowerBound,
            MaxQueryMode::CenteredBalls | MaxQueryMode::CenteredCubes if cells && m.dim() > 1 => Semantics::LineSearch,
            _ => Semantics::Exact,
        }
    }

    pub(crate) fn check(&self, n: usize) -> Result<()> {
        if *self == MaxQueryMode::UncenteredCubes1D && n != 1 {
            return Err(Error::ModeUnavailable { mode: "uncentered intervals", dim: n });
        }
        if let MaxQueryMode::UncenteredApprox(r) = self {
            if *r > 20 {
                return Err(Error::InvalidParameter(alloc::format!("refinement {r} exceeds 20")));
            }
        }
        Ok(())
    }
}

pub(crate) fn check_alpha(alpha: f64, n: usize) -> Result<()> {
    if alpha >= 0.0 && alpha < n as f64 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(alloc::format!("alpha must lie in [0, {n}), got {alpha}")))
    }
}

fn check_query(m: &DiscreteMeasure, x: &[f64]) -> Result<()> {
    if x.len() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: x.len() });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("query point must be finite".into()));
    }
    Ok(())
}

/// The centered interval reaching breakpoint `b`, with `b` itself as one endpoint so
/// that rounding in `x ± r` cannot drop an atom at `b`.
fn centered_span(x: f64, b: f64) -> (f64, f64, f64) {
    let r = libm::fabs(b - x);
    if b > x {
        (x - r, b, r)
    } else {
        (b, x + r, r)
    }
}

/// Centered intervals `[x − r, x + r]` from a profile, gauge `(2r)^β`. Mass is affine
/// in `r` between breakpoint distances, so the sup is attained at one of them.
pub(crate) fn centered_frac_1d(p: &LineProfile, x: f64, beta: f64) -> f64 {
    if p.atom_at(x) > 0.0 {
        return f64::INFINITY;
    }
    p.breakpoints()
        .iter()
        .filter(|&&b| b != x)
        .map(|&b| {
            let (lo, hi, r) = centered_span(x, b);
            p.mass(lo, true, hi, true) / libm::pow(2.0 * r, beta)
        })
        .fold(0.0, f64::max)
}

fn centered_ratio_1d(nu: &LineProfile, sigma: &LineProfile, x: f64) -> f64 {
    let mut ends: Vec<f64> = nu.breakpoints().iter().chain(sigma.breakpoints()).copied().filter(|&b| b != x).collect();
    ends.sort_by(f64::total_cmp);
    ends.dedup();
    let mut best = 0.0f64;
    let mut take = |n: f64, s: f64| {
        if s > 0.0 {
            best = best.max(n / s);
        } else if n > 0.0 {
            best = f64::INFINITY;
        }
    };
    let (na, sa) = (nu.atom_at(x), sigma.atom_at(x));
    if na > 0.0 || sa > 0.0 {
        take(na, sa);
    } else if let Some(r1) = ends.iter().map(|&b| libm::fabs(b - x)).min_by(f64::total_cmp) {
        let r = 0.5 * r1;
        take(nu.mass(x - r, true, x + r, true), sigma.mass(x - r, true, x + r, true));
    }
    for &b in &ends {
        let (lo, hi, _) = centered_span(x, b);
        for closed in [true, false] {
            take(nu.mass(lo, closed, hi, closed), sigma.mass(lo, closed, hi, closed));
        }
    }
    best
}

/// `M_αν(x)` over the family selected by `mode`, each shape `S` weighted by
/// `|S|^{α/n − 1}` with its own Lebesgue volume.
pub fn frac_max(nu: &DiscreteMeasure, alpha: f64, x: &[f64], mode: MaxQueryMode) -> Result<f64> {
    let n = nu.dim();
    check_alpha(alpha, n)?;
    mode.check(n)?;
    check_query(nu, x)?;
    let beta = 1.0 - alpha / n as f64;
    match mode {
        MaxQueryMode::UncenteredCubes1D => Ok(line::uncentered_frac(&LineProfile::new(nu), x[0], beta)),
        MaxQueryMode::CenteredBalls | MaxQueryMode::CenteredCubes if n == 1 => {
            Ok(centered_frac_1d(&LineProfile::new(nu), x[0], beta))
        }
        MaxQueryMode::CenteredBalls => centered::centered_frac(Centered { x, shape: Shape::Ball }, nu, alpha),
        MaxQueryMode::CenteredCubes => centered::centered_frac(Centered { x, shape: Shape::Cube }, nu, alpha),
        MaxQueryMode::UncenteredApprox(refinement) => {
            let mut best = if n == 1 {
                centered_frac_1d(&LineProfile::new(nu), x[0], beta)
            } else {
                centered::centered_frac(Centered { x, shape: Shape::Cube }, nu, alpha)?
            };
            if best.is_infinite() {
                return Ok(best);
            }
            for q in centered::approx_cubes(x, &[nu], refinement)? {
                let v = q.volume();
                if v > 0.0 {
                    best = best.max(nu.box_mass(&q)? / libm::pow(v, beta));
                }
            }
            Ok(best)
        }
    }
}

/// `M_σν(x) = sup ν(S)/σ(S)` over the mode's family. Shapes with `σ(S) = ν(S) = 0`
/// are skipped, `ν(S) > 0 = σ(S)` gives `+∞`.
pub fn measure_max(nu: &DiscreteMeasure, sigma: &DiscreteMeasure, x: &[f64], mode: MaxQueryMode) -> Result<f64> {
    let n = sigma.dim();
    if nu.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: nu.dim() });
    }
    if sigma.is_zero() {
        return Err(Error::InvalidParameter("the normalizing measure must not vanish".into()));
    }
    mode.check(n)?;
    check_query(sigma, x)?;
    match mode {
        MaxQueryMode::UncenteredCubes1D => {
            Ok(line::uncentered_ratio(&LineProfile::new(nu), &LineProfile::new(sigma), x[0]))
        }
        MaxQueryMode::CenteredBalls | MaxQueryMode::CenteredCubes if n == 1 => {
            Ok(centered_ratio_1d(&LineProfile::new(nu), &LineProfile::new(sigma), x[0]))
        }
        MaxQueryMode::CenteredBalls => centered::centered_ratio(Centered { x, shape: Shape::Ball }, nu, sigma),
        MaxQueryMode::CenteredCubes => centered::centered_ratio(Centered { x, shape: Shape::Cube }, nu, sigma),
        MaxQueryMode::UncenteredApprox(refinement) => {
            let mut best = if n == 1 {
                centered_ratio_1d(&LineProfile::new(nu), &LineProfile::new(sigma), x[0])
            } else {
                centered::centered_ratio(Centered { x, shape: Shape::Cube }, nu, sigma)?
            };
            for q in centered::approx_cubes(x, &[nu, sigma], refinement)? {
                let (a, b) = (nu.box_mass(&q)?, sigma.box_mass(&q)?);
                if b > 0.0 {
                    best = best.max(a / b);
                } else if a > 0.0 {
                    best = f64::INFINITY;
                }
            }
            Ok(best)
        }
    }
}
