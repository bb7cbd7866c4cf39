//! Kernels `G(x, y) ≥ 0` and empirical probes of their structural constants.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{self, AxisBox};
use crate::key::PointKey;
use crate::measure::{DiscreteMeasure, Domain};

/// Tabulated kernel `G(x_i, x_j) = values[i][j]` on a finite point set.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixKernel {
    points: Vec<Vec<f64>>,
    values: Vec<Vec<f64>>,
    index: BTreeMap<PointKey, usize>,
}

impl MatrixKernel {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<Vec<f64>>) -> Result<Self> {
        let m = points.len();
        if m == 0 {
            return Err(Error::InvalidParameter("matrix kernel needs at least one point".into()));
        }
        let d = points[0].len();
        if d == 0 {
            return Err(Error::InvalidParameter("matrix kernel points need a coordinate".into()));
        }
        if values.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: values.len() });
        }
        let mut index = BTreeMap::new();
        for (i, p) in points.iter().enumerate() {
            if p.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: p.len() });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidParameter("matrix kernel points must be finite".into()));
            }
            if index.insert(PointKey::new(p), i).is_some() {
                return Err(Error::DuplicatePoint(p.clone()));
            }
        }
        for row in &values {
            if row.len() != m {
                return Err(Error::DimensionMismatch { expected: m, found: row.len() });
            }
            if let Some(v) = row.iter().find(|v| !(**v >= 0.0)) {
                return Err(Error::InvalidParameter(format!("kernel values must be nonnegative, got {v}")));
            }
        }
        Ok(MatrixKernel { points, values, index })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn position(&self, p: &[f64]) -> Result<usize> {
        self.index.get(&PointKey::new(p)).copied().ok_or_else(|| Error::MatrixLookup(p.to_vec()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelVariant {
    /// `min(x, y)` on `(0, ∞)`, the Green function of `-u''` with `u(0) = 0`, `u'(∞) = 0`.
    MinHalfLine,
    /// `|x − y|^{α−n}` on `R^n`, no normalizing constant.
    Riesz { n: usize, alpha: f64 },
    /// Poisson kernel pairing `(s, y) ∈ R^{n+1}_+` with a boundary point `t ∈ R^n`.
    PoissonHalfSpace { n: usize },
    /// `P(x − x̃, y + ỹ)` on `R^{n+1}_+ × R^{n+1}_+`, the kernel of `PP*`.
    SymmetrizedPoisson { n: usize },
    Matrix(MatrixKernel),
}

/// A kernel together with its declared quasi-symmetry constant `a` and weak
/// maximum principle constant `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    variant: KernelVariant,
    declared_a: f64,
    declared_h: f64,
    poisson_norm: f64,
}

/// `c_n = Γ((n+1)/2) / π^{(n+1)/2}`, making `∫ P(t, y) dt = 1`.
pub fn poisson_constant(n: usize) -> f64 {
    let half = (n as f64 + 1.0) / 2.0;
    libm::tgamma(half) / libm::pow(PI, half)
}

fn ipow(x: f64, k: usize) -> f64 {
    let mut r = 1.0;
    for _ in 0..k {
        r *= x;
    }
    r
}

impl KernelSpec {
    pub fn new(variant: KernelVariant, declared_a: f64, declared_h: f64) -> Result<Self> {
        if !(declared_a >= 1.0) || !(declared_h >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "declared constants must be >= 1, got a = {declared_a}, h = {declared_h}"
            )));
        }
        let poisson_norm = match &variant {
            KernelVariant::Riesz { n, alpha } => {
                if *n == 0 || !(*alpha > 0.0 && *alpha < *n as f64) {
                    return Err(Error::InvalidParameter(format!("Riesz kernel needs 0 < alpha < n, got {alpha}")));
                }
                0.0
            }
            KernelVariant::PoissonHalfSpace { n } | KernelVariant::SymmetrizedPoisson { n } => {
                if *n == 0 {
                    return Err(Error::InvalidParameter("boundary dimension must be positive".into()));
                }
                poisson_constant(*n)
            }
            _ => 0.0,
        };
        Ok(KernelSpec { variant, declared_a, declared_h, poisson_norm })
    }

    /// `min(x, y)`: symmetric, strong maximum principle (`a = h = 1`).
    pub fn min_half_line() -> Self {
        KernelSpec { variant: KernelVariant::MinHalfLine, declared_a: 1.0, declared_h: 1.0, poisson_norm: 0.0 }
    }

    /// Riesz kernel; `h` must be supplied by the caller.
    pub fn riesz(n: usize, alpha: f64, declared_h: f64) -> Result<Self> {
        Self::new(KernelVariant::Riesz { n, alpha }, 1.0, declared_h)
    }

    pub fn poisson(n: usize) -> Result<Self> {
        Self::new(KernelVariant::PoissonHalfSpace { n }, 1.0, 1.0)
    }

    /// `PP*` kernel with `h = 2^{n+1}`.
    pub fn pp_star(n: usize) -> Result<Self> {
        Self::new(KernelVariant::SymmetrizedPoisson { n }, 1.0, libm::pow(2.0, n as f64 + 1.0))
    }

    pub fn matrix(points: Vec<Vec<f64>>, values: Vec<Vec<f64>>, declared_a: f64, declared_h: f64) -> Result<Self> {
        Self::new(KernelVariant::Matrix(MatrixKernel::new(points, values)?), declared_a, declared_h)
    }

    pub fn variant(&self) -> &KernelVariant {
        &self.variant
    }

    pub fn declared_a(&self) -> f64 {
        self.declared_a
    }

    pub fn declared_h(&self) -> f64 {
        self.declared_h
    }

    pub fn name(&self) -> &'static str {
        match self.variant {
            KernelVariant::MinHalfLine => "min",
            KernelVariant::Riesz { .. } => "riesz",
            KernelVariant::PoissonHalfSpace { .. } => "poisson",
            KernelVariant::SymmetrizedPoisson { .. } => "ppstar",
            KernelVariant::Matrix(_) => "matrix",
        }
    }

    pub fn matrix_kernel(&self) -> Option<&MatrixKernel> {
        match &self.variant {
            KernelVariant::Matrix(m) => Some(m),
            _ => None,
        }
    }

    /// Whether measures on `domain` can be integrated against this kernel.
    pub fn accepts(&self, domain: Domain) -> bool {
        match (&self.variant, domain) {
            (KernelVariant::MinHalfLine, Domain::HalfLine) => true,
            (KernelVariant::Riesz { n, .. }, Domain::Euclidean(m)) => *n == m,
            (KernelVariant::Riesz { n: 1, .. }, Domain::HalfLine) => true,
            (KernelVariant::PoissonHalfSpace { n }, Domain::Euclidean(m) | Domain::UpperHalfSpace(m)) => *n == m,
            (KernelVariant::SymmetrizedPoisson { n }, Domain::UpperHalfSpace(m)) => *n == m,
            (KernelVariant::Matrix(mk), d) => mk.dim() == d.dim(),
            _ => false,
        }
    }

    pub fn check_domain(&self, domain: Domain) -> Result<()> {
        if self.accepts(domain) {
            Ok(())
        } else {
            Err(Error::DomainMismatch { kernel: self.name(), domain: domain.name() })
        }
    }

    /// `G(x, y)`. Diagonal singularities are returned as `+∞`.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        match &self.variant {
            KernelVariant::MinHalfLine => {
                for p in [x, y] {
                    if p.len() != 1 {
                        return Err(Error::DimensionMismatch { expected: 1, found: p.len() });
                    }
                    if !(p[0] > 0.0) {
                        return Err(Error::OutsideDomain { point: p.to_vec(), domain: "half-line" });
                    }
                }
                Ok(x[0].min(y[0]))
            }
            KernelVariant::Riesz { n, alpha } => {
                check_len(x, *n)?;
                check_len(y, *n)?;
                let r = geometry::euclidean_distance(x, y);
                if r == 0.0 {
                    Ok(f64::INFINITY)
                } else {
                    Ok(libm::pow(r, alpha - *n as f64))
                }
            }
            KernelVariant::PoissonHalfSpace { n } => {
                let (point, boundary) = if x.len() == n + 1 && y.len() == *n {
                    (x, y)
                } else if y.len() == n + 1 && x.len() == *n {
                    (y, x)
                } else {
                    return Err(Error::DimensionMismatch { expected: n + 1, found: x.len() });
                };
                check_height(point)?;
                let s2: f64 = (0..*n).map(|i| (point[i] - boundary[i]) * (point[i] - boundary[i])).sum();
                Ok(self.poisson_value(*n, s2, point[*n]))
            }
            KernelVariant::SymmetrizedPoisson { n } => {
                check_len(x, n + 1)?;
                check_len(y, n + 1)?;
                check_height(x)?;
                check_height(y)?;
                let s2: f64 = (0..*n).map(|i| (x[i] - y[i]) * (x[i] - y[i])).sum();
                Ok(self.poisson_value(*n, s2, x[*n] + y[*n]))
            }
            KernelVariant::Matrix(m) => Ok(m.values[m.position(x)?][m.position(y)?]),
        }
    }

    /// `P(s, y)` from `|s|²` and `y`.
    pub fn poisson_value(&self, n: usize, s2: f64, y: f64) -> f64 {
        let r2 = s2 + y * y;
        let denom = if (n + 1) % 2 == 0 {
            ipow(r2, (n + 1) / 2)
        } else {
            ipow(r2, n / 2) * libm::sqrt(r2)
        };
        self.poisson_norm * y / denom
    }

    /// Average of `G(x, ·)` over a quadrature piece whose midpoint is `y`.
    /// Differs from `G(x, y)` only for the Riesz kernel when `x = y`, where the
    /// diagonal singularity is integrable over the piece.
    pub(crate) fn eval_piece(&self, x: &[f64], y: &[f64], piece: &AxisBox) -> Result<f64> {
        if let KernelVariant::Riesz { n, alpha } = self.variant {
            if x.len() == n && x == y {
                return Ok(riesz_self_average(n, alpha, x, piece));
            }
        }
        self.eval(x, y)
    }

    /// `Gν(x) = ∫ G(x, y) dν(y)` under the quadrature of `nu`.
    pub fn potential_at(&self, nu: &DiscreteMeasure, x: &[f64]) -> Result<f64> {
        let mut sum = 0.0;
        for s in nu.samples() {
            if s.atom_weight > 0.0 {
                let g = self.eval(x, &s.point)?;
                if g > 0.0 {
                    sum += g * s.atom_weight;
                }
            }
            for (piece, w) in &s.pieces {
                if *w > 0.0 {
                    let g = self.eval_piece(x, &s.point, piece)?;
                    if g > 0.0 {
                        sum += g * w;
                    }
                }
            }
        }
        Ok(sum)
    }

    /// Checks that query points can be fed to the kernel alongside `domain` measures.
    pub(crate) fn check_query(&self, domain: Domain, x: &[f64]) -> Result<()> {
        match &self.variant {
            KernelVariant::PoissonHalfSpace { n } => {
                let expected = if domain.dim() == *n { n + 1 } else { *n };
                check_len(x, expected)?;
                if expected == n + 1 {
                    check_height(x)?;
                }
                Ok(())
            }
            KernelVariant::Matrix(m) => m.position(x).map(|_| ()),
            _ => domain.check_point(x),
        }
    }
}

fn check_len(p: &[f64], n: usize) -> Result<()> {
    if p.len() == n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: n, found: p.len() })
    }
}

fn check_height(p: &[f64]) -> Result<()> {
    if p[p.len() - 1] > 0.0 {
        Ok(())
    } else {
        Err(Error::OutsideDomain { point: p.to_vec(), domain: "upper-half-space" })
    }
}

/// `|piece|^{-1} ∫_piece |x − y|^{α−n} dy` for `x` inside the piece. Exact in one
/// dimension; in higher dimensions the piece is replaced by the ball of equal volume
/// centred at `x`.
fn riesz_self_average(n: usize, alpha: f64, x: &[f64], piece: &AxisBox) -> f64 {
    if n == 1 {
        let a = x[0] - piece.lo[0];
        let b = piece.hi[0] - x[0];
        return (libm::pow(a, alpha) + libm::pow(b, alpha)) / (alpha * (a + b));
    }
    let r = libm::pow(piece.volume() / geometry::unit_ball_volume(n), 1.0 / n as f64);
    n as f64 / alpha * libm::pow(r, alpha - n as f64)
}

/// Largest ratio `G(x,y)/G(y,x)` or its inverse over the sample pairs (`0/0 = 1`).
pub fn check_quasi_symmetry(k: &KernelSpec, samples: &[(Vec<f64>, Vec<f64>)]) -> Result<f64> {
    let mut worst = 1.0f64;
    for (x, y) in samples {
        let g = k.eval(x, y)?;
        let h = k.eval(y, x)?;
        let r = ratio(g, h).max(ratio(h, g));
        worst = worst.max(r);
    }
    Ok(worst)
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        a / b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakMaxReport {
    pub sup_on_support: f64,
    pub sup_on_grid: f64,
    pub empirical_h: f64,
    pub witness_point: Vec<f64>,
    /// `empirical_h` is larger than the kernel's declared `h`.
    pub exceeds_declared: bool,
}

/// Compares `sup Gμ` over the support of `μ` with the sup over `grid ∪ support`.
/// When both sups vanish the ratio is reported as 1.
pub fn check_weak_max(k: &KernelSpec, mu: &DiscreteMeasure, grid: &[Vec<f64>]) -> Result<WeakMaxReport> {
    k.check_domain(mu.domain())?;
    if grid.is_empty() {
        return Err(Error::InvalidParameter("weak maximum principle check needs a nonempty grid".into()));
    }
    let mut sup_on_support = 0.0f64;
    let mut witness: Option<(f64, Vec<f64>)> = None;
    let consider = |v: f64, p: &[f64], witness: &mut Option<(f64, Vec<f64>)>| {
        if witness.as_ref().is_none_or(|(best, _)| v > *best) {
            *witness = Some((v, p.to_vec()));
        }
    };
    for s in mu.samples() {
        if s.weight() == 0.0 {
            continue;
        }
        let v = k.potential_at(mu, &s.point)?;
        sup_on_support = sup_on_support.max(v);
        consider(v, &s.point, &mut witness);
    }
    for p in grid {
        k.check_query(mu.domain(), p)?;
        let v = k.potential_at(mu, p)?;
        consider(v, p, &mut witness);
    }
    let (sup_on_grid, witness_point) = witness.expect("grid is nonempty");
    let empirical_h = if sup_on_support > 0.0 {
        sup_on_grid / sup_on_support
    } else if sup_on_grid > 0.0 {
        f64::INFINITY
    } else {
        1.0
    };
    Ok(WeakMaxReport {
        sup_on_support,
        sup_on_grid,
        empirical_h,
        witness_point,
        exceeds_declared: empirical_h > k.declared_h() * (1.0 + 1e-12),
    })
}
