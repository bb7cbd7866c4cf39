//! Poisson extension from `ℝⁿ` to `ℝ^{n+1}_+`, balayage back to the boundary, the
//! symmetrized potential `PP*μ(x, y) = ∫ P(x − x̃, y + ỹ) dμ(x̃, ỹ)` and the two
//! Carleson fixed points: `u = PP*(u^q σ)` in the half-space and
//! `φ = P*[(Pφ)^q σ]` on the boundary.
//!
//! Boundary integrals `dt` use a [`BoundaryGrid`]: midpoint nodes on `[−R, R]ⁿ`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry;
use crate::kernel::{self, KernelSpec};
use crate::measure::{self, DiscreteMeasure, Domain, GridFunction};
use crate::solver::{self, FixedPointSolution, IterationReport, SolveOptions};

/// Relative disagreement above which [`BoundarySolution::warning`] is set.
pub const CROSS_IDENTITY_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGrid {
    pub nodes: Vec<Vec<f64>>,
    pub quad_weights: Vec<f64>,
    pub truncation_radius: f64,
}

impl BoundaryGrid {
    /// `per_axis` midpoint nodes along each axis of `[−R, R]ⁿ`.
    pub fn uniform(n: usize, truncation_radius: f64, per_axis: usize) -> Result<Self> {
        if n == 0 || per_axis == 0 || !(truncation_radius > 0.0 && truncation_radius.is_finite()) {
            return Err(Error::InvalidParameter("boundary grid needs n ≥ 1, R > 0 and at least one node".into()));
        }
        let total = per_axis
            .checked_pow(n as u32)
            .filter(|&t| t <= measure::MAX_SAMPLES)
            .ok_or_else(|| Error::InvalidParameter(format!("{per_axis}^{n} boundary nodes is too many")))?;
        let h = 2.0 * truncation_radius / per_axis as f64;
        let w = libm::pow(h, n as f64);
        let mut nodes = Vec::with_capacity(total);
        for idx in 0..total {
            let mut rem = idx;
            let mut p = Vec::with_capacity(n);
            for _ in 0..n {
                p.push(-truncation_radius + h * ((rem % per_axis) as f64 + 0.5));
                rem /= per_axis;
            }
            nodes.push(p);
        }
        Ok(BoundaryGrid { nodes, quad_weights: alloc::vec![w; total], truncation_radius })
    }

    pub fn dim(&self) -> usize {
        self.nodes.first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫ f dt` for node values `f`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.quad_weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }

    /// Bound on `∫_{t ∉ [−R,R]ⁿ} P(x − t, y) dt` from `P(s, y) ≤ c_n y |s|^{−(n+1)}`.
    pub fn tail_bound(&self, x: &[f64], y: f64) -> f64 {
        let n = x.len();
        let gap = self.truncation_radius - x.iter().map(|v| libm::fabs(*v)).fold(0.0, f64::max);
        if gap <= 0.0 {
            return 1.0;
        }
        (kernel::poisson_constant(n) * y * geometry::unit_sphere_area(n) / gap).min(1.0)
    }
}

fn boundary_dim(mu: &DiscreteMeasure) -> Result<usize> {
    match mu.domain() {
        Domain::UpperHalfSpace(n) => Ok(n),
        d => Err(Error::DomainMismatch { kernel: "ppstar", domain: d.name() }),
    }
}

fn check_y(y: f64) -> Result<()> {
    if y > 0.0 && y.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("height must be positive, got {y}")))
    }
}

fn lift(x: &[f64], y: f64) -> Vec<f64> {
    let mut p = x.to_vec();
    p.push(y);
    p
}

/// `Pν(x, y)` for a measure `nu` on `ℝⁿ`.
pub fn poisson_extend(nu: &DiscreteMeasure, x: &[f64], y: f64) -> Result<f64> {
    check_y(y)?;
    let n = match nu.domain() {
        Domain::Euclidean(n) => n,
        Domain::HalfLine => 1,
        d => return Err(Error::DomainMismatch { kernel: "poisson", domain: d.name() }),
    };
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    KernelSpec::poisson(n)?.potential_at(nu, &lift(x, y))
}

/// `P(φ dt)(x, y)` for node values `phi` on `grid`.
pub fn poisson_extend_grid(grid: &BoundaryGrid, phi: &[f64], x: &[f64], y: f64) -> Result<f64> {
    check_y(y)?;
    if phi.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), found: phi.len() });
    }
    let n = grid.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    let k = KernelSpec::poisson(n)?;
    Ok(grid
        .nodes
        .iter()
        .zip(&grid.quad_weights)
        .zip(phi)
        .filter(|(_, f)| **f > 0.0)
        .map(|((t, w), f)| w * f * k.poisson_value(n, dist2(x, t), y))
        .sum())
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

/// `P*μ(t) = ∫ P(x − t, y) dμ(x, y)`.
pub fn balayage(mu: &DiscreteMeasure, t: &[f64]) -> Result<f64> {
    let n = boundary_dim(mu)?;
    if t.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: t.len() });
    }
    KernelSpec::poisson(n)?.potential_at(mu, t)
}

/// `PP*μ(x, y)` through the kernel `P(x − x̃, y + ỹ)`.
pub fn pp_star_potential(mu: &DiscreteMeasure, x: &[f64], y: f64) -> Result<f64> {
    check_y(y)?;
    let n = boundary_dim(mu)?;
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    KernelSpec::pp_star(n)?.potential_at(mu, &lift(x, y))
}

/// `P[(P*μ) dt](x, y)` with the `dt` integral on `grid`; agrees with
/// [`pp_star_potential`] up to quadrature and truncation error.
pub fn pp_star_composed(mu: &DiscreteMeasure, x: &[f64], y: f64, grid: &BoundaryGrid) -> Result<f64> {
    let n = boundary_dim(mu)?;
    if grid.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: grid.dim() });
    }
    let phi = balayage_on_grid(mu, grid)?;
    poisson_extend_grid(grid, &phi, x, y)
}

fn balayage_on_grid(mu: &DiscreteMeasure, grid: &BoundaryGrid) -> Result<Vec<f64>> {
    let n = grid.dim();
    let k = KernelSpec::poisson(n)?;
    let samples = mu.samples();
    Ok(grid
        .nodes
        .iter()
        .map(|t| {
            samples
                .iter()
                .map(|s| {
                    let (x, y) = s.point.split_at(n);
                    measure::scale(s.weight(), k.poisson_value(n, dist2(x, t), y[0]))
                })
                .sum()
        })
        .collect())
}

/// Solves `u = PP*(u^q σ)` on the samples of `sigma`.
pub fn carleson_fixed_point(sigma: &DiscreteMeasure, q: f64, opts: &SolveOptions) -> Result<FixedPointSolution> {
    let n = boundary_dim(sigma)?;
    solver::solve_with_context(&KernelSpec::pp_star(n)?, sigma, q, opts, "the Carleson embedding")
}

#[derive(Debug, Clone)]
pub struct BoundarySolution {
    /// `φ` at the grid nodes.
    pub phi: GridFunction,
    pub report: IterationReport,
    /// `∫ φ dt` on the grid.
    pub l1_norm: f64,
    /// `Pφ` at the samples of `σ`.
    pub extension_on_sigma: GridFunction,
    /// The half-space solution from the exact kernel, for the cross-checks.
    pub direct: FixedPointSolution,
    /// `‖u‖^q_{L^q(σ)}` of `direct`.
    pub u_norm_q: f64,
    /// `|‖φ‖₁ − ‖u‖^q_q| / ‖u‖^q_q` (0 when both vanish).
    pub cross_identity_error: f64,
    /// `max_s |Pφ − u| / u` at the samples of `σ`.
    pub extension_error: f64,
    /// Largest [`BoundaryGrid::tail_bound`] over the samples of `σ`.
    pub tail_bound: f64,
    pub warning: Option<String>,
}

/// Solves `φ = P*[(Pφ)^q dσ]` on `grid`.
///
/// With `B_ks = P(x_s − t_k, y_s)` and grid weights `g_k`, the values `v_s = Pφ(x_s, y_s)`
/// obey `v = K(v^q σ)` with `K_{ss'} = Σ_k g_k B_ks B_ks'`, and `φ_k = Σ_s B_ks v_s^q σ_s`.
/// So the iteration runs on `v`, where the monotone certificates apply, and each
/// iterate determines the corresponding `φ_j`.
pub fn boundary_fixed_point(
    sigma: &DiscreteMeasure,
    q: f64,
    grid: &BoundaryGrid,
    opts: &SolveOptions,
) -> Result<BoundarySolution> {
    solver::check_q(q)?;
    let n = boundary_dim(sigma)?;
    if grid.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: grid.dim() });
    }
    let k = KernelSpec::poisson(n)?;
    let samples = sigma.samples();
    let weights = sigma.sample_weights();
    let b: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| {
            let (x, y) = s.point.split_at(n);
            grid.nodes.iter().map(|t| k.poisson_value(n, dist2(x, t), y[0])).collect()
        })
        .collect();
    let m = samples.len();
    let mut kmat = alloc::vec![alloc::vec![0.0; m]; m];
    for s in 0..m {
        for r in s..m {
            let v: f64 = b[s].iter().zip(&b[r]).zip(&grid.quad_weights).map(|((p, q), g)| g * p * q).sum();
            kmat[s][r] = v;
            kmat[r][s] = v;
        }
    }
    let sigma_w: Vec<Vec<f64>> =
        kmat.iter().map(|row| row.iter().zip(&weights).map(|(v, w)| measure::scale(*w, *v)).collect()).collect();
    let ones = alloc::vec![1.0; m];
    let base = solver::mat_vec(&sigma_w, &ones);
    let mut apply = |u: &[f64]| -> Result<Vec<f64>> { Ok(solver::mat_vec(&sigma_w, &solver::powq(u, q))) };
    let (v, report) = solver::monotone_iteration(sigma, q, opts, &base, &mut apply, "the Carleson embedding")?;

    let f: Vec<f64> = solver::powq(&v, q).iter().zip(&weights).map(|(a, w)| measure::scale(*w, *a)).collect();
    let phi: Vec<f64> = (0..grid.len()).map(|kk| (0..m).map(|s| b[s][kk] * f[s]).sum()).collect();
    let l1_norm = grid.integrate(&phi);

    let direct = carleson_fixed_point(sigma, q, opts)?;
    let pairs: Vec<(f64, f64)> = direct.u.values().iter().copied().zip(weights.iter().copied()).collect();
    let u_norm_q = libm::pow(measure::lq_from_pairs(&pairs, q), q);
    let cross_identity_error = relative(l1_norm, u_norm_q);
    let extension_error = v.iter().zip(direct.u.values()).map(|(a, b)| relative(*a, *b)).fold(0.0, f64::max);
    let tail_bound = samples
        .iter()
        .map(|s| {
            let (x, y) = s.point.split_at(n);
            grid.tail_bound(x, y[0])
        })
        .fold(0.0, f64::max);
    let warning = (cross_identity_error > CROSS_IDENTITY_THRESHOLD || extension_error > CROSS_IDENTITY_THRESHOLD)
        .then(|| {
            format!(
                "boundary grid too coarse: L1 identity off by {cross_identity_error:.3e}, \
                 extension off by {extension_error:.3e} (tail bound {tail_bound:.3e})"
            )
        });
    Ok(BoundarySolution {
        phi: GridFunction::new(grid.nodes.clone(), phi)?,
        report,
        l1_norm,
        extension_on_sigma: GridFunction::on_samples(sigma, v)?,
        direct,
        u_norm_q,
        cross_identity_error,
        extension_error,
        tail_bound,
        warning,
    })
}

fn relative(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        libm::fabs(a - b) / libm::fabs(b).max(libm::fabs(a))
    }
}

/// `∫ u(x, y) dx` on `grid` for each height in `ys`, where `u = PP*(u^q σ)` is
/// extended off `supp σ` by its defining formula. Over all of `ℝⁿ` the integral is
/// `‖u‖^q_{L^q(σ)}` at every height; truncation makes it decrease slowly in `y`.
pub fn harmonic_mass_profile(solution: &FixedPointSolution, grid: &BoundaryGrid, ys: &[f64]) -> Result<Vec<f64>> {
    let n = boundary_dim(solution.sigma())?;
    if grid.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: grid.dim() });
    }
    let f = solver::powq(solution.u.values(), solution.q());
    let nu = solution.sigma().reweighted(&f)?;
    let k = KernelSpec::pp_star(n)?;
    let samples = nu.samples();
    ys.iter()
        .map(|&y| {
            check_y(y)?;
            Ok(grid
                .nodes
                .iter()
                .zip(&grid.quad_weights)
                .map(|(t, g)| {
                    let u: f64 = samples
                        .iter()
                        .map(|s| {
                            let (x, yy) = s.point.split_at(n);
                            measure::scale(s.weight(), k.poisson_value(n, dist2(x, t), y + yy[0]))
                        })
                        .sum();
                    g * u
                })
                .sum())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use alloc::vec;

    fn half_space(atoms: &[(f64, f64, f64)]) -> DiscreteMeasure {
        DiscreteMeasure::from_atoms(Domain::UpperHalfSpace(1), atoms.iter().map(|&(x, y, w)| (vec![x, y], w))).unwrap()
    }

    #[test]
    fn kernel_values() {
        let d = DiscreteMeasure::dirac(Domain::Euclidean(1), vec![0.0], 1.0).unwrap();
        assert!((poisson_extend(&d, &[0.0], 1.0).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!(poisson_extend(&d, &[0.0], 0.0).is_err());
        assert_eq!(poisson_extend(&DiscreteMeasure::zero(Domain::Euclidean(1)), &[0.0], 1.0).unwrap(), 0.0);
        let mu = half_space(&[(0.0, 1.0, 1.0)]);
        assert!((balayage(&mu, &[0.0]).unwrap() - 1.0 / PI).abs() < 1e-15);
        let far = balayage(&mu, &[100.0]).unwrap();
        assert!((far * PI * 1e4 - 1.0).abs() < 0.01);
        assert!((pp_star_potential(&mu, &[0.0], 1.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn cauchy_mass_on_the_grid() {
        let g = BoundaryGrid::uniform(1, 1e4, 100_000).unwrap();
        let d = DiscreteMeasure::dirac(Domain::Euclidean(1), vec![0.0], 1.0).unwrap();
        let vals: Vec<f64> = g.nodes.iter().map(|t| poisson_extend(&d, t, 1.0).unwrap()).collect();
        assert!((g.integrate(&vals) - 1.0).abs() < 1e-3);
        assert!(g.tail_bound(&[0.0], 1.0) < 1e-3);
    }

    #[test]
    fn single_atom_round_trip() {
        let w = 2.0;
        let sigma = half_space(&[(0.0, 1.0, w)]);
        let s = carleson_fixed_point(&sigma, 0.5, &SolveOptions::default()).unwrap();
        let expect = (w / (2.0 * PI)).powi(2);
        assert!((s.u.values()[0] - expect).abs() < 1e-12 * expect);

        let g = BoundaryGrid::uniform(1, 1e4, 100_000).unwrap();
        let b = boundary_fixed_point(&sigma, 0.5, &g, &SolveOptions::default()).unwrap();
        let l1 = w * expect.sqrt();
        assert!((b.u_norm_q - l1).abs() < 1e-12 * l1);
        assert!(b.cross_identity_error < 1e-3 && b.extension_error < 1e-3 && b.warning.is_none());
    }

    #[test]
    fn zero_sigma() {
        let z = DiscreteMeasure::zero(Domain::UpperHalfSpace(1));
        let s = carleson_fixed_point(&z, 0.5, &SolveOptions::default()).unwrap();
        assert!(s.u.is_empty());
        let g = BoundaryGrid::uniform(1, 10.0, 100).unwrap();
        let b = boundary_fixed_point(&z, 0.5, &g, &SolveOptions::default()).unwrap();
        assert!(b.phi.values().iter().all(|v| *v == 0.0));
    }
}
