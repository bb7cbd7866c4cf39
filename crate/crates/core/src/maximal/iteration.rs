//! The iteration `u_{j+1} = M_α(u_j^q σ)` from `u₀ = (M_ασ)^{1/(1−q)}`, and the
//! weak embedding constant of `M_α` probed by Dirac masses.

use alloc::vec::Vec;

use super::line::{self, LineProfile};
use super::{check_alpha, frac_max, MaxQueryMode, Semantics};
use crate::error::{Error, Result};
use crate::measure::{self, CellAtom, DiscreteMeasure, GridFunction};
use crate::solver::{self, IterationReport, SolveOptions};

/// `M_α(f σ)` at the samples of `sigma`, `factors` given per sample.
pub fn maximal_apply(sigma: &DiscreteMeasure, alpha: f64, mode: MaxQueryMode, factors: &[f64]) -> Result<Vec<f64>> {
    let n = sigma.dim();
    check_alpha(alpha, n)?;
    mode.check(n)?;
    let nu = sigma.reweighted(factors)?;
    let beta = 1.0 - alpha / n as f64;
    let samples = sigma.samples();
    if n == 1 && !matches!(mode, MaxQueryMode::UncenteredApprox(_)) {
        let profile = LineProfile::new(&nu);
        return Ok(samples
            .iter()
            .map(|s| match mode {
                MaxQueryMode::UncenteredCubes1D => line::uncentered_frac(&profile, s.point[0], beta),
                _ => super::centered_frac_1d(&profile, s.point[0], beta),
            })
            .collect());
    }
    samples.iter().map(|s| frac_max(&nu, alpha, &s.point, mode)).collect()
}

fn reject_atoms(sigma: &DiscreteMeasure) -> Result<()> {
    if sigma.atoms().iter().any(|a| a.weight > 0.0) {
        return Err(Error::PointAtomsInMaximal);
    }
    Ok(())
}

/// Solves `u = M_α(u^q dσ)` on the samples of a cell measure `sigma`. Point atoms
/// are rejected since `M_ασ = ∞` on them.
pub fn maximal_fixed_point(
    sigma: &DiscreteMeasure,
    alpha: f64,
    q: f64,
    mode: MaxQueryMode,
    opts: &SolveOptions,
) -> Result<(GridFunction, IterationReport)> {
    solver::check_q(q)?;
    check_alpha(alpha, sigma.dim())?;
    mode.check(sigma.dim())?;
    reject_atoms(sigma)?;
    let ones = alloc::vec![1.0; sigma.samples().len()];
    let base = maximal_apply(sigma, alpha, mode, &ones)?;
    let mut apply = |u: &[f64]| -> Result<Vec<f64>> { maximal_apply(sigma, alpha, mode, &solver::powq(u, q)) };
    let (u, report) = solver::monotone_iteration(sigma, q, opts, &base, &mut apply, "the maximal (1,q) embedding")?;
    Ok((GridFunction::on_samples(sigma, u)?, report))
}

/// `L_ij = M_α(σ_j)(x_i) / σ_j(ℝⁿ)` where `σ_j` is the part of `sigma` carried by
/// sample `j`. By sublinearity `M_α(Σ_j f_j σ_j) ≤ Σ_j L_ij f_j σ_j(ℝⁿ)`, so the
/// embedding constant of `L` bounds that of `M_α` on densities of `σ`.
pub fn maximal_linearization(sigma: &DiscreteMeasure, alpha: f64, mode: MaxQueryMode) -> Result<Vec<Vec<f64>>> {
    let n = sigma.dim();
    check_alpha(alpha, n)?;
    mode.check(n)?;
    reject_atoms(sigma)?;
    let samples = sigma.samples();
    let beta = 1.0 - alpha / n as f64;
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(samples.len());
    for s in samples {
        let cells: Vec<CellAtom> = s.pieces.iter().map(|(b, w)| CellAtom { cell: b.clone(), weight: *w }).collect();
        let mass: f64 = s.pieces.iter().map(|(_, w)| w).sum();
        if mass == 0.0 {
            cols.push(alloc::vec![0.0; samples.len()]);
            continue;
        }
        let piece = DiscreteMeasure::new(sigma.domain(), Vec::new(), cells)?;
        let col = if n == 1 && !matches!(mode, MaxQueryMode::UncenteredApprox(_)) {
            let profile = LineProfile::new(&piece);
            samples
                .iter()
                .map(|t| match mode {
                    MaxQueryMode::UncenteredCubes1D => line::uncentered_frac(&profile, t.point[0], beta),
                    _ => super::centered_frac_1d(&profile, t.point[0], beta),
                })
                .collect()
        } else {
            samples.iter().map(|t| frac_max(&piece, alpha, &t.point, mode)).collect::<Result<Vec<f64>>>()?
        };
        cols.push(col.into_iter().map(|v| v / mass).collect());
    }
    Ok((0..samples.len()).map(|i| cols.iter().map(|c| c[i]).collect()).collect())
}

/// Outcome of [`weak_embedding_estimate_maximal`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeakMaximalEstimate {
    /// `max_y ‖M_αδ_y‖_{L^{q,∞}(σ)}`, a lower bound on the weak constant. `ν ↦ M_αν`
    /// is a sup of linear maps, so Diracs do not determine the constant exactly.
    pub kappa_w_lower: f64,
    /// `‖M_ασ‖_{L^{q/(1−q),∞}(σ)}`, the quantity that controls the weak constant from above.
    pub sigma_weak_norm: f64,
    /// When the weak norm is finite this equals `C_H·‖M_ασ‖` with the weak Hölder constant;
    /// it is an upper bound once multiplied by the weak (1,1) constant of the family.
    pub holder_product: f64,
    pub semantics: Semantics,
}

pub fn weak_embedding_estimate_maximal(
    sigma: &DiscreteMeasure,
    alpha: f64,
    q: f64,
    dirac_grid: &[Vec<f64>],
    mode: MaxQueryMode,
) -> Result<WeakMaximalEstimate> {
    solver::check_q(q)?;
    let n = sigma.dim();
    check_alpha(alpha, n)?;
    mode.check(n)?;
    let semantics = mode.semantics(sigma);
    if sigma.is_zero() {
        return Ok(WeakMaximalEstimate { kappa_w_lower: 0.0, sigma_weak_norm: 0.0, holder_product: 0.0, semantics });
    }
    let points = sigma.sample_points();
    let mut lower = 0.0f64;
    for y in dirac_grid {
        let delta = DiscreteMeasure::dirac(sigma.domain(), y.clone(), 1.0)?;
        let values = points.iter().map(|x| frac_max(&delta, alpha, x, mode)).collect::<Result<Vec<f64>>>()?;
        let f = GridFunction::new(points.clone(), values)?;
        lower = lower.max(measure::weak_lq_norm(&f, sigma, q)?);
    }
    let ones = alloc::vec![1.0; points.len()];
    let m_sigma = if sigma.atoms().iter().any(|a| a.weight > 0.0) {
        points.iter().map(|x| frac_max(sigma, alpha, x, mode)).collect::<Result<Vec<f64>>>()?
    } else {
        maximal_apply(sigma, alpha, mode, &ones)?
    };
    let f = GridFunction::new(points, m_sigma)?;
    let sigma_weak_norm = measure::weak_lq_norm(&f, sigma, q / (1.0 - q))?;
    let holder_product = super::weak_holder_constant(q) * sigma_weak_norm;
    Ok(WeakMaximalEstimate { kappa_w_lower: lower, sigma_weak_norm, holder_product, semantics })
}
