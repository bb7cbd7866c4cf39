//! Potentials `Gν`, the Hardy split of the min kernel, the exact embedding
//! constant on the half-line, the K-potential envelope and finite-set capacity.
//!
//! Half-line quantities are computed on quadrature samples. Endpoint conventions:
//! `H₊ν(x)` integrates over `[0, x)`, `H₋ν(x) = x·ν([x, ∞))`, so that
//! `H₊ν + H₋ν = Gν` for `G = min`. The envelope's head term uses `[0, x)`, the
//! K-potential uses `[x, ∞)`, and the localized constant uses `(a, ∞)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::lp;
use crate::measure::{self, DiscreteMeasure, Domain, GridFunction};

/// One point of the pointwise envelope `(∫_{[0,x)} y dσ)^{1/(1−q)} + Kσ(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeSample {
    pub x: f64,
    pub head_term: f64,
    pub k_term: f64,
    pub envelope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub value: f64,
    pub equilibrium_weights: Vec<f64>,
    pub active_constraints: Vec<usize>,
    /// Multipliers of the constraints `Gλ(x_i) ≤ 1`.
    pub dual: Vec<f64>,
}

/// `Gν` at the query points.
pub fn apply_potential(k: &KernelSpec, nu: &DiscreteMeasure, query: &[Vec<f64>]) -> Result<GridFunction> {
    k.check_domain(nu.domain())?;
    let mut values = Vec::with_capacity(query.len());
    for x in query {
        k.check_query(nu.domain(), x)?;
        values.push(k.potential_at(nu, x)?);
    }
    GridFunction::new(query.to_vec(), values)
}

/// `a[i][j]` = contribution of sample `j` of `sigma` to `G(f dσ)` at sample `i`
/// per unit of `f_j`.
pub(crate) fn sample_matrix(k: &KernelSpec, sigma: &DiscreteMeasure) -> Result<Vec<Vec<f64>>> {
    k.check_domain(sigma.domain())?;
    let samples = sigma.samples();
    let mut out = Vec::with_capacity(samples.len());
    for si in samples {
        let x = &si.point;
        let mut row = Vec::with_capacity(samples.len());
        for sj in samples {
            let mut v = 0.0;
            if sj.atom_weight > 0.0 {
                let g = k.eval(x, &sj.point)?;
                if g > 0.0 {
                    v += g * sj.atom_weight;
                }
            }
            for (piece, w) in &sj.pieces {
                if *w > 0.0 {
                    let g = k.eval_piece(x, &sj.point, piece)?;
                    if g > 0.0 {
                        v += g * w;
                    }
                }
            }
            row.push(v);
        }
        out.push(row);
    }
    Ok(out)
}

fn half_line_samples(nu: &DiscreteMeasure) -> Result<impl Iterator<Item = (f64, f64)> + '_> {
    if nu.domain() != Domain::HalfLine {
        return Err(Error::DomainMismatch { kernel: "min", domain: nu.domain().name() });
    }
    Ok(nu.samples().iter().map(|s| (s.point[0], s.weight())).filter(|&(_, w)| w > 0.0))
}

fn check_positive(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(alloc::format!("expected a positive point, got {x}")))
    }
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(alloc::format!("q must lie in (0, 1), got {q}")))
    }
}

/// `H₊ν(x) = ∫_{[0,x)} y dν(y)`.
pub fn hardy_plus(nu: &DiscreteMeasure, x: f64) -> Result<f64> {
    check_positive(x)?;
    Ok(half_line_samples(nu)?.filter(|&(y, _)| y < x).map(|(y, w)| y * w).sum())
}

/// `H₋ν(x) = x·ν([x, ∞))`.
pub fn hardy_minus(nu: &DiscreteMeasure, x: f64) -> Result<f64> {
    check_positive(x)?;
    Ok(x * half_line_samples(nu)?.filter(|&(y, _)| y >= x).map(|(_, w)| w).sum::<f64>())
}

/// `κ(σ) = (∫ x^q dσ)^{1/q}`, the best constant in `‖Gν‖_{L^q(σ)} ≤ κ‖ν‖` for `G = min`.
pub fn kappa_1d(sigma: &DiscreteMeasure, q: f64) -> Result<f64> {
    check_q(q)?;
    let pairs: Vec<(f64, f64)> = half_line_samples(sigma)?.collect();
    Ok(measure::lq_from_pairs(&pairs, q))
}

/// `κ` of `σ` restricted to `(a, ∞)`.
pub fn kappa_localized(sigma: &DiscreteMeasure, q: f64, a: f64) -> Result<f64> {
    check_q(q)?;
    check_positive(a)?;
    let pairs: Vec<(f64, f64)> = half_line_samples(sigma)?.filter(|&(y, _)| y > a).collect();
    Ok(measure::lq_from_pairs(&pairs, q))
}

/// `Kσ(x) = x (∫_{[x,∞)} y^q dσ)^{1/(1−q)}`.
pub fn k_potential(sigma: &DiscreteMeasure, q: f64, x: f64) -> Result<f64> {
    check_q(q)?;
    check_positive(x)?;
    let tail: f64 = half_line_samples(sigma)?.filter(|&(y, _)| y >= x).map(|(y, w)| w * libm::pow(y, q)).sum();
    Ok(x * libm::pow(tail, 1.0 / (1.0 - q)))
}

pub fn envelope(sigma: &DiscreteMeasure, q: f64, xs: &[f64]) -> Result<Vec<EnvelopeSample>> {
    check_q(q)?;
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        let head = libm::pow(hardy_plus(sigma, x)?, 1.0 / (1.0 - q));
        let k_term = k_potential(sigma, q, x)?;
        out.push(EnvelopeSample { x, head_term: head, k_term, envelope: head + k_term });
    }
    Ok(out)
}

/// Capacity of a finite set: `max Σλ_j` over `λ ≥ 0` with `Σ_j G(x_i, x_j) λ_j ≤ 1`
/// for every `i`. The optimal `λ` is the equilibrium measure.
pub fn finite_capacity(k: &KernelSpec, points: &[Vec<f64>]) -> Result<CapacityResult> {
    if points.is_empty() {
        return Ok(CapacityResult { value: 0.0, equilibrium_weights: Vec::new(), active_constraints: Vec::new(), dual: Vec::new() });
    }
    let mut g = Vec::with_capacity(points.len());
    for x in points {
        let mut row = Vec::with_capacity(points.len());
        for y in points {
            let v = k.eval(x, y)?;
            if !v.is_finite() {
                return Err(Error::InfinitePotential(x.clone()));
            }
            row.push(v);
        }
        g.push(row);
    }
    capacity_of_matrix(&g)
}

pub(crate) fn capacity_of_matrix(g: &[Vec<f64>]) -> Result<CapacityResult> {
    let m = g.len();
    let ones = alloc::vec![1.0; m];
    let sol = lp::maximize(&ones, g, &ones)?;
    let active = (0..m)
        .filter(|&i| {
            let load: f64 = g[i].iter().zip(&sol.primal).map(|(a, l)| a * l).sum();
            load >= 1.0 - 1e-9
        })
        .collect();
    Ok(CapacityResult { value: sol.value, equilibrium_weights: sol.primal, active_constraints: active, dual: sol.dual })
}

/// Two-sided bounds on `κ = sup_{ν ≥ 0, Σν = 1} ‖Aν‖_{L^q(w)}` for a nonnegative matrix
/// `A` (rows are weighted by `w`, columns are unit masses).
#[derive(Debug, Clone, PartialEq)]
pub struct KappaBounds {
    pub lower: f64,
    pub upper: f64,
    /// The mixture achieving `lower`.
    pub argmax: Vec<f64>,
}

/// `F(ν) = ‖Aν‖_{L^q(w)}` is concave and 1-homogeneous on the cone `ν ≥ 0`, so
/// `F(ν') ≤ ∇F(ν)·ν'` for every `ν'`; hence `κ ≤ max_j ∂_jF(ν)` at any `ν` with
/// `Aν > 0` on the support of `w`. The mixture is improved by the damped
/// multiplicative step `ν_j ← ν_j (∂_jF/F)^{1/2}` and both bounds are tracked.
pub fn linear_kappa_bounds(a: &[Vec<f64>], w: &[f64], q: f64, steps: usize) -> Result<KappaBounds> {
    check_q(q)?;
    if a.len() != w.len() {
        return Err(Error::DimensionMismatch { expected: w.len(), found: a.len() });
    }
    let m = a.first().map_or(0, Vec::len);
    if a.iter().any(|r| r.len() != m) {
        return Err(Error::InvalidParameter("matrix rows differ in length".into()));
    }
    if m == 0 {
        return Ok(KappaBounds { lower: 0.0, upper: 0.0, argmax: Vec::new() });
    }
    let rows: Vec<usize> = (0..a.len()).filter(|&i| w[i] > 0.0).collect();
    if rows.iter().any(|&i| a[i].iter().any(|v| !v.is_finite())) {
        let mut lower = 0.0f64;
        let mut argmax = alloc::vec![0.0; m];
        for j in 0..m {
            let pairs: Vec<(f64, f64)> = rows.iter().map(|&i| (a[i][j], w[i])).collect();
            let v = measure::lq_from_pairs(&pairs, q);
            if v > lower {
                lower = v;
                argmax.iter_mut().for_each(|x| *x = 0.0);
                argmax[j] = 1.0;
            }
        }
        return Ok(KappaBounds { lower, upper: f64::INFINITY, argmax });
    }
    let mut nu = alloc::vec![1.0 / m as f64; m];
    let mut best = KappaBounds { lower: 0.0, upper: f64::INFINITY, argmax: nu.clone() };
    let mut grad = alloc::vec![0.0; m];
    for _ in 0..=steps {
        let image: Vec<f64> = rows.iter().map(|&i| a[i].iter().zip(&nu).map(|(x, y)| x * y).sum()).collect();
        let s: f64 = rows.iter().zip(&image).map(|(&i, &g)| if g > 0.0 { w[i] * libm::pow(g, q) } else { 0.0 }).sum();
        if s == 0.0 {
            // A vanishes on the support of w
            return Ok(KappaBounds { lower: 0.0, upper: 0.0, argmax: nu });
        }
        let f = libm::pow(s, 1.0 / q);
        grad.iter_mut().for_each(|g| *g = 0.0);
        for (&i, &g) in rows.iter().zip(&image) {
            if g > 0.0 {
                let c = w[i] * libm::pow(g, q - 1.0);
                for (gj, aij) in grad.iter_mut().zip(&a[i]) {
                    *gj += c * aij;
                }
            }
        }
        let scale = libm::pow(s, 1.0 / q - 1.0);
        let upper = grad.iter().map(|g| g * scale).fold(0.0, f64::max);
        if f > best.lower {
            best.lower = f;
            best.argmax.clone_from(&nu);
        }
        best.upper = best.upper.min(upper);
        if best.upper - best.lower <= 1e-13 * best.upper {
            break;
        }
        let mut total = 0.0;
        for (v, g) in nu.iter_mut().zip(&grad) {
            *v *= libm::sqrt(g * scale / f);
            total += *v;
        }
        nu.iter_mut().for_each(|v| *v /= total);
    }
    best.upper = best.upper.max(best.lower);
    Ok(best)
}
