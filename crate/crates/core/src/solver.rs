//! Monotone iteration `u_{j+1} = G(u_j^q dσ)` for `0 < q < 1` and the pointwise
//! certificates of its limit.
//!
//! Solutions live on the quadrature samples of `σ`. The seed is
//! `u₀ = c₀ (Gσ)^{1/(1−q)}`; the auto rule halves `c₀` from 1 until `T(u₀) ≥ u₀`,
//! after which positivity of the kernel makes the whole sequence nondecreasing.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::measure::{self, DiscreteMeasure, Domain, GridFunction};
use crate::potential;

/// Drops smaller than this fraction of the iterate's sup are rounding.
const MONOTONE_SLACK: f64 = 1e-12;
/// Drops larger than this fraction abort the run.
const MONOTONE_ABORT: f64 = 1e-9;
const DIVERGENCE_FACTOR: f64 = 1e15;
const MAX_HALVINGS: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeedScale {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Stop once `max |u_{j+1} − u_j| / max(1, u_{j+1}) ≤ tolerance`.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed_scale: SeedScale,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tolerance: 1e-12, max_iterations: 10_000, seed_scale: SeedScale::Auto }
    }
}

impl SolveOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || self.max_iterations == 0 {
            return Err(Error::InvalidParameter("tolerance must be positive and max_iterations at least 1".into()));
        }
        if let SeedScale::Fixed(c) = self.seed_scale {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidParameter(alloc::format!("seed scale must be positive, got {c}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub iterations: usize,
    /// `max_i |u_i − T(u)_i| / max(1, u_i)` for the returned `u`.
    pub final_residual: f64,
    pub monotone_ok: bool,
    /// `‖u_j‖_{L^q(σ)}` for `j = 0, 1, ...`.
    pub norm_trace: Vec<f64>,
    pub converged: bool,
    /// The `c₀` actually used.
    pub seed_scale: f64,
    /// Positive-weight samples where the seed potential vanishes.
    pub degenerate_samples: Vec<usize>,
}

/// Runs the monotone iteration of `apply` on the samples of `sigma`.
/// `base` is the potential of `sigma` itself (`Gσ` or `M_ασ`) at the samples.
pub(crate) fn monotone_iteration(
    sigma: &DiscreteMeasure,
    q: f64,
    opts: &SolveOptions,
    base: &[f64],
    apply: &mut dyn FnMut(&[f64]) -> Result<Vec<f64>>,
    context: &'static str,
) -> Result<(Vec<f64>, IterationReport)> {
    opts.validate()?;
    check_q(q)?;
    let weights = sigma.sample_weights();
    let points = sigma.samples();
    for (i, (&b, &w)) in base.iter().zip(&weights).enumerate() {
        if w > 0.0 && !b.is_finite() {
            return Err(Error::InfinitePotential(points[i].point.clone()));
        }
    }
    let degenerate: Vec<usize> = (0..base.len()).filter(|&i| weights[i] > 0.0 && base[i] == 0.0).collect();
    let norm = |u: &[f64]| -> f64 {
        let pairs: Vec<(f64, f64)> = u.iter().copied().zip(weights.iter().copied()).collect();
        measure::lq_from_pairs(&pairs, q)
    };
    let profile: Vec<f64> = base.iter().map(|&b| if b.is_finite() { libm::pow(b, 1.0 / (1.0 - q)) } else { 0.0 }).collect();

    let mut monotone_ok = true;
    let (c0, mut u, mut next) = match opts.seed_scale {
        SeedScale::Fixed(c) => {
            let u: Vec<f64> = profile.iter().map(|p| c * p).collect();
            let next = apply(&u)?;
            (c, u, next)
        }
        SeedScale::Auto => {
            let mut c = 1.0;
            let mut halvings = 0;
            loop {
                let u: Vec<f64> = profile.iter().map(|p| c * p).collect();
                let next = apply(&u)?;
                if max_drop(&u, &next) <= MONOTONE_SLACK * sup(&next) {
                    break (c, u, next);
                }
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    return Err(Error::NoSubsolution { halvings: MAX_HALVINGS });
                }
                c *= 0.5;
            }
        }
    };
    let n0 = norm(&u);
    let mut trace = alloc::vec![n0];
    let guard = if n0 > 0.0 { DIVERGENCE_FACTOR * n0 } else { f64::INFINITY };
    let mut iterations = 0;
    loop {
        iterations += 1;
        check_step(&u, &next, iterations, &mut monotone_ok)?;
        let n = norm(&next);
        trace.push(n);
        if !(n <= guard) || next.iter().zip(&weights).any(|(v, w)| *w > 0.0 && !v.is_finite()) {
            return Err(Error::Divergence { iterations, context });
        }
        let delta = rel_gap(&u, &next);
        if delta <= opts.tolerance || iterations >= opts.max_iterations {
            let after = apply(&next)?;
            let residual = rel_gap(&next, &after);
            if residual <= 10.0 * opts.tolerance || iterations >= opts.max_iterations {
                if after.iter().any(|v| v.is_finite()) {
                    let mut probe = monotone_ok;
                    check_step(&next, &after, iterations + 1, &mut probe)?;
                    monotone_ok = probe;
                }
                let converged = delta <= opts.tolerance && residual <= 10.0 * opts.tolerance;
                let report = IterationReport {
                    iterations,
                    final_residual: residual,
                    monotone_ok,
                    norm_trace: trace,
                    converged,
                    seed_scale: c0,
                    degenerate_samples: degenerate,
                };
                return Ok((next, report));
            }
            u = next;
            next = after;
            continue;
        }
        u = next;
        next = apply(&u)?;
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().copied().filter(|x| x.is_finite()).fold(0.0, f64::max)
}

fn max_drop(prev: &[f64], next: &[f64]) -> f64 {
    prev.iter()
        .zip(next)
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .map(|(a, b)| a - b)
        .fold(0.0, f64::max)
}

fn check_step(prev: &[f64], next: &[f64], iteration: usize, monotone_ok: &mut bool) -> Result<()> {
    let scale = sup(next).max(sup(prev));
    for (i, (a, b)) in prev.iter().zip(next).enumerate() {
        if !(a.is_finite() && b.is_finite()) {
            continue;
        }
        let drop = a - b;
        if drop > MONOTONE_SLACK * scale {
            *monotone_ok = false;
            if drop > MONOTONE_ABORT * scale {
                return Err(Error::NonMonotone { iteration, sample: i, drop });
            }
        }
    }
    Ok(())
}

fn rel_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .filter(|(x, y)| x.is_finite() || y.is_finite())
        .map(|(x, y)| libm::fabs(x - y) / y.max(1.0))
        .fold(0.0, f64::max)
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(alloc::format!("q must lie in (0, 1), got {q}")))
    }
}

/// `u_j^q` with `0^q = 0`.
pub(crate) fn powq(u: &[f64], q: f64) -> Vec<f64> {
    u.iter().map(|&v| if v > 0.0 { libm::pow(v, q) } else { 0.0 }).collect()
}

pub(crate) fn mat_vec(a: &[Vec<f64>], f: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| {
            row.iter().zip(f).map(|(g, v)| if *g == 0.0 || *v == 0.0 { 0.0 } else { g * v }).sum()
        })
        .collect()
}

/// A solution of `u = G(u^q dσ)` on the samples of `σ`.
#[derive(Debug, Clone)]
pub struct FixedPointSolution {
    pub u: GridFunction,
    pub report: IterationReport,
    kernel: KernelSpec,
    sigma: DiscreteMeasure,
    q: f64,
}

impl FixedPointSolution {
    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn sigma(&self) -> &DiscreteMeasure {
        &self.sigma
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `G(u^q dσ)` at arbitrary query points.
    pub fn evaluate(&self, query: &[Vec<f64>]) -> Result<GridFunction> {
        let f = powq(self.u.values(), self.q);
        let weighted = self.sigma.reweighted(&f)?;
        potential::apply_potential(&self.kernel, &weighted, query)
    }
}

/// Solves `u = G(u^q dσ)` by monotone iteration from `c₀(Gσ)^{1/(1−q)}`.
pub fn solve_fixed_point(
    k: &KernelSpec,
    sigma: &DiscreteMeasure,
    q: f64,
    opts: &SolveOptions,
) -> Result<FixedPointSolution> {
    solve_with_context(k, sigma, q, opts, "the (1,q) embedding")
}

pub(crate) fn solve_with_context(
    k: &KernelSpec,
    sigma: &DiscreteMeasure,
    q: f64,
    opts: &SolveOptions,
    context: &'static str,
) -> Result<FixedPointSolution> {
    check_q(q)?;
    let a = potential::sample_matrix(k, sigma)?;
    let ones = alloc::vec![1.0; a.len()];
    let base = mat_vec(&a, &ones);
    let mut apply = |u: &[f64]| -> Result<Vec<f64>> { Ok(mat_vec(&a, &powq(u, q))) };
    let (u, report) = monotone_iteration(sigma, q, opts, &base, &mut apply, context)?;
    let u = GridFunction::on_samples(sigma, u)?;
    Ok(FixedPointSolution { u, report, kernel: k.clone(), sigma: sigma.clone(), q })
}

/// Values of `u` at the samples of `sigma`, in sample order.
pub(crate) fn values_on_samples(u: &GridFunction, sigma: &DiscreteMeasure) -> Result<Vec<f64>> {
    sigma
        .samples()
        .iter()
        .map(|s| u.value_at(&s.point).ok_or_else(|| Error::MissingSample(s.point.clone())))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupersolutionCheck {
    pub holds: bool,
    /// `max_i (G(u^q dσ)_i − u_i)`; negative when the inequality is strict everywhere.
    pub max_violation: f64,
}

/// Checks `u ≥ G(u^q dσ)` at the samples of `σ`, with slack `1e-10·max(1, sup u)`.
pub fn verify_supersolution(u: &GridFunction, k: &KernelSpec, sigma: &DiscreteMeasure, q: f64) -> Result<SupersolutionCheck> {
    check_q(q)?;
    let vals = values_on_samples(u, sigma)?;
    let a = potential::sample_matrix(k, sigma)?;
    let t = mat_vec(&a, &powq(&vals, q));
    let mut worst = f64::NEG_INFINITY;
    for (ui, ti) in vals.iter().zip(&t) {
        let v = if ui.is_infinite() { f64::NEG_INFINITY } else { ti - ui };
        worst = worst.max(v);
    }
    if vals.is_empty() {
        worst = 0.0;
    }
    let scale = sup(&vals).max(1.0);
    Ok(SupersolutionCheck { holds: worst <= 1e-10 * scale, max_violation: worst })
}

/// Relative slack on the half-line margins, covering a converged iterate's distance to the
/// fixed point.
pub const MARGIN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundReport {
    /// `(1−q)^{1/(1−q)}`.
    pub constant: f64,
    /// `min_i u_i / ((1−q)^{1/(1−q)} Gσ_i^{1/(1−q)})` over samples with a positive bound.
    pub min_ratio: f64,
    /// Sample points with `u < bound`, beyond `1e-12` relative rounding.
    pub violations: Vec<Vec<f64>>,
    /// The bound is proven for this kernel (strong maximum principle, `h = 1`);
    /// otherwise it is reported for information.
    pub asserted: bool,
    /// Half-line only: `min_i (u(x_i) − x_i ∫_{[x_i,∞)} u^q dσ) / u(x_i)`. This is an
    /// equality at the leftmost sample, so it only holds up to the stopping error.
    pub tail_margin: Option<f64>,
    /// Half-line only: `min_i (u(x_i) − (1−q)^{1/(1−q)} (∫_{[0,x_i)} y dσ)^{1/(1−q)}) / u(x_i)`.
    pub head_margin: Option<f64>,
}

impl LowerBoundReport {
    pub fn passed(&self) -> bool {
        let tol = |m: Option<f64>| m.is_none_or(|m| m >= -MARGIN_SLACK);
        (!self.asserted || self.violations.is_empty()) && tol(self.tail_margin) && tol(self.head_margin)
    }
}

/// Evaluates `u ≥ (1−q)^{1/(1−q)} (Gσ)^{1/(1−q)}` at the samples and, for the
/// min kernel, the tail identity and the head-term bound.
pub fn check_lower_bounds(u: &GridFunction, k: &KernelSpec, sigma: &DiscreteMeasure, q: f64) -> Result<LowerBoundReport> {
    check_q(q)?;
    let vals = values_on_samples(u, sigma)?;
    let a = potential::sample_matrix(k, sigma)?;
    let g = mat_vec(&a, &alloc::vec![1.0; vals.len()]);
    let e = 1.0 / (1.0 - q);
    let constant = libm::pow(1.0 - q, e);
    let mut min_ratio = f64::INFINITY;
    let mut violations = Vec::new();
    for (i, s) in sigma.samples().iter().enumerate() {
        let bound = constant * libm::pow(g[i], e);
        if bound > 0.0 {
            min_ratio = min_ratio.min(vals[i] / bound);
            if vals[i] < bound * (1.0 - 1e-12) {
                violations.push(s.point.clone());
            }
        }
    }
    let (mut tail_margin, mut head_margin) = (None, None);
    if sigma.domain() == Domain::HalfLine && matches!(k.variant(), crate::KernelVariant::MinHalfLine) {
        let uq = powq(&vals, q);
        let weights = sigma.sample_weights();
        let mut tm = f64::INFINITY;
        let mut hm = f64::INFINITY;
        for (i, s) in sigma.samples().iter().enumerate() {
            let x = s.point[0];
            let mut tail = 0.0;
            let mut head = 0.0;
            for (j, t) in sigma.samples().iter().enumerate() {
                let y = t.point[0];
                if y >= x {
                    tail += measure::scale(weights[j], uq[j]);
                } else {
                    head += y * weights[j];
                }
            }
            if vals[i] > 0.0 {
                tm = tm.min((vals[i] - x * tail) / vals[i]);
                hm = hm.min((vals[i] - constant * libm::pow(head, e)) / vals[i]);
            }
        }
        if !sigma.samples().is_empty() {
            tail_margin = Some(tm);
            head_margin = Some(hm);
        }
    }
    Ok(LowerBoundReport {
        constant,
        min_ratio,
        violations,
        asserted: k.declared_h() == 1.0,
        tail_margin,
        head_margin,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeCheck {
    pub c_lower: f64,
    pub c_upper: f64,
    /// Points where the envelope vanishes but `u` does not.
    pub excluded: Vec<f64>,
}

/// Empirical constants `min u/envelope` and `max u/envelope` over `xs`.
pub fn check_envelope(solution: &FixedPointSolution, xs: &[f64]) -> Result<EnvelopeCheck> {
    let sigma = solution.sigma();
    if sigma.domain() != Domain::HalfLine {
        return Err(Error::DomainMismatch { kernel: solution.kernel().name(), domain: sigma.domain().name() });
    }
    let env = potential::envelope(sigma, solution.q(), xs)?;
    let query: Vec<Vec<f64>> = xs.iter().map(|&x| alloc::vec![x]).collect();
    let u = solution.evaluate(&query)?;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    let mut excluded = Vec::new();
    for (e, &uv) in env.iter().zip(u.values()) {
        if e.envelope == 0.0 {
            if uv > 0.0 {
                excluded.push(e.x);
            }
            continue;
        }
        let r = uv / e.envelope;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(EnvelopeCheck { c_lower: lo, c_upper: hi, excluded })
}

/// Lower bound on the best `κ` in `‖Gν‖_{L^q(σ)} ≤ κ‖ν‖`: the max ratio over Dirac
/// masses at `dirac_grid` and `mixtures` random convex combinations of up to three
/// of them. Exact only for the min kernel with a grid reaching past `supp σ`.
pub fn embedding_constant_estimate(
    k: &KernelSpec,
    sigma: &DiscreteMeasure,
    q: f64,
    dirac_grid: &[Vec<f64>],
    mixtures: usize,
    seed: u64,
) -> Result<f64> {
    check_q(q)?;
    k.check_domain(sigma.domain())?;
    let weights: Vec<f64> = sigma.sample_weights();
    let cols: Vec<Vec<f64>> = dirac_grid
        .iter()
        .map(|y| sigma.samples().iter().map(|s| k.eval(&s.point, y)).collect::<Result<Vec<f64>>>())
        .collect::<Result<_>>()?;
    let ratio = |g: &[f64]| -> f64 {
        let pairs: Vec<(f64, f64)> = g.iter().copied().zip(weights.iter().copied()).collect();
        measure::lq_from_pairs(&pairs, q)
    };
    let mut best = 0.0f64;
    for c in &cols {
        best = best.max(ratio(c));
    }
    if cols.is_empty() {
        return Ok(best);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = alloc::vec![0.0; weights.len()];
    for _ in 0..mixtures {
        let parts = rng.random_range(1..=3usize.min(cols.len()));
        let mut picks = [(0usize, 0.0f64); 3];
        let mut total = 0.0;
        for p in picks.iter_mut().take(parts) {
            *p = (rng.random_range(0..cols.len()), rng.random::<f64>() + 1e-12);
            total += p.1;
        }
        g.iter_mut().for_each(|v| *v = 0.0);
        for &(j, c) in picks.iter().take(parts) {
            for (gi, col) in g.iter_mut().zip(&cols[j]) {
                *gi += measure::scale(c / total, *col);
            }
        }
        best = best.max(ratio(&g));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::kappa_1d;
    use alloc::vec;

    fn atoms(list: &[(f64, f64)]) -> DiscreteMeasure {
        DiscreteMeasure::from_atoms(Domain::HalfLine, list.iter().map(|&(x, w)| (vec![x], w))).unwrap()
    }

    #[test]
    fn single_atom_closed_forms() {
        let k = KernelSpec::min_half_line();
        let s = solve_fixed_point(&k, &atoms(&[(1.0, 1.0)]), 0.5, &SolveOptions::default()).unwrap();
        assert!((s.u.values()[0] - 1.0).abs() < 1e-12);
        assert!(s.report.converged && s.report.monotone_ok && s.report.final_residual <= 1e-10);
        let ev = s.evaluate(&[vec![0.5], vec![3.0]]).unwrap();
        assert!((ev.values()[0] - 0.5).abs() < 1e-12 && (ev.values()[1] - 1.0).abs() < 1e-12);

        let s = solve_fixed_point(&k, &atoms(&[(2.0, 3.0)]), 0.5, &SolveOptions::default()).unwrap();
        assert!((s.u.values()[0] - 36.0).abs() < 1e-9);
        let ev = s.evaluate(&[vec![1.0]]).unwrap();
        assert!((ev.values()[0] - 18.0).abs() < 1e-9);
    }

    #[test]
    fn two_atoms_against_damped_oracle() {
        let k = KernelSpec::min_half_line();
        let s = solve_fixed_point(&k, &atoms(&[(1.0, 1.0), (3.0, 1.0)]), 0.5, &SolveOptions::default()).unwrap();
        let (mut a, mut b) = (1.0f64, 1.0f64);
        for _ in 0..20_000 {
            let na = a.sqrt() + b.sqrt();
            let nb = a.sqrt() + 3.0 * b.sqrt();
            a = 0.5 * a + 0.5 * na;
            b = 0.5 * b + 0.5 * nb;
        }
        assert!((s.u.values()[0] - a).abs() < 1e-10 * a);
        assert!((s.u.values()[1] - b).abs() < 1e-10 * b);
    }

    #[test]
    fn zero_measure_gives_zero() {
        let s = solve_fixed_point(&KernelSpec::min_half_line(), &atoms(&[(1.0, 0.0)]), 0.5, &SolveOptions::default()).unwrap();
        assert_eq!(s.u.values(), &[0.0]);
        assert_eq!(s.report.iterations, 1);
        assert!(s.report.converged);
    }

    #[test]
    fn supersolution_checks() {
        let k = KernelSpec::min_half_line();
        let sigma = atoms(&[(1.0, 1.0), (2.5, 0.3)]);
        let s = solve_fixed_point(&k, &sigma, 0.5, &SolveOptions::default()).unwrap();
        assert!(verify_supersolution(&s.u, &k, &sigma, 0.5).unwrap().holds);
        let doubled = s.u.map(|v| 2.0 * v).unwrap();
        let c = verify_supersolution(&doubled, &k, &sigma, 0.5).unwrap();
        assert!(c.holds && c.max_violation < 0.0);
        let half = s.u.map(|v| 0.5 * v).unwrap();
        assert!(!verify_supersolution(&half, &k, &sigma, 0.5).unwrap().holds);
    }

    #[test]
    fn lower_bound_single_atom() {
        let k = KernelSpec::min_half_line();
        let sigma = atoms(&[(1.0, 1.0)]);
        let s = solve_fixed_point(&k, &sigma, 0.5, &SolveOptions::default()).unwrap();
        let r = check_lower_bounds(&s.u, &k, &sigma, 0.5).unwrap();
        assert_eq!(r.constant, 0.25);
        assert!((r.min_ratio - 4.0).abs() < 1e-10);
        assert!(r.passed() && r.asserted);
    }

    #[test]
    fn envelope_ratio_is_one_for_single_atom() {
        let s = solve_fixed_point(&KernelSpec::min_half_line(), &atoms(&[(1.0, 1.0)]), 0.5, &SolveOptions::default()).unwrap();
        let xs: Vec<f64> = (1..200).map(|i| i as f64 * 0.025).collect();
        let e = check_envelope(&s, &xs).unwrap();
        assert!((e.c_lower - 1.0).abs() < 1e-10 && (e.c_upper - 1.0).abs() < 1e-10);
    }

    #[test]
    fn dirac_estimate_matches_kappa() {
        let sigma = atoms(&[(1.0, 0.5), (4.0, 2.0), (7.5, 0.1)]);
        let grid: Vec<Vec<f64>> = (0..=60).map(|i| vec![libm::pow(10.0, -2.0 + i as f64 * 0.1)]).collect();
        let est = embedding_constant_estimate(&KernelSpec::min_half_line(), &sigma, 0.5, &grid, 100, 7).unwrap();
        assert_eq!(est, kappa_1d(&sigma, 0.5).unwrap());
    }

    #[test]
    fn fixed_seed_that_is_not_a_subsolution_is_rejected() {
        let opts = SolveOptions { seed_scale: SeedScale::Fixed(100.0), ..SolveOptions::default() };
        let r = solve_fixed_point(&KernelSpec::min_half_line(), &atoms(&[(1.0, 1.0)]), 0.5, &opts);
        assert!(matches!(r, Err(Error::NonMonotone { .. })));
    }
}
