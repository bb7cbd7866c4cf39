//! Exhaustive checks of the strong and weak equivalences on kernels
//! tabulated on at most six points, where capacities, maximum principle
//! constants and embedding constants can all be computed.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::lp;
use crate::measure::{self, DiscreteMeasure, Domain};
use crate::potential;
use crate::solver::{self, SolveOptions};

pub const MAX_POINTS: usize = 6;
/// Largest simplex lattice searched by [`exact_kappa`].
const LATTICE_LIMIT: usize = 200_000;
const ASCENT_STEPS: usize = 2_000;

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteInstance {
    points: Vec<Vec<f64>>,
    kernel: KernelSpec,
    g: Vec<Vec<f64>>,
    sigma_weights: Vec<f64>,
    q: f64,
}

impl FiniteInstance {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<Vec<f64>>, sigma_weights: Vec<f64>, q: f64) -> Result<Self> {
        if points.len() > MAX_POINTS {
            return Err(Error::InvalidParameter(format!("instances hold at most {MAX_POINTS} points, got {}", points.len())));
        }
        if sigma_weights.len() != points.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), found: sigma_weights.len() });
        }
        if sigma_weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter("sigma weights must be finite and nonnegative".into()));
        }
        solver::check_q(q)?;
        let kernel = KernelSpec::matrix(points.clone(), values.clone(), 1.0, 1.0)?;
        Ok(FiniteInstance { points, kernel, g: values, sigma_weights, q })
    }

    /// Points `0, 1, ..., m−1` on the line.
    pub fn on_line(values: Vec<Vec<f64>>, sigma_weights: Vec<f64>, q: f64) -> Result<Self> {
        let points = (0..values.len()).map(|i| vec![i as f64]).collect();
        Self::new(points, values, sigma_weights, q)
    }

    /// Random instance with `m` points: a symmetric positive matrix with a heavier
    /// diagonal times an asymmetry factor in `[1, 1.5]`. A positive diagonal keeps
    /// every maximum principle constant finite.
    pub fn random(rng: &mut ChaCha8Rng, m: usize, q: f64) -> Result<Self> {
        let mut g = vec![vec![0.0; m]; m];
        for i in 0..m {
            g[i][i] = rng.random_range(0.5..2.0);
            for j in 0..i {
                let v = rng.random_range(0.05..1.0);
                g[i][j] = v * rng.random_range(1.0..1.5);
                g[j][i] = v * rng.random_range(1.0..1.5);
            }
        }
        let w = (0..m).map(|_| if rng.random::<f64>() < 0.15 { 0.0 } else { rng.random_range(0.1..3.0) }).collect();
        Self::on_line(g, w, q)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.g
    }

    pub fn sigma_weights(&self) -> &[f64] {
        &self.sigma_weights
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn sigma(&self) -> Result<DiscreteMeasure> {
        let dim = self.points.first().map_or(1, Vec::len);
        DiscreteMeasure::from_atoms(
            Domain::Euclidean(dim),
            self.points.iter().cloned().zip(self.sigma_weights.iter().copied()).filter(|(_, w)| *w > 0.0),
        )
    }

    /// The same kernel and points with `σ` replaced by `c·σ`.
    pub fn scaled_sigma(&self, c: f64) -> Result<Self> {
        let w = self.sigma_weights.iter().map(|v| v * c).collect();
        Self::new(self.points.clone(), self.g.clone(), w, self.q)
    }

    fn apply(&self, nu: &[f64]) -> Vec<f64> {
        solver::mat_vec(&self.g, nu)
    }

    /// `Gσ_E` with `E` given as a membership mask.
    fn potential_of_restriction(&self, keep: &[bool]) -> Vec<f64> {
        let f: Vec<f64> = self.sigma_weights.iter().zip(keep).map(|(w, k)| if *k { *w } else { 0.0 }).collect();
        self.apply(&f)
    }

    fn pairs(&self, values: &[f64]) -> Vec<(f64, f64)> {
        values.iter().copied().zip(self.sigma_weights.iter().copied()).collect()
    }

    fn strong(&self, nu: &[f64]) -> f64 {
        measure::lq_from_pairs(&self.pairs(&self.apply(nu)), self.q)
    }

    fn weak(&self, values: &[f64], q: f64) -> f64 {
        measure::weak_from_pairs(self.pairs(values), q)
    }
}

/// `max G(x,y)/G(y,x)` over all pairs, `0/0` pairs skipped.
pub fn measured_a(g: &[Vec<f64>]) -> f64 {
    let mut a = 1.0f64;
    for i in 0..g.len() {
        for j in 0..g.len() {
            let (x, y) = (g[i][j], g[j][i]);
            if x > 0.0 {
                a = a.max(if y > 0.0 { x / y } else { f64::INFINITY });
            }
        }
    }
    a
}

/// The smallest `h` with `Gν ≤ h` everywhere whenever `Gν ≤ 1` on the support of
/// `ν`. For each support `S` and point `x` this is the linear program
/// `max (Gν)(x)` over `ν ≥ 0` on `S` with `Gν ≤ 1` on `S`.
pub fn measured_h(g: &[Vec<f64>]) -> f64 {
    let m = g.len();
    let mut h = 1.0f64;
    for mask in 1u32..(1 << m) {
        let s: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        let a: Vec<Vec<f64>> = s.iter().map(|&i| s.iter().map(|&j| g[i][j]).collect()).collect();
        let b = vec![1.0; s.len()];
        for row in g {
            let c: Vec<f64> = s.iter().map(|&j| row[j]).collect();
            match lp::maximize(&c, &a, &b) {
                Ok(sol) => h = h.max(sol.value),
                Err(_) => return f64::INFINITY,
            }
        }
    }
    h
}

/// Compositions of `depth` into `m` parts, scaled to the simplex.
fn for_each_lattice_point(m: usize, depth: usize, f: &mut dyn FnMut(&[f64])) {
    fn rec(k: usize, left: usize, depth: usize, parts: &mut Vec<usize>, out: &mut Vec<f64>, f: &mut dyn FnMut(&[f64])) {
        if k + 1 == parts.len() {
            parts[k] = left;
            for (o, p) in out.iter_mut().zip(parts.iter()) {
                *o = *p as f64 / depth as f64;
            }
            f(out);
            return;
        }
        for v in 0..=left {
            parts[k] = v;
            rec(k + 1, left - v, depth, parts, out, f);
        }
    }
    if m == 0 {
        return;
    }
    let mut parts = vec![0; m];
    let mut out = vec![0.0; m];
    rec(0, depth, depth, &mut parts, &mut out, f);
}

fn lattice_size(m: usize, depth: usize) -> f64 {
    // C(depth + m − 1, m − 1)
    (1..m).map(|i| (depth + i) as f64 / i as f64).product()
}

fn capped_depth(m: usize, depth: usize) -> usize {
    let mut d = depth.max(1);
    while d > 1 && lattice_size(m, d) > LATTICE_LIMIT as f64 {
        d -= 1;
    }
    d
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactKappa {
    /// Best value found, `≤` the true constant.
    pub kappa: f64,
    /// Certified upper bound from the concavity gradient bound.
    pub upper: f64,
    pub witness: Vec<f64>,
    pub dirac_lower: f64,
    pub lattice_best: f64,
    /// Lattice resolution actually used (capped so the lattice stays small).
    pub depth_used: usize,
    /// `upper − kappa ≤ 1e-6·upper`.
    pub certified: bool,
}

/// Gradient bound `max_j ∂_jF(ν)` for `F = ‖Gν‖_{L^q(σ)}`.
fn gradient_bound(inst: &FiniteInstance, nu: &[f64]) -> f64 {
    let q = inst.q;
    let image = inst.apply(nu);
    let s: f64 = image.iter().zip(&inst.sigma_weights).map(|(g, w)| if *g > 0.0 { w * libm::pow(*g, q) } else { 0.0 }).sum();
    if s == 0.0 {
        return if inst.g.iter().zip(&inst.sigma_weights).any(|(r, w)| *w > 0.0 && r.iter().any(|v| *v > 0.0)) {
            f64::INFINITY
        } else {
            0.0
        };
    }
    let scale = libm::pow(s, 1.0 / q - 1.0);
    let m = inst.len();
    let mut best = 0.0f64;
    for j in 0..m {
        let mut d = 0.0;
        for i in 0..m {
            let (w, a) = (inst.sigma_weights[i], inst.g[i][j]);
            if w > 0.0 && a > 0.0 {
                if image[i] == 0.0 {
                    return f64::INFINITY;
                }
                d += w * libm::pow(image[i], q - 1.0) * a;
            }
        }
        best = best.max(d * scale);
    }
    best
}

/// `κ = sup ‖Gν‖_{L^q(σ)} / ‖ν‖` over measures on the instance's points.
///
/// The objective is concave on the simplex, so lattice search followed by pairwise
/// mass transfers reaches the maximum, and the gradient bound at the final point
/// certifies it.
pub fn exact_kappa(inst: &FiniteInstance, search_depth: usize) -> Result<ExactKappa> {
    let m = inst.len();
    if m == 0 {
        return Ok(ExactKappa {
            kappa: 0.0,
            upper: 0.0,
            witness: Vec::new(),
            dirac_lower: 0.0,
            lattice_best: 0.0,
            depth_used: 0,
            certified: true,
        });
    }
    let mut dirac_lower = 0.0f64;
    let mut e = vec![0.0; m];
    for j in 0..m {
        e[j] = 1.0;
        dirac_lower = dirac_lower.max(inst.strong(&e));
        e[j] = 0.0;
    }
    let depth = capped_depth(m, search_depth);
    let mut best = (f64::NEG_INFINITY, vec![0.0; m]);
    for_each_lattice_point(m, depth, &mut |nu| {
        let v = inst.strong(nu);
        if v > best.0 {
            best = (v, nu.to_vec());
        }
    });
    let lattice_best = best.0;

    let (mut value, mut nu) = best;
    let mut step = 1.0 / depth as f64;
    while step > 1e-13 {
        let mut improved = false;
        for i in 0..m {
            for j in 0..m {
                if i == j || nu[i] <= 0.0 {
                    continue;
                }
                let d = step.min(nu[i]);
                nu[i] -= d;
                nu[j] += d;
                let v = inst.strong(&nu);
                if v > value {
                    value = v;
                    improved = true;
                } else {
                    nu[i] += d;
                    nu[j] -= d;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let mut upper = gradient_bound(inst, &nu);
    let bounds = potential::linear_kappa_bounds(&inst.g, &inst.sigma_weights, inst.q, ASCENT_STEPS)?;
    upper = upper.min(bounds.upper);
    if bounds.lower > value {
        value = bounds.lower;
        nu = bounds.argmax;
    }
    let kappa = value.max(dirac_lower);
    let upper = upper.max(kappa);
    Ok(ExactKappa {
        kappa,
        upper,
        witness: nu,
        dirac_lower,
        lattice_best,
        depth_used: depth,
        certified: upper - kappa <= 1e-6 * upper,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabTolerances {
    /// Relative slack in `‖Gν‖ ≤ κ‖ν‖` for the random probes.
    pub embedding_slack: f64,
    pub random_probes: usize,
    pub seed: u64,
    /// Ratio `κ / ‖u‖^{1−q}` above which a converged run counts as a blow-up.
    pub blowup_ratio: f64,
    /// Measured `h` above which the maximum principle is considered lost.
    pub large_h: f64,
    pub lattice_depth: usize,
}

impl Default for LabTolerances {
    fn default() -> Self {
        LabTolerances {
            embedding_slack: 1e-9,
            random_probes: 200,
            seed: 7,
            blowup_ratio: 1e3,
            large_h: 10.0,
            lattice_depth: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongEquivalenceReport {
    pub kappa: ExactKappa,
    pub measured_a: f64,
    pub measured_h: f64,
    pub converged: bool,
    pub monotone_ok: bool,
    /// `u` at every instance point, extended off `supp σ` by `G(u^q σ)`.
    pub u: Vec<f64>,
    pub u_norm: f64,
    pub supersolution_violation: f64,
    pub supersolution_holds: bool,
    /// `‖u‖^{1−q}_{L^q(σ)} ≤ κ`, valid for every kernel.
    pub norm_bound_holds: bool,
    /// Worst `‖Gν‖ / (κ̄‖ν‖)` over random `ν`.
    pub worst_probe_ratio: f64,
    /// `κ / ‖u‖^{1−q}`.
    pub blowup_ratio: f64,
    /// Columns `j ∈ supp σ` with `G(·, x_j) = 0` on `supp σ`.
    pub degenerate_columns: Vec<usize>,
    /// Solver converged while the embedding constant is out of proportion and the
    /// maximum principle fails: the known failure of the solution-to-embedding direction.
    pub flagged: bool,
    pub passed: bool,
}

pub fn verify_strong_equivalence(inst: &FiniteInstance, tol: &LabTolerances) -> Result<StrongEquivalenceReport> {
    let kappa = exact_kappa(inst, tol.lattice_depth)?;
    let measured_a = measured_a(&inst.g);
    let measured_h = measured_h(&inst.g);
    let sigma = inst.sigma()?;
    let opts = SolveOptions::default();
    let sol = solver::solve_fixed_point(&inst.kernel, &sigma, inst.q, &opts)?;
    let u = sol.evaluate(&inst.points)?.values().to_vec();
    let u_norm = measure::lq_from_pairs(&inst.pairs(&u), inst.q);
    let check = solver::verify_supersolution(&sol.u, &inst.kernel, &sigma, inst.q)?;

    let m = inst.len();
    let support: Vec<usize> = (0..m).filter(|&i| inst.sigma_weights[i] > 0.0).collect();
    let degenerate_columns = support.iter().copied().filter(|&j| support.iter().all(|&i| inst.g[i][j] == 0.0)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(tol.seed);
    let mut worst = 0.0f64;
    for _ in 0..tol.random_probes {
        let nu: Vec<f64> = (0..m).map(|_| if rng.random::<f64>() < 0.3 { 0.0 } else { rng.random::<f64>() }).collect();
        let total: f64 = nu.iter().sum();
        if total == 0.0 || kappa.upper == 0.0 {
            continue;
        }
        worst = worst.max(inst.strong(&nu) / (kappa.upper * total));
    }
    let lhs = libm::pow(u_norm, 1.0 - inst.q);
    let norm_bound_holds = lhs <= kappa.upper * (1.0 + 1e-9) + 1e-300;
    let blowup_ratio = if lhs > 0.0 { kappa.kappa / lhs } else if kappa.kappa > 0.0 { f64::INFINITY } else { 1.0 };
    let converged = sol.report.converged;
    let flagged = converged && blowup_ratio > tol.blowup_ratio && measured_h > tol.large_h;
    let passed = (!kappa.upper.is_finite() || (converged && check.holds))
        && worst <= 1.0 + tol.embedding_slack
        && norm_bound_holds;
    Ok(StrongEquivalenceReport {
        kappa,
        measured_a,
        measured_h,
        converged,
        monotone_ok: sol.report.monotone_ok,
        u,
        u_norm,
        supersolution_violation: check.max_violation,
        supersolution_holds: check.holds,
        norm_bound_holds,
        worst_probe_ratio: worst,
        blowup_ratio,
        degenerate_columns,
        flagged,
        passed,
    })
}

/// The negative-control family `G = [[ε, 1], [1, 1]]`, `σ = δ_{x₁}`: the solution is
/// `ε^{1/(1−q)}` at `x₁`, so `‖u‖^{1−q} = ε`, while `ν = δ_{x₂}` gives `κ ≥ 1` and the
/// maximum principle constant is `1/ε`.
pub fn max_principle_counterexample(eps: f64, q: f64) -> Result<FiniteInstance> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1], got {eps}")));
    }
    FiniteInstance::on_line(vec![vec![eps, 1.0], vec![1.0, 1.0]], vec![1.0, 0.0], q)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetCapacity {
    pub mask: u32,
    pub sigma_mass: f64,
    pub capacity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelCheck {
    pub t: f64,
    pub sigma_e_t: f64,
    /// `{Gσ > (h+1)t} ⊂ {Gσ_{E_t} > t}`.
    pub inclusion_holds: bool,
    /// Worst `cap(K) / ((ah/t) σ(E_t))` over `K ⊂ {Gσ_{E_t} > t}`.
    pub worst_capacity_ratio: f64,
    /// Worst `σ(K) / (c (ah)^q t^{−q} σ(E_t)^q)` over the same sets.
    pub worst_mass_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakEquivalenceReport {
    /// Dirac and lattice lower bound on the weak constant.
    pub kappa_w_lower: f64,
    /// The strong constant bounds the weak one.
    pub kappa_w_upper: f64,
    /// `c = max_K σ(K)/cap(K)^q`.
    pub capacity_constant: f64,
    pub subsets: Vec<SubsetCapacity>,
    /// `‖Gσ‖_{L^{q/(1−q),∞}(σ)}`.
    pub weak_norm: f64,
    pub measured_a: f64,
    pub measured_h: f64,
    /// `max_K σ(K)/cap_cov(K)^q` with the covering capacity `inf{‖λ‖ : Gλ ≥ 1 on K}`,
    /// which is the packing LP for the transposed kernel. The two capacities agree
    /// when `G` is symmetric.
    pub covering_constant: f64,
    /// `covering_constant ≤ κ_w^q`: test the weak inequality on a covering measure of `K`.
    /// The packing equilibrium need not satisfy `Gλ ≥ 1` on `K` for an asymmetric
    /// kernel, so `capacity_constant` has no such bound.
    pub capacity_bound_holds: bool,
    pub levels: Vec<LevelCheck>,
    /// Every level passes both chain inequalities and the inclusion.
    pub chain_holds: bool,
    /// `max_y ‖Gδ_y / Gσ‖_{L^{1,∞}(σ)}`, a lower bound on the constant of the
    /// step from the weak norm back to the embedding.
    pub ratio_weak_constant: f64,
    /// `(h+1)·a·h·c^{1/q}`, the bound on `weak_norm` that the level-set argument
    /// produces. Logged, not asserted: the argument bounds `σ({Gσ_{E_t} > t})`
    /// rather than `σ(E_t)` itself.
    pub weak_norm_bound: f64,
    /// All three quantities are finite (or all vanish).
    pub finiteness_agrees: bool,
}

fn chain_ok(r: f64) -> bool {
    r <= 1.0 + 1e-9
}

pub fn verify_weak_equivalence(inst: &FiniteInstance) -> Result<WeakEquivalenceReport> {
    let m = inst.len();
    let q = inst.q;
    let measured_a = measured_a(&inst.g);
    let measured_h = measured_h(&inst.g);

    let mut kappa_w_lower = 0.0f64;
    if m > 0 {
        for_each_lattice_point(m, capped_depth(m, 40), &mut |nu| {
            kappa_w_lower = kappa_w_lower.max(inst.weak(&inst.apply(nu), q));
        });
    }
    let kappa_w_upper = exact_kappa(inst, 30)?.upper;

    let mut subsets = Vec::new();
    let mut capacity_constant = 0.0f64;
    let mut covering_constant = 0.0f64;
    let mut caps = vec![0.0; 1 << m];
    for mask in 1u32..(1 << m) {
        let k: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        let g: Vec<Vec<f64>> = k.iter().map(|&i| k.iter().map(|&j| inst.g[i][j]).collect()).collect();
        let capacity = match potential::capacity_of_matrix(&g) {
            Ok(c) => c.value,
            Err(Error::Degenerate(_)) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        let gt: Vec<Vec<f64>> = (0..k.len()).map(|i| (0..k.len()).map(|j| g[j][i]).collect()).collect();
        let covering = match potential::capacity_of_matrix(&gt) {
            Ok(c) => c.value,
            Err(Error::Degenerate(_)) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        caps[mask as usize] = capacity;
        let sigma_mass: f64 = k.iter().map(|&i| inst.sigma_weights[i]).sum();
        if sigma_mass > 0.0 {
            let ratio = |c: f64| if c.is_finite() { sigma_mass / libm::pow(c, q) } else { 0.0 };
            capacity_constant = capacity_constant.max(ratio(capacity));
            covering_constant = covering_constant.max(ratio(covering));
        }
        subsets.push(SubsetCapacity { mask, sigma_mass, capacity });
    }

    let g_sigma = inst.apply(&inst.sigma_weights);
    let weak_norm = inst.weak(&g_sigma, q / (1.0 - q));

    let mut ts: Vec<f64> = g_sigma.iter().copied().filter(|v| *v > 0.0).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut grid: Vec<f64> = ts.clone();
    grid.extend(ts.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    if let Some(&lo) = ts.first() {
        grid.push(0.5 * lo);
    }
    if measured_h.is_finite() {
        grid.extend(ts.iter().map(|v| v / (measured_h + 1.0)));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let ah = measured_a * measured_h;
    let mut levels = Vec::new();
    for &t in &grid {
        let e_t: Vec<bool> = g_sigma.iter().map(|v| *v > t).collect();
        let sigma_e_t: f64 = (0..m).filter(|&i| e_t[i]).map(|i| inst.sigma_weights[i]).sum();
        let g_e = inst.potential_of_restriction(&e_t);
        let l_t: Vec<bool> = g_e.iter().map(|v| *v > t).collect();
        let inclusion_holds =
            (0..m).all(|i| !(g_sigma[i] > (measured_h + 1.0) * t * (1.0 + 1e-9)) || l_t[i]);
        let mut worst_capacity_ratio = 0.0f64;
        let mut worst_mass_ratio = 0.0f64;
        let l_mask: u32 = (0..m).filter(|&i| l_t[i]).map(|i| 1u32 << i).sum();
        let mut sub = l_mask;
        while sub != 0 {
            let cap = caps[sub as usize];
            let sigma_k: f64 = (0..m).filter(|&i| sub >> i & 1 == 1).map(|i| inst.sigma_weights[i]).sum();
            let cap_bound = ah / t * sigma_e_t;
            let r = if cap_bound > 0.0 {
                cap / cap_bound
            } else if cap > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            worst_capacity_ratio = worst_capacity_ratio.max(r);
            let mass_bound = capacity_constant * libm::pow(ah, q) * libm::pow(t, -q) * libm::pow(sigma_e_t, q);
            let r = if sigma_k == 0.0 {
                0.0
            } else if mass_bound > 0.0 {
                sigma_k / mass_bound
            } else {
                f64::INFINITY
            };
            worst_mass_ratio = worst_mass_ratio.max(r);
            sub = (sub - 1) & l_mask;
        }
        levels.push(LevelCheck { t, sigma_e_t, inclusion_holds, worst_capacity_ratio, worst_mass_ratio });
    }
    let chain_holds =
        levels.iter().all(|l| l.inclusion_holds && chain_ok(l.worst_capacity_ratio) && chain_ok(l.worst_mass_ratio));

    let mut ratio_weak_constant = 0.0f64;
    for j in 0..m {
        let col: Vec<f64> = (0..m)
            .map(|i| {
                if g_sigma[i] > 0.0 {
                    inst.g[i][j] / g_sigma[i]
                } else if inst.g[i][j] > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            })
            .collect();
        ratio_weak_constant = ratio_weak_constant.max(inst.weak(&col, 1.0));
    }
    let capacity_bound_holds = covering_constant <= libm::pow(kappa_w_upper, q) * (1.0 + 1e-9) + 1e-300;
    let finite = [kappa_w_lower, capacity_constant, weak_norm].map(f64::is_finite);
    let finiteness_agrees = finite.iter().all(|f| *f) || finite.iter().all(|f| !*f);
    Ok(WeakEquivalenceReport {
        kappa_w_lower,
        kappa_w_upper,
        capacity_constant,
        covering_constant,
        subsets,
        weak_norm,
        measured_a,
        measured_h,
        capacity_bound_holds,
        levels,
        chain_holds,
        ratio_weak_constant,
        weak_norm_bound: (measured_h + 1.0) * ah * libm::pow(capacity_constant, 1.0 / q),
        finiteness_agrees,
    })
}
