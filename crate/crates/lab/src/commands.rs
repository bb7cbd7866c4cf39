use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sublin_core::lab::{self, FiniteInstance, LabTolerances};
use sublin_core::maximal::{self, MaxQueryMode};
use sublin_core::measure::{self, DiscreteMeasure, Domain, GridFunction};
use sublin_core::poisson::{self, BoundaryGrid};
use sublin_core::solver::{self, FixedPointSolution, SolveOptions};
use sublin_core::{kernel, potential, IterationReport, KernelSpec, SeedScale};

use crate::cli::{Command, ConstantsArgs, IterArgs, KernelArg, KernelArgs, MaximalArgs, MaximalOp, ModeArg, SolveArgs, VerifyArgs};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::report::{num, nums, points, InputDigest, RunReport, Semantics};
use crate::schema::{self, DyadicEntryJson, InstanceFile, MatrixJson, MeasureJson};
use crate::table::Table;

/// A finished command: the report and the plot table.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    pub table: Table,
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Solve(a) => solve(a),
        Command::Constants(a) => constants(a),
        Command::Maximal(a) => maximal(a),
        Command::Verify(a) => verify(a),
    }
}

fn tagged(v: f64, s: Semantics) -> Value {
    json!({ "value": num(v), "semantics": s.to_string() })
}

fn load_measure(d: &mut InputDigest, name: &str, path: &std::path::Path, refinement: u32) -> Result<DiscreteMeasure> {
    let (bytes, m): (_, MeasureJson) = schema::load(path)?;
    d.file(name, &bytes);
    m.to_measure(refinement)
}

fn build_kernel(args: &KernelArgs, domain: Domain, d: &mut InputDigest) -> Result<KernelSpec> {
    d.arg("kernel", format!("{:?}", args.kernel));
    match args.kernel {
        KernelArg::Min => Ok(KernelSpec::min_half_line()),
        KernelArg::Riesz => {
            let Domain::Euclidean(n) = domain else {
                return Err(Error::Usage("--kernel riesz needs a euclidean measure".into()));
            };
            let alpha = args.alpha.ok_or_else(|| Error::Usage("--kernel riesz needs --alpha".into()))?;
            // strong maximum principle for alpha <= 2, the classical 2^(n-alpha) otherwise
            let h = args.h.unwrap_or(if alpha <= 2.0 { 1.0 } else { 2f64.powf(n as f64 - alpha) });
            d.arg("alpha", alpha).arg("h", h);
            Ok(KernelSpec::riesz(n, alpha, h)?)
        }
        KernelArg::Ppstar => match domain {
            Domain::UpperHalfSpace(n) => Ok(KernelSpec::pp_star(n)?),
            _ => Err(Error::Usage("--kernel ppstar needs an upper_half_space measure".into())),
        },
        KernelArg::Matrix => {
            let path = args.matrix.as_ref().ok_or_else(|| Error::Usage("--kernel matrix needs --matrix".into()))?;
            let (bytes, m): (_, MatrixJson) = schema::load(path)?;
            d.file("matrix", &bytes);
            m.to_kernel()
        }
    }
}

fn options(it: &IterArgs) -> Result<SolveOptions> {
    if !(it.tol > 0.0) || it.max_iter == 0 {
        return Err(Error::Usage("--tol must be positive and --max-iter at least 1".into()));
    }
    Ok(SolveOptions { tolerance: it.tol, max_iterations: it.max_iter, seed_scale: SeedScale::Auto })
}

fn digest_iter(d: &mut InputDigest, it: &IterArgs) {
    d.arg("tol", it.tol).arg("max_iter", it.max_iter).arg("refinement", it.refinement);
}

/// Turns a detected divergence into a report with exit code 2.
fn diverged(mut report: RunReport, e: sublin_core::Error, columns: &[&str]) -> Result<Outcome> {
    match e {
        sublin_core::Error::Divergence { .. } => {
            report.warn(e.to_string());
            report.output("diverged", Value::Bool(true), Semantics::Exact);
            report.exit_code = 2;
            Ok(Outcome { report, table: Table::new(columns) })
        }
        e => Err(e.into()),
    }
}

fn put_iteration(rep: &mut RunReport, r: &IterationReport, tol: f64) {
    rep.output("iterations", json!(r.iterations), Semantics::Exact);
    rep.output("converged", json!(r.converged), Semantics::Exact);
    rep.output("monotone_ok", json!(r.monotone_ok), Semantics::Exact);
    rep.output("norm_trace", nums(&r.norm_trace), Semantics::Iterative(tol));
    rep.constant("final_residual", r.final_residual, Semantics::Exact);
    rep.constant("seed_scale", r.seed_scale, Semantics::Exact);
    if !r.degenerate_samples.is_empty() {
        rep.warn(format!("σ has mass where the seed vanishes, at samples {:?}", r.degenerate_samples));
    }
    if !r.converged {
        rep.warn(format!("stopped after {} iterations without reaching --tol", r.iterations));
        rep.exit_code = 2;
    }
}

fn coord_columns(dim: usize, tail: &[&str]) -> Vec<String> {
    let mut c: Vec<String> = if dim == 1 { vec!["x".into()] } else { (0..dim).map(|i| format!("x{i}")).collect() };
    c.extend(tail.iter().map(|s| s.to_string()));
    c
}

fn table(columns: Vec<String>) -> Table {
    Table { columns, rows: Vec::new() }
}

fn line_points(grid: &Option<GridSpec>, dim: usize, fallback: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    match grid {
        Some(_) if dim != 1 => Err(Error::Usage("--grid describes points on a line; the measure is not one-dimensional".into())),
        Some(g) => Ok(g.points().into_iter().map(|x| vec![x]).collect()),
        None => Ok(fallback),
    }
}

pub fn solve(a: &SolveArgs) -> Result<Outcome> {
    let mut d = InputDigest::new("solve");
    let sigma = load_measure(&mut d, "measure", &a.measure, a.iter.refinement)?;
    d.arg("q", a.q);
    digest_iter(&mut d, &a.iter);
    if let Some(g) = &a.grid {
        d.arg("grid", format!("{g:?}"));
    }
    if let Some(n) = a.boundary_nodes {
        d.arg("boundary_nodes", n).arg("radius", a.radius);
    }
    let k = build_kernel(&a.kernel, sigma.domain(), &mut d)?;
    let opts = options(&a.iter)?;
    let mut rep = RunReport::new("solve", d.finish());
    let half_line = sigma.domain() == Domain::HalfLine && a.kernel.kernel == KernelArg::Min;
    let columns: Vec<&str> = if half_line { vec!["x", "u", "envelope", "lower_bound"] } else { vec![] };

    let solved = match a.kernel.kernel {
        KernelArg::Ppstar => poisson::carleson_fixed_point(&sigma, a.q, &opts),
        _ => solver::solve_fixed_point(&k, &sigma, a.q, &opts),
    };
    let sol = match solved {
        Ok(s) => s,
        Err(e) => return diverged(rep, e, &columns),
    };
    let tol = Semantics::Iterative(a.iter.tol);
    rep.output("points", points(&sigma.sample_points()), Semantics::Exact);
    rep.output("u", nums(sol.u.values()), tol);
    put_iteration(&mut rep, &sol.report, a.iter.tol);

    let lb = solver::check_lower_bounds(&sol.u, &k, &sigma, a.q)?;
    rep.constant("lower_bound_constant", lb.constant, Semantics::Exact);
    rep.constant("lower_bound_min_ratio", lb.min_ratio, tol);
    if lb.asserted && !lb.violations.is_empty() {
        rep.warn(format!("u falls below (1-q)^(1/(1-q)) (Gσ)^(1/(1-q)) at {:?}", lb.violations));
    }
    if lb.asserted && lb.violations.is_empty() && !lb.passed() {
        rep.warn(format!("half-line margins fail: tail {:?}, head {:?}", lb.tail_margin, lb.head_margin));
    }

    let e = 1.0 / (1.0 - a.q);
    let table = if half_line {
        solve_half_line(&mut rep, &sol, &a.grid, lb.constant, e, tol)?
    } else {
        let pts = sigma.sample_points();
        let g = potential::apply_potential(&k, &sigma, &pts)?;
        let mut t = table(coord_columns(sigma.dim(), &["u", "lower_bound"]));
        for ((p, u), gs) in pts.iter().zip(sol.u.values()).zip(g.values()) {
            let mut row = p.clone();
            row.extend([*u, lb.constant * gs.powf(e)]);
            t.push(row);
        }
        t
    };

    if let Some(nodes) = a.boundary_nodes {
        if a.kernel.kernel != KernelArg::Ppstar {
            return Err(Error::Usage("--boundary-nodes applies to --kernel ppstar".into()));
        }
        let grid = BoundaryGrid::uniform(sigma.dim() - 1, a.radius, nodes)?;
        let b = match poisson::boundary_fixed_point(&sigma, a.q, &grid, &opts) {
            Ok(b) => b,
            Err(e) => return diverged(rep, e, &[]),
        };
        let quad = Semantics::Quadrature(b.tail_bound);
        rep.constant("phi_l1_norm", b.l1_norm, quad);
        rep.constant("u_norm_q", b.u_norm_q, tol);
        rep.constant("cross_identity_error", b.cross_identity_error, quad);
        rep.constant("extension_error", b.extension_error, quad);
        rep.constant("tail_bound", b.tail_bound, Semantics::UpperBound);
        rep.output("extension_on_sigma", nums(b.extension_on_sigma.values()), quad);
        if let Some(w) = b.warning {
            rep.warn(w);
        }
        if !b.report.converged {
            rep.warn("boundary iteration stopped before reaching --tol");
            rep.exit_code = 2;
        }
    }
    Ok(Outcome { report: rep, table })
}

fn solve_half_line(
    rep: &mut RunReport,
    sol: &FixedPointSolution,
    grid: &Option<GridSpec>,
    constant: f64,
    e: f64,
    tol: Semantics,
) -> Result<Table> {
    let sigma = sol.sigma();
    let mut xs: Vec<f64> = sigma.sample_points().into_iter().map(|p| p[0]).collect();
    if let Some(g) = grid {
        xs.extend(g.points().into_iter().filter(|x| *x > 0.0));
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let env = solver::check_envelope(sol, &xs)?;
    rep.constant("envelope_ratio_lower", env.c_lower, tol);
    rep.constant("envelope_ratio_upper", env.c_upper, tol);
    rep.constant("kappa_1d", potential::kappa_1d(sigma, sol.q())?, Semantics::Exact);
    let query: Vec<Vec<f64>> = xs.iter().map(|x| vec![*x]).collect();
    let u = sol.evaluate(&query)?;
    let g = potential::apply_potential(sol.kernel(), sigma, &query)?;
    let envelope = potential::envelope(sigma, sol.q(), &xs)?;
    let mut t = Table::new(&["x", "u", "envelope", "lower_bound"]);
    for (i, x) in xs.iter().enumerate() {
        t.push(vec![*x, u.values()[i], envelope[i].envelope, constant * g.values()[i].powf(e)]);
    }
    Ok(t)
}

fn dirac_norms(k: &KernelSpec, sigma: &DiscreteMeasure, q: f64, grid: &[Vec<f64>]) -> Result<Vec<f64>> {
    let pts = sigma.sample_points();
    grid.iter()
        .map(|y| {
            let delta = DiscreteMeasure::dirac(sigma.domain(), y.clone(), 1.0)?;
            let g = potential::apply_potential(k, &delta, &pts)?;
            Ok(measure::lq_norm(&g, sigma, q)?)
        })
        .collect()
}

fn mode(arg: Option<ModeArg>, dim: usize, refinement: u32) -> MaxQueryMode {
    match arg {
        Some(ModeArg::CenteredBalls) => MaxQueryMode::CenteredBalls,
        Some(ModeArg::CenteredCubes) => MaxQueryMode::CenteredCubes,
        Some(ModeArg::Uncentered1d) => MaxQueryMode::UncenteredCubes1D,
        Some(ModeArg::UncenteredApprox) => MaxQueryMode::UncenteredApprox(refinement),
        None if dim == 1 => MaxQueryMode::UncenteredCubes1D,
        None => MaxQueryMode::CenteredCubes,
    }
}

pub fn constants(a: &ConstantsArgs) -> Result<Outcome> {
    let mut d = InputDigest::new("constants");
    let sigma = load_measure(&mut d, "measure", &a.measure, a.refinement)?;
    d.arg("q", a.q).arg("mixtures", a.mixtures).arg("seed", a.seed).arg("refinement", a.refinement);
    if let Some(x) = a.a {
        d.arg("a", x);
    }
    if let Some(g) = &a.grid {
        d.arg("grid", format!("{g:?}"));
    }
    if let Some(alpha) = a.max_alpha {
        d.arg("max_alpha", alpha).arg("mode", format!("{:?}", a.mode));
    }
    let k = build_kernel(&a.kernel, sigma.domain(), &mut d)?;
    let mut rep = RunReport::new("constants", d.finish());
    let half_line = sigma.domain() == Domain::HalfLine && a.kernel.kernel == KernelArg::Min;

    let default_grid = if half_line {
        GridSpec::Geometric { a: 1e-3, b: 1e6, n: 200 }.points().into_iter().map(|y| vec![y]).collect()
    } else {
        sigma.sample_points()
    };
    let grid = line_points(&a.grid, sigma.dim(), default_grid)?;

    let estimate = solver::embedding_constant_estimate(&k, &sigma, a.q, &grid, a.mixtures, a.seed)?;
    rep.constant("embedding_estimate", estimate, Semantics::LowerBound);
    if half_line {
        let kappa = potential::kappa_1d(&sigma, a.q)?;
        rep.constant("kappa_1d", kappa, Semantics::Exact);
        if kappa > 0.0 {
            rep.constant("estimate_over_kappa_1d", estimate / kappa, Semantics::LowerBound);
        }
        if let Some(x) = a.a {
            rep.constant("kappa_localized", potential::kappa_localized(&sigma, a.q, x)?, Semantics::Exact);
        }
    } else if a.a.is_some() {
        rep.warn("--a applies to the half-line kernel only, ignored");
    }

    let pts = sigma.sample_points();
    let g = potential::apply_potential(&k, &sigma, &pts)?;
    let r = a.q / (1.0 - a.q);
    let strong = measure::lq_norm(&g, &sigma, r)?;
    rep.constant("gsigma_strong_norm", strong, Semantics::Exact);
    rep.constant("gsigma_weak_norm", measure::weak_lq_norm(&g, &sigma, r)?, Semantics::Exact);
    if !strong.is_finite() {
        rep.warn("Gσ is not in L^{q/(1-q)}(σ); no solution with u in L^q(σ) exists");
    }

    if let Some(alpha) = a.max_alpha {
        let m = mode(a.mode, sigma.dim(), 4);
        let w = maximal::weak_embedding_estimate_maximal(&sigma, alpha, a.q, &grid, m)?;
        rep.constant("maximal_kappa_w_lower", w.kappa_w_lower, Semantics::LowerBound);
        rep.constant("maximal_sigma_weak_norm", w.sigma_weak_norm, w.semantics.into());
        rep.constant("maximal_holder_product", w.holder_product, w.semantics.into());
        rep.output("maximal_mode", json!(m.name()), Semantics::Exact);
    }

    let mut t = table(if sigma.dim() == 1 {
        vec!["y".into(), "dirac_norm".into()]
    } else {
        let mut c: Vec<String> = (0..sigma.dim()).map(|i| format!("y{i}")).collect();
        c.push("dirac_norm".into());
        c
    });
    for (y, v) in grid.iter().zip(dirac_norms(&k, &sigma, a.q, &grid)?) {
        let mut row = y.clone();
        row.push(v);
        t.push(row);
    }
    Ok(Outcome { report: rep, table: t })
}

/// Largest sample count for which the maximal linearization is formed.
const LINEARIZATION_LIMIT: usize = 400;

pub fn maximal(a: &MaximalArgs) -> Result<Outcome> {
    let mut d = InputDigest::new("maximal");
    let nu = load_measure(&mut d, "measure", &a.measure, a.iter.refinement)?;
    d.arg("op", format!("{:?}", a.op)).arg("alpha", a.alpha).arg("mode", format!("{:?}", a.mode));
    d.arg("approx_refinement", a.approx_refinement).arg("seed", a.seed);
    digest_iter(&mut d, &a.iter);
    if let Some(g) = &a.grid {
        d.arg("grid", format!("{g:?}"));
    }
    if let Some(q) = a.q {
        d.arg("q", q);
    }
    let m = mode(a.mode, nu.dim(), a.approx_refinement);
    let sigma = match &a.sigma {
        Some(p) => Some(load_measure(&mut d, "sigma", p, a.iter.refinement)?),
        None => None,
    };
    let rho = match &a.rho {
        Some(p) => {
            let (bytes, entries): (_, Vec<DyadicEntryJson>) = schema::load(p)?;
            d.file("rho", &bytes);
            Some(schema::to_weight_map(&entries)?)
        }
        None => None,
    };
    let mut rep = RunReport::new("maximal", d.finish());
    rep.output("op", json!(format!("{:?}", a.op).to_lowercase()), Semantics::Exact);

    let value_table = |pts: &[Vec<f64>], vals: &[f64], name: &str| {
        let mut t = table(coord_columns(nu.dim(), &[name]));
        for (p, v) in pts.iter().zip(vals) {
            let mut row = p.clone();
            row.push(*v);
            t.push(row);
        }
        t
    };

    let t = match a.op {
        MaximalOp::Frac | MaximalOp::Dyadic | MaximalOp::Measure => {
            let fallback = match (&a.op, &sigma) {
                (MaximalOp::Measure, Some(s)) => s.sample_points(),
                _ => nu.sample_points(),
            };
            let pts = line_points(&a.grid, nu.dim(), fallback)?;
            let (vals, sem): (Vec<f64>, Semantics) = match a.op {
                MaximalOp::Frac => {
                    rep.output("mode", json!(m.name()), Semantics::Exact);
                    let v = pts.iter().map(|x| maximal::frac_max(&nu, a.alpha, x, m)).collect::<sublin_core::Result<_>>()?;
                    (v, m.semantics(&nu).into())
                }
                MaximalOp::Dyadic => {
                    let rho = rho.as_ref().ok_or_else(|| Error::Usage("--op dyadic needs --rho".into()))?;
                    let v = pts.iter().map(|x| maximal::dyadic_max(&nu, rho, x)).collect::<sublin_core::Result<_>>()?;
                    (v, Semantics::Exact)
                }
                _ => {
                    let s = sigma.as_ref().ok_or_else(|| Error::Usage("--op measure needs --sigma".into()))?;
                    rep.output("mode", json!(m.name()), Semantics::Exact);
                    let v = pts.iter().map(|x| maximal::measure_max(&nu, s, x, m)).collect::<sublin_core::Result<_>>()?;
                    (v, m.semantics(s).into())
                }
            };
            rep.output("points", points(&pts), Semantics::Exact);
            rep.output("values", nums(&vals), sem);
            value_table(&pts, &vals, "value")
        }
        MaximalOp::FixedPoint => {
            let q = a.q.ok_or_else(|| Error::Usage("--op fixed-point needs --q".into()))?;
            let opts = options(&a.iter)?;
            rep.output("mode", json!(m.name()), Semantics::Exact);
            let (u, report) = match maximal::maximal_fixed_point(&nu, a.alpha, q, m, &opts) {
                Ok(r) => r,
                Err(e) => return diverged(rep, e, &[]),
            };
            put_iteration(&mut rep, &report, a.iter.tol);
            rep.output("points", points(u.points()), Semantics::Exact);
            rep.output("u", nums(u.values()), Semantics::Iterative(a.iter.tol));
            if nu.samples().len() <= LINEARIZATION_LIMIT && !nu.is_zero() {
                let lin = maximal::maximal_linearization(&nu, a.alpha, m)?;
                let b = potential::linear_kappa_bounds(&lin, &nu.sample_weights(), q, 500)?;
                rep.constant("kappa_upper", b.upper, Semantics::UpperBound);
                let cap = b.upper.powf(q / (1.0 - q));
                if report.norm_trace.iter().any(|n| n.powf(q) > cap * (1.0 + 1e-6)) {
                    rep.warn("norm trace exceeds kappa^(q/(1-q)) for the certified kappa");
                }
            }
            value_table(u.points(), u.values(), "u")
        }
    };
    Ok(Outcome { report: rep, table: t })
}

fn instance_summary(name: &str, control: bool, inst: &FiniteInstance) -> Result<(Value, Vec<f64>, bool, bool)> {
    let s = lab::verify_strong_equivalence(inst, &LabTolerances::default())?;
    let w = lab::verify_weak_equivalence(inst)?;
    let failed = !w.chain_holds || !w.finiteness_agrees || !w.capacity_bound_holds || (!s.passed && !s.flagged);
    let kappa_sem = if s.kappa.certified { Semantics::Exact } else { Semantics::LowerBound };
    let value = json!({
        "name": name,
        "negative_control": control,
        "points": inst.len(),
        "q": inst.q(),
        "kappa": tagged(s.kappa.kappa, kappa_sem),
        "kappa_upper": tagged(s.kappa.upper, Semantics::UpperBound),
        "measured_a": tagged(s.measured_a, Semantics::Exact),
        "measured_h": tagged(s.measured_h, Semantics::Exact),
        "u_norm": tagged(s.u_norm, Semantics::Iterative(SolveOptions::default().tolerance)),
        "blowup_ratio": tagged(s.blowup_ratio, Semantics::Exact),
        "converged": s.converged,
        "strong_passed": s.passed,
        "flagged": s.flagged,
        "kappa_w_lower": tagged(w.kappa_w_lower, Semantics::LowerBound),
        "kappa_w_upper": tagged(w.kappa_w_upper, Semantics::UpperBound),
        "capacity_constant": tagged(w.capacity_constant, Semantics::Exact),
        "covering_constant": tagged(w.covering_constant, Semantics::Exact),
        "weak_norm": tagged(w.weak_norm, Semantics::Exact),
        "weak_norm_bound": tagged(w.weak_norm_bound, Semantics::Exact),
        "ratio_weak_constant": tagged(w.ratio_weak_constant, Semantics::LowerBound),
        "chain_holds": w.chain_holds,
        "capacity_bound_holds": w.capacity_bound_holds,
        "finiteness_agrees": w.finiteness_agrees,
        "failed": failed,
    });
    let b = |x: bool| if x { 1.0 } else { 0.0 };
    let row = vec![
        inst.len() as f64,
        inst.q(),
        s.kappa.kappa,
        s.kappa.upper,
        s.measured_a,
        s.measured_h,
        s.blowup_ratio,
        b(s.flagged),
        b(w.chain_holds),
        b(s.passed),
    ];
    Ok((value, row, failed, s.flagged))
}

/// Comparison points for the weak maximum principle: the support plus displaced copies.
fn weak_max_grid(mu: &DiscreteMeasure) -> Vec<Vec<f64>> {
    let pts = mu.sample_points();
    let mut grid = Vec::new();
    for p in &pts {
        match mu.domain() {
            Domain::UpperHalfSpace(n) => {
                for s in [0.01, 0.1, 0.5, 2.0, 10.0] {
                    let mut v = p.clone();
                    v[n] *= s;
                    grid.push(v);
                }
            }
            Domain::HalfLine => grid.extend([0.5, 2.0, 10.0].map(|s| vec![p[0] * s])),
            Domain::Euclidean(_) => {}
        }
    }
    for (i, p) in pts.iter().enumerate() {
        for r in &pts[i + 1..] {
            grid.push(p.iter().zip(r).map(|(a, b)| 0.5 * (a + b)).collect());
        }
    }
    grid
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let mut d = InputDigest::new("verify");
    let mut set: Vec<(String, bool, FiniteInstance)> = Vec::new();
    if let Some(p) = &a.instances {
        let (bytes, file): (_, InstanceFile) = schema::load(p)?;
        d.file("instances", &bytes);
        for (i, j) in file.into_vec().into_iter().enumerate() {
            let name = j.name.clone().unwrap_or_else(|| format!("instance[{i}]"));
            set.push((name, false, j.to_instance()?));
        }
    }
    d.arg("random", a.random).arg("seed", a.seed).arg("size", format!("{:?}", a.size)).arg("q", format!("{:?}", a.q));
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    for i in 0..a.random {
        let m = a.size.unwrap_or(3 + i % 3);
        let q = a.q.unwrap_or([0.3, 0.5, 0.7][i % 3]);
        set.push((format!("random[{i}]"), false, FiniteInstance::random(&mut rng, m, q)?));
    }
    d.arg("negative_controls", a.negative_controls);
    if a.negative_controls {
        for eps in [1e-2, 1e-3, 1e-4, 1e-5] {
            for q in [0.3, 0.5, 0.7] {
                set.push((format!("control(eps={eps:e}, q={q})"), true, lab::max_principle_counterexample(eps, q)?));
            }
        }
    }
    let mu = match &a.measure {
        Some(p) => Some(load_measure(&mut d, "measure", p, 2)?),
        None => None,
    };
    if set.is_empty() && mu.is_none() {
        return Err(Error::Usage("nothing to verify: give --instances, --random, --negative-controls or --measure".into()));
    }
    let k = match &mu {
        Some(m) => Some(build_kernel(&a.kernel, m.domain(), &mut d)?),
        None => None,
    };
    let mut rep = RunReport::new("verify", d.finish());

    let mut t = Table::new(&[
        "index", "points", "q", "kappa", "kappa_upper", "measured_a", "measured_h", "blowup_ratio", "flagged", "chain_holds", "strong_passed",
    ]);
    let mut summaries = Vec::new();
    let (mut failures, mut controls, mut fired) = (0usize, 0usize, 0usize);
    for (i, (name, control, inst)) in set.iter().enumerate() {
        let (value, row, failed, flagged) = instance_summary(name, *control, inst)?;
        if *control {
            controls += 1;
            fired += flagged as usize;
        } else if failed {
            failures += 1;
            rep.warn(format!("{name}: an equivalence check failed"));
        } else if flagged {
            rep.warn(format!("{name}: flagged as converging while the embedding constant blows up"));
        }
        summaries.push(value);
        let mut r = vec![i as f64];
        r.extend(row);
        t.push(r);
    }
    rep.output("instances", Value::Array(summaries), Semantics::Exact);
    rep.output("failures", json!(failures), Semantics::Exact);
    if controls > 0 {
        rep.output("negative_controls_flagged", json!(fired), Semantics::Exact);
        if fired == 0 {
            rep.warn("no negative control was flagged");
            failures += 1;
        }
    }

    if let (Some(mu), Some(k)) = (&mu, &k) {
        let grid = weak_max_grid(mu);
        let w = kernel::check_weak_max(k, mu, &grid)?;
        rep.constant("empirical_h", w.empirical_h, Semantics::LowerBound);
        rep.constant("declared_h", k.declared_h(), Semantics::Exact);
        rep.output("weak_max_witness", nums(&w.witness_point), Semantics::Exact);
        if w.exceeds_declared {
            failures += 1;
            rep.warn(format!("empirical h {} exceeds the declared {}", w.empirical_h, k.declared_h()));
        }
        let pts = mu.sample_points();
        let pairs: Vec<(Vec<f64>, Vec<f64>)> =
            pts.iter().enumerate().flat_map(|(i, p)| pts[i + 1..].iter().map(move |r| (p.clone(), r.clone()))).collect();
        let qs = kernel::check_quasi_symmetry(k, &pairs)?;
        rep.constant("quasi_symmetry", qs, Semantics::LowerBound);
        if qs > k.declared_a() * (1.0 + 1e-12) {
            failures += 1;
            rep.warn(format!("quasi-symmetry ratio {qs} exceeds the declared a = {}", k.declared_a()));
        }
        let g = potential::apply_potential(k, mu, &pts)?;
        rep.output("potential_on_support", nums(GridFunction::values(&g)), Semantics::Exact);
    }
    if failures > 0 {
        rep.exit_code = 2;
    }
    Ok(Outcome { report: rep, table: t })
}
