use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sublin_core::kernel::{self, KernelSpec};
use sublin_core::lab::{self, FiniteInstance};
use sublin_core::maximal::{self, MaxQueryMode};
use sublin_core::measure::{self, CellAtom, DiscreteMeasure, Domain, GridFunction, PointAtom};
use sublin_core::potential;
use sublin_core::solver::{self, SolveOptions};
use sublin_core::AxisBox;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn random_measure(seed: u64, domain: Domain, max_atoms: usize, max_cells: usize, refinement: u32) -> DiscreteMeasure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = domain.dim();
    let coord = |rng: &mut ChaCha8Rng, d: usize| match domain {
        Domain::HalfLine => rng.random_range(0.05..10.0),
        Domain::UpperHalfSpace(k) if d == k => rng.random_range(0.1..3.0),
        _ => rng.random_range(-3.0..3.0),
    };
    let atoms: Vec<PointAtom> = (0..rng.random_range(0..=max_atoms))
        .map(|_| PointAtom { location: (0..n).map(|d| coord(&mut rng, d)).collect(), weight: rng.random_range(0.05..3.0) })
        .collect();
    let mut cells: Vec<CellAtom> = (0..rng.random_range(0..=max_cells))
        .map(|_| {
            let lo: Vec<f64> = (0..n).map(|d| coord(&mut rng, d)).collect();
            let hi = lo.iter().map(|v| v + rng.random_range(0.1..2.0)).collect();
            CellAtom { cell: AxisBox::new(lo, hi).unwrap(), weight: rng.random_range(0.05..3.0) }
        })
        .collect();
    if atoms.is_empty() && cells.is_empty() {
        let lo = vec![0.5; n];
        cells.push(CellAtom { cell: AxisBox::new(lo, vec![1.5; n]).unwrap(), weight: 1.0 });
    }
    DiscreteMeasure::with_refinement(domain, atoms, cells, refinement).unwrap()
}

fn cell_measure_1d(seed: u64) -> DiscreteMeasure {
    random_measure(seed, Domain::Euclidean(1), 0, 3, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn box_mass_is_additive_over_a_partition(seed in any::<u64>(), n in 1usize..=2, cuts in 1usize..6) {
        let nu = random_measure(seed, Domain::Euclidean(n), 6, 4, 0);
        let (lo, hi) = (-3.5, 5.5);
        let step = (hi - lo) / cuts as f64;
        let mut sum = 0.0;
        for idx in 0..cuts.pow(n as u32) {
            let l: Vec<f64> = (0..n).map(|d| lo + step * ((idx / cuts.pow(d as u32)) % cuts) as f64).collect();
            let h = l.iter().map(|v| v + step).collect();
            sum += nu.half_open_box_mass(&AxisBox::new(l, h).unwrap()).unwrap();
        }
        prop_assert!(rel(sum, nu.total_mass()) <= 1e-12);
    }

    #[test]
    fn norms_scale_order_and_compare(seed in any::<u64>(), q in 0.2f64..3.0, c in 0.1f64..10.0) {
        let sigma = random_measure(seed, Domain::Euclidean(1), 8, 2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let pts = sigma.sample_points();
        let f: Vec<f64> = pts.iter().map(|_| rng.random_range(0.0..5.0)).collect();
        let g: Vec<f64> = f.iter().map(|v| v + rng.random_range(0.0..1.0)).collect();
        let ff = GridFunction::new(pts.clone(), f.clone()).unwrap();
        let gg = GridFunction::new(pts.clone(), g).unwrap();
        let cf = GridFunction::new(pts, f.iter().map(|v| c * v).collect()).unwrap();
        let (s, w) = (measure::lq_norm(&ff, &sigma, q).unwrap(), measure::weak_lq_norm(&ff, &sigma, q).unwrap());
        prop_assert!(rel(measure::lq_norm(&cf, &sigma, q).unwrap(), c * s) <= 1e-12);
        prop_assert!(rel(measure::weak_lq_norm(&cf, &sigma, q).unwrap(), c * w) <= 1e-12);
        prop_assert!(s <= measure::lq_norm(&gg, &sigma, q).unwrap() * (1.0 + 1e-12));
        prop_assert!(w <= measure::weak_lq_norm(&gg, &sigma, q).unwrap() * (1.0 + 1e-12));
        prop_assert!(w <= s * (1.0 + 1e-12));
    }

    #[test]
    fn builtin_kernels_are_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = |rng: &mut ChaCha8Rng, f: &dyn Fn(&mut ChaCha8Rng) -> Vec<f64>| -> Vec<(Vec<f64>, Vec<f64>)> {
            (0..20).map(|_| (f(rng), f(rng))).collect()
        };
        let half = pts(&mut rng, &|r| vec![r.random_range(0.01..10.0)]);
        let eu = pts(&mut rng, &|r| vec![r.random_range(-3.0..3.0), r.random_range(-3.0..3.0)]);
        let uhs = pts(&mut rng, &|r| vec![r.random_range(-3.0..3.0), r.random_range(0.01..3.0)]);
        let cases = [
            (KernelSpec::min_half_line(), half),
            (KernelSpec::riesz(2, 1.0, 1.0).unwrap(), eu),
            (KernelSpec::pp_star(1).unwrap(), uhs),
        ];
        for (k, samples) in &cases {
            prop_assert_eq!(kernel::check_quasi_symmetry(k, samples).unwrap(), 1.0);
            for (x, y) in samples {
                prop_assert_eq!(k.eval(x, y).unwrap(), k.eval(y, x).unwrap());
            }
        }
    }

    #[test]
    fn hardy_split_and_envelope_shape(seed in any::<u64>(), q in 0.1f64..0.9) {
        let sigma = random_measure(seed, Domain::HalfLine, 8, 3, 1);
        let xs: Vec<f64> = (1..60).map(|i| 0.2 * i as f64).collect();
        let g = potential::apply_potential(&KernelSpec::min_half_line(), &sigma, &xs.iter().map(|x| vec![*x]).collect::<Vec<_>>()).unwrap();
        for (x, gx) in xs.iter().zip(g.values()) {
            let split = potential::hardy_plus(&sigma, *x).unwrap() + potential::hardy_minus(&sigma, *x).unwrap();
            prop_assert!(rel(split, *gx) <= 1e-12);
        }
        let env = potential::envelope(&sigma, q, &xs).unwrap();
        for w in env.windows(2) {
            prop_assert!(w[1].head_term >= w[0].head_term * (1.0 - 1e-12));
            prop_assert!(w[1].k_term / w[1].x <= w[0].k_term / w[0].x * (1.0 + 1e-12));
            prop_assert!(rel(w[0].envelope, w[0].head_term + w[0].k_term) <= 1e-15);
        }
    }

    #[test]
    fn capacity_lp_is_feasible_and_tight(seed in any::<u64>(), m in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = (0..m).map(|_| vec![rng.random_range(0.1..10.0)]).collect();
        let k = KernelSpec::min_half_line();
        let c = potential::finite_capacity(&k, &pts).unwrap();
        prop_assert!(rel(c.value, c.equilibrium_weights.iter().sum()) <= 1e-12);
        for (i, x) in pts.iter().enumerate() {
            let load: f64 = pts.iter().zip(&c.equilibrium_weights).map(|(y, l)| k.eval(x, y).unwrap() * l).sum();
            prop_assert!(load <= 1.0 + 1e-9);
            if c.dual[i] > 1e-9 {
                prop_assert!((load - 1.0).abs() <= 1e-7);
            }
        }
        prop_assert!(c.equilibrium_weights.iter().all(|w| *w >= 0.0));
    }

    #[test]
    fn solver_contracts(seed in any::<u64>(), q in 0.2f64..0.8, c in 0.2f64..5.0) {
        let k = KernelSpec::min_half_line();
        let sigma = random_measure(seed, Domain::HalfLine, 6, 2, 2);
        let opts = SolveOptions::default();
        let s = solver::solve_fixed_point(&k, &sigma, q, &opts).unwrap();
        prop_assert!(s.report.converged && s.report.monotone_ok);
        prop_assert!(s.report.final_residual <= 10.0 * opts.tolerance);
        prop_assert!(solver::verify_supersolution(&s.u, &k, &sigma, q).unwrap().holds);
        let g = potential::apply_potential(&k, &sigma, &sigma.sample_points()).unwrap();
        prop_assert!(measure::lq_norm(&g, &sigma, q / (1.0 - q)).unwrap().is_finite());

        let scaled = solver::solve_fixed_point(&k, &sigma.scaled(c).unwrap(), q, &opts).unwrap();
        let f = c.powf(1.0 / (1.0 - q));
        for (a, b) in s.u.values().iter().zip(scaled.u.values()) {
            prop_assert!(rel(f * a, *b) <= 1e-9);
        }
    }

    #[test]
    fn maximal_sublinear_and_homogeneous(s1 in any::<u64>(), s2 in any::<u64>(), alpha in 0.0f64..0.9, k in -4i32..4) {
        let (a, b) = (cell_measure_1d(s1), random_measure(s2, Domain::Euclidean(1), 5, 2, 0));
        let mut atoms = a.atoms().to_vec();
        atoms.extend_from_slice(b.atoms());
        let mut cells = a.cells().to_vec();
        cells.extend_from_slice(b.cells());
        let sum = DiscreteMeasure::new(Domain::Euclidean(1), atoms, cells).unwrap();
        let c = 2f64.powi(k);
        let ca = a.scaled(c).unwrap();
        for mode in [MaxQueryMode::UncenteredCubes1D, MaxQueryMode::CenteredCubes] {
            for i in 0..25 {
                let x = [-4.0 + 0.37 * i as f64];
                let (ma, mb) = (maximal::frac_max(&a, alpha, &x, mode).unwrap(), maximal::frac_max(&b, alpha, &x, mode).unwrap());
                prop_assert!(maximal::frac_max(&sum, alpha, &x, mode).unwrap() <= (ma + mb) * (1.0 + 1e-12));
                prop_assert_eq!(maximal::frac_max(&ca, alpha, &x, mode).unwrap(), c * ma);
            }
        }
    }

    #[test]
    fn centered_and_uncentered_are_comparable(seed in any::<u64>(), alpha in 0.0f64..0.9) {
        let nu = random_measure(seed, Domain::Euclidean(1), 5, 3, 0);
        let factor = 2f64.powf(1.0 - alpha);
        for i in 0..40 {
            let x = [-4.0 + 0.231 * i as f64];
            if nu.atoms().iter().any(|p| p.location[0] == x[0]) {
                continue;
            }
            let c = maximal::frac_max(&nu, alpha, &x, MaxQueryMode::CenteredCubes).unwrap();
            let u = maximal::frac_max(&nu, alpha, &x, MaxQueryMode::UncenteredCubes1D).unwrap();
            prop_assert!(c <= u * (1.0 + 1e-12));
            prop_assert!(u <= factor * c * (1.0 + 1e-12));
        }
    }

    #[test]
    fn maximal_iteration_norm_chain(seed in any::<u64>(), q in 0.2f64..0.7, alpha in 0.0f64..0.5) {
        let sigma = cell_measure_1d(seed);
        let mode = MaxQueryMode::UncenteredCubes1D;
        let (_, rep) = maximal::maximal_fixed_point(&sigma, alpha, q, mode, &SolveOptions::default()).unwrap();
        prop_assert!(rep.monotone_ok);
        let lin = maximal::maximal_linearization(&sigma, alpha, mode).unwrap();
        let kappa = potential::linear_kappa_bounds(&lin, &sigma.sample_weights(), q, 500).unwrap().upper;
        for w in rep.norm_trace.windows(2) {
            prop_assert!(w[1] <= kappa * w[0].powf(q) * (1.0 + 1e-9));
        }
    }

    #[test]
    fn exact_kappa_dominates_diracs(seed in any::<u64>(), m in 1usize..=4, q in 0.2f64..0.8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = FiniteInstance::random(&mut rng, m, q).unwrap();
        let e = lab::exact_kappa(&inst, 20).unwrap();
        prop_assert!(e.certified);
        prop_assert!(e.kappa >= e.dirac_lower);
        prop_assert!(e.kappa <= e.upper);
        if m == 1 {
            prop_assert!(rel(e.kappa, e.dirac_lower) <= 1e-15);
        }
    }
}

