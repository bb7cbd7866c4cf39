//! Dyadic cubes `Π [k_i 2^{−ℓ}, (k_i + 1) 2^{−ℓ})` and the operator `M_ρν(x) = sup_{Q ∋ x} ρ_Q ν(Q)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::AxisBox;
use crate::measure::{self, DiscreteMeasure, GridFunction};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicCube {
    pub level: i32,
    pub coords: Vec<i64>,
}

impl DyadicCube {
    /// The cube of `level` containing `x`.
    pub fn containing(x: &[f64], level: i32) -> Self {
        let scale = libm::ldexp(1.0, level);
        DyadicCube { level, coords: x.iter().map(|&c| libm::floor(c * scale) as i64).collect() }
    }

    pub fn side(&self) -> f64 {
        libm::ldexp(1.0, -self.level)
    }

    pub fn to_box(&self) -> AxisBox {
        let s = self.side();
        AxisBox {
            lo: self.coords.iter().map(|&k| k as f64 * s).collect(),
            hi: self.coords.iter().map(|&k| (k + 1) as f64 * s).collect(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.coords.len() && *self == DyadicCube::containing(x, self.level)
    }
}

/// Finitely many nonnegative weights `ρ_Q`, indexed by level.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DyadicWeightMap {
    by_level: BTreeMap<i32, BTreeMap<Vec<i64>, f64>>,
    dim: Option<usize>,
}

impl DyadicWeightMap {
    pub fn new(entries: impl IntoIterator<Item = (DyadicCube, f64)>) -> Result<Self> {
        let mut map = DyadicWeightMap::default();
        for (q, rho) in entries {
            map.insert(q, rho)?;
        }
        Ok(map)
    }

    /// Sets `ρ_Q`; a repeated cube keeps the last value.
    pub fn insert(&mut self, q: DyadicCube, rho: f64) -> Result<()> {
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("dyadic weights must be finite and nonnegative, got {rho}")));
        }
        if q.coords.is_empty() {
            return Err(Error::InvalidParameter("dyadic cube needs coordinates".into()));
        }
        match self.dim {
            Some(d) if d != q.coords.len() => {
                return Err(Error::DimensionMismatch { expected: d, found: q.coords.len() })
            }
            _ => self.dim = Some(q.coords.len()),
        }
        self.by_level.entry(q.level).or_default().insert(q.coords, rho);
        Ok(())
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.by_level.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn entries(&self) -> impl Iterator<Item = (DyadicCube, f64)> + '_ {
        self.by_level.iter().flat_map(|(&level, cubes)| {
            cubes.iter().map(move |(coords, &rho)| (DyadicCube { level, coords: coords.clone() }, rho))
        })
    }

    pub fn get(&self, q: &DyadicCube) -> Option<f64> {
        self.by_level.get(&q.level).and_then(|m| m.get(&q.coords)).copied()
    }

    /// Entries whose cube contains `x`: one lookup per stored level.
    pub fn containing<'a>(&'a self, x: &'a [f64]) -> impl Iterator<Item = (DyadicCube, f64)> + 'a {
        self.by_level.iter().filter_map(move |(&level, cubes)| {
            let q = DyadicCube::containing(x, level);
            cubes.get(&q.coords).map(|&rho| (q, rho))
        })
    }
}

/// `M_ρν` with the masses `ν(Q)` of every weighted cube precomputed.
#[derive(Debug, Clone)]
pub struct DyadicMaximal {
    rho: DyadicWeightMap,
    mass: BTreeMap<DyadicCube, f64>,
}

impl DyadicMaximal {
    pub fn new(nu: &DiscreteMeasure, rho: &DyadicWeightMap) -> Result<Self> {
        if let Some(d) = rho.dim() {
            if d != nu.dim() {
                return Err(Error::DimensionMismatch { expected: nu.dim(), found: d });
            }
        }
        let mut mass = BTreeMap::new();
        for (q, _) in rho.entries() {
            let m = nu.half_open_box_mass(&q.to_box())?;
            mass.insert(q, m);
        }
        Ok(DyadicMaximal { rho: rho.clone(), mass })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.rho
            .containing(x)
            .map(|(q, rho)| measure::scale(rho, self.mass[&q]))
            .fold(0.0, f64::max)
    }
}

pub fn dyadic_max(nu: &DiscreteMeasure, rho: &DyadicWeightMap, x: &[f64]) -> Result<f64> {
    if x.len() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: nu.dim(), found: x.len() });
    }
    Ok(DyadicMaximal::new(nu, rho)?.eval(x))
}

/// `sup_Q λ_Q ρ_Q χ_Q` at the given points. `lambda` and `rho` are matched by cube.
pub fn dyadic_test_function(rho: &DyadicWeightMap, lambda: &DyadicWeightMap, points: &[Vec<f64>]) -> Result<GridFunction> {
    let values = points
        .iter()
        .map(|x| {
            lambda
                .containing(x)
                .map(|(q, l)| measure::scale(l, rho.get(&q).unwrap_or(0.0)))
                .fold(0.0, f64::max)
        })
        .collect();
    GridFunction::new(points.to_vec(), values)
}

/// `Σ_Q λ_Q σ(Q)`, the mass of `ν = (sup_Q λ_Q χ_Q)σ` is at most this.
pub fn dyadic_test_mass(lambda: &DyadicWeightMap, sigma: &DiscreteMeasure) -> Result<f64> {
    let mut total = 0.0;
    for (q, l) in lambda.entries() {
        total += measure::scale(l, sigma.half_open_box_mass(&q.to_box())?);
    }
    Ok(total)
}

/// `q^{−1} (1−q)^{1 − 1/q}`: weak Hölder constant for `L^{q/(1−q),∞} · L^{1,∞} ⊂ L^{q,∞}`.
pub fn weak_holder_constant(q: f64) -> f64 {
    libm::pow(1.0 - q, 1.0 - 1.0 / q) / q
}

/// Upper bound on the best constant in `‖M_ρν‖_{L^{q,∞}(σ)} ≤ κ_w ‖ν‖`:
/// `M_ρν ≤ M_ρσ · M_σν` with the dyadic `M_σ` of weak type (1,1) with constant 1.
///
/// The weak norm uses the quadrature of `sigma`, so the bound is sharp in this sense
/// only for atomic `sigma`.
pub fn dyadic_weak_constant_upper(sigma: &DiscreteMeasure, rho: &DyadicWeightMap, q: f64) -> Result<f64> {
    crate::solver::check_q(q)?;
    let dm = DyadicMaximal::new(sigma, rho)?;
    let pts = sigma.sample_points();
    let values = pts.iter().map(|x| dm.eval(x)).collect();
    let f = GridFunction::new(pts, values)?;
    Ok(weak_holder_constant(q) * measure::weak_lq_norm(&f, sigma, q / (1.0 - q))?)
}

/// Dirac lower bound on the dyadic weak constant: `max_y ‖M_ρδ_y‖_{L^{q,∞}(σ)}`.
pub fn dyadic_weak_constant_lower(sigma: &DiscreteMeasure, rho: &DyadicWeightMap, q: f64, diracs: &[Vec<f64>]) -> Result<f64> {
    crate::solver::check_q(q)?;
    let pts = sigma.sample_points();
    let mut best = 0.0f64;
    for y in diracs {
        // M_ρδ_y(x) = max ρ_Q over cubes containing both x and y
        let values = pts
            .iter()
            .map(|x| rho.containing(y).filter(|(c, _)| c.contains(x)).map(|(_, r)| r).fold(0.0, f64::max))
            .collect();
        let f = GridFunction::new(pts.clone(), values)?;
        best = best.max(measure::weak_lq_norm(&f, sigma, q)?);
    }
    Ok(best)
}
