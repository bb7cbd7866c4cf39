//! Finite measures made of point atoms and uniform cells, sampled functions
//! and the `L^q(σ)` / `L^{q,∞}(σ)` quasi-norms.
//!
//! Every integral against a measure goes through its quadrature samples: point
//! atoms are their own samples, and each cell is split into `2^k` equal parts per
//! axis (`k` = refinement level) whose midpoints carry the part's share of the
//! weight. Box and ball masses, used by the maximal operators, are exact instead.
//!
//! Values may be `+∞`; a sample of zero weight never contributes (`∞·0 = 0`).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{self, AxisBox};
use crate::key::PointKey;

/// Largest number of quadrature samples a single measure may expand into.
pub const MAX_SAMPLES: usize = 4_000_000;

/// Ambient domain of a measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// `(0, ∞)`.
    HalfLine,
    /// `R^n`.
    Euclidean(usize),
    /// `R^{n+1}_+ = {(x, y) : x ∈ R^n, y > 0}`; points have `n + 1` coordinates.
    UpperHalfSpace(usize),
}

impl Domain {
    /// Length of a point vector in this domain.
    pub fn dim(&self) -> usize {
        match *self {
            Domain::HalfLine => 1,
            Domain::Euclidean(n) => n,
            Domain::UpperHalfSpace(n) => n + 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Domain::HalfLine => "half-line",
            Domain::Euclidean(_) => "euclidean",
            Domain::UpperHalfSpace(_) => "upper-half-space",
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        if p.len() != self.dim() || p.iter().any(|c| !c.is_finite()) {
            return false;
        }
        match self {
            Domain::HalfLine => p[0] > 0.0,
            Domain::Euclidean(_) => true,
            Domain::UpperHalfSpace(_) => p[p.len() - 1] > 0.0,
        }
    }

    /// Closed boxes may touch the boundary of the half-line or half-space.
    fn admits_box(&self, b: &AxisBox) -> bool {
        if b.dim() != self.dim() {
            return false;
        }
        match self {
            Domain::HalfLine => b.lo[0] >= 0.0,
            Domain::Euclidean(_) => true,
            Domain::UpperHalfSpace(_) => b.lo[b.dim() - 1] >= 0.0,
        }
    }

    pub(crate) fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: p.len() });
        }
        if !self.contains(p) {
            return Err(Error::OutsideDomain { point: p.to_vec(), domain: self.name() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointAtom {
    pub location: Vec<f64>,
    pub weight: f64,
}

/// Mass spread uniformly over a box.
#[derive(Debug, Clone, PartialEq)]
pub struct CellAtom {
    pub cell: AxisBox,
    pub weight: f64,
}

/// One quadrature node: the point mass sitting there plus the cell pieces whose
/// midpoint it is.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub point: Vec<f64>,
    pub atom_weight: f64,
    pub pieces: Vec<(AxisBox, f64)>,
}

impl Sample {
    pub fn weight(&self) -> f64 {
        self.atom_weight + self.pieces.iter().map(|(_, w)| w).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    domain: Domain,
    atoms: Vec<PointAtom>,
    cells: Vec<CellAtom>,
    refinement: u32,
    samples: Vec<Sample>,
}

fn check_weight(w: f64) -> Result<()> {
    if w.is_finite() && w >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("weights must be finite and nonnegative, got {w}")))
    }
}

impl DiscreteMeasure {
    /// Builds a measure with midpoint quadrature (refinement 0).
    pub fn new(domain: Domain, atoms: Vec<PointAtom>, cells: Vec<CellAtom>) -> Result<Self> {
        Self::with_refinement(domain, atoms, cells, 0)
    }

    pub fn with_refinement(
        domain: Domain,
        atoms: Vec<PointAtom>,
        cells: Vec<CellAtom>,
        refinement: u32,
    ) -> Result<Self> {
        if domain.dim() == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        for a in &atoms {
            domain.check_point(&a.location)?;
            check_weight(a.weight)?;
        }
        for c in &cells {
            if c.cell.dim() != domain.dim() {
                return Err(Error::DimensionMismatch { expected: domain.dim(), found: c.cell.dim() });
            }
            if !domain.admits_box(&c.cell) {
                return Err(Error::InvalidParameter(format!(
                    "cell {:?}..{:?} leaves the {} domain",
                    c.cell.lo,
                    c.cell.hi,
                    domain.name()
                )));
            }
            check_weight(c.weight)?;
        }
        let per_cell = 1usize
            .checked_shl(refinement * domain.dim() as u32)
            .filter(|&p| p <= MAX_SAMPLES)
            .ok_or_else(|| Error::InvalidParameter("refinement level too large".into()))?;
        if atoms.len() + cells.len() * per_cell > MAX_SAMPLES {
            return Err(Error::InvalidParameter("too many quadrature samples".into()));
        }
        let samples = build_samples(&atoms, &cells, refinement);
        Ok(DiscreteMeasure { domain, atoms, cells, refinement, samples })
    }

    pub fn zero(domain: Domain) -> Self {
        DiscreteMeasure { domain, atoms: Vec::new(), cells: Vec::new(), refinement: 0, samples: Vec::new() }
    }

    /// Point masses only.
    pub fn from_atoms(domain: Domain, atoms: impl IntoIterator<Item = (Vec<f64>, f64)>) -> Result<Self> {
        let atoms = atoms.into_iter().map(|(location, weight)| PointAtom { location, weight }).collect();
        Self::new(domain, atoms, Vec::new())
    }

    pub fn dirac(domain: Domain, location: Vec<f64>, weight: f64) -> Result<Self> {
        Self::from_atoms(domain, [(location, weight)])
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn atoms(&self) -> &[PointAtom] {
        &self.atoms
    }

    pub fn cells(&self) -> &[CellAtom] {
        &self.cells
    }

    pub fn refinement(&self) -> u32 {
        self.refinement
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn sample_points(&self) -> Vec<Vec<f64>> {
        self.samples.iter().map(|s| s.point.clone()).collect()
    }

    pub fn sample_weights(&self) -> Vec<f64> {
        self.samples.iter().map(Sample::weight).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.total_mass() == 0.0
    }

    /// `‖ν‖ = ν(Ω)`.
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum::<f64>() + self.cells.iter().map(|c| c.weight).sum::<f64>()
    }

    /// Mass of the closed box: atoms on the boundary count in full, cells
    /// contribute in proportion to the overlap volume.
    pub fn box_mass(&self, b: &AxisBox) -> Result<f64> {
        self.check_box(b)?;
        let atoms: f64 = self.atoms.iter().filter(|a| b.contains_closed(&a.location)).map(|a| a.weight).sum();
        Ok(atoms + self.cell_overlap(b))
    }

    /// Mass of the half-open box `[lo, hi)`, the convention for dyadic cubes.
    pub fn half_open_box_mass(&self, b: &AxisBox) -> Result<f64> {
        self.check_box(b)?;
        let atoms: f64 =
            self.atoms.iter().filter(|a| b.contains_half_open(&a.location)).map(|a| a.weight).sum();
        Ok(atoms + self.cell_overlap(b))
    }

    fn check_box(&self, b: &AxisBox) -> Result<()> {
        if b.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: b.dim() });
        }
        Ok(())
    }

    fn cell_overlap(&self, b: &AxisBox) -> f64 {
        self.cells
            .iter()
            .filter(|c| c.weight > 0.0)
            .map(|c| c.weight * c.cell.overlap_volume(b) / c.cell.volume())
            .sum()
    }

    /// Mass of the closed Euclidean ball. Exact in dimensions 1 and 2; in higher
    /// dimensions cells are handled by their quadrature samples and the flag in
    /// the result is `false`.
    pub fn ball_mass(&self, center: &[f64], radius: f64) -> Result<(f64, bool)> {
        if center.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: center.len() });
        }
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| geometry::euclidean_distance(&a.location, center) <= radius)
            .map(|a| a.weight)
            .sum();
        let mut cells = 0.0;
        let exact = self.dim() <= 2;
        for c in self.cells.iter().filter(|c| c.weight > 0.0) {
            if c.cell.distance_to(center) > radius {
                continue;
            }
            cells += match self.dim() {
                1 => {
                    let b = AxisBox { lo: alloc::vec![center[0] - radius], hi: alloc::vec![center[0] + radius] };
                    c.weight * c.cell.overlap_volume(&b) / c.cell.volume()
                }
                2 => c.weight * geometry::disk_rectangle_area(center, radius, &c.cell) / c.cell.volume(),
                _ => 0.0,
            };
        }
        if !exact {
            for s in &self.samples {
                if geometry::euclidean_distance(&s.point, center) <= radius {
                    cells += s.pieces.iter().map(|(_, w)| w).sum::<f64>();
                }
            }
        }
        Ok((atoms + cells, exact))
    }

    /// Restriction to the samples selected by `keep` (cells are split along
    /// their quadrature pieces).
    pub fn restrict_samples(&self, mut keep: impl FnMut(&Sample) -> bool) -> DiscreteMeasure {
        let factors: Vec<f64> = self.samples.iter().map(|s| if keep(s) { 1.0 } else { 0.0 }).collect();
        self.reweighted(&factors).expect("factor 0/1 keeps weights valid")
    }

    /// The measure `f dσ` where `f` is given per sample. Each quadrature piece
    /// becomes a cell carrying `f(sample)` times its weight, so the result has
    /// the same sample points at refinement 0.
    pub fn reweighted(&self, factors: &[f64]) -> Result<DiscreteMeasure> {
        if factors.len() != self.samples.len() {
            return Err(Error::DimensionMismatch { expected: self.samples.len(), found: factors.len() });
        }
        let mut atoms = Vec::new();
        let mut cells = Vec::new();
        for (s, &f) in self.samples.iter().zip(factors) {
            if s.atom_weight > 0.0 {
                atoms.push(PointAtom { location: s.point.clone(), weight: scale(s.atom_weight, f) });
            }
            for (b, w) in &s.pieces {
                if *w > 0.0 {
                    cells.push(CellAtom { cell: b.clone(), weight: scale(*w, f) });
                }
            }
        }
        for a in &atoms {
            check_weight(a.weight)?;
        }
        for c in &cells {
            check_weight(c.weight)?;
        }
        let samples = build_samples(&atoms, &cells, 0);
        Ok(DiscreteMeasure { domain: self.domain, atoms, cells, refinement: 0, samples })
    }

    /// `c·σ`.
    pub fn scaled(&self, c: f64) -> Result<DiscreteMeasure> {
        check_weight(c)?;
        let atoms = self.atoms.iter().map(|a| PointAtom { location: a.location.clone(), weight: a.weight * c }).collect();
        let cells = self.cells.iter().map(|x| CellAtom { cell: x.cell.clone(), weight: x.weight * c }).collect();
        DiscreteMeasure::with_refinement(self.domain, atoms, cells, self.refinement)
    }
}

/// `w·f` with `0·∞ = 0`.
pub(crate) fn scale(w: f64, f: f64) -> f64 {
    if w == 0.0 || f == 0.0 {
        0.0
    } else {
        w * f
    }
}

fn build_samples(atoms: &[PointAtom], cells: &[CellAtom], refinement: u32) -> Vec<Sample> {
    let mut samples: Vec<Sample> = Vec::new();
    let mut index: BTreeMap<PointKey, usize> = BTreeMap::new();
    let mut slot = |point: Vec<f64>, samples: &mut Vec<Sample>| -> usize {
        let key = PointKey::new(&point);
        *index.entry(key).or_insert_with(|| {
            samples.push(Sample { point, atom_weight: 0.0, pieces: Vec::new() });
            samples.len() - 1
        })
    };
    for a in atoms {
        let i = slot(a.location.clone(), &mut samples);
        samples[i].atom_weight += a.weight;
    }
    for c in cells {
        let parts = c.cell.dyadic_children(refinement);
        let w = c.weight / parts.len() as f64;
        for p in parts {
            let i = slot(p.midpoint(), &mut samples);
            samples[i].pieces.push((p, w));
        }
    }
    samples
}

/// Nonnegative extended-real function sampled on a finite point set.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    index: BTreeMap<PointKey, usize>,
}

impl GridFunction {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), found: values.len() });
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::InvalidParameter(format!("grid values must be nonnegative, got {v}")));
        }
        let mut index = BTreeMap::new();
        for (i, p) in points.iter().enumerate() {
            if index.insert(PointKey::new(p), i).is_some() {
                return Err(Error::DuplicatePoint(p.clone()));
            }
        }
        Ok(GridFunction { points, values, index })
    }

    /// Function on the sample points of `sigma`, in sample order.
    pub fn on_samples(sigma: &DiscreteMeasure, values: Vec<f64>) -> Result<Self> {
        Self::new(sigma.sample_points(), values)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value_at(&self, p: &[f64]) -> Option<f64> {
        self.index.get(&PointKey::new(p)).map(|&i| self.values[i])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<GridFunction> {
        GridFunction::new(self.points.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    /// Values at the samples of `sigma`, paired with the sample weights.
    pub(crate) fn against(&self, sigma: &DiscreteMeasure) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::with_capacity(sigma.samples().len());
        for s in sigma.samples() {
            let w = s.weight();
            if w == 0.0 {
                continue;
            }
            let v = self.value_at(&s.point).ok_or_else(|| Error::MissingSample(s.point.clone()))?;
            out.push((v, w));
        }
        Ok(out)
    }
}

fn check_exponent(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("exponent must be positive and finite, got {q}")))
    }
}

/// `(∫ |f|^q dσ)^{1/q}` under the quadrature of `sigma`.
pub fn lq_norm(f: &GridFunction, sigma: &DiscreteMeasure, q: f64) -> Result<f64> {
    check_exponent(q)?;
    let pairs = f.against(sigma)?;
    Ok(lq_from_pairs(&pairs, q))
}

pub(crate) fn lq_from_pairs(pairs: &[(f64, f64)], q: f64) -> f64 {
    let mut sum = 0.0;
    for &(v, w) in pairs {
        if w == 0.0 || v == 0.0 {
            continue;
        }
        if v == f64::INFINITY {
            return f64::INFINITY;
        }
        sum += w * libm::pow(v, q);
    }
    libm::pow(sum, 1.0 / q)
}

/// `sup_{t>0} t σ({f > t})^{1/q}`, evaluated exactly at the jump thresholds.
pub fn weak_lq_norm(f: &GridFunction, sigma: &DiscreteMeasure, q: f64) -> Result<f64> {
    check_exponent(q)?;
    let pairs = f.against(sigma)?;
    Ok(weak_from_pairs(pairs, q))
}

pub(crate) fn weak_from_pairs(mut pairs: Vec<(f64, f64)>, q: f64) -> f64 {
    pairs.retain(|&(v, w)| v > 0.0 && w > 0.0);
    if pairs.iter().any(|&(v, _)| v == f64::INFINITY) {
        return f64::INFINITY;
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = 0.0f64;
    let mut mass = 0.0;
    let mut i = 0;
    while i < pairs.len() {
        let v = pairs[i].0;
        while i < pairs.len() && pairs[i].0 == v {
            mass += pairs[i].1;
            i += 1;
        }
        best = best.max(v * libm::pow(mass, 1.0 / q));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn line(atoms: &[(f64, f64)], cells: &[(f64, f64, f64)]) -> DiscreteMeasure {
        DiscreteMeasure::new(
            Domain::Euclidean(1),
            atoms.iter().map(|&(x, w)| PointAtom { location: vec![x], weight: w }).collect(),
            cells
                .iter()
                .map(|&(l, h, w)| CellAtom { cell: AxisBox::new(vec![l], vec![h]).unwrap(), weight: w })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn total_mass_examples() {
        assert_eq!(DiscreteMeasure::zero(Domain::HalfLine).total_mass(), 0.0);
        assert_eq!(line(&[(1.0, 1.0), (3.0, 1.0)], &[]).total_mass(), 2.0);
        assert_eq!(line(&[(2.0, 2.0)], &[(0.0, 1.0, 0.5)]).total_mass(), 2.5);
    }

    #[test]
    fn box_mass_examples() {
        let b = |l: f64, h: f64| AxisBox::closed(vec![l], vec![h]).unwrap();
        assert_eq!(line(&[(1.0, 2.0)], &[]).box_mass(&b(0.0, 1.0)).unwrap(), 2.0);
        assert_eq!(line(&[], &[(0.0, 2.0, 4.0)]).box_mass(&b(0.0, 1.0)).unwrap(), 2.0);
        assert_eq!(line(&[(1.0, 1.0)], &[(0.0, 4.0, 4.0)]).box_mass(&b(0.5, 1.5)).unwrap(), 2.0);
        let m = line(&[(1.0, 1.0)], &[]);
        assert!(matches!(
            m.box_mass(&AxisBox::closed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn half_open_excludes_upper_face() {
        let m = line(&[(1.0, 2.0), (0.0, 1.0)], &[]);
        let b = AxisBox::new(vec![0.0], vec![1.0]).unwrap();
        assert_eq!(m.half_open_box_mass(&b).unwrap(), 1.0);
    }

    #[test]
    fn domain_constraints() {
        assert!(DiscreteMeasure::from_atoms(Domain::HalfLine, [(vec![0.0], 1.0)]).is_err());
        assert!(DiscreteMeasure::from_atoms(Domain::UpperHalfSpace(1), [(vec![3.0, -1.0], 1.0)]).is_err());
        assert!(DiscreteMeasure::from_atoms(Domain::UpperHalfSpace(1), [(vec![3.0, 1.0], 1.0)]).is_ok());
        assert!(DiscreteMeasure::from_atoms(Domain::HalfLine, [(vec![1.0], -1.0)]).is_err());
    }

    #[test]
    fn refinement_splits_cells() {
        let m = DiscreteMeasure::with_refinement(
            Domain::HalfLine,
            vec![],
            vec![CellAtom { cell: AxisBox::new(vec![0.0], vec![2.0]).unwrap(), weight: 2.0 }],
            3,
        )
        .unwrap();
        assert_eq!(m.samples().len(), 8);
        assert!((m.sample_weights().iter().sum::<f64>() - 2.0).abs() < 1e-15);
        assert_eq!(m.samples()[0].point, vec![0.125]);
    }

    #[test]
    fn coincident_atoms_merge() {
        let m = line(&[(1.0, 1.0), (1.0, 2.0)], &[(0.0, 2.0, 1.0)]);
        assert_eq!(m.samples().len(), 1);
        assert_eq!(m.samples()[0].weight(), 4.0);
    }

    #[test]
    fn lq_examples() {
        let s = line(&[(1.0, 1.0), (2.0, 1.0)], &[]);
        let f = GridFunction::new(vec![vec![1.0], vec![2.0]], vec![1.0, 2.0]).unwrap();
        let expect = (1.0 + 2f64.sqrt()).powi(2);
        assert!((lq_norm(&f, &s, 0.5).unwrap() - expect).abs() < 1e-12);
        assert_eq!(weak_lq_norm(&f, &s, 0.5).unwrap(), 4.0);

        let c = GridFunction::new(vec![vec![1.0], vec![2.0]], vec![3.0, 3.0]).unwrap();
        assert!((lq_norm(&c, &s, 0.7).unwrap() - 3.0 * 2f64.powf(1.0 / 0.7)).abs() < 1e-12);
    }

    #[test]
    fn weak_single_jump() {
        let s = line(&[(0.5, 3.0)], &[]);
        let f = GridFunction::new(vec![vec![0.5]], vec![2.0]).unwrap();
        assert!((weak_lq_norm(&f, &s, 0.3).unwrap() - 2.0 * 3f64.powf(1.0 / 0.3)).abs() < 1e-9);
    }

    #[test]
    fn missing_sample_is_reported() {
        let s = line(&[(1.0, 1.0), (2.0, 1.0)], &[]);
        let f = GridFunction::new(vec![vec![1.0]], vec![1.0]).unwrap();
        assert_eq!(lq_norm(&f, &s, 0.5), Err(Error::MissingSample(vec![2.0])));
    }

    #[test]
    fn infinity_and_null_sets() {
        let s = line(&[(1.0, 1.0), (2.0, 0.0)], &[]);
        let f = GridFunction::new(vec![vec![1.0], vec![2.0]], vec![1.0, f64::INFINITY]).unwrap();
        assert_eq!(lq_norm(&f, &s, 0.5).unwrap(), 1.0);
        let g = GridFunction::new(vec![vec![1.0], vec![2.0]], vec![f64::INFINITY, 1.0]).unwrap();
        assert_eq!(lq_norm(&g, &s, 0.5).unwrap(), f64::INFINITY);
        assert_eq!(weak_lq_norm(&g, &s, 0.5).unwrap(), f64::INFINITY);
    }

    #[test]
    fn duplicate_grid_points_rejected() {
        assert!(GridFunction::new(vec![vec![1.0], vec![1.0]], vec![1.0, 2.0]).is_err());
        assert!(GridFunction::new(vec![vec![0.0], vec![-0.0]], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn reweighting_keeps_samples() {
        let m = DiscreteMeasure::with_refinement(
            Domain::Euclidean(2),
            vec![PointAtom { location: vec![5.0, 5.0], weight: 1.0 }],
            vec![CellAtom { cell: AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(), weight: 4.0 }],
            1,
        )
        .unwrap();
        let f: Vec<f64> = (0..m.samples().len()).map(|i| i as f64 + 1.0).collect();
        let r = m.reweighted(&f).unwrap();
        assert_eq!(r.sample_points(), m.sample_points());
        let w: Vec<f64> = r.sample_weights();
        for (i, s) in m.samples().iter().enumerate() {
            assert!((w[i] - s.weight() * f[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn ball_mass_in_plane() {
        let m = DiscreteMeasure::new(
            Domain::Euclidean(2),
            vec![PointAtom { location: vec![0.0, 1.0], weight: 1.0 }],
            vec![CellAtom { cell: AxisBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap(), weight: 4.0 }],
        )
        .unwrap();
        let (mass, exact) = m.ball_mass(&[0.0, 0.0], 1.0).unwrap();
        assert!(exact);
        assert!((mass - (1.0 + core::f64::consts::PI)).abs() < 1e-12);
    }
}
