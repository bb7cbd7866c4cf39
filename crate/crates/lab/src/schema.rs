//! JSON input formats and their conversion into core types.
//!
//! A measure file looks like
//! `{"dim": 1, "domain": "half_line", "atoms": [{"point": [1.0], "w": 1.0}], "cells": []}`.
//! `dim` counts the coordinates of a point, so an `upper_half_space` measure with
//! `dim = 2` lives in `R^2_+`.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sublin_core::lab::FiniteInstance;
use sublin_core::maximal::{DyadicCube, DyadicWeightMap};
use sublin_core::{AxisBox, CellAtom, DiscreteMeasure, Domain, KernelSpec, PointAtom};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainTag {
    HalfLine,
    Euclidean,
    UpperHalfSpace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub point: Vec<f64>,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellJson {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureJson {
    pub dim: usize,
    pub domain: DomainTag,
    #[serde(default)]
    pub atoms: Vec<AtomJson>,
    #[serde(default)]
    pub cells: Vec<CellJson>,
}

impl MeasureJson {
    pub fn domain(&self) -> Result<Domain> {
        match (&self.domain, self.dim) {
            (_, 0) => Err(Error::Schema("dim must be positive".into())),
            (DomainTag::HalfLine, 1) => Ok(Domain::HalfLine),
            (DomainTag::HalfLine, d) => Err(Error::Schema(format!("half_line measures have dim 1, got {d}"))),
            (DomainTag::Euclidean, d) => Ok(Domain::Euclidean(d)),
            (DomainTag::UpperHalfSpace, 1) => Err(Error::Schema("upper_half_space needs dim >= 2".into())),
            (DomainTag::UpperHalfSpace, d) => Ok(Domain::UpperHalfSpace(d - 1)),
        }
    }

    /// `refinement` subdivides each cell into `2^(refinement·n)` quadrature pieces.
    pub fn to_measure(&self, refinement: u32) -> Result<DiscreteMeasure> {
        let domain = self.domain()?;
        let atoms = self.atoms.iter().map(|a| PointAtom { location: a.point.clone(), weight: a.w }).collect();
        let cells = self
            .cells
            .iter()
            .map(|c| Ok(CellAtom { cell: AxisBox::new(c.lo.clone(), c.hi.clone())?, weight: c.w }))
            .collect::<Result<Vec<_>>>()?;
        Ok(DiscreteMeasure::with_refinement(domain, atoms, cells, refinement)?)
    }
}

/// A kernel given by its values on a finite point set, with declared constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<Vec<f64>>,
    #[serde(default = "one")]
    pub a: f64,
    #[serde(default = "one")]
    pub h: f64,
}

fn one() -> f64 {
    1.0
}

impl MatrixJson {
    pub fn to_kernel(&self) -> Result<KernelSpec> {
        Ok(KernelSpec::matrix(self.points.clone(), self.values.clone(), self.a, self.h)?)
    }
}

/// One finite-lab instance: a kernel matrix on `points`, weights of `σ`, and `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceJson {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub points: Option<Vec<Vec<f64>>>,
    pub matrix: Vec<Vec<f64>>,
    pub sigma: Vec<f64>,
    pub q: f64,
}

impl InstanceJson {
    pub fn to_instance(&self) -> Result<FiniteInstance> {
        Ok(match &self.points {
            Some(p) => FiniteInstance::new(p.clone(), self.matrix.clone(), self.sigma.clone(), self.q)?,
            None => FiniteInstance::on_line(self.matrix.clone(), self.sigma.clone(), self.q)?,
        })
    }

    pub fn from_instance(name: Option<String>, inst: &FiniteInstance) -> Self {
        InstanceJson {
            name,
            points: Some(inst.points().to_vec()),
            matrix: inst.matrix().to_vec(),
            sigma: inst.sigma_weights().to_vec(),
            q: inst.q(),
        }
    }
}

/// Either a single instance or a list of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceFile {
    One(InstanceJson),
    Many(Vec<InstanceJson>),
}

impl InstanceFile {
    pub fn into_vec(self) -> Vec<InstanceJson> {
        match self {
            InstanceFile::One(i) => vec![i],
            InstanceFile::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DyadicEntryJson {
    pub level: i32,
    pub coords: Vec<i64>,
    pub rho: f64,
}

pub fn to_weight_map(entries: &[DyadicEntryJson]) -> Result<DyadicWeightMap> {
    Ok(DyadicWeightMap::new(entries.iter().map(|e| (DyadicCube { level: e.level, coords: e.coords.clone() }, e.rho)))?)
}

/// Reads `path` and returns its bytes and parsed contents.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<(Vec<u8>, T)> {
    let bytes = std::fs::read(path).map_err(|source| Error::Read { path: path.to_path_buf(), source })?;
    let value = serde_json::from_slice(&bytes).map_err(|source| Error::Json { path: path.to_path_buf(), source })?;
    Ok((bytes, value))
}
