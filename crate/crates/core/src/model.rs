//! Shared data model: knapsack instances, linear systems, points and objectives.
//!
//! Index conventions are 0-based everywhere. File formats:
//!
//! - instance: `{"n": int, "weights": ["p/q", ...], "capacity": "p/q"}`
//! - system: `{"n": int, "rows": [{"coeffs": [...], "rhs": "p/q"}]}` with an
//!   optional `"variables"` name list.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A point in the ambient space of some instance or system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<Rational>);

/// A linear objective vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Objective(pub Vec<Rational>);

impl Point {
    pub fn zeros(dim: usize) -> Self {
        Point(vec![Rational::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    /// Coordinate-wise `self <= other`; returns the first index where it fails.
    pub fn first_exceeding(&self, other: &Point) -> Option<usize> {
        self.0.iter().zip(&other.0).position(|(a, b)| a > b)
    }
}

impl Objective {
    pub fn zeros(dim: usize) -> Self {
        Objective(vec![Rational::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rational::is_zero)
    }

    pub fn dot(&self, x: &Point) -> Rational {
        dot(&self.0, &x.0)
    }

    /// Replaces negative coefficients by zero, returning the touched indices.
    pub fn clamped(&self) -> (Objective, Vec<usize>) {
        let mut touched = Vec::new();
        let coeffs = self
            .0
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if c.is_negative() {
                    touched.push(i);
                    Rational::zero()
                } else {
                    c.clone()
                }
            })
            .collect();
        if !touched.is_empty() {
            log::info!("clamped negative objective coefficients at {touched:?} to zero");
        }
        (Objective(coeffs), touched)
    }

    pub fn max_norm(&self) -> Rational {
        self.0
            .iter()
            .map(Rational::abs)
            .fold(Rational::zero(), Rational::max_of)
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// A sparse vector stored as sorted `(index, value)` pairs of nonzero entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseVec {
    pub dim: usize,
    pub entries: Vec<(usize, Rational)>,
}

impl SparseVec {
    pub fn from_dense(values: &[Rational]) -> Self {
        SparseVec {
            dim: values.len(),
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self) -> Result<Vec<Rational>> {
        let mut out = vec![Rational::zero(); self.dim];
        let mut last = None;
        for (i, v) in &self.entries {
            if *i >= self.dim || last.is_some_and(|l| l >= *i) {
                return Err(Error::Malformed(format!(
                    "sparse entry index {i} unsorted or out of range (dim {})",
                    self.dim
                )));
            }
            last = Some(*i);
            out[*i] = v.clone();
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceFile", into = "InstanceFile")]
pub struct KnapsackInstance {
    weights: Vec<Rational>,
    capacity: Rational,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    weights: Vec<Rational>,
    capacity: Rational,
}

impl TryFrom<InstanceFile> for KnapsackInstance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        if file.n != file.weights.len() {
            return Err(Error::InvalidInstance(format!(
                "n = {} but {} weights given",
                file.n,
                file.weights.len()
            )));
        }
        KnapsackInstance::new(file.weights, file.capacity)
    }
}

impl From<KnapsackInstance> for InstanceFile {
    fn from(inst: KnapsackInstance) -> Self {
        InstanceFile {
            n: inst.weights.len(),
            weights: inst.weights,
            capacity: inst.capacity,
        }
    }
}

/// Outcome of [`validate_instance`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceReport {
    pub n: usize,
    pub total_weight: Rational,
    pub capacity: Rational,
}

impl KnapsackInstance {
    pub fn new(weights: Vec<Rational>, capacity: Rational) -> Result<Self> {
        let inst = KnapsackInstance { weights, capacity };
        validate_instance(&inst)?;
        Ok(inst)
    }

    pub fn n_items(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn capacity(&self) -> &Rational {
        &self.capacity
    }

    pub fn weight_of(&self, x: &Point) -> Rational {
        dot(&self.weights, &x.0)
    }

    /// Box and capacity check; valid for fractional points of the LP relaxation too.
    pub fn satisfies(&self, x: &Point) -> bool {
        x.dim() == self.n_items()
            && x.0.iter().all(|v| !v.is_negative() && *v <= 1)
            && self.weight_of(x) <= self.capacity
    }

    /// Keeps only the listed items, in the given order.
    pub fn restrict(&self, items: &[usize]) -> KnapsackInstance {
        KnapsackInstance {
            weights: items.iter().map(|&i| self.weights[i].clone()).collect(),
            capacity: self.capacity.clone(),
        }
    }
}

/// Checks the nonnegativity invariants and reports the basic shape.
pub fn validate_instance(inst: &KnapsackInstance) -> Result<InstanceReport> {
    if let Some(i) = inst.weights.iter().position(Rational::is_negative) {
        return Err(Error::InvalidInstance(format!(
            "weight {i} is negative ({})",
            inst.weights[i]
        )));
    }
    if inst.capacity.is_negative() {
        return Err(Error::InvalidInstance(format!(
            "capacity is negative ({})",
            inst.capacity
        )));
    }
    Ok(InstanceReport {
        n: inst.weights.len(),
        total_weight: inst.weights.iter().sum(),
        capacity: inst.capacity.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

/// A system `rows · x <= rhs`, `x >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSystem {
    pub n: usize,
    pub rows: Vec<Row>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<Vec<String>>,
}

impl LinearSystem {
    pub fn new(n: usize) -> Self {
        LinearSystem {
            n,
            rows: Vec::new(),
            variables: None,
        }
    }

    pub fn push(&mut self, coeffs: Vec<Rational>, rhs: Rational) {
        debug_assert_eq!(coeffs.len(), self.n);
        self.rows.push(Row { coeffs, rhs });
    }

    /// Adds `x_i <= 1` for every variable.
    pub fn with_unit_box(mut self) -> Self {
        for i in 0..self.n {
            let mut coeffs = vec![Rational::zero(); self.n];
            coeffs[i] = Rational::one();
            self.push(coeffs, Rational::one());
        }
        self
    }

    pub fn check_shape(&self) -> Result<()> {
        if let Some(r) = self.rows.iter().position(|r| r.coeffs.len() != self.n) {
            return Err(Error::InvalidInstance(format!(
                "row {r} has {} coefficients, expected {}",
                self.rows[r].coeffs.len(),
                self.n
            )));
        }
        if let Some(names) = &self.variables {
            if names.len() != self.n {
                return Err(Error::InvalidInstance(
                    "variable name count mismatch".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn satisfies(&self, x: &Point) -> bool {
        x.dim() == self.n
            && x.0.iter().all(|v| !v.is_negative())
            && self.rows.iter().all(|r| dot(&r.coeffs, &x.0) <= r.rhs)
    }
}

/// A system with nonnegative rows; the unit box is implicit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LinearSystem", into = "LinearSystem")]
pub struct DownMonotoneSystem {
    inner: LinearSystem,
}

impl TryFrom<LinearSystem> for DownMonotoneSystem {
    type Error = Error;

    fn try_from(sys: LinearSystem) -> Result<Self> {
        DownMonotoneSystem::new(sys)
    }
}

impl From<DownMonotoneSystem> for LinearSystem {
    fn from(sys: DownMonotoneSystem) -> Self {
        sys.inner
    }
}

impl DownMonotoneSystem {
    pub fn new(sys: LinearSystem) -> Result<Self> {
        sys.check_shape()?;
        for (r, row) in sys.rows.iter().enumerate() {
            if row.rhs.is_negative() || row.coeffs.iter().any(Rational::is_negative) {
                return Err(Error::InvalidInstance(format!(
                    "row {r} has a negative entry; down-monotone systems need nonnegative rows"
                )));
            }
        }
        Ok(DownMonotoneSystem { inner: sys })
    }

    pub fn n_vars(&self) -> usize {
        self.inner.n
    }

    pub fn rows(&self) -> &[Row] {
        &self.inner.rows
    }

    /// The explicit system including the unit box rows.
    pub fn with_box(&self) -> LinearSystem {
        LinearSystem {
            n: self.inner.n,
            rows: self.inner.rows.clone(),
            variables: None,
        }
        .with_unit_box()
    }

    pub fn satisfies(&self, x: &Point) -> bool {
        x.0.iter().all(|v| *v <= 1) && self.inner.satisfies(x)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
