//! Charts, dense tensor fields, connections and the metric chart.

mod metric;
mod ops;

use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::expr::{zero_test, DiffCache, EvalContext, Expr, ZeroVerdict};

pub use metric::{symbolic_inverse, MetricChart};
pub use ops::{
    contract, covariant_derivative, lie_derivative, lie_derivative_connection,
    lie_derivative_partial, lower_index, partial_derivative, raise_index, riemann_of,
};

/// Local coordinates with a sampling box. Differentiation with respect to a
/// coordinate goes through the chart so that derivatives are memoized per
/// chart.
pub struct Chart {
    names: Vec<String>,
    coords: Vec<Expr>,
    intervals: Vec<(f64, f64)>,
    cache: Mutex<DiffCache>,
}

impl std::fmt::Debug for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Chart")
            .field("names", &self.names)
            .field("intervals", &self.intervals)
            .finish()
    }
}

impl Chart {
    pub fn new(spec: &[(&str, (f64, f64))]) -> Result<Arc<Chart>> {
        if spec.len() < 2 {
            return Err(Error::InvalidChart(format!(
                "dimension must be at least 2, got {}",
                spec.len()
            )));
        }
        for (i, (name, (a, b))) in spec.iter().enumerate() {
            if spec[..i].iter().any(|(m, _)| m == name) {
                return Err(Error::InvalidChart(format!("duplicate coordinate `{name}`")));
            }
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidChart(format!(
                    "degenerate interval [{a}, {b}] for `{name}`"
                )));
            }
        }
        Ok(Arc::new(Chart {
            names: spec.iter().map(|(n, _)| n.to_string()).collect(),
            coords: spec.iter().map(|(n, _)| Expr::coord(n)).collect(),
            intervals: spec.iter().map(|(_, iv)| *iv).collect(),
            cache: Mutex::new(DiffCache::new()),
        }))
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coord(&self, i: usize) -> &Expr {
        &self.coords[i]
    }

    pub fn interval(&self, i: usize) -> (f64, f64) {
        self.intervals[i]
    }

    /// `∂e/∂x^i`, memoized.
    pub fn diff(&self, e: &Expr, i: usize) -> Expr {
        if e.as_rational().is_some() {
            return Expr::zero();
        }
        let mut cache = self.cache.lock().unwrap_or_else(|p| p.into_inner());
        cache.diff(e, &self.names[i])
    }

    /// Fresh evaluation context sampling this chart's box.
    pub fn context(&self) -> EvalContext {
        let spec: Vec<(&str, (f64, f64))> = self
            .names
            .iter()
            .zip(&self.intervals)
            .map(|(n, iv)| (n.as_str(), *iv))
            .collect();
        EvalContext::new(&spec)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variance {
    Up,
    Down,
}

/// Dense array of component expressions, row-major over its slots.
#[derive(Clone)]
pub struct TensorField {
    chart: Arc<Chart>,
    slots: Vec<Variance>,
    comps: Vec<Expr>,
}

impl std::fmt::Debug for TensorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TensorField")
            .field("slots", &self.slots)
            .field("comps", &self.comps)
            .finish()
    }
}

impl TensorField {
    pub fn from_fn(
        chart: &Arc<Chart>,
        slots: &[Variance],
        mut f: impl FnMut(&[usize]) -> Expr,
    ) -> TensorField {
        let n = chart.dim();
        let len = n.pow(slots.len() as u32);
        let mut idx = vec![0usize; slots.len()];
        let mut comps = Vec::with_capacity(len);
        for flat in 0..len {
            unflatten(flat, n, &mut idx);
            comps.push(f(&idx));
        }
        TensorField { chart: chart.clone(), slots: slots.to_vec(), comps }
    }

    pub fn from_components(
        chart: &Arc<Chart>,
        slots: &[Variance],
        comps: Vec<Expr>,
    ) -> Result<TensorField> {
        let want = chart.dim().pow(slots.len() as u32);
        if comps.len() != want {
            return Err(Error::SlotVarianceMismatch(format!(
                "expected {want} components, got {}",
                comps.len()
            )));
        }
        Ok(TensorField { chart: chart.clone(), slots: slots.to_vec(), comps })
    }

    pub fn scalar(chart: &Arc<Chart>, e: Expr) -> TensorField {
        TensorField { chart: chart.clone(), slots: Vec::new(), comps: vec![e] }
    }

    pub fn zeros(chart: &Arc<Chart>, slots: &[Variance]) -> TensorField {
        TensorField::from_fn(chart, slots, |_| Expr::zero())
    }

    /// δ^a_b.
    pub fn identity(chart: &Arc<Chart>) -> TensorField {
        TensorField::from_fn(chart, &[Variance::Up, Variance::Down], |i| {
            Expr::int((i[0] == i[1]) as i64)
        })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Variance] {
        &self.slots
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.slots.len());
        let n = self.dim();
        idx.iter().fold(0, |acc, i| acc * n + i)
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.rank()];
        unflatten(flat, self.dim(), &mut idx);
        idx
    }

    pub fn get(&self, idx: &[usize]) -> &Expr {
        &self.comps[self.flat_index(idx)]
    }

    /// Scalar value of a rank-0 field.
    pub fn value(&self) -> &Expr {
        &self.comps[0]
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> TensorField {
        TensorField {
            chart: self.chart.clone(),
            slots: self.slots.clone(),
            comps: self.comps.iter().map(f).collect(),
        }
    }

    fn check_compatible(&self, other: &TensorField) -> Result<()> {
        if !Arc::ptr_eq(&self.chart, &other.chart) {
            return Err(Error::ChartMismatch);
        }
        if self.slots != other.slots {
            return Err(Error::SlotVarianceMismatch(format!(
                "{:?} vs {:?}",
                self.slots, other.slots
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &TensorField) -> Result<TensorField> {
        self.check_compatible(other)?;
        Ok(TensorField {
            chart: self.chart.clone(),
            slots: self.slots.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &TensorField) -> Result<TensorField> {
        self.check_compatible(other)?;
        Ok(TensorField {
            chart: self.chart.clone(),
            slots: self.slots.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, s: &Expr) -> TensorField {
        self.map(|c| c * s)
    }

    /// Reorders slots: output slot `k` is input slot `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> TensorField {
        assert_eq!(perm.len(), self.rank());
        let slots: Vec<Variance> = perm.iter().map(|p| self.slots[*p]).collect();
        let mut src = vec![0; self.rank()];
        TensorField::from_fn(&self.chart, &slots, |idx| {
            for (k, p) in perm.iter().enumerate() {
                src[*p] = idx[k];
            }
            self.get(&src).clone()
        })
    }

    /// Tensor product `self ⊗ other`.
    pub fn outer(&self, other: &TensorField) -> TensorField {
        let r = self.rank();
        let mut slots = self.slots.clone();
        slots.extend_from_slice(&other.slots);
        TensorField::from_fn(&self.chart, &slots, |idx| {
            self.get(&idx[..r]) * other.get(&idx[r..])
        })
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.comps.iter().all(Expr::is_zero)
    }

    /// Joint zero test of all components; a witness carries the offending
    /// multi-index.
    pub fn zero_test(&self, ctx: &EvalContext) -> Result<ZeroVerdict> {
        let mut v = zero_test(&self.comps, ctx)?;
        if let ZeroVerdict::NonZero(w) = &mut v {
            w.component = self.multi_index(w.component[0]);
        }
        Ok(v)
    }

    /// Number of structurally nonzero components.
    pub fn nonzero_count(&self) -> usize {
        self.comps.iter().filter(|c| !c.is_zero()).count()
    }
}

fn unflatten(mut flat: usize, n: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
}

/// Coefficients `γ^a_bc` of a symmetric affine connection, stored as an
/// (Up, Down, Down) field.
#[derive(Clone, Debug)]
pub struct Connection(TensorField);

impl Connection {
    pub fn new(t: TensorField) -> Result<Connection> {
        if t.slots() != [Variance::Up, Variance::Down, Variance::Down] {
            return Err(Error::SlotVarianceMismatch(format!(
                "connection coefficients need (Up, Down, Down), got {:?}",
                t.slots()
            )));
        }
        Ok(Connection(t))
    }

    pub fn coeff(&self, a: usize, b: usize, c: usize) -> &Expr {
        self.0.get(&[a, b, c])
    }

    pub fn field(&self) -> &TensorField {
        &self.0
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.0.chart()
    }

    /// Connection plus a (1,2) tensor.
    pub fn shifted(&self, l: &TensorField) -> Result<Connection> {
        Connection::new(self.0.add(l)?)
    }

    /// Coordinate-flat connection (all coefficients zero).
    pub fn flat(chart: &Arc<Chart>) -> Connection {
        Connection(TensorField::zeros(
            chart,
            &[Variance::Up, Variance::Down, Variance::Down],
        ))
    }
}

/// Helper for summing a product expression over one dummy index.
pub fn sum_over(n: usize, f: impl FnMut(usize) -> Expr) -> Expr {
    Expr::sum((0..n).map(f))
}
