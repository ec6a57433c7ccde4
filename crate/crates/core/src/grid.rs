//! Flat-torus sample grids and the scalar / symmetric-tensor fields living on
//! them.
//!
//! All boundary data in this crate lives on a uniform periodic grid over a
//! flat torus of dimension `d = n - 1`. Fields come in two representations:
//!
//! * `Uniform` — node-independent value. Translation-invariant inputs (every
//!   closed-form chart in the crate) take this fast path: no storage, exact
//!   zero derivatives, exact quadrature.
//! * `Sampled` — one value per node, row-major over the axes, the same sample
//!   count along every axis.
//!
//! Differentiation is spectral: DFT along a grid line, multiply by the wave
//! number, transform back. For the smooth periodic data used here this is
//! accurate to round-off well before the grid resolves the nominal Nyquist
//! limit.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use rustfft::{num_complex::Complex64, FftPlanner};
use std::sync::Arc;

/// Uniform periodic sample grid on a flat torus.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusGrid {
    periods: Arc<Vec<f64>>,
    samples: usize,
}

impl TorusGrid {
    /// A grid over a torus with the given axis periods, sampled `samples`
    /// times per axis. Requires at least one axis, positive periods, and an
    /// even sample count of at least 4 (spectral differentiation needs a
    /// well-defined Nyquist bin).
    pub fn new(periods: &[f64], samples: usize) -> Result<Self> {
        if periods.is_empty() {
            return Err(Error::InvalidInput("grid needs at least one axis".into()));
        }
        if periods.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "all periods must be positive and finite, got {periods:?}"
            )));
        }
        if samples < 4 || samples % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "samples per axis must be even and at least 4, got {samples}"
            )));
        }
        Ok(TorusGrid {
            periods: Arc::new(periods.to_vec()),
            samples,
        })
    }

    pub fn boundary_dim(&self) -> usize {
        self.periods.len()
    }

    /// Bulk dimension `n` (one more than the boundary dimension).
    pub fn bulk_dim(&self) -> usize {
        self.periods.len() + 1
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    pub fn samples_per_axis(&self) -> usize {
        self.samples
    }

    pub fn node_count(&self) -> usize {
        self.samples.pow(self.boundary_dim() as u32)
    }

    /// Coordinate volume of the torus, `prod(periods)`.
    pub fn volume(&self) -> f64 {
        self.periods.iter().product()
    }

    /// Coordinates of a row-major node index.
    pub fn coords(&self, node: usize) -> Vec<f64> {
        let d = self.boundary_dim();
        let mut c = vec![0.0; d];
        let mut rem = node;
        for axis in (0..d).rev() {
            let i = rem % self.samples;
            rem /= self.samples;
            c[axis] = self.periods[axis] * i as f64 / self.samples as f64;
        }
        c
    }

    fn check_same(&self, other: &TorusGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "periods {:?} x {} vs {:?} x {}",
                self.periods, self.samples, other.periods, other.samples
            )));
        }
        Ok(())
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.boundary_dim() {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: self.boundary_dim(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum FieldData<T> {
    Uniform(T),
    Sampled(Vec<T>),
}

/// Real scalar field on a [`TorusGrid`].
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: TorusGrid,
    data: FieldData<f64>,
}

impl ScalarField {
    pub fn uniform(grid: &TorusGrid, value: f64) -> Self {
        ScalarField {
            grid: grid.clone(),
            data: FieldData::Uniform(value),
        }
    }

    pub fn zero(grid: &TorusGrid) -> Self {
        Self::uniform(grid, 0.0)
    }

    /// Sample a closure over node coordinates.
    pub fn from_fn(grid: &TorusGrid, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let vals = (0..grid.node_count())
            .map(|i| f(&grid.coords(i)))
            .collect();
        ScalarField {
            grid: grid.clone(),
            data: FieldData::Sampled(vals),
        }
    }

    pub fn from_values(grid: &TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::InvalidInput(format!(
                "expected {} node values, got {}",
                grid.node_count(),
                values.len()
            )));
        }
        Ok(ScalarField {
            grid: grid.clone(),
            data: FieldData::Sampled(values),
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.data, FieldData::Uniform(_))
    }

    pub fn value_at(&self, node: usize) -> f64 {
        match &self.data {
            FieldData::Uniform(v) => *v,
            FieldData::Sampled(v) => v[node],
        }
    }

    /// Materialized node values (constant vector for uniform fields).
    pub fn to_values(&self) -> Vec<f64> {
        match &self.data {
            FieldData::Uniform(v) => vec![*v; self.grid.node_count()],
            FieldData::Sampled(v) => v.clone(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let data = match &self.data {
            FieldData::Uniform(v) => FieldData::Uniform(f(*v)),
            FieldData::Sampled(v) => FieldData::Sampled(v.iter().map(|&x| f(x)).collect()),
        };
        ScalarField {
            grid: self.grid.clone(),
            data,
        }
    }

    pub fn zip(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let data = match (&self.data, &other.data) {
            (FieldData::Uniform(a), FieldData::Uniform(b)) => FieldData::Uniform(f(*a, *b)),
            _ => FieldData::Sampled(
                (0..self.grid.node_count())
                    .map(|i| f(self.value_at(i), other.value_at(i)))
                    .collect(),
            ),
        };
        Ok(ScalarField {
            grid: self.grid.clone(),
            data,
        })
    }

    pub fn add(&self, other: &ScalarField) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &ScalarField) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|x| x * s)
    }

    pub fn max_abs(&self) -> f64 {
        match &self.data {
            FieldData::Uniform(v) => v.abs(),
            FieldData::Sampled(v) => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    pub fn min(&self) -> f64 {
        match &self.data {
            FieldData::Uniform(v) => *v,
            FieldData::Sampled(v) => v.iter().fold(f64::INFINITY, |m, &x| m.min(x)),
        }
    }

    pub fn max(&self) -> f64 {
        match &self.data {
            FieldData::Uniform(v) => *v,
            FieldData::Sampled(v) => v.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x)),
        }
    }

    pub fn mean(&self) -> f64 {
        match &self.data {
            FieldData::Uniform(v) => *v,
            FieldData::Sampled(v) => v.iter().sum::<f64>() / v.len() as f64,
        }
    }

    /// Torus integral with the flat volume element: trapezoidal quadrature on
    /// a periodic uniform grid, i.e. `mean * prod(periods)`. Spectrally
    /// accurate for smooth integrands.
    pub fn integrate(&self) -> f64 {
        self.mean() * self.grid.volume()
    }

    /// Value-wise equality within `tol` (uniform and sampled representations
    /// compare equal when their values do).
    pub fn approx_eq(&self, other: &ScalarField, tol: f64) -> bool {
        self.grid == other.grid
            && (0..self.grid.node_count().max(1))
                .all(|i| (self.value_at(i) - other.value_at(i)).abs() <= tol)
    }

    /// Partial derivative along a torus axis via DFT. Exact (to round-off)
    /// for band-limited data; uniform fields differentiate to exactly zero.
    pub fn spectral_derivative(&self, axis: usize) -> Result<Self> {
        self.grid.check_axis(axis)?;
        match &self.data {
            FieldData::Uniform(_) => Ok(ScalarField::uniform(&self.grid, 0.0)),
            FieldData::Sampled(vals) => {
                let mut out = vals.clone();
                derivative_along_axis(&self.grid, &mut out, axis);
                Ok(ScalarField {
                    grid: self.grid.clone(),
                    data: FieldData::Sampled(out),
                })
            }
        }
    }
}

/// In-place spectral derivative of row-major node data along one axis.
fn derivative_along_axis(grid: &TorusGrid, vals: &mut [f64], axis: usize) {
    let d = grid.boundary_dim();
    let n = grid.samples_per_axis();
    let len = grid.node_count();
    // Row-major: stride of `axis` is samples^(d-1-axis).
    let stride = n.pow((d - 1 - axis) as u32);
    let period = grid.periods()[axis];

    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf = vec![Complex64::default(); n];

    // Enumerate the start node of every grid line along `axis`.
    let lines = len / n;
    for line in 0..lines {
        let block = line / stride; // index over the axes before `axis`
        let offset = line % stride; // index over the axes after `axis`
        let start = block * stride * n + offset;

        for (j, slot) in buf.iter_mut().enumerate() {
            *slot = Complex64::new(vals[start + j * stride], 0.0);
        }
        fwd.process(&mut buf);
        for (m, slot) in buf.iter_mut().enumerate() {
            let freq = if 2 * m < n {
                m as f64
            } else if 2 * m == n {
                0.0 // Nyquist bin carries no usable derivative information
            } else {
                m as f64 - n as f64
            };
            let k = 2.0 * std::f64::consts::PI * freq / period;
            *slot *= Complex64::new(0.0, k);
        }
        inv.process(&mut buf);
        for (j, slot) in buf.iter().enumerate() {
            vals[start + j * stride] = slot.re / n as f64;
        }
    }
}

/// Symmetric-matrix-valued field on a [`TorusGrid`]; entries are tangential
/// tensor components in the coordinate basis of the torus axes. Intermediate
/// arithmetic (mixed-index products and the like) reuses this container
/// without the symmetry guarantee; constructors taking user data validate it.
#[derive(Debug, Clone)]
pub struct SymTensorField {
    grid: TorusGrid,
    data: FieldData<DMatrix<f64>>,
}

impl SymTensorField {
    pub fn uniform(grid: &TorusGrid, value: DMatrix<f64>) -> Result<Self> {
        check_dims(grid, &value)?;
        Ok(SymTensorField {
            grid: grid.clone(),
            data: FieldData::Uniform(value),
        })
    }

    /// Node-independent identity matrix (the flat-torus metric in coordinates
    /// where the periods carry the geometry).
    pub fn identity(grid: &TorusGrid) -> Self {
        let d = grid.boundary_dim();
        SymTensorField {
            grid: grid.clone(),
            data: FieldData::Uniform(DMatrix::identity(d, d)),
        }
    }

    pub fn zero(grid: &TorusGrid) -> Self {
        let d = grid.boundary_dim();
        SymTensorField {
            grid: grid.clone(),
            data: FieldData::Uniform(DMatrix::zeros(d, d)),
        }
    }

    pub fn from_fn(grid: &TorusGrid, mut f: impl FnMut(&[f64]) -> DMatrix<f64>) -> Result<Self> {
        let mut vals = Vec::with_capacity(grid.node_count());
        for i in 0..grid.node_count() {
            let m = f(&grid.coords(i));
            check_dims(grid, &m)?;
            vals.push(m);
        }
        Ok(SymTensorField {
            grid: grid.clone(),
            data: FieldData::Sampled(vals),
        })
    }

    /// Build from per-component scalar fields, `comps[i][j]` for `j <= i`.
    pub fn from_components(grid: &TorusGrid, comps: &[Vec<ScalarField>]) -> Result<Self> {
        let d = grid.boundary_dim();
        if comps.len() != d || comps.iter().enumerate().any(|(i, row)| row.len() != i + 1) {
            return Err(Error::InvalidInput(
                "component triangle must have rows of length 1..=d".into(),
            ));
        }
        let uniform = comps.iter().flatten().all(ScalarField::is_uniform);
        let build = |node: usize| {
            DMatrix::from_fn(d, d, |i, j| {
                let (a, b) = if i >= j { (i, j) } else { (j, i) };
                comps[a][b].value_at(node)
            })
        };
        if uniform {
            Ok(SymTensorField {
                grid: grid.clone(),
                data: FieldData::Uniform(build(0)),
            })
        } else {
            Ok(SymTensorField {
                grid: grid.clone(),
                data: FieldData::Sampled((0..grid.node_count()).map(build).collect()),
            })
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.boundary_dim()
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.data, FieldData::Uniform(_))
    }

    pub fn value_at(&self, node: usize) -> &DMatrix<f64> {
        match &self.data {
            FieldData::Uniform(v) => v,
            FieldData::Sampled(v) => &v[node],
        }
    }

    /// Number of distinct stored matrices (1 for uniform).
    fn slots(&self) -> usize {
        match &self.data {
            FieldData::Uniform(_) => 1,
            FieldData::Sampled(v) => v.len(),
        }
    }

    pub fn component(&self, i: usize, j: usize) -> ScalarField {
        let data = match &self.data {
            FieldData::Uniform(m) => FieldData::Uniform(m[(i, j)]),
            FieldData::Sampled(v) => FieldData::Sampled(v.iter().map(|m| m[(i, j)]).collect()),
        };
        ScalarField {
            grid: self.grid.clone(),
            data,
        }
    }

    pub fn map(&self, f: impl Fn(&DMatrix<f64>) -> DMatrix<f64>) -> Self {
        let data = match &self.data {
            FieldData::Uniform(m) => FieldData::Uniform(f(m)),
            FieldData::Sampled(v) => FieldData::Sampled(v.iter().map(f).collect()),
        };
        SymTensorField {
            grid: self.grid.clone(),
            data,
        }
    }

    pub fn zip(
        &self,
        other: &SymTensorField,
        f: impl Fn(&DMatrix<f64>, &DMatrix<f64>) -> DMatrix<f64>,
    ) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let data = match (&self.data, &other.data) {
            (FieldData::Uniform(a), FieldData::Uniform(b)) => FieldData::Uniform(f(a, b)),
            _ => FieldData::Sampled(
                (0..self.grid.node_count())
                    .map(|i| f(self.value_at(i), other.value_at(i)))
                    .collect(),
            ),
        };
        Ok(SymTensorField {
            grid: self.grid.clone(),
            data,
        })
    }

    pub fn add(&self, other: &SymTensorField) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SymTensorField) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    /// Pointwise matrix product (index contraction, not entrywise).
    pub fn matmul(&self, other: &SymTensorField) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|m| m * s)
    }

    pub fn mul_scalar_field(&self, s: &ScalarField) -> Result<Self> {
        self.grid.check_same(&s.grid)?;
        let data = match (&self.data, &s.data) {
            (FieldData::Uniform(m), FieldData::Uniform(v)) => FieldData::Uniform(m * *v),
            _ => FieldData::Sampled(
                (0..self.grid.node_count())
                    .map(|i| self.value_at(i) * s.value_at(i))
                    .collect(),
            ),
        };
        Ok(SymTensorField {
            grid: self.grid.clone(),
            data,
        })
    }

    /// Plain matrix trace, node by node.
    pub fn trace(&self) -> ScalarField {
        let data = match &self.data {
            FieldData::Uniform(m) => FieldData::Uniform(m.trace()),
            FieldData::Sampled(v) => FieldData::Sampled(v.iter().map(DMatrix::trace).collect()),
        };
        ScalarField {
            grid: self.grid.clone(),
            data,
        }
    }

    /// Pointwise inverse. Errors on singular nodes.
    pub fn try_inverse(&self) -> Result<Self> {
        let invert = |m: &DMatrix<f64>, node: usize| {
            m.clone()
                .try_inverse()
                .ok_or(Error::SingularMatrix { node })
        };
        let data = match &self.data {
            FieldData::Uniform(m) => FieldData::Uniform(invert(m, 0)?),
            FieldData::Sampled(v) => {
                let mut out = Vec::with_capacity(v.len());
                for (i, m) in v.iter().enumerate() {
                    out.push(invert(m, i)?);
                }
                FieldData::Sampled(out)
            }
        };
        Ok(SymTensorField {
            grid: self.grid.clone(),
            data,
        })
    }

    /// Largest entry magnitude over all nodes.
    pub fn sup_norm(&self) -> f64 {
        let entry_max = |m: &DMatrix<f64>| m.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        match &self.data {
            FieldData::Uniform(m) => entry_max(m),
            FieldData::Sampled(v) => v.iter().map(entry_max).fold(0.0, f64::max),
        }
    }

    pub fn max_asymmetry(&self) -> f64 {
        let asym = |m: &DMatrix<f64>| {
            let t = m.transpose();
            (m - t).iter().fold(0.0f64, |a, x| a.max(x.abs()))
        };
        (0..self.slots()).fold(0.0, |acc, i| {
            acc.max(asym(match &self.data {
                FieldData::Uniform(m) => m,
                FieldData::Sampled(v) => &v[i],
            }))
        })
    }

    /// Fails unless every node value is symmetric within `tol`.
    pub fn require_symmetric(&self, tol: f64) -> Result<()> {
        let a = self.max_asymmetry();
        if a > tol {
            return Err(Error::InvalidInput(format!(
                "tensor field not symmetric: max asymmetry {a:.3e}"
            )));
        }
        Ok(())
    }

    /// Fails unless every node value is positive definite (checked via
    /// symmetric eigenvalues).
    pub fn require_positive_definite(&self) -> Result<()> {
        for node in 0..self.slots() {
            let eig = self.value_at(node).clone().symmetric_eigenvalues();
            if eig.iter().any(|&l| l <= 0.0) {
                return Err(Error::NotPositiveDefinite { node });
            }
        }
        Ok(())
    }

    /// Symmetric eigenvalues at one node, ascending.
    pub fn eigenvalues_at(&self, node: usize) -> Vec<f64> {
        let mut e: Vec<f64> = self
            .value_at(node)
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    }

    /// Pointwise determinant.
    pub fn determinant(&self) -> ScalarField {
        let data = match &self.data {
            FieldData::Uniform(m) => FieldData::Uniform(m.determinant()),
            FieldData::Sampled(v) => {
                FieldData::Sampled(v.iter().map(|m| m.determinant()).collect())
            }
        };
        ScalarField {
            grid: self.grid.clone(),
            data,
        }
    }

    /// Component-wise spectral derivative along a torus axis.
    pub fn spectral_derivative(&self, axis: usize) -> Result<Self> {
        self.grid.check_axis(axis)?;
        match &self.data {
            FieldData::Uniform(_) => Ok(SymTensorField::zero(&self.grid)),
            FieldData::Sampled(vals) => {
                let d = self.dim();
                let n_nodes = self.grid.node_count();
                let mut comp = vec![0.0; n_nodes];
                let mut out: Vec<DMatrix<f64>> = vec![DMatrix::zeros(d, d); n_nodes];
                for i in 0..d {
                    for j in 0..d {
                        for (node, m) in vals.iter().enumerate() {
                            comp[node] = m[(i, j)];
                        }
                        derivative_along_axis(&self.grid, &mut comp, axis);
                        for (node, m) in out.iter_mut().enumerate() {
                            m[(i, j)] = comp[node];
                        }
                    }
                }
                Ok(SymTensorField {
                    grid: self.grid.clone(),
                    data: FieldData::Sampled(out),
                })
            }
        }
    }

    pub fn approx_eq(&self, other: &SymTensorField, tol: f64) -> bool {
        if self.grid != other.grid {
            return false;
        }
        (0..self.grid.node_count()).all(|i| {
            let (a, b) = (self.value_at(i), other.value_at(i));
            a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= tol)
        })
    }
}

fn check_dims(grid: &TorusGrid, m: &DMatrix<f64>) -> Result<()> {
    let d = grid.boundary_dim();
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::InvalidInput(format!(
            "matrix {}x{} does not match boundary dimension {}",
            m.nrows(),
            m.ncols(),
            d
        )));
    }
    Ok(())
}
