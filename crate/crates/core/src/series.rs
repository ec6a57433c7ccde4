//! Truncated power series in the boundary defining coordinate `x`, with
//! coefficients that are scalar or symmetric-tensor fields on a torus grid.
//!
//! A series of truncation `K` stores coefficients of `x^0 .. x^K`. Binary
//! operations truncate to the shorter operand (the tail past either
//! truncation is unknown), multiplication is the Cauchy product, and
//! composition is Horner evaluation in series arithmetic. Compositional
//! inversion of a tangent-to-identity series runs Newton iteration in the
//! series ring, doubling the number of correct coefficients per step.

use crate::error::{Error, Result};
use crate::grid::{ScalarField, SymTensorField, TorusGrid};
use serde::{Deserialize, Serialize};

/// Tolerance used when structural coefficients (constant terms of
/// substitutions, cancelling negative powers, ...) must vanish.
pub const STRUCTURAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct ScalarSeries {
    grid: TorusGrid,
    coeffs: Vec<ScalarField>,
}

#[derive(Debug, Clone)]
pub struct TensorSeries {
    grid: TorusGrid,
    coeffs: Vec<SymTensorField>,
}

impl ScalarSeries {
    pub fn new(grid: &TorusGrid, coeffs: Vec<ScalarField>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("series needs >= 1 coefficient".into()));
        }
        for c in &coeffs {
            if c.grid() != grid {
                return Err(Error::GridMismatch("series coefficient grid".into()));
            }
        }
        Ok(ScalarSeries {
            grid: grid.clone(),
            coeffs,
        })
    }

    pub fn zero(grid: &TorusGrid, truncation: usize) -> Self {
        ScalarSeries {
            grid: grid.clone(),
            coeffs: vec![ScalarField::zero(grid); truncation + 1],
        }
    }

    /// Series with the given uniform coefficient values.
    pub fn from_uniform_coeffs(grid: &TorusGrid, vals: &[f64]) -> Self {
        ScalarSeries {
            grid: grid.clone(),
            coeffs: vals.iter().map(|&v| ScalarField::uniform(grid, v)).collect(),
        }
    }

    /// The identity series `x` at the given truncation.
    pub fn identity(grid: &TorusGrid, truncation: usize) -> Self {
        let mut s = Self::zero(grid, truncation.max(1));
        s.coeffs[1] = ScalarField::uniform(grid, 1.0);
        s
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    /// Truncation order `K`; coefficients `0..=K` are stored.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &ScalarField {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[ScalarField] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, c: ScalarField) -> Result<()> {
        if c.grid() != &self.grid {
            return Err(Error::GridMismatch("coefficient grid".into()));
        }
        self.coeffs[k] = c;
        Ok(())
    }

    /// Drop coefficients above order `k` (or keep all if already shorter).
    pub fn truncate(&self, k: usize) -> Self {
        let keep = (k + 1).min(self.coeffs.len());
        ScalarSeries {
            grid: self.grid.clone(),
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    /// Extend with zero coefficients up to truncation `k`. Only sound when
    /// the caller knows the appended orders cannot contribute (e.g. they
    /// multiply a series with vanishing low orders).
    fn pad_to(&self, k: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() < k + 1 {
            coeffs.push(ScalarField::zero(&self.grid));
        }
        ScalarSeries {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    fn common_len(&self, other: &ScalarSeries) -> usize {
        self.coeffs.len().min(other.coeffs.len())
    }

    pub fn add(&self, other: &ScalarSeries) -> Result<Self> {
        let m = self.common_len(other);
        let mut out = Vec::with_capacity(m);
        for k in 0..m {
            out.push(self.coeffs[k].add(&other.coeffs[k])?);
        }
        Self::new(&self.grid, out)
    }

    pub fn sub(&self, other: &ScalarSeries) -> Result<Self> {
        let m = self.common_len(other);
        let mut out = Vec::with_capacity(m);
        for k in 0..m {
            out.push(self.coeffs[k].sub(&other.coeffs[k])?);
        }
        Self::new(&self.grid, out)
    }

    pub fn scale(&self, s: f64) -> Self {
        ScalarSeries {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect(),
        }
    }

    pub fn mul_field(&self, f: &ScalarField) -> Result<Self> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c.mul(f)?);
        }
        Self::new(&self.grid, out)
    }

    /// Cauchy product, truncated to the shorter operand.
    pub fn mul(&self, other: &ScalarSeries) -> Result<Self> {
        let m = self.common_len(other);
        let mut out = Vec::with_capacity(m);
        for k in 0..m {
            let mut acc = ScalarField::zero(&self.grid);
            for i in 0..=k {
                acc = acc.add(&self.coeffs[i].mul(&other.coeffs[k - i])?)?;
            }
            out.push(acc);
        }
        Self::new(&self.grid, out)
    }

    /// d/dx: coefficient `k` becomes `(k+1) * c_{k+1}`; truncation drops by 1.
    pub fn derivative_x(&self) -> Result<Self> {
        if self.coeffs.len() < 2 {
            return Err(Error::TruncationTooLow { got: 0, need: 1 });
        }
        let out = (1..self.coeffs.len())
            .map(|k| self.coeffs[k].scale(k as f64))
            .collect();
        Self::new(&self.grid, out)
    }

    /// Multiply by `x^j` (coefficients shift up; truncation grows by `j`).
    pub fn mul_x_pow(&self, j: usize) -> Self {
        let mut out = vec![ScalarField::zero(&self.grid); j];
        out.extend(self.coeffs.iter().cloned());
        ScalarSeries {
            grid: self.grid.clone(),
            coeffs: out,
        }
    }

    /// Divide by `x^j`. The coefficients below `x^j` must vanish within
    /// `STRUCTURAL_TOL`; a residual signals input outside the normal form.
    pub fn div_x_pow(&self, j: usize) -> Result<Self> {
        for k in 0..j.min(self.coeffs.len()) {
            let r = self.coeffs[k].max_abs();
            if r > STRUCTURAL_TOL {
                return Err(Error::SingularStructure { residual: r });
            }
        }
        if self.coeffs.len() <= j {
            return Err(Error::TruncationTooLow {
                got: self.coeffs.len() - 1,
                need: j,
            });
        }
        Self::new(&self.grid, self.coeffs[j..].to_vec())
    }

    /// Multiplicative inverse; the constant coefficient must be nonzero at
    /// every node.
    pub fn reciprocal(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.map(f64::abs).min() < 1e-14 {
            return Err(Error::InvalidInput(
                "series reciprocal needs a nonvanishing constant term".into(),
            ));
        }
        let inv0 = a0.map(|v| 1.0 / v);
        let mut out = vec![inv0.clone()];
        for k in 1..self.coeffs.len() {
            let mut acc = ScalarField::zero(&self.grid);
            for j in 1..=k {
                acc = acc.add(&self.coeffs[j].mul(&out[k - j])?)?;
            }
            out.push(acc.mul(&inv0)?.scale(-1.0));
        }
        Self::new(&self.grid, out)
    }

    /// exp of the series. Splits off the constant term (pointwise exp) and
    /// exponentiates the nilpotent tail by the derivative recursion.
    pub fn exp(&self) -> Result<Self> {
        let head = self.coeffs[0].map(f64::exp);
        let mut tail = self.clone();
        tail.coeffs[0] = ScalarField::zero(&self.grid);
        // E' = t' E  with E_0 = 1  =>  k E_k = sum_{j=1..k} j t_j E_{k-j}
        let mut e = vec![ScalarField::uniform(&self.grid, 1.0)];
        for k in 1..self.coeffs.len() {
            let mut acc = ScalarField::zero(&self.grid);
            for j in 1..=k {
                acc = acc.add(&tail.coeffs[j].scale(j as f64).mul(&e[k - j])?)?;
            }
            e.push(acc.scale(1.0 / k as f64));
        }
        let series = Self::new(&self.grid, e)?;
        series.mul_field(&head)
    }

    /// Substitute `sub(x)` for the variable. `sub` must have zero constant
    /// term and unit linear term (tangent to the identity), which keeps
    /// composition invertible; see [`ScalarSeries::compositional_inverse`].
    pub fn compose(&self, sub: &ScalarSeries) -> Result<Self> {
        let lin = sub.coeffs.get(1).map(|c| {
            c.map(|v| (v - 1.0).abs()).max()
        });
        match lin {
            Some(dev) if dev <= STRUCTURAL_TOL => {}
            _ => return Err(Error::NotTangentToIdentity),
        }
        self.compose_any(sub)
    }

    /// Composition without the tangency requirement (still needs zero
    /// constant term). Used internally where the substitution carries a
    /// node-dependent linear scale.
    pub(crate) fn compose_any(&self, sub: &ScalarSeries) -> Result<Self> {
        if sub.coeffs[0].max_abs() > STRUCTURAL_TOL {
            return Err(Error::NotComposable);
        }
        let k_out = self.common_len(sub) - 1;
        // Horner in the series ring.
        let mut acc = ScalarSeries::zero(&self.grid, k_out);
        acc.coeffs[0] = self.coeffs[self.coeffs.len() - 1].clone();
        for k in (0..self.coeffs.len() - 1).rev() {
            acc = acc.mul(&sub.truncate(k_out))?;
            acc.coeffs[0] = acc.coeffs[0].add(&self.coeffs[k])?;
        }
        Ok(acc)
    }

    /// Compositional inverse `g` with `self(g(x)) = x`, for series tangent to
    /// the identity. Newton iteration in the series ring.
    pub fn compositional_inverse(&self) -> Result<Self> {
        if self.coeffs[0].max_abs() > STRUCTURAL_TOL {
            return Err(Error::NotComposable);
        }
        let dev = self.coeffs.get(1).map(|c| c.map(|v| (v - 1.0).abs()).max());
        match dev {
            Some(d) if d <= STRUCTURAL_TOL => {}
            _ => return Err(Error::NotTangentToIdentity),
        }
        let k = self.truncation();
        let id = ScalarSeries::identity(&self.grid, k);
        let fp = self.derivative_x()?;
        let mut g = id.clone();
        let steps = (usize::BITS - k.leading_zeros()) as usize + 2;
        for _ in 0..steps {
            // g <- g - (f(g) - x) / f'(g). The residual f(g) - x has no
            // constant term, so padding the reciprocal keeps the product
            // exact through order K.
            let fg = self.compose_any(&g)?.sub(&id)?;
            let fpg = fp.compose_any(&g.truncate(k.saturating_sub(1)))?;
            let corr = fg.mul(&fpg.reciprocal()?.pad_to(k))?;
            g = g.sub(&corr.truncate(k))?;
        }
        Ok(g)
    }

    /// Evaluate by Horner at a numeric `x`.
    pub fn eval(&self, x: f64) -> ScalarField {
        let mut acc = ScalarField::zero(&self.grid);
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(x).add(c).expect("same grid");
        }
        acc
    }

    /// Sup-norm of each coefficient, for order-by-order reporting.
    pub fn coeff_norms(&self) -> Vec<f64> {
        self.coeffs.iter().map(ScalarField::max_abs).collect()
    }

    /// First order whose coefficient sup-norm exceeds `tol`.
    pub fn first_nonzero_order(&self, tol: f64) -> Option<usize> {
        self.coeff_norms().iter().position(|&n| n > tol)
    }

    pub fn approx_eq(&self, other: &ScalarSeries, tol: f64) -> bool {
        self.common_len(other) == self.coeffs.len().max(other.coeffs.len())
            && self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .all(|(a, b)| a.approx_eq(b, tol))
    }
}

impl TensorSeries {
    pub fn new(grid: &TorusGrid, coeffs: Vec<SymTensorField>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("series needs >= 1 coefficient".into()));
        }
        for c in &coeffs {
            if c.grid() != grid {
                return Err(Error::GridMismatch("series coefficient grid".into()));
            }
        }
        Ok(TensorSeries {
            grid: grid.clone(),
            coeffs,
        })
    }

    pub fn zero(grid: &TorusGrid, truncation: usize) -> Self {
        TensorSeries {
            grid: grid.clone(),
            coeffs: vec![SymTensorField::zero(grid); truncation + 1],
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &SymTensorField {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[SymTensorField] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, c: SymTensorField) -> Result<()> {
        if c.grid() != &self.grid {
            return Err(Error::GridMismatch("coefficient grid".into()));
        }
        self.coeffs[k] = c;
        Ok(())
    }

    pub fn truncate(&self, k: usize) -> Self {
        let keep = (k + 1).min(self.coeffs.len());
        TensorSeries {
            grid: self.grid.clone(),
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    fn common_len_t(&self, other: &TensorSeries) -> usize {
        self.coeffs.len().min(other.coeffs.len())
    }

    pub fn add(&self, other: &TensorSeries) -> Result<Self> {
        let m = self.common_len_t(other);
        let mut out = Vec::with_capacity(m);
        for k in 0..m {
            out.push(self.coeffs[k].add(&other.coeffs[k])?);
        }
        Self::new(&self.grid, out)
    }

    pub fn sub(&self, other: &TensorSeries) -> Result<Self> {
        let m = self.common_len_t(other);
        let mut out = Vec::with_capacity(m);
        for k in 0..m {
            out.push(self.coeffs[k].sub(&other.coeffs[k])?);
        }
        Self::new(&self.grid, out)
    }

    pub fn scale(&self, s: f64) -> Self {
        TensorSeries {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect(),
        }
    }

    /// Cauchy product against a scalar series.
    pub fn mul_scalar_series(&self, s: &ScalarSeries) -> Result<Self> {
        let m = self.coeffs.len().min(s.coeffs.len());
        let mut out = Vec::with_capacity(m);
        for k in 0..m {
            let mut acc = SymTensorField::zero(&self.grid);
            for i in 0..=k {
                acc = acc.add(&self.coeffs[i].mul_scalar_field(&s.coeffs[k - i])?)?;
            }
            out.push(acc);
        }
        Self::new(&self.grid, out)
    }

    /// Cauchy product with pointwise matrix multiplication (index
    /// contraction) between coefficients.
    pub fn matmul_series(&self, other: &TensorSeries) -> Result<Self> {
        let m = self.common_len_t(other);
        let mut out = Vec::with_capacity(m);
        for k in 0..m {
            let mut acc = SymTensorField::zero(&self.grid);
            for i in 0..=k {
                acc = acc.add(&self.coeffs[i].matmul(&other.coeffs[k - i])?)?;
            }
            out.push(acc);
        }
        Self::new(&self.grid, out)
    }

    /// Pointwise matrix trace of each coefficient.
    pub fn trace_series(&self) -> ScalarSeries {
        ScalarSeries {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(SymTensorField::trace).collect(),
        }
    }

    pub fn derivative_x(&self) -> Result<Self> {
        if self.coeffs.len() < 2 {
            return Err(Error::TruncationTooLow { got: 0, need: 1 });
        }
        let out = (1..self.coeffs.len())
            .map(|k| self.coeffs[k].scale(k as f64))
            .collect();
        Self::new(&self.grid, out)
    }

    pub fn mul_x_pow(&self, j: usize) -> Self {
        let mut out = vec![SymTensorField::zero(&self.grid); j];
        out.extend(self.coeffs.iter().cloned());
        TensorSeries {
            grid: self.grid.clone(),
            coeffs: out,
        }
    }

    pub fn div_x_pow(&self, j: usize) -> Result<Self> {
        for k in 0..j.min(self.coeffs.len()) {
            let r = self.coeffs[k].sup_norm();
            if r > STRUCTURAL_TOL {
                return Err(Error::SingularStructure { residual: r });
            }
        }
        if self.coeffs.len() <= j {
            return Err(Error::TruncationTooLow {
                got: self.coeffs.len() - 1,
                need: j,
            });
        }
        Self::new(&self.grid, self.coeffs[j..].to_vec())
    }

    /// Order-by-order inverse of a metric series: `H_0 = h_0^{-1}`,
    /// `H_k = -H_0 * sum_{j=1..k} h_j H_{k-j}`. The leading coefficient must
    /// be invertible at every node; the product of the result with the input
    /// is the identity through the stored truncation.
    pub fn metric_inverse(&self) -> Result<Self> {
        let h0_inv = self.coeffs[0].try_inverse()?;
        let mut out = vec![h0_inv.clone()];
        for k in 1..self.coeffs.len() {
            let mut acc = SymTensorField::zero(&self.grid);
            for j in 1..=k {
                acc = acc.add(&self.coeffs[j].matmul(&out[k - j])?)?;
            }
            out.push(h0_inv.matmul(&acc)?.scale(-1.0));
        }
        Self::new(&self.grid, out)
    }

    /// Trace against a metric inverse series: coefficients of
    /// `tr(h^{-1} . self)`.
    pub fn trace_with(&self, metric_inverse: &TensorSeries) -> Result<ScalarSeries> {
        Ok(metric_inverse.matmul_series(self)?.trace_series())
    }

    /// Substitute a scalar series (zero constant term) for the variable.
    pub(crate) fn compose_any(&self, sub: &ScalarSeries) -> Result<Self> {
        if sub.coeffs[0].max_abs() > STRUCTURAL_TOL {
            return Err(Error::NotComposable);
        }
        let k_out = (self.coeffs.len().min(sub.coeffs.len())) - 1;
        let mut acc = TensorSeries::zero(&self.grid, k_out);
        acc.coeffs[0] = self.coeffs[self.coeffs.len() - 1].clone();
        for k in (0..self.coeffs.len() - 1).rev() {
            acc = acc.mul_scalar_series(&sub.truncate(k_out))?;
            acc.coeffs[0] = acc.coeffs[0].add(&self.coeffs[k])?;
        }
        Ok(acc)
    }

    /// Substitution with the tangency check, mirroring
    /// [`ScalarSeries::compose`].
    pub fn compose(&self, sub: &ScalarSeries) -> Result<Self> {
        let lin = sub.coeffs.get(1).map(|c| c.map(|v| (v - 1.0).abs()).max());
        match lin {
            Some(dev) if dev <= STRUCTURAL_TOL => {}
            _ => return Err(Error::NotTangentToIdentity),
        }
        self.compose_any(sub)
    }

    pub fn eval(&self, x: f64) -> SymTensorField {
        let mut acc = SymTensorField::zero(&self.grid);
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(x).add(c).expect("same grid");
        }
        acc
    }

    pub fn coeff_norms(&self) -> Vec<f64> {
        self.coeffs.iter().map(SymTensorField::sup_norm).collect()
    }

    pub fn first_nonzero_order(&self, tol: f64) -> Option<usize> {
        self.coeff_norms().iter().position(|&n| n > tol)
    }

    pub fn approx_eq(&self, other: &TensorSeries, tol: f64) -> bool {
        self.coeffs.len() == other.coeffs.len()
            && self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .all(|(a, b)| a.approx_eq(b, tol))
    }
}

/// Wire format for series: bulk dimension, torus periods, samples per axis,
/// and coefficient blocks in row-major node order (matrix entries row-major
/// within each node for tensor series). Numbers survive a JSON round trip
/// exactly.
#[derive(Debug, Serialize, Deserialize)]
pub struct SeriesJson {
    pub n: usize,
    pub periods: Vec<f64>,
    pub samples: usize,
    pub coefficients: Vec<Vec<f64>>,
}

impl ScalarSeries {
    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            n: self.grid.bulk_dim(),
            periods: self.grid.periods().to_vec(),
            samples: self.grid.samples_per_axis(),
            coefficients: self.coeffs.iter().map(ScalarField::to_values).collect(),
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Self> {
        if j.n != j.periods.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "bulk dimension {} inconsistent with {} periods",
                j.n,
                j.periods.len()
            )));
        }
        let grid = TorusGrid::new(&j.periods, j.samples)?;
        let mut coeffs = Vec::with_capacity(j.coefficients.len());
        for block in &j.coefficients {
            coeffs.push(ScalarField::from_values(&grid, block.clone())?);
        }
        Self::new(&grid, coeffs)
    }
}

impl TensorSeries {
    pub fn to_json(&self) -> SeriesJson {
        let d = self.grid.boundary_dim();
        let nodes = self.grid.node_count();
        let coefficients = self
            .coeffs
            .iter()
            .map(|c| {
                let mut block = Vec::with_capacity(nodes * d * d);
                for node in 0..nodes {
                    let m = c.value_at(node);
                    for i in 0..d {
                        for j in 0..d {
                            block.push(m[(i, j)]);
                        }
                    }
                }
                block
            })
            .collect();
        SeriesJson {
            n: self.grid.bulk_dim(),
            periods: self.grid.periods().to_vec(),
            samples: self.grid.samples_per_axis(),
            coefficients,
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Self> {
        if j.n != j.periods.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "bulk dimension {} inconsistent with {} periods",
                j.n,
                j.periods.len()
            )));
        }
        let grid = TorusGrid::new(&j.periods, j.samples)?;
        let d = grid.boundary_dim();
        let nodes = grid.node_count();
        let mut coeffs = Vec::with_capacity(j.coefficients.len());
        for block in &j.coefficients {
            if block.len() != nodes * d * d {
                return Err(Error::InvalidInput(format!(
                    "tensor coefficient block of {} entries, expected {}",
                    block.len(),
                    nodes * d * d
                )));
            }
            let mut node_idx = 0usize;
            let field = SymTensorField::from_fn(&grid, |_| {
                let m = nalgebra::DMatrix::from_row_slice(
                    d,
                    d,
                    &block[node_idx * d * d..(node_idx + 1) * d * d],
                );
                node_idx += 1;
                m
            })?;
            coeffs.push(field);
        }
        Self::new(&grid, coeffs)
    }
}
