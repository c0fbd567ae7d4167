//! Piecewise-linear curves, piecewise-constant SRVFs and the transform pair.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SrvfError};
use crate::partition::Partition;

/// `x / sqrt(|x|)`, with `0 ↦ 0`.
pub fn v_map(x: &[f64]) -> Result<Vec<f64>> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(SrvfError::NonFinite("v_map input"));
    }
    let mut out = vec![0.0; x.len()];
    v_map_into(x, &mut out);
    Ok(out)
}

pub(crate) fn v_map_into(x: &[f64], out: &mut [f64]) {
    let n = norm(x);
    if n == 0.0 {
        out.iter_mut().for_each(|o| *o = 0.0);
    } else {
        let s = n.sqrt();
        for (o, v) in out.iter_mut().zip(x) {
            *o = v / s;
        }
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// An absolutely continuous curve starting at the origin, linear on every cell of `knots`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledCurve {
    dim: usize,
    knots: Partition,
    /// `(n_cells + 1) * dim` coordinates, row-major by knot.
    samples: Vec<f64>,
}

impl SampledCurve {
    pub fn new(dim: usize, knots: Partition, samples: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(SrvfError::InvalidCurve("dimension must be positive".into()));
        }
        if samples.len() != (knots.n_cells() + 1) * dim {
            return Err(SrvfError::InvalidCurve(format!(
                "expected {} coordinates for {} knots in dimension {dim}, got {}",
                (knots.n_cells() + 1) * dim,
                knots.n_cells() + 1,
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(SrvfError::NonFinite("curve samples"));
        }
        if samples[..dim].iter().any(|&v| v != 0.0) {
            return Err(SrvfError::InvalidCurve(
                "curve must start at the origin".into(),
            ));
        }
        Ok(Self {
            dim,
            knots,
            samples,
        })
    }

    /// Like [`SampledCurve::new`], but translates the samples so that the curve starts at 0.
    pub fn anchored(dim: usize, knots: Partition, mut samples: Vec<f64>) -> Result<Self> {
        if dim > 0 && samples.len() >= dim {
            let origin: Vec<f64> = samples[..dim].to_vec();
            for chunk in samples.chunks_mut(dim) {
                for (v, o) in chunk.iter_mut().zip(&origin) {
                    *v -= o;
                }
            }
        }
        Self::new(dim, knots, samples)
    }

    /// Curve on the uniform grid with `points.len() - 1` cells.
    pub fn uniform(dim: usize, samples: Vec<f64>) -> Result<Self> {
        if dim == 0 || samples.len() < 2 * dim {
            return Err(SrvfError::InvalidCurve(
                "need at least two sample points".into(),
            ));
        }
        let n = samples.len() / dim - 1;
        Self::new(dim, Partition::uniform(n), samples)
    }

    /// Samples `f` at the knots of `knots`, translated to start at the origin.
    pub fn from_fn(dim: usize, knots: Partition, f: impl Fn(f64) -> Vec<f64>) -> Result<Self> {
        let mut samples = Vec::with_capacity((knots.n_cells() + 1) * dim);
        for &t in knots.breakpoints() {
            let x = f(t);
            if x.len() != dim {
                return Err(SrvfError::DimensionMismatch(dim, x.len()));
            }
            samples.extend(x);
        }
        Self::anchored(dim, knots, samples)
    }

    pub fn zero(dim: usize, knots: Partition) -> Self {
        let samples = vec![0.0; (knots.n_cells() + 1) * dim];
        Self {
            dim,
            knots,
            samples,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn knots(&self) -> &Partition {
        &self.knots
    }

    pub fn n_cells(&self) -> usize {
        self.knots.n_cells()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.samples[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.chunks(self.dim)
    }

    /// Forward difference `c_{k+1} - c_k`.
    pub fn increment(&self, k: usize) -> Vec<f64> {
        self.point(k + 1)
            .iter()
            .zip(self.point(k))
            .map(|(a, b)| a - b)
            .collect()
    }

    /// Linear interpolation; exact at the knots.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        if let Some(i) = self.knots.knot_index(t) {
            if self.knots.breakpoints()[i] == t {
                return self.point(i).to_vec();
            }
        }
        let k = self.knots.locate(t);
        let (a, b) = self.knots.cell(k);
        let w = (t - a) / (b - a);
        self.point(k)
            .iter()
            .zip(self.point(k + 1))
            .map(|(x, y)| x + w * (y - x))
            .collect()
    }

    /// Evaluates the curve at every breakpoint of `knots`. Exact when `knots`
    /// refines the current partition.
    pub fn refine(&self, knots: &Partition) -> SampledCurve {
        let mut samples = Vec::with_capacity((knots.n_cells() + 1) * self.dim);
        for &t in knots.breakpoints() {
            samples.extend(self.eval(t));
        }
        samples[..self.dim].iter_mut().for_each(|v| *v = 0.0);
        SampledCurve {
            dim: self.dim,
            knots: knots.clone(),
            samples,
        }
    }

    /// Pointwise `self + eps * other` on the common refinement.
    pub fn add_scaled(&self, other: &SampledCurve, eps: f64) -> Result<SampledCurve> {
        check_dim(self.dim, other.dim)?;
        let knots = self.knots.merge(&other.knots);
        let a = self.refine(&knots);
        let b = other.refine(&knots);
        let samples = a
            .samples
            .iter()
            .zip(&b.samples)
            .map(|(x, y)| x + eps * y)
            .collect();
        SampledCurve::new(self.dim, knots, samples)
    }

    /// Largest coordinate difference after refining both curves to a common partition.
    pub fn max_abs_diff(&self, other: &SampledCurve) -> Result<f64> {
        check_dim(self.dim, other.dim)?;
        let knots = self.knots.merge(&other.knots);
        let a = self.refine(&knots);
        let b = other.refine(&knots);
        Ok(a.samples
            .iter()
            .zip(&b.samples)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max))
    }
}

/// A function that is constant on each cell of `knots`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Srvf {
    dim: usize,
    knots: Partition,
    /// `n_cells * dim` values, row-major by cell.
    cells: Vec<f64>,
}

impl Srvf {
    pub fn new(dim: usize, knots: Partition, cells: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(SrvfError::InvalidCurve("dimension must be positive".into()));
        }
        if cells.len() != knots.n_cells() * dim {
            return Err(SrvfError::InvalidCurve(format!(
                "expected {} values for {} cells in dimension {dim}, got {}",
                knots.n_cells() * dim,
                knots.n_cells(),
                cells.len()
            )));
        }
        if cells.iter().any(|v| !v.is_finite()) {
            return Err(SrvfError::NonFinite("srvf values"));
        }
        Ok(Self { dim, knots, cells })
    }

    pub fn uniform(dim: usize, cells: Vec<f64>) -> Result<Self> {
        if dim == 0 || cells.len() < dim {
            return Err(SrvfError::InvalidCurve("need at least one cell".into()));
        }
        let n = cells.len() / dim;
        Self::new(dim, Partition::uniform(n), cells)
    }

    /// The same vector on every cell.
    pub fn constant(value: &[f64], knots: Partition) -> Result<Self> {
        let cells = value
            .iter()
            .copied()
            .cycle()
            .take(value.len() * knots.n_cells())
            .collect();
        Self::new(value.len(), knots, cells)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn knots(&self) -> &Partition {
        &self.knots
    }

    pub fn n_cells(&self) -> usize {
        self.knots.n_cells()
    }

    pub fn values(&self) -> &[f64] {
        &self.cells
    }

    pub fn cell(&self, k: usize) -> &[f64] {
        &self.cells[k * self.dim..(k + 1) * self.dim]
    }

    pub fn cell_values(&self) -> impl Iterator<Item = &[f64]> {
        self.cells.chunks(self.dim)
    }

    pub fn eval(&self, t: f64) -> &[f64] {
        self.cell(self.knots.locate(t))
    }

    /// Squared L² norm `Σ |q_k|² Δt_k`.
    pub fn norm_sq(&self) -> f64 {
        self.cell_values()
            .enumerate()
            .map(|(k, q)| dot(q, q) * self.knots.width(k))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Restriction to a finer partition; exact when `knots` refines the current one.
    pub fn refine(&self, knots: &Partition) -> Srvf {
        let mut cells = Vec::with_capacity(knots.n_cells() * self.dim);
        for k in 0..knots.n_cells() {
            let (a, b) = knots.cell(k);
            cells.extend_from_slice(self.eval(0.5 * (a + b)));
        }
        Srvf {
            dim: self.dim,
            knots: knots.clone(),
            cells,
        }
    }

    /// `a * self + b * other` on the common refinement.
    pub fn lin_comb(&self, a: f64, other: &Srvf, b: f64) -> Result<Srvf> {
        check_dim(self.dim, other.dim)?;
        let knots = self.knots.merge(&other.knots);
        let x = self.refine(&knots);
        let y = other.refine(&knots);
        let cells = x
            .cells
            .iter()
            .zip(&y.cells)
            .map(|(u, v)| a * u + b * v)
            .collect();
        Srvf::new(self.dim, knots, cells)
    }
}

fn check_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        Err(SrvfError::DimensionMismatch(a, b))
    } else {
        Ok(())
    }
}

/// Square root velocity transform `q_k = V((c_{k+1} - c_k) / Δt_k)`.
pub fn srvt(c: &SampledCurve) -> Srvf {
    let dim = c.dim;
    let mut cells = vec![0.0; c.n_cells() * dim];
    let mut vel = vec![0.0; dim];
    for k in 0..c.n_cells() {
        let w = c.knots.width(k);
        for (j, v) in vel.iter_mut().enumerate() {
            *v = (c.samples[(k + 1) * dim + j] - c.samples[k * dim + j]) / w;
        }
        v_map_into(&vel, &mut cells[k * dim..(k + 1) * dim]);
    }
    Srvf {
        dim,
        knots: c.knots.clone(),
        cells,
    }
}

/// Inverse transform `c(t) = ∫_0^t q|q| dτ`, exact for piecewise-constant `q`.
pub fn srvt_inverse(q: &Srvf) -> SampledCurve {
    let dim = q.dim;
    let mut samples = vec![0.0; (q.n_cells() + 1) * dim];
    for k in 0..q.n_cells() {
        let v = q.cell(k);
        let s = norm(v) * q.knots.width(k);
        for j in 0..dim {
            samples[(k + 1) * dim + j] = samples[k * dim + j] + v[j] * s;
        }
    }
    SampledCurve {
        dim,
        knots: q.knots.clone(),
        samples,
    }
}

/// `‖c‖_AC = |c(0)| + ‖c'‖_{L¹}`, i.e. the length of the polygon.
pub fn ac_norm(c: &SampledCurve) -> f64 {
    let dim = c.dim;
    (0..c.n_cells())
        .map(|k| {
            let mut s = 0.0;
            for j in 0..dim {
                let d = c.samples[(k + 1) * dim + j] - c.samples[k * dim + j];
                s += d * d;
            }
            s.sqrt()
        })
        .sum::<f64>()
        + norm(c.point(0))
}

/// `‖p - q‖_{L²}`, computed exactly on the common refinement of the two partitions.
pub fn l2_distance(p: &Srvf, q: &Srvf) -> Result<f64> {
    Ok(p.lin_comb(1.0, q, -1.0)?.norm())
}

/// Linear interpolation of `c` on the uniform grid with `n` cells.
pub fn resample_curve(c: &SampledCurve, n: usize) -> Result<SampledCurve> {
    if n == 0 {
        return Err(SrvfError::InvalidArgument(
            "resampling needs at least one cell".into(),
        ));
    }
    Ok(c.refine(&Partition::uniform(n)))
}

/// Resamples an SRVF through its curve, so that `‖q‖² = ‖c‖_AC` keeps holding.
pub fn resample_srvf(q: &Srvf, n: usize) -> Result<Srvf> {
    Ok(srvt(&resample_curve(&srvt_inverse(q), n)?))
}

/// Difference quotients `‖(R(c + εh) - R(c)) / ε‖_{L²}` for each `ε`.
///
/// `h'` must vanish wherever `c'` does not; on such perturbations the quotient
/// grows like `ε^{-1/2}` and the transform has no derivative at `c`.
pub fn probe_nondifferentiability(
    c: &SampledCurve,
    h: &SampledCurve,
    eps_list: &[f64],
) -> Result<Vec<f64>> {
    check_dim(c.dim, h.dim)?;
    if let Some(e) = eps_list.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(SrvfError::InvalidArgument(format!(
            "perturbation size must be positive, got {e}"
        )));
    }
    let knots = c.knots.merge(&h.knots);
    let c = c.refine(&knots);
    let h = h.refine(&knots);
    for k in 0..knots.n_cells() {
        let dc = c.increment(k);
        let dh = h.increment(k);
        if dh.iter().any(|&v| v != 0.0) && dc.iter().any(|&v| v != 0.0) {
            let (a, b) = knots.cell(k);
            return Err(SrvfError::InvalidArgument(format!(
                "h' must be supported where c' = 0, but both are nonzero on [{a}, {b}]"
            )));
        }
    }
    let rc = srvt(&c);
    eps_list
        .iter()
        .map(|&eps| {
            let moved = srvt(&c.add_scaled(&h, eps)?);
            Ok(moved.lin_comb(1.0 / eps, &rc, -1.0 / eps)?.norm())
        })
        .collect()
}
