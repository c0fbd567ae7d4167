//! Curves modulo reparametrisation.
//!
//! An orbit is represented by its constant-speed curve. Stretches where a curve
//! stands still drop out of the arc-length parametrisation, so `c` and `c∘γ`
//! share a representative even when `γ` has flat pieces.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{ac_norm, srvt, SampledCurve};
use crate::error::{Result, SrvfError};
use crate::metric::{dist_param, dp_align, DpOptions};
use crate::reparam::constant_speed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeRecord {
    pub id: String,
    pub canonical: SampledCurve,
    pub ac_length: f64,
}

impl ShapeRecord {
    pub fn new(id: impl Into<String>, c: &SampledCurve) -> Self {
        let mut r = canonical(c);
        r.id = id.into();
        r
    }

    pub fn is_zero(&self) -> bool {
        self.ac_length == 0.0
    }

    pub fn dim(&self) -> usize {
        self.canonical.dim()
    }

    /// Tolerance used by [`is_equivalent`] when none is given.
    pub fn default_tol(&self) -> f64 {
        1e-6 * (1.0 + self.ac_length)
    }
}

/// Constant-speed representative of the orbit of `c`, with an empty id.
pub fn canonical(c: &SampledCurve) -> ShapeRecord {
    let (canonical, _) = constant_speed(c);
    let ac_length = ac_norm(&canonical);
    ShapeRecord {
        id: String::new(),
        canonical,
        ac_length,
    }
}

/// Whether the constant-speed representatives of `b` and `c` are within `tol`
/// in the parametrised distance. `None` uses `10⁻⁶ (1 + ‖b‖_AC)`.
pub fn is_equivalent(b: &SampledCurve, c: &SampledCurve, tol: Option<f64>) -> Result<bool> {
    if b.dim() != c.dim() {
        return Err(SrvfError::DimensionMismatch(b.dim(), c.dim()));
    }
    let rb = canonical(b);
    let rc = canonical(c);
    let tol = tol.unwrap_or_else(|| rb.default_tol());
    if tol.is_nan() || tol <= 0.0 {
        return Err(SrvfError::InvalidArgument(format!(
            "tolerance {tol} must be positive"
        )));
    }
    Ok(dist_param(&rb.canonical, &rc.canonical)? <= tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub ids: Vec<String>,
    /// Row-major, `ids.len()²` entries.
    pub values: Vec<f64>,
    /// Pairs `(i, j)` whose two DP directions differ by more than `10⁻⁶`, with the difference.
    pub asymmetric: Vec<(usize, usize, f64)>,
    /// Indices of shapes that are the zero curve.
    pub zero_shapes: Vec<usize>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }
}

const ASYMMETRY_TOL: f64 = 1e-6;

/// Pairwise quotient distances between the representatives, each entry the mean
/// of the DP distances in both directions.
pub fn distance_matrix(shapes: &[ShapeRecord], opts: &DpOptions) -> Result<DistanceMatrix> {
    if let Some(first) = shapes.first() {
        if let Some(bad) = shapes.iter().find(|s| s.dim() != first.dim()) {
            return Err(SrvfError::DimensionMismatch(first.dim(), bad.dim()));
        }
    }
    let n = shapes.len();
    let srvfs: Vec<_> = shapes.iter().map(|s| srvt(&s.canonical)).collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let entries = pairs
        .par_iter()
        .map(|&(i, j)| {
            let fwd = dp_align(&srvfs[i], &srvfs[j], opts)?.quotient_distance;
            let bwd = dp_align(&srvfs[j], &srvfs[i], opts)?.quotient_distance;
            Ok((fwd, bwd))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut values = vec![0.0; n * n];
    let mut asymmetric = Vec::new();
    for (&(i, j), &(fwd, bwd)) in pairs.iter().zip(&entries) {
        let d = 0.5 * (fwd + bwd);
        values[i * n + j] = d;
        values[j * n + i] = d;
        if (fwd - bwd).abs() > ASYMMETRY_TOL {
            asymmetric.push((i, j, fwd - bwd));
        }
    }
    Ok(DistanceMatrix {
        ids: shapes.iter().map(|s| s.id.clone()).collect(),
        values,
        asymmetric,
        zero_shapes: (0..n).filter(|&i| shapes[i].is_zero()).collect(),
    })
}
