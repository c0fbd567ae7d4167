//! Weakly increasing reparametrisations and their right action on curves and SRVFs.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{norm, SampledCurve, Srvf};
use crate::error::{Result, SrvfError};
use crate::partition::{Partition, KNOT_TOL};

/// Monotonicity violations up to this size are clamped away.
pub const MONOTONE_TOL: f64 = 1e-12;

/// A piecewise-linear, weakly increasing surjection of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawReparam")]
pub struct Reparametrisation {
    knots: Partition,
    values: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReparam {
    knots: Partition,
    values: Vec<f64>,
}

impl TryFrom<RawReparam> for Reparametrisation {
    type Error = SrvfError;

    fn try_from(r: RawReparam) -> Result<Self> {
        Self::new(r.knots, r.values)
    }
}

impl Reparametrisation {
    pub fn new(knots: Partition, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != knots.n_cells() + 1 {
            return Err(SrvfError::InvalidReparametrisation(format!(
                "expected {} values, got {}",
                knots.n_cells() + 1,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SrvfError::NonFinite("reparametrisation"));
        }
        let n = values.len() - 1;
        if values[0].abs() > MONOTONE_TOL || (values[n] - 1.0).abs() > MONOTONE_TOL {
            return Err(SrvfError::InvalidReparametrisation(format!(
                "must map 0 to 0 and 1 to 1, got {} and {}",
                values[0], values[n]
            )));
        }
        values[0] = 0.0;
        values[n] = 1.0;
        for i in 1..=n {
            let prev = values[i - 1];
            if values[i] < prev {
                if prev - values[i] > MONOTONE_TOL {
                    return Err(SrvfError::InvalidReparametrisation(format!(
                        "decreasing at knot {i}: {} < {prev}",
                        values[i]
                    )));
                }
                values[i] = prev;
            }
        }
        if values.iter().any(|&v| v > 1.0) {
            return Err(SrvfError::InvalidReparametrisation(
                "values exceed 1".into(),
            ));
        }
        Ok(Self { knots, values })
    }

    pub fn identity() -> Self {
        Self {
            knots: Partition::uniform(1),
            values: vec![0.0, 1.0],
        }
    }

    /// Values at the uniform knots `i / n`, `n = values.len() - 1`.
    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(SrvfError::InvalidReparametrisation(
                "need at least two values".into(),
            ));
        }
        Self::new(Partition::uniform(values.len() - 1), values)
    }

    pub fn from_fn(knots: Partition, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = knots.breakpoints().iter().map(|&t| f(t)).collect();
        Self::new(knots, values)
    }

    /// Builds a map from `(t, value)` points sorted by `t`; points closer than
    /// [`KNOT_TOL`] in `t` keep the later value.
    pub(crate) fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        let mut ts: Vec<f64> = Vec::with_capacity(points.len());
        let mut vs: Vec<f64> = Vec::with_capacity(points.len());
        for &(t, v) in points {
            match ts.last() {
                Some(&last) if t - last <= KNOT_TOL => {
                    if ts.len() > 1 {
                        *vs.last_mut().unwrap() = v;
                    }
                }
                _ => {
                    ts.push(t);
                    vs.push(v);
                }
            }
        }
        if let Some(last) = ts.last_mut() {
            *last = 1.0;
        }
        Self::new(Partition::new(ts)?, vs)
    }

    pub fn knots(&self) -> &Partition {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_cells(&self) -> usize {
        self.knots.n_cells()
    }

    /// Slope on cell `k`.
    pub fn slope(&self, k: usize) -> f64 {
        (self.values[k + 1] - self.values[k]) / self.knots.width(k)
    }

    /// True iff the map is strictly increasing, i.e. a homeomorphism.
    pub fn is_strict(&self) -> bool {
        self.values.windows(2).all(|w| w[1] > w[0])
    }

    pub fn is_identity(&self) -> bool {
        self.knots
            .breakpoints()
            .iter()
            .zip(&self.values)
            .all(|(t, v)| (t - v).abs() <= KNOT_TOL)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let bp = self.knots.breakpoints();
        let k = self.knots.locate(t);
        if bp[k] == t {
            return self.values[k];
        }
        if bp[k + 1] == t {
            return self.values[k + 1];
        }
        let w = (t - bp[k]) / (bp[k + 1] - bp[k]);
        self.values[k] + w * (self.values[k + 1] - self.values[k])
    }

    /// Inverse map; only defined for strictly increasing maps.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_strict() {
            return Err(SrvfError::InvalidReparametrisation(
                "only strictly increasing maps are invertible".into(),
            ));
        }
        Self::new(
            Partition::new(self.values.clone())?,
            self.knots.breakpoints().to_vec(),
        )
    }

    /// `‖self - other‖_AC = ∫ |self' - other'| dt`.
    pub fn ac_distance(&self, other: &Reparametrisation) -> f64 {
        let knots = self.knots.merge(&other.knots);
        (0..knots.n_cells())
            .map(|k| {
                let (a, b) = knots.cell(k);
                let d1 = self.eval(b) - self.eval(a);
                let d2 = other.eval(b) - other.eval(a);
                (d1 - d2).abs()
            })
            .sum()
    }

    /// Random map on the uniform grid with `n` cells. With `allow_flat`, about a
    /// quarter of the cells are flat.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, allow_flat: bool) -> Self {
        let n = n.max(1);
        let mut incr: Vec<f64> = (0..n)
            .map(|_| {
                if allow_flat && rng.gen_bool(0.25) {
                    0.0
                } else {
                    rng.gen_range(0.05..1.0)
                }
            })
            .collect();
        if incr.iter().all(|&v| v == 0.0) {
            incr[0] = 1.0;
        }
        let total: f64 = incr.iter().sum();
        let mut values = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for v in incr {
            acc += v;
            values.push((acc / total).min(1.0));
        }
        values[n] = 1.0;
        Self::uniform(values).expect("monotone by construction")
    }

    /// Convex combination `(1 - s) * self + s * other` on the common refinement.
    pub fn blend(&self, other: &Reparametrisation, s: f64) -> Result<Self> {
        let knots = self.knots.merge(&other.knots);
        let values = knots
            .breakpoints()
            .iter()
            .map(|&t| (1.0 - s) * self.eval(t) + s * other.eval(t))
            .collect();
        Self::new(knots, values)
    }
}

/// Refined knots of `γ` such that every cell is mapped by `γ` into a single cell
/// of `target`, together with the image of every refined knot. Images that land
/// on a breakpoint of `target` are snapped onto it.
pub(crate) fn pullback(gamma: &Reparametrisation, target: &Partition) -> (Partition, Vec<f64>) {
    let tb = target.breakpoints();
    let gb = gamma.knots.breakpoints();
    let snap = |s: f64| match target.knot_index(s) {
        Some(i) => tb[i],
        None => s,
    };
    let mut ts = vec![0.0];
    let mut images = vec![0.0];
    for i in 0..gamma.n_cells() {
        let (t0, t1) = (gb[i], gb[i + 1]);
        let (g0, g1) = (gamma.values[i], gamma.values[i + 1]);
        if g1 > g0 {
            let start = tb.partition_point(|&s| s <= g0 + KNOT_TOL);
            for &s in tb[start..].iter().take_while(|&&s| s < g1 - KNOT_TOL) {
                let t = t0 + (s - g0) / (g1 - g0) * (t1 - t0);
                if t - ts.last().unwrap() > KNOT_TOL && t1 - t > KNOT_TOL {
                    ts.push(t);
                    images.push(s);
                }
            }
        }
        ts.push(t1);
        images.push(snap(g1));
    }
    (
        Partition::new(ts).expect("refinement of a valid partition"),
        images,
    )
}

/// `c ∘ γ`, exact on the refined partition returned inside the curve.
pub fn compose(c: &SampledCurve, gamma: &Reparametrisation) -> SampledCurve {
    let (knots, images) = pullback(gamma, c.knots());
    let mut samples = Vec::with_capacity(images.len() * c.dim());
    for &s in &images {
        samples.extend(c.eval(s));
    }
    SampledCurve::new(c.dim(), knots, samples).expect("composition of a valid curve")
}

/// `γ ∘ δ`.
pub fn compose_reparams(gamma: &Reparametrisation, delta: &Reparametrisation) -> Reparametrisation {
    let (knots, images) = pullback(delta, gamma.knots());
    let values = images.iter().map(|&s| gamma.eval(s)).collect();
    Reparametrisation::new(knots, values).expect("composition of valid reparametrisations")
}

/// `q ∗ γ = (q ∘ γ) √γ'`, exact on the same refined partition as [`compose`].
pub fn srvf_action(q: &Srvf, gamma: &Reparametrisation) -> Srvf {
    let (knots, images) = pullback(gamma, q.knots());
    let dim = q.dim();
    let mut cells = vec![0.0; knots.n_cells() * dim];
    for k in 0..knots.n_cells() {
        let (g0, g1) = (images[k], images[k + 1]);
        if g1 > g0 {
            let m = ((g1 - g0) / knots.width(k)).sqrt();
            let v = q.eval(0.5 * (g0 + g1));
            for j in 0..dim {
                cells[k * dim + j] = v[j] * m;
            }
        }
    }
    Srvf::new(dim, knots, cells).expect("action on a valid srvf")
}

/// Constant-speed representative `c̃` and the map `γ` with `c = c̃ ∘ γ`.
///
/// `c̃` lives on the normalised arc-length partition of `c` with cells of zero
/// length removed, so its speed equals the length of `c` on every cell. The zero
/// curve is returned unchanged together with the identity.
pub fn constant_speed(c: &SampledCurve) -> (SampledCurve, Reparametrisation) {
    let n = c.n_cells();
    let mut cumulative = Vec::with_capacity(n + 1);
    cumulative.push(0.0);
    for k in 0..n {
        let len = norm(&c.increment(k));
        cumulative.push(cumulative[k] + len);
    }
    let total = cumulative[n];
    if total == 0.0 {
        return (c.clone(), Reparametrisation::identity());
    }
    let mut sigma: Vec<f64> = cumulative.iter().map(|l| l / total).collect();
    sigma[n] = 1.0;

    let dim = c.dim();
    let mut knots = vec![0.0];
    let mut samples = c.point(0).to_vec();
    for (i, &s) in sigma.iter().enumerate().skip(1) {
        if s - knots.last().unwrap() > KNOT_TOL {
            knots.push(s);
            samples.extend_from_slice(c.point(i));
        } else if i == n {
            *knots.last_mut().unwrap() = 1.0;
            let len = samples.len();
            samples[len - dim..].copy_from_slice(c.point(n));
        }
    }
    let canonical = SampledCurve::new(
        dim,
        Partition::new(knots).expect("arc-length knots are increasing"),
        samples,
    )
    .expect("constant-speed curve of a valid curve");
    let gamma =
        Reparametrisation::new(c.knots().clone(), sigma).expect("arc-length map is monotone");
    (canonical, gamma)
}
