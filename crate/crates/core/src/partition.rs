use serde::{Deserialize, Serialize};

use crate::error::{Result, SrvfError};

/// Breakpoints closer than this are treated as the same point when partitions
/// are merged or preimages are inserted.
pub const KNOT_TOL: f64 = 1e-12;

/// Strictly increasing breakpoints `0 = t_0 < t_1 < ... < t_n = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Partition {
    breakpoints: Vec<f64>,
}

impl Partition {
    pub fn new(breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(SrvfError::InvalidPartition(format!(
                "need at least 2 breakpoints, got {}",
                breakpoints.len()
            )));
        }
        if breakpoints.iter().any(|t| !t.is_finite()) {
            return Err(SrvfError::NonFinite("partition"));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(SrvfError::InvalidPartition(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if let Some(k) = breakpoints.windows(2).position(|w| w[1] <= w[0]) {
            return Err(SrvfError::InvalidPartition(format!(
                "breakpoints not strictly increasing at index {}",
                k + 1
            )));
        }
        Ok(Self { breakpoints })
    }

    /// `n` cells of width `1/n`.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1, "uniform partition needs at least one cell");
        let mut breakpoints: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        breakpoints[n] = 1.0;
        Self { breakpoints }
    }

    /// Builds a partition from arbitrary points in `[0, 1]`: sorts, adds the
    /// endpoints and collapses points closer than [`KNOT_TOL`].
    pub fn from_points(points: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut pts: Vec<f64> = points.into_iter().collect();
        if pts.iter().any(|t| !t.is_finite()) {
            return Err(SrvfError::NonFinite("partition"));
        }
        pts.push(0.0);
        pts.push(1.0);
        pts.sort_by(f64::total_cmp);
        let mut out: Vec<f64> = Vec::with_capacity(pts.len());
        for t in pts {
            if !(0.0..=1.0).contains(&t) {
                return Err(SrvfError::InvalidPartition(format!(
                    "point {t} outside [0, 1]"
                )));
            }
            match out.last() {
                Some(&last) if t - last <= KNOT_TOL => {}
                _ => out.push(t),
            }
        }
        // the last kept point may sit within KNOT_TOL below 1
        let n = out.len();
        out[n - 1] = 1.0;
        if n < 2 {
            out.push(1.0);
            out[0] = 0.0;
        }
        Ok(Self { breakpoints: out })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn n_cells(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn cell(&self, k: usize) -> (f64, f64) {
        (self.breakpoints[k], self.breakpoints[k + 1])
    }

    pub fn width(&self, k: usize) -> f64 {
        self.breakpoints[k + 1] - self.breakpoints[k]
    }

    pub fn is_uniform(&self) -> bool {
        let n = self.n_cells() as f64;
        self.breakpoints
            .iter()
            .enumerate()
            .all(|(i, &t)| (t - i as f64 / n).abs() <= KNOT_TOL)
    }

    /// Index of the cell `[t_k, t_{k+1})` containing `t`; `t = 1` maps to the last cell.
    pub fn locate(&self, t: f64) -> usize {
        let k = self.breakpoints.partition_point(|&b| b <= t);
        k.saturating_sub(1).min(self.n_cells() - 1)
    }

    /// If `t` coincides with a breakpoint up to [`KNOT_TOL`], its index.
    pub fn knot_index(&self, t: f64) -> Option<usize> {
        let k = self.breakpoints.partition_point(|&b| b < t);
        [k.checked_sub(1), Some(k)]
            .into_iter()
            .flatten()
            .filter(|&i| i < self.breakpoints.len())
            .find(|&i| (self.breakpoints[i] - t).abs() <= KNOT_TOL)
    }

    /// Common refinement of two partitions.
    pub fn merge(&self, other: &Partition) -> Partition {
        if self == other {
            return self.clone();
        }
        Partition::from_points(
            self.breakpoints
                .iter()
                .chain(other.breakpoints.iter())
                .copied(),
        )
        .expect("merging valid partitions")
    }

    /// True if every breakpoint of `self` is (up to [`KNOT_TOL`]) a breakpoint of `finer`.
    pub fn is_refined_by(&self, finer: &Partition) -> bool {
        self.breakpoints
            .iter()
            .all(|&t| finer.knot_index(t).is_some())
    }
}

impl TryFrom<Vec<f64>> for Partition {
    type Error = SrvfError;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<f64> {
    fn from(p: Partition) -> Self {
        p.breakpoints
    }
}
