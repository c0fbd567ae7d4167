//! Elastic distances between curves, with and without reparametrisation.

mod dp;
mod functional;
mod remodel;

pub use dp::{dp_align, dp_align_on, AlignmentResult, DpOptions, TieBreak};
pub use functional::matching_functional;
pub use remodel::remodel_pair;

use crate::curve::{l2_distance, srvt, srvt_inverse, SampledCurve};
use crate::error::{Result, SrvfError};
use crate::partition::Partition;

/// `‖R(b) - R(c)‖_{L²}`.
pub fn dist_param(b: &SampledCurve, c: &SampledCurve) -> Result<f64> {
    l2_distance(&srvt(b), &srvt(c))
}

/// Distance between the reparametrisation orbits of `b` and `c`, approximated by
/// [`dp_align`] on the common refinement of the partitions the curves carry.
pub fn quotient_distance(
    b: &SampledCurve,
    c: &SampledCurve,
    opts: &DpOptions,
) -> Result<(f64, AlignmentResult)> {
    let result = dp_align(&srvt(b), &srvt(c), opts)?;
    Ok((result.quotient_distance, result))
}

/// Like [`quotient_distance`], with the DP lattice fixed to the uniform
/// `n × n` grid whatever partitions the curves carry.
pub fn quotient_distance_on_grid(
    b: &SampledCurve,
    c: &SampledCurve,
    n: usize,
    opts: &DpOptions,
) -> Result<(f64, AlignmentResult)> {
    if n == 0 {
        return Err(SrvfError::InvalidArgument(
            "grid must have at least one cell".into(),
        ));
    }
    let grid = Partition::uniform(n);
    let result = dp_align_on(&srvt(b), &srvt(c), &grid, &grid, opts)?;
    Ok((result.quotient_distance, result))
}

/// Point at parameter `s` on the straight line between the SRVFs of `b` and `c`,
/// mapped back to a curve.
pub fn geodesic(b: &SampledCurve, c: &SampledCurve, s: f64) -> Result<SampledCurve> {
    if !(0.0..=1.0).contains(&s) {
        return Err(SrvfError::InvalidArgument(format!(
            "geodesic parameter {s} outside [0, 1]"
        )));
    }
    let mid = srvt(b).lin_comb(1.0 - s, &srvt(c), s)?;
    Ok(srvt_inverse(&mid))
}
