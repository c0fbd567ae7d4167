//! Square root velocity framework for absolutely continuous open curves.
//!
//! Curves are piecewise linear on a [`Partition`] of `[0, 1]`, their square root
//! velocity functions (SRVFs) are piecewise constant on the same cells, and
//! reparametrisations are weakly increasing piecewise-linear maps. In this
//! discrete model the norm identity, the inverse transform and the right action
//! of reparametrisations are exact up to floating point rounding.
//!
//! The crate is organised as
//!
//! * [`curve`] / [`reparam`]: the transform pair, norms and the semigroup action,
//! * [`metric`]: parametrised and quotient distances, dynamic-programming
//!   alignment, remodelling of reparametrisation pairs and geodesics,
//! * [`counterexample`]: a fat Cantor set construction with curves for which the
//!   quotient distance is not attained, together with an explicit maximising sequence,
//! * [`shapespace`]: constant-speed orbit representatives and distance matrices,
//! * [`io`]: CSV / JSON formats for all of the above.

pub mod counterexample;
pub mod curve;
pub mod error;
pub mod io;
pub mod metric;
pub mod partition;
pub mod reparam;
pub mod shapespace;

pub use counterexample::{
    approx_reparams, build_pq, counterexample_report, fat_cantor, verify_upper_bound,
    CounterexampleConfig, CounterexampleReport, IntervalSet, Rational,
};
pub use curve::{
    ac_norm, l2_distance, probe_nondifferentiability, resample_curve, resample_srvf, srvt,
    srvt_inverse, v_map, SampledCurve, Srvf,
};
pub use error::{Result, SrvfError};
pub use metric::{
    dist_param, dp_align, dp_align_on, geodesic, matching_functional, quotient_distance,
    quotient_distance_on_grid, remodel_pair, AlignmentResult, DpOptions, TieBreak,
};
pub use partition::Partition;
pub use reparam::{compose, compose_reparams, constant_speed, srvf_action, Reparametrisation};
pub use shapespace::{canonical, distance_matrix, is_equivalent, DistanceMatrix, ShapeRecord};
