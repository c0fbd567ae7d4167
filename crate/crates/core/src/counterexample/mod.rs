//! A pair of Lipschitz curves whose quotient distance is not attained.
//!
//! With a fat Cantor set `B` of measure ½ and `A` its complement, the SRVFs
//!
//! ```text
//! p = v₁(t)·1_A + v₂·1_B,     q = v₁(t)·1_A + v₃·1_B,
//! v₁(t) = (cos εt, sin εt),   v₂ = (-½, √3/2),   v₃ = (-½, -√3/2)
//! ```
//!
//! have pairwise negative mixed inner products. The supremum of the matching
//! functional is `λ(A)`, approached by pairs that move `β` and `γ` alternately
//! across an open cover of `B`, but never reached.
//!
//! Sets and measures are exact rationals; floats appear only when the sets are
//! turned into SRVFs and reparametrisations.

mod interval;

pub use interval::{
    fat_cantor, fat_cantor_capped, parse_rational, rat, rational_string, to_f64, IntervalSet,
    Rational, MAX_CANTOR_LEVEL,
};

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{dot, srvt_inverse, SampledCurve, Srvf};
use crate::error::{Result, SrvfError};
use crate::metric::{dp_align_on, matching_functional, DpOptions};
use crate::partition::Partition;
use crate::reparam::Reparametrisation;

/// DP lattice sizes used by default in reports. Each factor 4 resolves one more
/// level of the Cantor set.
pub const DEFAULT_N_LIST: [usize; 5] = [16, 64, 256, 1024, 4096];

/// Levels of the explicit sequence used by default in reports.
pub const DEFAULT_K_PRIME_LIST: [u32; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

pub const V2: [f64; 2] = [-0.5, 0.866_025_403_784_438_6];
pub const V3: [f64; 2] = [-0.5, -0.866_025_403_784_438_6];

/// Unit vector `(cos εt, sin εt)`.
pub fn v1(epsilon: f64, t: f64) -> [f64; 2] {
    let a = epsilon * t;
    [a.cos(), a.sin()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleConfig {
    /// Level `k` of the fat Cantor set standing in for `B`.
    pub cantor_level: u32,
    /// Rotation rate of `v₁`; must satisfy `0 < ε < 1/6`.
    #[serde(with = "rational_serde")]
    pub epsilon: Rational,
    /// Uniform cells of the partition carrying `p` and `q` (the endpoints of
    /// `B_k` are added to it).
    pub grid_n: usize,
    /// Widening of the level-`k'` intervals covering `B`; `None` uses `4^{-k'-2}`.
    #[serde(default, with = "opt_rational_serde")]
    pub fatten_delta: Option<Rational>,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self {
            cantor_level: 10,
            epsilon: rat(1, 10),
            grid_n: 2048,
            fatten_delta: None,
        }
    }
}

impl CounterexampleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cantor_level == 0 {
            return Err(SrvfError::Config("cantor level must be ≥ 1".into()));
        }
        if self.cantor_level > MAX_CANTOR_LEVEL {
            return Err(SrvfError::Config(format!(
                "cantor level must be ≤ {MAX_CANTOR_LEVEL}"
            )));
        }
        if self.epsilon <= Rational::zero() || self.epsilon >= rat(1, 6) {
            return Err(SrvfError::Config(format!(
                "epsilon must satisfy 0 < ε < 1/6 so that all mixed scalar products are negative, got {}",
                to_f64(&self.epsilon)
            )));
        }
        if self.grid_n == 0 {
            return Err(SrvfError::Config("grid must have at least one cell".into()));
        }
        if let Some(d) = self.fatten_delta {
            if d <= Rational::zero() {
                return Err(SrvfError::Config("fattening must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn epsilon_f64(&self) -> f64 {
        to_f64(&self.epsilon)
    }

    /// Fattening used at level `k'`.
    pub fn delta_for(&self, k_prime: u32) -> Rational {
        self.fatten_delta
            .unwrap_or_else(|| Rational::new(1, 4i128.pow(k_prime + 2)))
    }
}

/// The two SRVFs with the sets they are built from.
#[derive(Debug, Clone)]
pub struct CounterexamplePair {
    pub p: Srvf,
    pub q: Srvf,
    pub a: IntervalSet,
    pub b: IntervalSet,
    /// Largest of `⟨v₁(t), v₂⟩`, `⟨v₁(t), v₃⟩` over the cells of `A` and `⟨v₂, v₃⟩`.
    pub max_mixed_product: f64,
}

impl CounterexamplePair {
    /// `b = R⁻¹(p)` and `c = R⁻¹(q)`.
    pub fn curves(&self) -> (SampledCurve, SampledCurve) {
        (srvt_inverse(&self.p), srvt_inverse(&self.q))
    }
}

/// Builds `p` and `q` on the uniform grid refined by the endpoints of `B_k`.
/// `v₁` is evaluated at cell midpoints.
pub fn build_pq(cfg: &CounterexampleConfig) -> Result<CounterexamplePair> {
    cfg.validate()?;
    let b = fat_cantor(cfg.cantor_level)?;
    let a = b.complement();
    let uniform = Partition::uniform(cfg.grid_n);
    let knots = Partition::from_points(
        uniform
            .breakpoints()
            .iter()
            .copied()
            .chain(b.endpoints_f64()),
    )?;
    let eps = cfg.epsilon_f64();
    let n = knots.n_cells();
    let mut pv = Vec::with_capacity(2 * n);
    let mut qv = Vec::with_capacity(2 * n);
    let mut max_mixed = dot(&V2, &V3);
    for k in 0..n {
        let (lo, hi) = knots.cell(k);
        let mid = 0.5 * (lo + hi);
        if b.contains(mid) {
            pv.extend_from_slice(&V2);
            qv.extend_from_slice(&V3);
        } else {
            let v = v1(eps, mid);
            max_mixed = max_mixed.max(dot(&v, &V2)).max(dot(&v, &V3));
            pv.extend_from_slice(&v);
            qv.extend_from_slice(&v);
        }
    }
    if max_mixed >= 0.0 {
        return Err(SrvfError::Config(format!(
            "mixed scalar product {max_mixed} is not negative"
        )));
    }
    Ok(CounterexamplePair {
        p: Srvf::new(2, knots.clone(), pv)?,
        q: Srvf::new(2, knots, qv)?,
        a,
        b,
        max_mixed_product: max_mixed,
    })
}

/// One member of the explicit maximising sequence.
#[derive(Debug, Clone)]
pub struct ExplicitPair {
    pub level: u32,
    pub beta: Reparametrisation,
    pub gamma: Reparametrisation,
    /// The open cover `O ⊇ B`: level-`k'` intervals widened by `delta`.
    pub cover: IntervalSet,
    pub delta: Rational,
    /// `λ(Oᶜ)`, the exact value of the matching functional for this pair.
    pub predicted_value: Rational,
}

/// `β = γ = Id` off `O`; on each component of `O`, `β' = 2` then `0` and
/// `γ' = 0` then `2`, switching at the midpoint.
pub fn approx_reparams(cfg: &CounterexampleConfig, k_prime: u32) -> Result<ExplicitPair> {
    cfg.validate()?;
    if k_prime == 0 || k_prime > cfg.cantor_level {
        return Err(SrvfError::InvalidArgument(format!(
            "level {k_prime} must lie in 1..={}",
            cfg.cantor_level
        )));
    }
    let delta = cfg.delta_for(k_prime);
    let base = fat_cantor(k_prime)?;
    if let Some(gap) = base.min_gap() {
        if delta * 2 >= gap {
            return Err(SrvfError::InvalidArgument(format!(
                "fattening {} is too large for level {k_prime}: the gap {} must exceed 2δ",
                rational_string(&delta),
                rational_string(&gap)
            )));
        }
    }
    let cover = base.fatten(delta)?;

    let mut beta_pts = vec![(0.0, 0.0)];
    let mut gamma_pts = vec![(0.0, 0.0)];
    for (lo, hi) in cover.intervals() {
        let (a, b) = (to_f64(lo), to_f64(hi));
        let mid = to_f64(&((lo + hi) / 2));
        beta_pts.extend([(a, a), (mid, b), (b, b)]);
        gamma_pts.extend([(a, a), (mid, a), (b, b)]);
    }
    beta_pts.push((1.0, 1.0));
    gamma_pts.push((1.0, 1.0));

    let predicted_value = Rational::one() - cover.measure();
    Ok(ExplicitPair {
        level: k_prime,
        beta: Reparametrisation::from_points(&beta_pts)?,
        gamma: Reparametrisation::from_points(&gamma_pts)?,
        cover,
        delta,
        predicted_value,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperBoundReport {
    pub bound: f64,
    pub values: Vec<f64>,
    pub max_value: f64,
    pub gap_to_bound: f64,
    pub all_below: bool,
}

/// Evaluates the matching functional for every pair and compares with `bound`
/// (`λ(A) = ½` for the limiting construction).
pub fn verify_upper_bound(
    p: &Srvf,
    q: &Srvf,
    trials: &[(Reparametrisation, Reparametrisation)],
    bound: f64,
) -> UpperBoundReport {
    let values: Vec<f64> = trials
        .par_iter()
        .map(|(b, g)| matching_functional(p, q, b, g))
        .collect();
    let max_value = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    UpperBoundReport {
        bound,
        all_below: values.iter().all(|&v| v < bound + 1e-9),
        gap_to_bound: bound - max_value,
        max_value,
        values,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitRow {
    pub k_prime: u32,
    pub delta: String,
    pub predicted_value: String,
    pub predicted_value_f64: f64,
    pub functional_value: f64,
    pub gap_to_half: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpRow {
    pub n: usize,
    pub dp_value: f64,
    pub qdist_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub k_prime: u32,
    pub dp_value: f64,
    pub explicit_value: f64,
    pub gap_to_half: f64,
    pub qdist_sq: f64,
    pub gap_to_one: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub config: CounterexampleConfig,
    pub measure_b: String,
    pub measure_b_f64: f64,
    pub measure_a_f64: f64,
    pub max_mixed_product: f64,
    /// `dist(b, c)² = 3 λ(B_k)`, computed from the SRVFs.
    pub dist_param_sq: f64,
    pub dist_param_sq_exact: String,
    /// Matching functional of the identity pair, `λ(A_k) - λ(B_k)/2`.
    pub identity_value: f64,
    pub identity_value_exact: String,
    pub explicit: Vec<ExplicitRow>,
    pub dp: Vec<DpRow>,
    /// First row is the identity pair (`N = 0`, `k' = 0`); then one row per `(N, k')`.
    pub rows: Vec<ReportRow>,
    pub upper_bound: UpperBoundReport,
}

/// Explicit-sequence values for each `k'`, and DP alignments of `p` and `q` on
/// uniform `N × N` lattices for each `N` in `n_list`. Edge scores are exact, so
/// every DP value is attained by its pair and bounded by `λ(A_k) < ½`.
pub fn counterexample_report(
    cfg: &CounterexampleConfig,
    n_list: &[usize],
    k_prime_list: &[u32],
    opts: &DpOptions,
) -> Result<CounterexampleReport> {
    let pair = build_pq(cfg)?;
    let m = pair.b.measure();
    let half = 0.5;

    let identity = Reparametrisation::identity();
    let identity_value = matching_functional(&pair.p, &pair.q, &identity, &identity);
    let identity_exact = (Rational::one() - m) - m / 2;
    let dist_sq = pair.p.lin_comb(1.0, &pair.q, -1.0)?.norm_sq();

    let explicit_pairs: Vec<ExplicitPair> = k_prime_list
        .iter()
        .map(|&k| approx_reparams(cfg, k))
        .collect::<Result<_>>()?;
    let explicit: Vec<ExplicitRow> = explicit_pairs
        .par_iter()
        .map(|e| {
            let v = matching_functional(&pair.p, &pair.q, &e.beta, &e.gamma);
            ExplicitRow {
                k_prime: e.level,
                delta: rational_string(&e.delta),
                predicted_value: rational_string(&e.predicted_value),
                predicted_value_f64: to_f64(&e.predicted_value),
                functional_value: v,
                gap_to_half: half - v,
            }
        })
        .collect();

    if let Some(&n) = n_list.iter().find(|&&n| n == 0) {
        return Err(SrvfError::Config(format!("grid size {n} must be positive")));
    }
    let alignments = n_list
        .par_iter()
        .map(|&n| {
            let grid = Partition::uniform(n);
            dp_align_on(&pair.p, &pair.q, &grid, &grid, opts)
        })
        .collect::<Result<Vec<_>>>()?;
    let dp: Vec<DpRow> = n_list
        .iter()
        .zip(&alignments)
        .map(|(&n, r)| DpRow {
            n,
            dp_value: r.matching_value,
            qdist_sq: r.quotient_distance * r.quotient_distance,
        })
        .collect();

    let mut trials: Vec<(Reparametrisation, Reparametrisation)> =
        vec![(identity.clone(), identity.clone())];
    trials.extend(
        explicit_pairs
            .iter()
            .map(|e| (e.beta.clone(), e.gamma.clone())),
    );
    trials.extend(alignments.iter().map(|r| (r.beta.clone(), r.gamma.clone())));
    let mut rng = ChaCha8Rng::seed_from_u64(u64::from(cfg.cantor_level));
    for i in 0..16 {
        let n = 8 << (i % 4);
        trials.push((
            Reparametrisation::random(&mut rng, n, true),
            Reparametrisation::random(&mut rng, n, true),
        ));
    }
    let upper_bound = verify_upper_bound(&pair.p, &pair.q, &trials, half);

    let mut rows = vec![ReportRow {
        n: 0,
        k_prime: 0,
        dp_value: identity_value,
        explicit_value: identity_value,
        gap_to_half: half - identity_value,
        qdist_sq: dist_sq,
        gap_to_one: dist_sq - 1.0,
    }];
    for d in &dp {
        for e in &explicit {
            rows.push(ReportRow {
                n: d.n,
                k_prime: e.k_prime,
                dp_value: d.dp_value,
                explicit_value: e.functional_value,
                gap_to_half: half - d.dp_value.max(e.functional_value),
                qdist_sq: d.qdist_sq,
                gap_to_one: d.qdist_sq - 1.0,
            });
        }
    }

    Ok(CounterexampleReport {
        config: cfg.clone(),
        measure_b: rational_string(&m),
        measure_b_f64: to_f64(&m),
        measure_a_f64: to_f64(&pair.a.measure()),
        max_mixed_product: pair.max_mixed_product,
        dist_param_sq: dist_sq,
        dist_param_sq_exact: rational_string(&(m * 3)),
        identity_value,
        identity_value_exact: rational_string(&identity_exact),
        explicit,
        dp,
        rows,
        upper_bound,
    })
}

mod rational_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{parse_rational, rational_string, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

mod opt_rational_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{parse_rational, rational_string, Rational};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&rational_string(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}
