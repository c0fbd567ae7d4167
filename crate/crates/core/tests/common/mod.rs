//! Generators and independent reference computations shared by the integration suites.
#![allow(dead_code)]

use rand::Rng;
use srvf::{Partition, Reparametrisation, SampledCurve, Srvf};

pub fn random_partition<R: Rng>(rng: &mut R, n: usize) -> Partition {
    if rng.gen_bool(0.5) {
        return Partition::uniform(n);
    }
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = w.iter().sum();
    let mut t = vec![0.0];
    let mut acc = 0.0;
    for x in &w[..n - 1] {
        acc += x;
        t.push(acc / total);
    }
    t.push(1.0);
    Partition::new(t).unwrap()
}

/// Random walk with occasional stationary cells.
pub fn random_curve_on<R: Rng>(rng: &mut R, dim: usize, knots: Partition) -> SampledCurve {
    let n = knots.n_cells();
    let mut samples = vec![0.0; dim];
    let mut pos = vec![0.0; dim];
    for _ in 0..n {
        let still = rng.gen_bool(0.1);
        for x in pos.iter_mut() {
            if !still {
                *x += rng.gen_range(-1.0..1.0) / (n as f64).sqrt();
            }
        }
        samples.extend_from_slice(&pos);
    }
    SampledCurve::new(dim, knots, samples).unwrap()
}

pub fn random_curve<R: Rng>(rng: &mut R, dim: usize, n: usize) -> SampledCurve {
    let knots = random_partition(rng, n);
    random_curve_on(rng, dim, knots)
}

/// Smooth curve from a few random Fourier modes, sampled on the uniform grid.
pub fn smooth_curve<R: Rng>(rng: &mut R, dim: usize, n: usize) -> SampledCurve {
    let coef: Vec<[f64; 3]> = (0..dim)
        .map(|_| {
            [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.3..0.3),
            ]
        })
        .collect();
    SampledCurve::from_fn(dim, Partition::uniform(n), |t| {
        coef.iter()
            .map(|c| {
                c[0] * t
                    + c[1] * (std::f64::consts::PI * t).sin()
                    + c[2] * (3.0 * std::f64::consts::PI * t).sin()
            })
            .collect()
    })
    .unwrap()
}

pub fn random_srvf<R: Rng>(rng: &mut R, dim: usize, n: usize) -> Srvf {
    let knots = random_partition(rng, n);
    let cells = (0..n * dim)
        .map(|_| {
            if rng.gen_bool(0.05) {
                0.0
            } else {
                rng.gen_range(-2.0..2.0)
            }
        })
        .collect();
    Srvf::new(dim, knots, cells).unwrap()
}

/// Random reparametrisation on a random partition; `flat` allows flat cells.
pub fn random_reparam<R: Rng>(rng: &mut R, n: usize, flat: bool) -> Reparametrisation {
    let knots = random_partition(rng, n);
    let mut incr: Vec<f64> = (0..n)
        .map(|_| {
            if flat && rng.gen_bool(0.3) {
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
    let mut values = vec![0.0];
    let mut acc = 0.0;
    for v in &incr {
        acc += v;
        values.push((acc / total).min(1.0));
    }
    *values.last_mut().unwrap() = 1.0;
    Reparametrisation::new(knots, values).unwrap()
}

// ---------- reference computations (no library numerics) ----------

/// Index `i` with `b[i] <= x < b[i + 1]`, by linear scan; the last cell for `x >= 1`.
pub fn cell_of(b: &[f64], x: f64) -> usize {
    let mut i = 0;
    while i + 2 < b.len() && b[i + 1] <= x {
        i += 1;
    }
    i
}

pub fn srvf_at(q: &Srvf, x: f64) -> Vec<f64> {
    let b = q.knots().breakpoints();
    let k = cell_of(b, x);
    q.values()[k * q.dim()..(k + 1) * q.dim()].to_vec()
}

/// Piecewise-linear interpolation of `(ts, vs)` at `x`.
pub fn interp(ts: &[f64], vs: &[f64], x: f64) -> f64 {
    let i = cell_of(ts, x);
    let (t0, t1) = (ts[i], ts[i + 1]);
    let w = ((x - t0) / (t1 - t0)).clamp(0.0, 1.0);
    vs[i] + w * (vs[i + 1] - vs[i])
}

pub fn reparam_at(g: &Reparametrisation, x: f64) -> f64 {
    interp(g.knots().breakpoints(), g.values(), x)
}

fn preimages(g: &Reparametrisation, targets: &[f64], out: &mut Vec<f64>) {
    let t = g.knots().breakpoints();
    let v = g.values();
    for i in 0..t.len() - 1 {
        if v[i + 1] <= v[i] {
            continue;
        }
        for &s in targets {
            if s > v[i] && s < v[i + 1] {
                out.push(t[i] + (s - v[i]) / (v[i + 1] - v[i]) * (t[i + 1] - t[i]));
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Pieces `(t0, t1, integrand)` on which `⟨p∘β, q∘γ⟩ √β'√γ'` is constant.
pub fn oracle_pieces(
    p: &Srvf,
    q: &Srvf,
    beta: &Reparametrisation,
    gamma: &Reparametrisation,
) -> Vec<(f64, f64, f64)> {
    let mut ts: Vec<f64> = beta.knots().breakpoints().to_vec();
    ts.extend_from_slice(gamma.knots().breakpoints());
    preimages(beta, p.knots().breakpoints(), &mut ts);
    preimages(gamma, q.knots().breakpoints(), &mut ts);
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut out = Vec::new();
    for w in ts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let m = 0.5 * (a + b);
        let bd = (reparam_at(beta, b) - reparam_at(beta, a)) / (b - a);
        let gd = (reparam_at(gamma, b) - reparam_at(gamma, a)) / (b - a);
        let inner = dot(
            &srvf_at(p, reparam_at(beta, m)),
            &srvf_at(q, reparam_at(gamma, m)),
        );
        out.push((a, b, inner * (bd * gd).max(0.0).sqrt()));
    }
    out
}

pub fn oracle_functional(
    p: &Srvf,
    q: &Srvf,
    beta: &Reparametrisation,
    gamma: &Reparametrisation,
) -> f64 {
    oracle_pieces(p, q, beta, gamma)
        .iter()
        .map(|(a, b, v)| v * (b - a))
        .sum()
}

/// Integral of the positive part of the integrand.
pub fn oracle_positive_part(
    p: &Srvf,
    q: &Srvf,
    beta: &Reparametrisation,
    gamma: &Reparametrisation,
) -> f64 {
    oracle_pieces(p, q, beta, gamma)
        .iter()
        .map(|(a, b, v)| v.max(0.0) * (b - a))
        .sum()
}

/// `∫ |c'|` from the samples.
pub fn oracle_length(c: &SampledCurve) -> f64 {
    let d = c.dim();
    c.samples()
        .chunks(d)
        .collect::<Vec<_>>()
        .windows(2)
        .map(|w| {
            w[0].iter()
                .zip(w[1])
                .map(|(a, b)| (b - a) * (b - a))
                .sum::<f64>()
                .sqrt()
        })
        .sum()
}

/// `‖p - q‖²` by integrating over the union of breakpoints.
pub fn oracle_l2_sq(p: &Srvf, q: &Srvf) -> f64 {
    let mut ts: Vec<f64> = p.knots().breakpoints().to_vec();
    ts.extend_from_slice(q.knots().breakpoints());
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts.windows(2)
        .map(|w| {
            let m = 0.5 * (w[0] + w[1]);
            let (a, b) = (srvf_at(p, m), srvf_at(q, m));
            a.iter()
                .zip(&b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                * (w[1] - w[0])
        })
        .sum()
}

/// Curve value at `t` by linear interpolation of the samples.
pub fn curve_at(c: &SampledCurve, t: f64) -> Vec<f64> {
    let d = c.dim();
    let ts = c.knots().breakpoints();
    (0..d)
        .map(|j| {
            let vs: Vec<f64> = c.samples().iter().skip(j).step_by(d).copied().collect();
            interp(ts, &vs, t)
        })
        .collect()
}

/// Score of the straight lattice edge `(s0, u0) → (s1, u1)`.
pub fn oracle_edge(p: &Srvf, q: &Srvf, s0: f64, s1: f64, u0: f64, u1: f64) -> f64 {
    let (ds, du) = (s1 - s0, u1 - u0);
    if ds <= 0.0 || du <= 0.0 {
        return 0.0;
    }
    let mut taus = vec![0.0, 1.0];
    taus.extend(
        p.knots()
            .breakpoints()
            .iter()
            .filter(|&&s| s > s0 && s < s1)
            .map(|s| (s - s0) / ds),
    );
    taus.extend(
        q.knots()
            .breakpoints()
            .iter()
            .filter(|&&u| u > u0 && u < u1)
            .map(|u| (u - u0) / du),
    );
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    let acc: f64 = taus
        .windows(2)
        .map(|w| {
            let m = 0.5 * (w[0] + w[1]);
            dot(&srvf_at(p, s0 + m * ds), &srvf_at(q, u0 + m * du)) * (w[1] - w[0])
        })
        .sum();
    (ds * du).sqrt() * acc
}
