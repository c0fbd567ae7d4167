//! Maximisation of the matching functional over monotone lattice paths.
//!
//! Vertex `(i, j)` of the lattice is the point `(s_i, u_j)` where `s` and `u` are
//! the breakpoints of `p` and `q`. A path from `(0, 0)` to `(n, m)` is the graph
//! of a pair `(β, γ)`; the score of a straight edge is the exact integral of
//! `⟨p∘β, q∘γ⟩ √β'√γ'` along it, which does not depend on how the edge is
//! parametrised.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::curve::{dot, Srvf};
use crate::error::{Result, SrvfError};
use crate::partition::Partition;
use crate::reparam::Reparametrisation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Highest score, then smallest `|a - b|`, then smallest `a`.
    #[default]
    PreferDiagonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpOptions {
    /// Largest step `W` along either axis.
    pub window: usize,
    /// Adds the zero-score steps `(1, 0)` and `(0, 1)`.
    pub include_axis_moves: bool,
    pub tie_break: TieBreak,
}

impl Default for DpOptions {
    fn default() -> Self {
        Self {
            window: 4,
            include_axis_moves: true,
            tie_break: TieBreak::PreferDiagonal,
        }
    }
}

impl DpOptions {
    pub fn new(window: usize, include_axis_moves: bool) -> Self {
        Self {
            window,
            include_axis_moves,
            ..Self::default()
        }
    }

    /// Coprime steps `(a, b)`, `1 ≤ a, b ≤ W`, plus the axis steps if enabled,
    /// ordered by tie-break priority.
    pub fn move_set(&self) -> Vec<(usize, usize)> {
        let w = self.window;
        let mut moves: Vec<(usize, usize)> = (1..=w)
            .flat_map(|a| (1..=w).map(move |b| (a, b)))
            .filter(|&(a, b)| a.gcd(&b) == 1)
            .collect();
        if self.include_axis_moves {
            moves.push((1, 0));
            moves.push((0, 1));
        }
        match self.tie_break {
            TieBreak::PreferDiagonal => moves.sort_by_key(|&(a, b)| (a.abs_diff(b), a, b)),
        }
        moves
    }
}

/// Optimal pair of reparametrisations found by [`dp_align`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentResult {
    pub beta: Reparametrisation,
    pub gamma: Reparametrisation,
    pub matching_value: f64,
    pub quotient_distance: f64,
    /// Cells of `p` (lattice rows).
    pub grid_n: usize,
    /// Cells of `q` (lattice columns).
    pub grid_m: usize,
    pub move_set: Vec<(usize, usize)>,
    /// Lattice vertices visited by the optimal path.
    pub path: Vec<(usize, usize)>,
    pub dp_cells_evaluated: u64,
}

/// Lattice of vertices `(s_i, u_j)` over two SRVFs, with the position of every
/// lattice knot among the breakpoints of `p` and `q`.
pub(crate) struct Lattice<'a> {
    p: &'a Srvf,
    q: &'a Srvf,
    s: &'a [f64],
    u: &'a [f64],
    p_cell: Vec<usize>,
    q_cell: Vec<usize>,
}

impl<'a> Lattice<'a> {
    pub fn new(p: &'a Srvf, q: &'a Srvf, s: &'a Partition, u: &'a Partition) -> Self {
        let s = s.breakpoints();
        let u = u.breakpoints();
        Self {
            p,
            q,
            s,
            u,
            p_cell: s.iter().map(|&t| p.knots().locate(t)).collect(),
            q_cell: u.iter().map(|&t| q.knots().locate(t)).collect(),
        }
    }

    /// Exact score of the straight edge from `(i, j)` to `(i + a, j + b)`:
    /// `√(Δs Δu) ∫_0^1 ⟨p(s_i + τΔs), q(u_j + τΔu)⟩ dτ`.
    pub fn edge(&self, i: usize, j: usize, a: usize, b: usize) -> f64 {
        if a == 0 || b == 0 {
            return 0.0;
        }
        let (s0, s1) = (self.s[i], self.s[i + a]);
        let (u0, u1) = (self.u[j], self.u[j + b]);
        let (ds, du) = (s1 - s0, u1 - u0);
        let pb = self.p.knots().breakpoints();
        let qb = self.q.knots().breakpoints();
        let (mut pc, mut qc) = (self.p_cell[i], self.q_cell[j]);
        let mut prev = 0.0;
        let mut acc = 0.0;
        loop {
            let np = if pb[pc + 1] < s1 {
                (pb[pc + 1] - s0) / ds
            } else {
                1.0
            };
            let nq = if qb[qc + 1] < u1 {
                (qb[qc + 1] - u0) / du
            } else {
                1.0
            };
            let next = np.min(nq);
            acc += dot(self.p.cell(pc), self.q.cell(qc)) * (next - prev);
            prev = next;
            if next >= 1.0 {
                break;
            }
            if np <= next {
                pc += 1;
            }
            if nq <= next {
                qc += 1;
            }
        }
        (ds * du).sqrt() * acc
    }

    /// Lattice path `(0,0) → (n, m)` as a pair of reparametrisations, parametrised
    /// with constant speed in the 1-norm so that `β' + γ' = 2`.
    pub fn path_to_pair(
        &self,
        path: &[(usize, usize)],
    ) -> Result<(Reparametrisation, Reparametrisation)> {
        let (s, u) = (self.s, self.u);
        let mut ell = Vec::with_capacity(path.len());
        ell.push(0.0);
        for w in path.windows(2) {
            let (i0, j0) = w[0];
            let (i1, j1) = w[1];
            let step = (s[i1] - s[i0]) + (u[j1] - u[j0]);
            ell.push(ell.last().unwrap() + step);
        }
        let total = *ell.last().unwrap();
        let mut t: Vec<f64> = ell.iter().map(|l| l / total).collect();
        *t.last_mut().unwrap() = 1.0;
        let knots = Partition::new(t)?;
        let beta =
            Reparametrisation::new(knots.clone(), path.iter().map(|&(i, _)| s[i]).collect())?;
        let gamma = Reparametrisation::new(knots, path.iter().map(|&(_, j)| u[j]).collect())?;
        Ok((beta, gamma))
    }
}

/// Maximises the matching functional over lattice paths built from the move set.
/// Both axes of the lattice carry the common refinement of the partitions of `p`
/// and `q`, so the diagonal (the identity pair) is always a candidate.
pub fn dp_align(p: &Srvf, q: &Srvf, opts: &DpOptions) -> Result<AlignmentResult> {
    let knots = p.knots().merge(q.knots());
    dp_align_on(p, q, &knots, &knots, opts)
}

/// Like [`dp_align`], on the lattice spanned by `s` and `u`. The lattice need not
/// be related to the partitions of `p` and `q`; edge scores stay exact.
pub fn dp_align_on(
    p: &Srvf,
    q: &Srvf,
    s: &Partition,
    u: &Partition,
    opts: &DpOptions,
) -> Result<AlignmentResult> {
    if p.dim() != q.dim() {
        return Err(SrvfError::DimensionMismatch(p.dim(), q.dim()));
    }
    if opts.window == 0 {
        return Err(SrvfError::InvalidArgument(
            "move set radius must be ≥ 1".into(),
        ));
    }
    let (n, m) = (s.n_cells(), u.n_cells());
    if n == 0 || m == 0 {
        return Err(SrvfError::InvalidArgument("empty grid".into()));
    }
    let moves = opts.move_set();
    if moves.len() >= u8::MAX as usize {
        return Err(SrvfError::InvalidArgument(format!(
            "move set radius {} is too large",
            opts.window
        )));
    }
    let lattice = Lattice::new(p, q, s, u);
    let cols = m + 1;
    let mut score = vec![f64::NEG_INFINITY; (n + 1) * cols];
    let mut from = vec![u8::MAX; (n + 1) * cols];
    score[0] = 0.0;
    let mut evaluated = 0u64;

    for i in 0..=n {
        for j in 0..=m {
            if i == 0 && j == 0 {
                continue;
            }
            let mut best = f64::NEG_INFINITY;
            let mut best_move = u8::MAX;
            for (mi, &(a, b)) in moves.iter().enumerate() {
                if a > i || b > j {
                    continue;
                }
                let prev = score[(i - a) * cols + (j - b)];
                if prev == f64::NEG_INFINITY {
                    continue;
                }
                evaluated += 1;
                let cand = prev + lattice.edge(i - a, j - b, a, b);
                if cand > best {
                    best = cand;
                    best_move = mi as u8;
                }
            }
            score[i * cols + j] = best;
            from[i * cols + j] = best_move;
        }
    }

    let matching_value = score[n * cols + m];
    if matching_value == f64::NEG_INFINITY {
        return Err(SrvfError::InvalidArgument(format!(
            "no lattice path reaches ({n}, {m}) with the given move set"
        )));
    }
    let mut path = vec![(n, m)];
    let (mut i, mut j) = (n, m);
    while (i, j) != (0, 0) {
        let (a, b) = moves[from[i * cols + j] as usize];
        i -= a;
        j -= b;
        path.push((i, j));
    }
    path.reverse();

    let (beta, gamma) = lattice.path_to_pair(&path)?;
    let qd_sq = p.norm_sq() + q.norm_sq() - 2.0 * matching_value;
    Ok(AlignmentResult {
        beta,
        gamma,
        matching_value,
        quotient_distance: qd_sq.max(0.0).sqrt(),
        grid_n: n,
        grid_m: m,
        move_set: moves,
        path,
        dp_cells_evaluated: evaluated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::matching_functional;

    #[test]
    fn move_set_order() {
        let moves = DpOptions::new(3, true).move_set();
        assert_eq!(
            moves,
            vec![
                (1, 1),
                (0, 1),
                (1, 0),
                (1, 2),
                (2, 1),
                (2, 3),
                (3, 2),
                (1, 3),
                (3, 1)
            ]
        );
        assert_eq!(DpOptions::new(1, false).move_set(), vec![(1, 1)]);
    }

    #[test]
    fn equal_srvfs_align_on_diagonal() {
        let p = Srvf::uniform(2, vec![1.0, 0.5, -0.2, 0.3, 0.7, 0.7, 0.0, -1.0]).unwrap();
        let r = dp_align(&p, &p, &DpOptions::default()).unwrap();
        assert!((r.matching_value - p.norm_sq()).abs() < 1e-14);
        assert!(r.quotient_distance < 1e-7);
        assert!(r.path.iter().all(|&(i, j)| i == j));
        assert!(r.beta.is_identity() && r.gamma.is_identity());
    }

    #[test]
    fn edge_score_matches_functional() {
        let p = Srvf::new(
            1,
            Partition::new(vec![0.0, 0.3, 0.5, 1.0]).unwrap(),
            vec![1.0, -2.0, 0.5],
        )
        .unwrap();
        let q = Srvf::new(
            1,
            Partition::new(vec![0.0, 0.1, 0.8, 1.0]).unwrap(),
            vec![0.4, 1.5, -1.0],
        )
        .unwrap();
        let e = Lattice::new(&p, &q, p.knots(), q.knots()).edge(0, 0, 3, 3);
        let id = Reparametrisation::identity();
        assert!((e - matching_functional(&p, &q, &id, &id)).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let p = Srvf::uniform(1, vec![1.0]).unwrap();
        let q = Srvf::uniform(2, vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            dp_align(&p, &q, &DpOptions::default()),
            Err(SrvfError::DimensionMismatch(1, 2))
        ));
    }

    #[test]
    fn unreachable_corner_is_an_error() {
        // only diagonal steps, 1 x 2 cells
        let p = Srvf::uniform(1, vec![1.0]).unwrap();
        let q = Srvf::uniform(1, vec![1.0, 1.0]).unwrap();
        let (one, two) = (Partition::uniform(1), Partition::uniform(2));
        assert!(dp_align_on(&p, &q, &one, &two, &DpOptions::new(1, false)).is_err());
        assert!(dp_align_on(&p, &q, &one, &two, &DpOptions::new(2, false)).is_ok());
        assert!(dp_align(&p, &q, &DpOptions::new(1, false)).is_ok());
    }

    #[test]
    fn coarse_lattice_edges_are_exact() {
        let p = Srvf::new(
            1,
            Partition::new(vec![0.0, 0.3, 0.5, 1.0]).unwrap(),
            vec![1.0, -2.0, 0.5],
        )
        .unwrap();
        let q = Srvf::new(
            1,
            Partition::new(vec![0.0, 0.1, 0.8, 1.0]).unwrap(),
            vec![0.4, 1.5, -1.0],
        )
        .unwrap();
        let id = Reparametrisation::identity();
        let one = Partition::uniform(1);
        let e = Lattice::new(&p, &q, &one, &one).edge(0, 0, 1, 1);
        assert!((e - matching_functional(&p, &q, &id, &id)).abs() < 1e-15);

        // DP on a coarse lattice is a lower bound and its pair attains its value
        let grid = Partition::uniform(4);
        let coarse = dp_align_on(&p, &q, &grid, &grid, &DpOptions::default()).unwrap();
        let fine = dp_align(&p, &q, &DpOptions::default()).unwrap();
        let v = matching_functional(&p, &q, &coarse.beta, &coarse.gamma);
        assert!((v - coarse.matching_value).abs() < 1e-14);
        assert!(coarse.grid_n == 4 && coarse.grid_m == 4);
        assert!(fine.matching_value.is_finite());
    }
}
