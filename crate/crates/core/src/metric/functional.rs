use crate::curve::{dot, Srvf};
use crate::reparam::Reparametrisation;

/// A stretch `[t0, t1]` on which `⟨p∘β, q∘γ⟩` and `√β'√γ'` are both constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Piece {
    pub t0: f64,
    pub t1: f64,
    pub inner: f64,
    pub weight: f64,
}

impl Piece {
    pub fn value(&self) -> f64 {
        self.inner * self.weight * (self.t1 - self.t0)
    }
}

/// Splits `[0, 1]` at every knot of `β`, `γ` and at every preimage of a cell
/// boundary of `p` under `β` or of `q` under `γ`.
pub(crate) fn pieces(
    p: &Srvf,
    q: &Srvf,
    beta: &Reparametrisation,
    gamma: &Reparametrisation,
) -> Vec<Piece> {
    let knots = beta.knots().merge(gamma.knots());
    let pb = p.knots().breakpoints();
    let qb = q.knots().breakpoints();
    let mut out = Vec::new();
    let mut taus: Vec<f64> = Vec::new();
    for k in 0..knots.n_cells() {
        let (a, b) = knots.cell(k);
        let (b0, b1) = (beta.eval(a), beta.eval(b));
        let (g0, g1) = (gamma.eval(a), gamma.eval(b));
        let weight = ((b1 - b0) * (g1 - g0)).max(0.0).sqrt() / (b - a);

        taus.clear();
        taus.push(0.0);
        crossings(pb, b0, b1, &mut taus);
        crossings(qb, g0, g1, &mut taus);
        taus.push(1.0);
        taus.sort_by(f64::total_cmp);

        for w in taus.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            let mid = 0.5 * (w[0] + w[1]);
            let pv = p.eval(b0 + mid * (b1 - b0));
            let qv = q.eval(g0 + mid * (g1 - g0));
            out.push(Piece {
                t0: a + w[0] * (b - a),
                t1: a + w[1] * (b - a),
                inner: dot(pv, qv),
                weight,
            });
        }
    }
    out
}

/// Relative positions in `(0, 1)` of the breakpoints strictly between `x0` and `x1`.
fn crossings(breakpoints: &[f64], x0: f64, x1: f64, out: &mut Vec<f64>) {
    if x1 <= x0 {
        return;
    }
    let start = breakpoints.partition_point(|&s| s <= x0);
    for &s in breakpoints[start..].iter().take_while(|&&s| s < x1) {
        out.push((s - x0) / (x1 - x0));
    }
}

/// `∫_0^1 ⟨p(β(t)), q(γ(t))⟩ √β'(t) √γ'(t) dt`, evaluated exactly as a finite sum.
pub fn matching_functional(
    p: &Srvf,
    q: &Srvf,
    beta: &Reparametrisation,
    gamma: &Reparametrisation,
) -> f64 {
    pieces(p, q, beta, gamma).iter().map(Piece::value).sum()
}
