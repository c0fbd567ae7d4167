use crate::curve::Srvf;
use crate::error::Result;
use crate::metric::functional::pieces;
use crate::reparam::Reparametrisation;

/// Maximal intervals on which `⟨p∘β, q∘γ⟩ < 0`.
pub(crate) fn negative_set(
    p: &Srvf,
    q: &Srvf,
    beta: &Reparametrisation,
    gamma: &Reparametrisation,
) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for piece in pieces(p, q, beta, gamma) {
        if piece.inner >= 0.0 {
            continue;
        }
        match out.last_mut() {
            Some(last) if piece.t0 - last.1 <= 1e-15 => last.1 = piece.t1,
            _ => out.push((piece.t0, piece.t1)),
        }
    }
    out
}

/// Rebuilds `(β, γ)` so that `√β̃'√γ̃' = 0` wherever `⟨p∘β, q∘γ⟩ < 0`.
///
/// On each maximal negative interval `[t⁻, t⁺]` the new `β̃` runs through `β` at
/// double speed on the left half and stays put on the right half, while `γ̃`
/// waits on the left half and runs through `γ` at double speed on the right. The
/// maps agree with the old ones outside these intervals and at their endpoints,
/// so the functional loses exactly its negative part.
pub fn remodel_pair(
    p: &Srvf,
    q: &Srvf,
    beta: &Reparametrisation,
    gamma: &Reparametrisation,
) -> Result<(Reparametrisation, Reparametrisation)> {
    let negative = negative_set(p, q, beta, gamma);
    if negative.is_empty() {
        return Ok((beta.clone(), gamma.clone()));
    }
    let knots = beta.knots().merge(gamma.knots());
    let kb = knots.breakpoints();

    let mut new_beta: Vec<(f64, f64)> = Vec::with_capacity(kb.len() + 4 * negative.len());
    let mut new_gamma: Vec<(f64, f64)> = Vec::with_capacity(new_beta.capacity());
    let mut k = 0;
    for &(lo, hi) in &negative {
        while k < kb.len() && kb[k] < lo {
            new_beta.push((kb[k], beta.eval(kb[k])));
            new_gamma.push((kb[k], gamma.eval(kb[k])));
            k += 1;
        }
        let mid = lo + 0.5 * (hi - lo);
        // the knots of both maps inside [lo, hi], squeezed into each half
        let inner: Vec<f64> = std::iter::once(lo)
            .chain(
                kb[k..]
                    .iter()
                    .copied()
                    .take_while(|&t| t < hi)
                    .filter(|&t| t > lo),
            )
            .chain(std::iter::once(hi))
            .collect();
        let beta_hi = beta.eval(hi);
        let gamma_lo = gamma.eval(lo);
        // both halves must meet at the same float, or merged knots can smear a
        // one-ulp overlap into a visible error
        let squeeze = |t: f64| if t == hi { mid } else { lo + 0.5 * (t - lo) };
        for &t in &inner {
            new_beta.push((squeeze(t), beta.eval(t)));
        }
        new_beta.push((hi, beta_hi));
        new_gamma.push((lo, gamma_lo));
        for &t in &inner {
            new_gamma.push((
                if t == hi { hi } else { mid + 0.5 * (t - lo) },
                gamma.eval(t),
            ));
        }
        while k < kb.len() && kb[k] <= hi {
            k += 1;
        }
    }
    while k < kb.len() {
        new_beta.push((kb[k], beta.eval(kb[k])));
        new_gamma.push((kb[k], gamma.eval(kb[k])));
        k += 1;
    }
    Ok((
        Reparametrisation::from_points(&new_beta)?,
        Reparametrisation::from_points(&new_gamma)?,
    ))
}
