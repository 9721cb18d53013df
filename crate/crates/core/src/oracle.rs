//! Brute-force reference detector.
//!
//! [`enumerate_posteriors`] computes exact per-symbol posteriors by
//! enumerating every one of the `2^K` noise-state sequences and summing the
//! joint density directly, following the model definition with no recursion
//! or dynamic programming. It is exponentially slow and exists purely as an
//! independent check of the trellis detector: the two implementations share
//! only the elementary density and transition-probability helpers, so an
//! agreement between them is meaningful.

use crate::math::log_sum_exp2;
use crate::modem::{Modulation, SymbolPosteriors};
use crate::noise::{NoiseParams, NoiseState};
use crate::{Error, Result};
use num_complex::Complex64;

/// Largest frame length accepted; the cost is `O(2^K K M)`.
pub const MAX_ENUMERATION_LEN: usize = 20;

/// Exact posteriors by exhaustive enumeration of state sequences.
///
/// Arguments mirror the trellis detector: `priors` are linear per-symbol
/// prior probabilities (`None` for uniform), and `active` marks positions
/// that actually carry a symbol (`None` for all active). Frames longer than
/// [`MAX_ENUMERATION_LEN`] are rejected.
pub fn enumerate_posteriors(
    y: &[Complex64],
    h: Complex64,
    power: f64,
    params: &NoiseParams,
    modulation: Modulation,
    priors: Option<&[f64]>,
    active: Option<&[bool]>,
) -> Result<SymbolPosteriors> {
    let k_len = y.len();
    let m = modulation.order();
    if k_len > MAX_ENUMERATION_LEN {
        return Err(Error::InvalidParameter(format!(
            "enumeration supports frames up to {MAX_ENUMERATION_LEN} symbols, got {k_len}"
        )));
    }
    if let Some(a) = active {
        if a.len() != k_len {
            return Err(Error::LengthMismatch(format!(
                "activity mask length {} vs frame length {}",
                a.len(),
                k_len
            )));
        }
    }
    let ln_priors = match priors {
        None => vec![-(m as f64).ln(); k_len * m],
        Some(p) => {
            if p.len() != k_len * m {
                return Err(Error::LengthMismatch(format!(
                    "priors have {} entries, frame needs {} x {}",
                    p.len(),
                    k_len,
                    m
                )));
            }
            let mut out = Vec::with_capacity(k_len * m);
            for (row_idx, row) in p.chunks(m).enumerate() {
                let total: f64 = row.iter().sum();
                if total <= 0.0 || !total.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "prior row {row_idx} must have positive finite mass, got {total}"
                    )));
                }
                for &v in row {
                    out.push(if v == 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        (v / total).ln()
                    });
                }
            }
            out
        }
    };
    if k_len == 0 {
        return SymbolPosteriors::from_log_scores(m, Vec::new());
    }

    let amp = power.sqrt();
    let points = modulation.points();
    // per-position, per-state, per-hypothesis sample log densities
    let mut dens = vec![0.0f64; k_len * 2 * m];
    // per-position, per-state prior-weighted marginal over hypotheses
    let mut marg = vec![f64::NEG_INFINITY; k_len * 2];
    for (k, &yk) in y.iter().enumerate() {
        let on = active.is_none_or(|a| a[k]);
        for (s_idx, s) in [NoiseState::Good, NoiseState::Bad].into_iter().enumerate() {
            for (x, point) in points.iter().enumerate() {
                let e = if on { yk - amp * h * point } else { yk };
                let lp = params.log_pdf(e, s);
                dens[(k * 2 + s_idx) * m + x] = lp;
                marg[k * 2 + s_idx] = log_sum_exp2(marg[k * 2 + s_idx], ln_priors[k * m + x] + lp);
            }
        }
    }

    let (p_gb, p_bg) = params.transition_probs();
    let ln_trans = [
        [(1.0 - p_gb).ln(), p_gb.ln()],
        [p_bg.ln(), (1.0 - p_bg).ln()],
    ];
    let stationary = params.stationary();
    let ln_pi = [stationary[0].ln(), stationary[1].ln()];

    let mut scores = vec![f64::NEG_INFINITY; k_len * m];
    for seq in 0u64..(1u64 << k_len) {
        let state_at = |k: usize| ((seq >> k) & 1) as usize;
        // log p(sequence) + log p(y | sequence) with hypotheses summed out
        let mut w = ln_pi[state_at(0)];
        for k in 1..k_len {
            w += ln_trans[state_at(k - 1)][state_at(k)];
        }
        for k in 0..k_len {
            w += marg[k * 2 + state_at(k)];
        }
        if w == f64::NEG_INFINITY {
            continue;
        }
        // pin each position to each hypothesis in turn
        for k in 0..k_len {
            let s = state_at(k);
            let unpinned = w - marg[k * 2 + s];
            for x in 0..m {
                let pinned = unpinned + ln_priors[k * m + x] + dens[(k * 2 + s) * m + x];
                scores[k * m + x] = log_sum_exp2(scores[k * m + x], pinned);
            }
        }
    }
    SymbolPosteriors::from_log_scores(m, scores)
}
