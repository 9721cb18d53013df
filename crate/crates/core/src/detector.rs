//! Symbol detectors for PSK over Rayleigh fading with two-state
//! Markov-Gaussian noise.
//!
//! Four receivers share one output type, per-symbol posteriors over the
//! constellation:
//!
//! * [`map_detect`] : the full MAP detector. It runs a forward/backward
//!   (BCJR-style) pass over the hidden noise-state trellis, so each symbol
//!   decision is informed by the burst structure of the whole frame.
//! * [`memoryless_detect`] : optimal when the state chain has no memory:
//!   each symbol is scored against the stationary two-component Gaussian
//!   mixture.
//! * [`awgn_detect`] : a conventional matched-filter receiver that models
//!   the noise as white Gaussian with a caller-supplied variance.
//! * [`genie_detect`] : a bound: the true per-symbol noise state is given,
//!   reducing detection to a matched filter with the correct instantaneous
//!   variance.
//!
//! All arithmetic is in the log domain with exact log-sum-exp, and the
//! forward/backward recursions renormalize by their running maximum each
//! step, so frames of tens of thousands of symbols with variance ratios of
//! 100 stay inside f64 range.

use crate::math::log_sum_exp2;
use crate::modem::{Modulation, SymbolPosteriors};
use crate::noise::{NoiseParams, NoiseState};
use crate::{Error, Result};
use num_complex::Complex64;

/// Scratch space for one frame's trellis pass.
///
/// `alpha` holds K+1 renormalized forward rows, `bsum` the K
/// transition-weighted backward sums used by the posterior combination,
/// `em`/`em_marg` the per-(symbol, state) emission scores. One workspace per
/// frame; nothing is shared across threads.
struct TrellisWorkspace {
    em: Vec<f64>,      // K * 2 * M emission log densities
    em_marg: Vec<f64>, // K * 2 prior-weighted emission marginals
    alpha: Vec<f64>,   // (K + 1) * 2 forward rows, renormalized per step
    bsum: Vec<f64>,    // K * 2 backward transition sums
}

impl TrellisWorkspace {
    fn for_frame(k: usize, m: usize) -> TrellisWorkspace {
        TrellisWorkspace {
            em: vec![0.0; k * 2 * m],
            em_marg: vec![0.0; k * 2],
            alpha: vec![0.0; (k + 1) * 2],
            bsum: vec![0.0; k * 2],
        }
    }
}

fn validate_common(y: &[Complex64], h: Complex64, power: f64) -> Result<()> {
    if !h.re.is_finite() || !h.im.is_finite() {
        return Err(Error::NonFinite(format!("fading coefficient {h}")));
    }
    if !power.is_finite() || power <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "transmit power must be positive and finite, got {power}"
        )));
    }
    for (k, v) in y.iter().enumerate() {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite(format!("received sample {k}: {v}")));
        }
    }
    Ok(())
}

/// Per-symbol prior log-probabilities, normalized row-wise; uniform when the
/// caller passes `None`.
fn ingest_priors(priors: Option<&[f64]>, k: usize, m: usize) -> Result<Vec<f64>> {
    match priors {
        None => Ok(vec![-(m as f64).ln(); k * m]),
        Some(p) => {
            if p.len() != k * m {
                return Err(Error::LengthMismatch(format!(
                    "priors have {} entries, frame needs {} x {}",
                    p.len(),
                    k,
                    m
                )));
            }
            let mut out = Vec::with_capacity(k * m);
            for (row_idx, row) in p.chunks(m).enumerate() {
                let total: f64 = row.iter().sum();
                if total <= 0.0 || !total.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "prior row {row_idx} must have positive finite mass, got {total}"
                    )));
                }
                for &v in row {
                    if v < 0.0 || !v.is_finite() {
                        return Err(Error::InvalidParameter(format!(
                            "prior row {row_idx} has invalid entry {v}"
                        )));
                    }
                    out.push(if v == 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        (v / total).ln()
                    });
                }
            }
            Ok(out)
        }
    }
}

/// Emission log densities for every (symbol, state, hypothesis) triple.
///
/// Positions with `active == false` model a silent transmitter: the received
/// sample is noise only, so the emission is hypothesis-independent there.
#[allow(clippy::too_many_arguments)]
fn fill_emissions(
    ws: &mut TrellisWorkspace,
    y: &[Complex64],
    h: Complex64,
    power: f64,
    params: &NoiseParams,
    modulation: Modulation,
    ln_priors: &[f64],
    active: Option<&[bool]>,
) {
    let m = modulation.order();
    let points = modulation.points();
    let amp = power.sqrt();
    let gains: Vec<Complex64> = points.iter().map(|x| amp * h * x).collect();
    let vars = [params.good_var, params.bad_var()];
    let ln_norm = [
        -(std::f64::consts::PI * vars[0]).ln(),
        -(std::f64::consts::PI * vars[1]).ln(),
    ];
    for (k, &yk) in y.iter().enumerate() {
        let on = active.is_none_or(|a| a[k]);
        for s in 0..2 {
            let mut marg = f64::NEG_INFINITY;
            for (x, gain) in gains.iter().enumerate() {
                let e = if on { yk - gain } else { yk };
                let lp = ln_norm[s] - e.norm_sqr() / vars[s];
                ws.em[(k * 2 + s) * m + x] = lp;
                marg = log_sum_exp2(marg, ln_priors[k * m + x] + lp);
            }
            ws.em_marg[k * 2 + s] = marg;
        }
    }
}

/// Full trellis pass. Returns posteriors plus the frame log evidence
/// computed from the forward and from the backward recursion; the two must
/// agree, which the test suite checks.
fn bcjr(
    y: &[Complex64],
    h: Complex64,
    power: f64,
    params: &NoiseParams,
    modulation: Modulation,
    priors: Option<&[f64]>,
    active: Option<&[bool]>,
) -> Result<(SymbolPosteriors, f64, f64)> {
    validate_common(y, h, power)?;
    let k_len = y.len();
    let m = modulation.order();
    if let Some(a) = active {
        if a.len() != k_len {
            return Err(Error::LengthMismatch(format!(
                "activity mask length {} vs frame length {}",
                a.len(),
                k_len
            )));
        }
    }
    let ln_priors = ingest_priors(priors, k_len, m)?;
    if k_len == 0 {
        return Ok((SymbolPosteriors::uniform(m, 0), 0.0, 0.0));
    }

    let mut ws = TrellisWorkspace::for_frame(k_len, m);
    fill_emissions(&mut ws, y, h, power, params, modulation, &ln_priors, active);

    let (p_gb, p_bg) = params.transition_probs();
    let ln_trans = [
        [(1.0 - p_gb).ln(), p_gb.ln()],
        [p_bg.ln(), (1.0 - p_bg).ln()],
    ];
    let ln_pi = [params.p_good().ln(), params.p_bad.ln()];

    // Forward pass: alpha[k+1][s'] = lse_s(alpha[k][s] + em_marg[k][s] + trans[s][s']).
    ws.alpha[0] = ln_pi[0];
    ws.alpha[1] = ln_pi[1];
    let mut acc_f = 0.0;
    for k in 0..k_len {
        let a0 = ws.alpha[k * 2] + ws.em_marg[k * 2];
        let a1 = ws.alpha[k * 2 + 1] + ws.em_marg[k * 2 + 1];
        let mut n0 = log_sum_exp2(a0 + ln_trans[0][0], a1 + ln_trans[1][0]);
        let mut n1 = log_sum_exp2(a0 + ln_trans[0][1], a1 + ln_trans[1][1]);
        let step = n0.max(n1);
        n0 -= step;
        n1 -= step;
        acc_f += step;
        ws.alpha[(k + 1) * 2] = n0;
        ws.alpha[(k + 1) * 2 + 1] = n1;
    }
    let log_evidence_fwd = log_sum_exp2(ws.alpha[k_len * 2], ws.alpha[k_len * 2 + 1]) + acc_f;

    // Backward pass; bsum[k][s] = lse_{s'}(trans[s][s'] + beta[k+1][s']).
    let mut beta = [0.0f64, 0.0];
    let mut acc_b = 0.0;
    for k in (0..k_len).rev() {
        let s0 = log_sum_exp2(ln_trans[0][0] + beta[0], ln_trans[0][1] + beta[1]);
        let s1 = log_sum_exp2(ln_trans[1][0] + beta[0], ln_trans[1][1] + beta[1]);
        ws.bsum[k * 2] = s0;
        ws.bsum[k * 2 + 1] = s1;
        let mut b0 = ws.em_marg[k * 2] + s0;
        let mut b1 = ws.em_marg[k * 2 + 1] + s1;
        let step = b0.max(b1);
        b0 -= step;
        b1 -= step;
        acc_b += step;
        beta = [b0, b1];
    }
    let log_evidence_bwd = log_sum_exp2(ln_pi[0] + beta[0], ln_pi[1] + beta[1]) + acc_b;

    // Posterior combination per symbol and hypothesis.
    let mut scores = vec![0.0f64; k_len * m];
    for k in 0..k_len {
        let a = [ws.alpha[k * 2], ws.alpha[k * 2 + 1]];
        let b = [ws.bsum[k * 2], ws.bsum[k * 2 + 1]];
        for x in 0..m {
            let lp = log_sum_exp2(
                a[0] + ws.em[(k * 2) * m + x] + b[0],
                a[1] + ws.em[(k * 2 + 1) * m + x] + b[1],
            );
            scores[k * m + x] = ln_priors[k * m + x] + lp;
        }
    }
    let posteriors = SymbolPosteriors::from_log_scores(m, scores)?;
    Ok((posteriors, log_evidence_fwd, log_evidence_bwd))
}

/// MAP detection over the noise-state trellis.
///
/// `priors` are linear-domain per-symbol prior probabilities, row-major
/// `K x M`; `None` means uniform.
pub fn map_detect(
    y: &[Complex64],
    h: Complex64,
    power: f64,
    params: &NoiseParams,
    modulation: Modulation,
    priors: Option<&[f64]>,
) -> Result<SymbolPosteriors> {
    bcjr(y, h, power, params, modulation, priors, None).map(|(p, _, _)| p)
}

/// MAP detection where some positions are known to carry no signal
/// (`active[k] == false`); those samples still inform the state chain.
pub fn map_detect_masked(
    y: &[Complex64],
    h: Complex64,
    power: f64,
    params: &NoiseParams,
    modulation: Modulation,
    priors: Option<&[f64]>,
    active: &[bool],
) -> Result<SymbolPosteriors> {
    bcjr(y, h, power, params, modulation, priors, Some(active)).map(|(p, _, _)| p)
}

/// Per-symbol detection against the stationary Gaussian mixture; optimal
/// when the state chain is memoryless (`memory == 1`).
pub fn memoryless_detect(
    y: &[Complex64],
    h: Complex64,
    power: f64,
    params: &NoiseParams,
    modulation: Modulation,
    priors: Option<&[f64]>,
) -> Result<SymbolPosteriors> {
    validate_common(y, h, power)?;
    let m = modulation.order();
    let ln_priors = ingest_priors(priors, y.len(), m)?;
    let points = modulation.points();
    let amp = power.sqrt();
    let vars = [params.good_var, params.bad_var()];
    let ln_mix = [
        params.p_good().ln() - (std::f64::consts::PI * vars[0]).ln(),
        params.p_bad.ln() - (std::f64::consts::PI * vars[1]).ln(),
    ];
    let mut scores = vec![0.0f64; y.len() * m];
    for (k, &yk) in y.iter().enumerate() {
        for (x, point) in points.iter().enumerate() {
            let e = yk - amp * h * point;
            let d = e.norm_sqr();
            let lp = log_sum_exp2(ln_mix[0] - d / vars[0], ln_mix[1] - d / vars[1]);
            scores[k * m + x] = ln_priors[k * m + x] + lp;
        }
    }
    SymbolPosteriors::from_log_scores(m, scores)
}

/// Matched-filter receiver that treats the noise as white Gaussian with the
/// given total variance.
pub fn awgn_detect(
    y: &[Complex64],
    h: Complex64,
    power: f64,
    noise_var: f64,
    modulation: Modulation,
    priors: Option<&[f64]>,
) -> Result<SymbolPosteriors> {
    validate_common(y, h, power)?;
    if noise_var <= 0.0 || !noise_var.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "noise variance must be positive, got {noise_var}"
        )));
    }
    let m = modulation.order();
    let ln_priors = ingest_priors(priors, y.len(), m)?;
    let points = modulation.points();
    let amp = power.sqrt();
    let ln_norm = -(std::f64::consts::PI * noise_var).ln();
    let mut scores = vec![0.0f64; y.len() * m];
    for (k, &yk) in y.iter().enumerate() {
        for (x, point) in points.iter().enumerate() {
            let e = yk - amp * h * point;
            scores[k * m + x] = ln_priors[k * m + x] + ln_norm - e.norm_sqr() / noise_var;
        }
    }
    SymbolPosteriors::from_log_scores(m, scores)
}

/// Genie-aided bound: the true noise state of every symbol is revealed, so
/// each sample is scored with its exact instantaneous variance.
pub fn genie_detect(
    y: &[Complex64],
    h: Complex64,
    power: f64,
    params: &NoiseParams,
    states: &[NoiseState],
    modulation: Modulation,
    priors: Option<&[f64]>,
) -> Result<SymbolPosteriors> {
    validate_common(y, h, power)?;
    if states.len() != y.len() {
        return Err(Error::LengthMismatch(format!(
            "state sequence length {} vs frame length {}",
            states.len(),
            y.len()
        )));
    }
    let m = modulation.order();
    let ln_priors = ingest_priors(priors, y.len(), m)?;
    let points = modulation.points();
    let amp = power.sqrt();
    let mut scores = vec![0.0f64; y.len() * m];
    for (k, (&yk, &s)) in y.iter().zip(states).enumerate() {
        for (x, point) in points.iter().enumerate() {
            let e = yk - amp * h * point;
            scores[k * m + x] = ln_priors[k * m + x] + params.log_pdf(e, s);
        }
    }
    SymbolPosteriors::from_log_scores(m, scores)
}

/// Closed-form BPSK bit LLR of the AWGN matched filter,
/// `4 sqrt(P) Re(h* y) / var`. Used by collapse tests and the MRC combiner.
#[inline]
pub fn awgn_bpsk_llr(y: Complex64, h: Complex64, power: f64, noise_var: f64) -> f64 {
    4.0 * power.sqrt() * (h.conj() * y).re / noise_var
}
