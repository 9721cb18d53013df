//! Gray-labeled PSK mapping and soft bit demapping.
//!
//! Conventions fixed across the crate:
//!
//! * bit 0 maps to +1 for BPSK; the QPSK point for bits `00` is
//!   `e^{i pi/4}`, with Gray labeling around the circle;
//! * a bit log-likelihood ratio is `ln(P[bit = 0] / P[bit = 1])`, so a
//!   positive LLR means bit 0;
//! * the first bit of a symbol label is the most significant: symbol index
//!   `b1 * 2 + b2` for QPSK.
//!
//! The demapper turns per-symbol posteriors into per-bit LLRs by summing
//! posterior mass over the label sets `chi(l, b)` = symbols whose l-th bit
//! equals `b`.

use crate::math::{log_sum_exp, log_sum_exp2};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

/// Unit-energy PSK constellations supported by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    Bpsk,
    Qpsk,
}

const BPSK_POINTS: [Complex64; 2] = [
    Complex64::new(1.0, 0.0),  // bit 0
    Complex64::new(-1.0, 0.0), // bit 1
];

const QPSK_POINTS: [Complex64; 4] = [
    Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2),   // 00
    Complex64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2),  // 01
    Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2),  // 10
    Complex64::new(-FRAC_1_SQRT_2, -FRAC_1_SQRT_2), // 11
];

impl Modulation {
    /// Constellation order M.
    #[inline]
    pub fn order(self) -> usize {
        match self {
            Modulation::Bpsk => 2,
            Modulation::Qpsk => 4,
        }
    }

    /// Bits carried per symbol.
    #[inline]
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Bpsk => 1,
            Modulation::Qpsk => 2,
        }
    }

    /// Constellation points indexed by symbol label (first bit most
    /// significant). All points have unit energy.
    #[inline]
    pub fn points(self) -> &'static [Complex64] {
        match self {
            Modulation::Bpsk => &BPSK_POINTS,
            Modulation::Qpsk => &QPSK_POINTS,
        }
    }

    /// Map a bit sequence to symbols. The bit count must divide evenly.
    pub fn modulate(self, bits: &[u8]) -> Result<Vec<Complex64>> {
        let bps = self.bits_per_symbol();
        if !bits.len().is_multiple_of(bps) {
            return Err(Error::InvalidParameter(format!(
                "bit count {} is not a multiple of {} bits per symbol",
                bits.len(),
                bps
            )));
        }
        let points = self.points();
        bits.chunks(bps)
            .map(|chunk| {
                let mut idx = 0usize;
                for &b in chunk {
                    if b > 1 {
                        return Err(Error::InvalidParameter(format!(
                            "bits must be 0 or 1, got {b}"
                        )));
                    }
                    idx = (idx << 1) | b as usize;
                }
                Ok(points[idx])
            })
            .collect()
    }

    /// Symbol index for a label chunk (used when re-modulating relay
    /// decisions).
    pub fn symbol_index(self, label: &[u8]) -> usize {
        debug_assert_eq!(label.len(), self.bits_per_symbol());
        label.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
    }
}

/// Per-symbol posterior distributions over the constellation, stored as
/// normalized log probabilities (log-sum-exp of each row is 0).
///
/// Log storage keeps extreme posteriors exact: a symbol decided at
/// "minus 2000 nats" still demaps to a finite LLR.
#[derive(Debug, Clone)]
pub struct SymbolPosteriors {
    m: usize,
    log_probs: Vec<f64>,
}

impl SymbolPosteriors {
    /// Build from unnormalized log scores, one row of `m` entries per symbol.
    ///
    /// Rows whose total mass is zero (all scores negative infinity) are
    /// rejected.
    pub fn from_log_scores(m: usize, mut log_scores: Vec<f64>) -> Result<SymbolPosteriors> {
        assert!(m >= 2, "constellation order must be at least 2");
        assert_eq!(log_scores.len() % m, 0, "ragged posterior matrix");
        for row in log_scores.chunks_mut(m) {
            let norm = log_sum_exp(row);
            if norm == f64::NEG_INFINITY || norm.is_nan() {
                return Err(Error::NonFinite(
                    "posterior row has no probability mass".into(),
                ));
            }
            for v in row.iter_mut() {
                *v -= norm;
            }
        }
        Ok(SymbolPosteriors {
            m,
            log_probs: log_scores,
        })
    }

    /// Uniform posteriors for `len` symbols.
    pub fn uniform(m: usize, len: usize) -> SymbolPosteriors {
        SymbolPosteriors {
            m,
            log_probs: vec![-(m as f64).ln(); m * len],
        }
    }

    /// Constellation order M.
    #[inline]
    pub fn order(&self) -> usize {
        self.m
    }

    /// Number of symbols.
    #[inline]
    pub fn len(&self) -> usize {
        self.log_probs.len() / self.m
    }

    /// True when the frame is empty.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.log_probs.is_empty()
    }

    /// Normalized log-probability row for symbol `k`.
    #[inline]
    pub fn log_row(&self, k: usize) -> &[f64] {
        &self.log_probs[k * self.m..(k + 1) * self.m]
    }

    /// Linear-domain probabilities for symbol `k` (allocates).
    pub fn row(&self, k: usize) -> Vec<f64> {
        self.log_row(k).iter().map(|lp| lp.exp()).collect()
    }

    /// Most probable symbol index at position `k`.
    pub fn hard_symbol(&self, k: usize) -> usize {
        let row = self.log_row(k);
        let mut best = 0;
        for (i, &v) in row.iter().enumerate() {
            if v > row[best] {
                best = i;
            }
        }
        best
    }
}

/// Per-bit log-likelihood ratios for one frame, `ln(P[bit=0]/P[bit=1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrFrame {
    pub llrs: Vec<f64>,
}

impl LlrFrame {
    /// Hard bit decisions: 0 when the LLR is nonnegative.
    pub fn hard_bits(&self) -> Vec<u8> {
        hard_decision(&self.llrs)
    }
}

/// Soft demapper: collapse symbol posteriors to per-bit LLRs.
///
/// Bit `l` of a symbol has LLR `lse over chi(l,0) - lse over chi(l,1)` of the
/// row's log probabilities. Rows are validated to be normalized.
pub fn demap_bits(posteriors: &SymbolPosteriors) -> Result<LlrFrame> {
    let m = posteriors.order();
    let bps = m.trailing_zeros() as usize;
    debug_assert_eq!(1 << bps, m, "constellation order must be a power of two");
    let mut llrs = Vec::with_capacity(posteriors.len() * bps);
    for k in 0..posteriors.len() {
        let row = posteriors.log_row(k);
        let total = log_sum_exp(row);
        if total.is_nan() || total.abs() > 1e-9 {
            return Err(Error::NonFinite(format!(
                "posterior row {k} is not normalized (log mass {total:e})"
            )));
        }
        for l in 0..bps {
            let shift = bps - 1 - l; // bit l is most significant
            let mut zero = f64::NEG_INFINITY;
            let mut one = f64::NEG_INFINITY;
            for (idx, &lp) in row.iter().enumerate() {
                if (idx >> shift) & 1 == 0 {
                    zero = log_sum_exp2(zero, lp);
                } else {
                    one = log_sum_exp2(one, lp);
                }
            }
            llrs.push(zero - one);
        }
    }
    Ok(LlrFrame { llrs })
}

/// Hard decisions from bit LLRs: bit = 0 exactly when the LLR is >= 0, so a
/// zero LLR resolves deterministically.
pub fn hard_decision(llrs: &[f64]) -> Vec<u8> {
    llrs.iter().map(|&l| if l >= 0.0 { 0 } else { 1 }).collect()
}
