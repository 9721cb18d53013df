//! Shared Monte Carlo plumbing for the integration suites: a sequential
//! per-point frame runner that keeps per-frame error counts, so statistics
//! can use frame-cluster standard errors (bits within a block-fading frame
//! are correlated; the binomial formula would understate the uncertainty).

#![allow(dead_code)]

use burstrelay::harness::draw_bits;
use burstrelay::modem::demap_bits;
use burstrelay::noise::NoiseShape;
use burstrelay::relaying::{
    detect_cooperative_frame, detect_dt_frame, LinkNoise, Protocol, SchemeConfig,
};
use burstrelay::streams::{FrameStreams, LaneId};

pub struct PointStats {
    pub bits: u64,
    pub bit_errors: u64,
    pub symbols: u64,
    pub symbol_errors: u64,
    pub frame_bit_errors: Vec<u64>,
    pub frame_symbol_errors: Vec<u64>,
    pub bits_per_frame: u64,
    pub symbols_per_frame: u64,
}

impl PointStats {
    pub fn ber(&self) -> f64 {
        self.bit_errors as f64 / self.bits as f64
    }

    pub fn ser(&self) -> f64 {
        self.symbol_errors as f64 / self.symbols as f64
    }

    /// Frame-cluster standard error of the BER estimate.
    pub fn ber_se(&self) -> f64 {
        cluster_se(&self.frame_bit_errors, self.bits_per_frame)
    }

    /// Frame-cluster standard error of the SER estimate.
    pub fn ser_se(&self) -> f64 {
        cluster_se(&self.frame_symbol_errors, self.symbols_per_frame)
    }
}

/// Standard error of a rate estimated from equal-size clusters: the
/// between-cluster sample variance of per-frame error counts propagated to
/// the pooled rate.
pub fn cluster_se(per_frame_errors: &[u64], denom_per_frame: u64) -> f64 {
    let n = per_frame_errors.len();
    assert!(n >= 2, "cluster standard error needs at least two frames");
    let mean = per_frame_errors.iter().sum::<u64>() as f64 / n as f64;
    let var = per_frame_errors
        .iter()
        .map(|&e| {
            let d = e as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / (n as f64 - 1.0);
    (var / n as f64).sqrt() / denom_per_frame as f64
}

/// Run one (scheme, SNR) point sequentially on dedicated streams, counting
/// bit and symbol errors per frame. Stops at `min_bit_errors` or
/// `max_bits`, whichever comes first.
#[allow(clippy::too_many_arguments)]
pub fn simulate_point(
    scheme: &SchemeConfig,
    shape: NoiseShape,
    snr_db: f64,
    frame_symbols: usize,
    min_bit_errors: u64,
    max_bits: u64,
    master_seed: u64,
    lane: LaneId,
) -> PointStats {
    let sigma2 = scheme.total_power() / 10f64.powf(snr_db / 10.0);
    let noise = LinkNoise::uniform(shape.with_good_var(sigma2).unwrap());
    let bps = scheme.modulation.bits_per_symbol();
    let bits_per_frame = (frame_symbols * bps) as u64;
    let mut stats = PointStats {
        bits: 0,
        bit_errors: 0,
        symbols: 0,
        symbol_errors: 0,
        frame_bit_errors: Vec::new(),
        frame_symbol_errors: Vec::new(),
        bits_per_frame,
        symbols_per_frame: frame_symbols as u64,
    };
    let mut frame = 0u64;
    while stats.bit_errors < min_bit_errors && stats.bits < max_bits {
        let mut streams = FrameStreams::derive(master_seed, lane, frame);
        let bits = draw_bits(frame_symbols * bps, &mut streams.bits);
        let posteriors = match scheme.protocol {
            Protocol::Dt => detect_dt_frame(scheme, &noise, &bits, &mut streams).unwrap(),
            _ => {
                detect_cooperative_frame(scheme, &noise, &bits, &mut streams, None)
                    .unwrap()
                    .posteriors
            }
        };
        let hard = demap_bits(&posteriors).unwrap().hard_bits();
        let mut bit_err = 0u64;
        let mut sym_err = 0u64;
        for k in 0..frame_symbols {
            let a = &hard[k * bps..(k + 1) * bps];
            let b = &bits[k * bps..(k + 1) * bps];
            if a != b {
                sym_err += 1;
                bit_err += a.iter().zip(b).filter(|(x, y)| x != y).count() as u64;
            }
        }
        stats.bits += bits_per_frame;
        stats.bit_errors += bit_err;
        stats.symbols += frame_symbols as u64;
        stats.symbol_errors += sym_err;
        stats.frame_bit_errors.push(bit_err);
        stats.frame_symbol_errors.push(sym_err);
        frame += 1;
    }
    stats
}

/// SNR (dB) at which a BER curve crosses `target`, from a least-squares
/// fit of log10(BER) against SNR over the whole grid. Every point
/// constrains the estimate, so frame-cluster wiggle in any single point
/// moves the crossing far less than segment interpolation would. The grid
/// must be narrow enough for the log-linear model to hold and must contain
/// the crossing, which the caller asserts.
pub fn snr_at_target_fit(curve: &[(f64, f64)], target: f64) -> f64 {
    assert!(curve.len() >= 3, "fit needs at least three points");
    let n = curve.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, ber) in curve {
        let y = ber.log10();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    assert!(slope < 0.0, "curve is not decreasing: {curve:?}");
    let intercept = (sy - slope * sx) / n;
    let crossing = (target.log10() - intercept) / slope;
    let lo = curve.first().unwrap().0;
    let hi = curve.last().unwrap().0;
    assert!(
        crossing >= lo && crossing <= hi,
        "crossing {crossing:.2} dB falls outside the fitted grid [{lo}, {hi}]: {curve:?}"
    );
    crossing
}

/// SNR (dB) at which a decreasing BER curve crosses `target`, linearly
/// interpolated in (SNR, log10 BER). Panics if the curve does not bracket
/// the target.
pub fn snr_at_target(curve: &[(f64, f64)], target: f64) -> f64 {
    for w in curve.windows(2) {
        let (s0, b0) = w[0];
        let (s1, b1) = w[1];
        if b0 >= target && target >= b1 {
            if b0 == b1 {
                return 0.5 * (s0 + s1);
            }
            let t = (b0.log10() - target.log10()) / (b0.log10() - b1.log10());
            return s0 + t * (s1 - s0);
        }
    }
    panic!(
        "target {target} not bracketed by curve {:?}",
        curve
            .iter()
            .map(|&(s, b)| (s, format!("{b:.3e}")))
            .collect::<Vec<_>>()
    );
}
