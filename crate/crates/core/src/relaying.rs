//! End-to-end frame orchestration for direct transmission and the two
//! decode-and-forward protocols.
//!
//! A cooperative frame runs in two slots: the source broadcasts (heard by
//! relay and destination), then the relay either re-modulates its hard
//! decisions or stays silent. The destination fuses the two observations
//! with one of four receivers:
//!
//! * `Map` : trellis detection per link, then posterior-domain fusion that
//!   discounts the relay branch by its error probability (`combine_map`).
//! * `Memoryless` : mixture-density per-symbol detection per link, same
//!   fusion rule.
//! * `AwgnMrc` : classical maximum-ratio combining that models the noise as
//!   white Gaussian.
//! * `GenieMrc` : MRC with the true per-symbol noise state revealed, the
//!   receiver the analytic bounds assume.
//!
//! Protocol variants: `Sr` always forwards (errors propagate, the
//! destination compensates through the fusion discount); `Sdfr` either
//! silences exactly the relay's wrong symbols (`Genie`, the lower-bound
//! model) or forwards whole frames whose relay SNR clears a threshold
//! (`Threshold`).

use crate::analytic::{self, CoopSnrProfiles, LinkSnrProfile};
use crate::detector::{
    awgn_detect, genie_detect, map_detect, map_detect_masked, memoryless_detect,
};
use crate::link::{LinkGeometry, LinkRealization};
use crate::math::log_sum_exp2;
use crate::modem::{demap_bits, LlrFrame, Modulation, SymbolPosteriors};
use crate::noise::NoiseParams;
use crate::streams::FrameStreams;
use crate::{Error, Result};
use num_complex::Complex64;

/// Transmission protocol of one scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Protocol {
    Dt,
    Sr,
    Sdfr(SdfrMode),
}

/// How the selective relay decides to transmit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SdfrMode {
    /// Per-symbol silence exactly on the relay's own detection errors; the
    /// destination knows which symbols were silenced. Models the idealized
    /// error-detecting relay behind the analytic lower bound.
    Genie,
    /// Forward the whole frame iff the relay's instantaneous fading SNR
    /// exceeds `gamma_t` (linear).
    Threshold { gamma_t: f64 },
}

/// Destination receiver family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReceiverKind {
    Map,
    Memoryless,
    AwgnMrc,
    GenieMrc,
}

/// What the destination knows about the relay's error probability when
/// fusing the two branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelayErrorKnowledge {
    /// The model value itself (closed form; threshold-conditioned in
    /// threshold mode).
    Exact,
    /// The model value scaled by a multiplicative misestimation factor.
    Estimated { factor: f64 },
    /// A value measured in a calibration pass and injected per frame.
    Measured,
    /// Fusion ignores relay errors entirely (discount term dropped).
    None,
}

/// Which noise power a variance-blind computation assumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarianceRef {
    /// Stationary average `p_G var_G + p_B var_B`.
    StateAveraged,
    /// Background (good-state) variance only.
    GoodState,
}

/// Node layout: distances source-destination, source-relay,
/// relay-destination, and the common path-loss exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoopGeometry {
    pub lambda_sd: f64,
    pub lambda_sm: f64,
    pub lambda_md: f64,
    pub eta: f64,
}

impl Default for CoopGeometry {
    /// The normalized layout used throughout: unit source-destination
    /// distance with the relay at 0.4 from the source and 0.6 from the
    /// destination, square-law path loss.
    fn default() -> CoopGeometry {
        CoopGeometry {
            lambda_sd: 1.0,
            lambda_sm: 0.4,
            lambda_md: 0.6,
            eta: 2.0,
        }
    }
}

impl CoopGeometry {
    pub fn sd(&self) -> Result<LinkGeometry> {
        LinkGeometry::new(self.lambda_sd, self.eta)
    }
    pub fn sm(&self) -> Result<LinkGeometry> {
        LinkGeometry::new(self.lambda_sm, self.eta)
    }
    pub fn md(&self) -> Result<LinkGeometry> {
        LinkGeometry::new(self.lambda_md, self.eta)
    }
}

/// Noise processes of the three links (commonly identical).
#[derive(Debug, Clone, Copy)]
pub struct LinkNoise {
    pub sd: NoiseParams,
    pub sm: NoiseParams,
    pub md: NoiseParams,
}

impl LinkNoise {
    pub fn uniform(params: NoiseParams) -> LinkNoise {
        LinkNoise {
            sd: params,
            sm: params,
            md: params,
        }
    }
}

/// Full description of one simulated scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub label: String,
    pub protocol: Protocol,
    pub receiver: ReceiverKind,
    pub modulation: Modulation,
    pub geometry: CoopGeometry,
    /// Source transmit power (the full budget for DT).
    pub power_source: f64,
    /// Relay transmit power; must be zero for DT and positive otherwise.
    pub power_relay: f64,
    pub relay_error_knowledge: RelayErrorKnowledge,
    /// Noise power the AWGN-matched-filter receiver assumes.
    pub awgn_variance_ref: VarianceRef,
    /// Noise power normalizing the SDFR threshold comparison.
    pub threshold_variance_ref: VarianceRef,
}

impl SchemeConfig {
    /// Direct transmission with the whole power budget at the source.
    pub fn dt(
        label: &str,
        receiver: ReceiverKind,
        modulation: Modulation,
        power: f64,
    ) -> SchemeConfig {
        SchemeConfig {
            label: label.to_string(),
            protocol: Protocol::Dt,
            receiver,
            modulation,
            geometry: CoopGeometry::default(),
            power_source: power,
            power_relay: 0.0,
            relay_error_knowledge: RelayErrorKnowledge::None,
            awgn_variance_ref: VarianceRef::StateAveraged,
            threshold_variance_ref: VarianceRef::GoodState,
        }
    }

    /// Cooperative scheme splitting the budget between source and relay.
    pub fn cooperative(
        label: &str,
        protocol: Protocol,
        receiver: ReceiverKind,
        modulation: Modulation,
        power_source: f64,
        power_relay: f64,
    ) -> SchemeConfig {
        SchemeConfig {
            label: label.to_string(),
            protocol,
            receiver,
            modulation,
            geometry: CoopGeometry::default(),
            power_source,
            power_relay,
            relay_error_knowledge: RelayErrorKnowledge::Exact,
            awgn_variance_ref: VarianceRef::StateAveraged,
            threshold_variance_ref: VarianceRef::GoodState,
        }
    }

    /// Total power spent per information symbol across both slots.
    pub fn total_power(&self) -> f64 {
        self.power_source + self.power_relay
    }

    pub fn validate(&self) -> Result<()> {
        if self.power_source <= 0.0 || !self.power_source.is_finite() {
            return Err(Error::Config(format!(
                "scheme '{}': source power must be positive, got {}",
                self.label, self.power_source
            )));
        }
        if !self.power_relay.is_finite() || self.power_relay < 0.0 {
            return Err(Error::Config(format!(
                "scheme '{}': relay power must be finite and nonnegative, got {}",
                self.label, self.power_relay
            )));
        }
        match self.protocol {
            Protocol::Dt => {
                if self.power_relay != 0.0 {
                    return Err(Error::Config(format!(
                        "scheme '{}': direct transmission cannot assign relay power",
                        self.label
                    )));
                }
            }
            Protocol::Sr | Protocol::Sdfr(_) => {
                if self.power_relay == 0.0 {
                    return Err(Error::Config(format!(
                        "scheme '{}': cooperative protocol needs relay power",
                        self.label
                    )));
                }
            }
        }
        if let Protocol::Sdfr(SdfrMode::Threshold { gamma_t }) = self.protocol {
            if gamma_t < 0.0 || !gamma_t.is_finite() {
                return Err(Error::Config(format!(
                    "scheme '{}': threshold must be a finite nonnegative linear SNR, got {gamma_t}",
                    self.label
                )));
            }
        }
        if let RelayErrorKnowledge::Estimated { factor } = self.relay_error_knowledge {
            if factor <= 0.0 || !factor.is_finite() {
                return Err(Error::Config(format!(
                    "scheme '{}': misestimation factor must be positive, got {factor}",
                    self.label
                )));
            }
        }
        for (name, d) in [
            ("sd", self.geometry.lambda_sd),
            ("sm", self.geometry.lambda_sm),
            ("md", self.geometry.lambda_md),
        ] {
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::Config(format!(
                    "scheme '{}': {name} distance must be positive, got {d}",
                    self.label
                )));
            }
        }
        if self.geometry.eta < 0.0 || !self.geometry.eta.is_finite() {
            return Err(Error::Config(format!(
                "scheme '{}': path loss exponent must be nonnegative, got {}",
                self.label, self.geometry.eta
            )));
        }
        Ok(())
    }

    /// Profile of the direct source-destination link at source power.
    pub fn dt_profile(&self, noise: &LinkNoise) -> Result<LinkSnrProfile> {
        LinkSnrProfile::from_link(
            self.power_source,
            self.geometry.sd()?.mean_gain(),
            &noise.sd,
        )
    }

    /// Per-link SNR profiles at the actual per-link transmit powers.
    pub fn snr_profiles(&self, noise: &LinkNoise) -> Result<CoopSnrProfiles> {
        Ok(CoopSnrProfiles {
            sd: LinkSnrProfile::from_link(
                self.power_source,
                self.geometry.sd()?.mean_gain(),
                &noise.sd,
            )?,
            sm: LinkSnrProfile::from_link(
                self.power_source,
                self.geometry.sm()?.mean_gain(),
                &noise.sm,
            )?,
            md: LinkSnrProfile::from_link(
                self.power_relay,
                self.geometry.md()?.mean_gain(),
                &noise.md,
            )?,
        })
    }
}

fn reference_var(which: VarianceRef, noise: &NoiseParams) -> f64 {
    match which {
        VarianceRef::StateAveraged => noise.average_var(),
        VarianceRef::GoodState => noise.good_var,
    }
}

/// What the relay did with one frame.
#[derive(Debug, Clone)]
pub struct RelayDecision {
    /// Whether the second slot carries a transmission at all.
    pub forwarded: bool,
    /// The relay's hard bit decisions (possibly wrong; never masked).
    pub decoded_bits: Vec<u8>,
    /// Error probability the relay reports out-of-band, before the
    /// destination's knowledge model is applied.
    pub theta_reported: f64,
}

/// Relay-side processing: trellis detection of the source broadcast, hard
/// decision, and the forwarding choice. The relay always detects with the
/// trellis (MAP) receiver regardless of the destination's receiver family.
pub fn relay_process(
    y_sm: &[Complex64],
    link_sm: &LinkRealization,
    cfg: &SchemeConfig,
    noise_sm: &NoiseParams,
) -> Result<RelayDecision> {
    let post = map_detect(
        y_sm,
        link_sm.h,
        link_sm.power,
        noise_sm,
        cfg.modulation,
        None,
    )?;
    let decoded_bits = demap_bits(&post)?.hard_bits();
    let m = cfg.modulation.order();
    let sm_profile =
        LinkSnrProfile::from_link(link_sm.power, cfg.geometry.sm()?.mean_gain(), noise_sm)?;
    let (forwarded, theta_reported) = match cfg.protocol {
        Protocol::Dt => {
            return Err(Error::Config(
                "relay processing invoked for a direct transmission scheme".into(),
            ))
        }
        Protocol::Sr => (true, analytic::relay_ser(&sm_profile, m)?),
        Protocol::Sdfr(SdfrMode::Genie) => (true, 0.0),
        Protocol::Sdfr(SdfrMode::Threshold { gamma_t }) => {
            let var_ref = reference_var(cfg.threshold_variance_ref, noise_sm);
            let inst_snr = link_sm.power * link_sm.h.norm_sqr() / var_ref;
            let theta = if m == 2 {
                analytic::relay_ber_given_threshold(&sm_profile, gamma_t)?
            } else {
                // No conditional closed form is carried for order 4; the
                // relay reports its unconditioned SER instead.
                analytic::relay_ser(&sm_profile, m)?
            };
            (inst_snr > gamma_t, theta)
        }
    };
    Ok(RelayDecision {
        forwarded,
        decoded_bits,
        theta_reported,
    })
}

/// The destination's working value of the relay error probability.
fn destination_theta(cfg: &SchemeConfig, reported: f64, measured: Option<f64>) -> Result<f64> {
    let cap = (1.0 - 1.0 / cfg.modulation.order() as f64) - 1e-12;
    let theta = match cfg.relay_error_knowledge {
        RelayErrorKnowledge::Exact => reported,
        RelayErrorKnowledge::Estimated { factor } => reported * factor,
        RelayErrorKnowledge::Measured => measured.ok_or_else(|| {
            Error::Config(format!(
                "scheme '{}': measured relay error knowledge requires a calibration value",
                cfg.label
            ))
        })?,
        RelayErrorKnowledge::None => 0.0,
    };
    Ok(theta.clamp(0.0, cap))
}

/// Fuse per-link posteriors into the cooperative posterior, discounting the
/// relay branch by its symbol error probability `q_m`.
///
/// Row-wise in the log domain:
/// `coop(a) = sd(a) + lse[ ln(1-q) + md(a), ln(q/(M-1)) + lse_{b != a} md(b) ]`,
/// the exact per-symbol MAP fusion when relay errors hit the `M-1` wrong
/// symbols uniformly. `q_m = 0` reduces to adding the two log-posteriors;
/// for BPSK `q_m = 1/2` makes the relay branch vanish entirely.
pub fn combine_map(
    sd: &SymbolPosteriors,
    md: &SymbolPosteriors,
    q_m: f64,
) -> Result<SymbolPosteriors> {
    let active = vec![true; sd.len()];
    combine_map_masked(sd, md, q_m, &active)
}

/// [`combine_map`] restricted to positions where the relay actually
/// transmitted; elsewhere the source posterior passes through unchanged.
pub fn combine_map_masked(
    sd: &SymbolPosteriors,
    md: &SymbolPosteriors,
    q_m: f64,
    active: &[bool],
) -> Result<SymbolPosteriors> {
    let m = sd.order();
    if md.order() != m || md.len() != sd.len() || active.len() != sd.len() {
        return Err(Error::LengthMismatch(format!(
            "posterior frames disagree: sd {}x{}, md {}x{}, mask {}",
            sd.len(),
            m,
            md.len(),
            md.order(),
            active.len()
        )));
    }
    if !(0.0..1.0 - 1.0 / m as f64).contains(&q_m) {
        return Err(Error::InvalidParameter(format!(
            "relay error probability {q_m} outside [0, 1 - 1/{m})"
        )));
    }
    let ln_keep = (1.0 - q_m).ln();
    let ln_err = if q_m == 0.0 {
        f64::NEG_INFINITY
    } else {
        (q_m / (m as f64 - 1.0)).ln()
    };
    let mut scores = vec![0.0f64; sd.len() * m];
    for k in 0..sd.len() {
        let sd_row = sd.log_row(k);
        let out = &mut scores[k * m..(k + 1) * m];
        if !active[k] {
            out.copy_from_slice(sd_row);
            continue;
        }
        let md_row = md.log_row(k);
        for a in 0..m {
            if q_m == 0.0 {
                out[a] = sd_row[a] + md_row[a];
            } else {
                let mut wrong = f64::NEG_INFINITY;
                for (b, &v) in md_row.iter().enumerate() {
                    if b != a {
                        wrong = log_sum_exp2(wrong, v);
                    }
                }
                out[a] = sd_row[a] + log_sum_exp2(ln_keep + md_row[a], ln_err + wrong);
            }
        }
    }
    SymbolPosteriors::from_log_scores(m, scores)
}

/// Maximum-ratio combining of the two branches under a single assumed noise
/// variance per link, returning Gaussian posteriors of the combined
/// statistic. `active_md` masks symbols the relay did not transmit.
#[allow(clippy::too_many_arguments)]
pub fn combine_mrc(
    y_sd: &[Complex64],
    y_md: &[Complex64],
    h_sd: Complex64,
    h_md: Complex64,
    power_s: f64,
    power_m: f64,
    var_sd: f64,
    var_md: f64,
    modulation: Modulation,
    active_md: Option<&[bool]>,
) -> Result<SymbolPosteriors> {
    if y_md.len() != y_sd.len() {
        return Err(Error::LengthMismatch(format!(
            "branch frames disagree: {} vs {}",
            y_sd.len(),
            y_md.len()
        )));
    }
    if var_sd <= 0.0 || !var_sd.is_finite() || var_md <= 0.0 || !var_md.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "assumed noise variances must be positive, got ({var_sd}, {var_md})"
        )));
    }
    let m = modulation.order();
    let points = modulation.points();
    let w_sd = power_s.sqrt() * h_sd.conj();
    let w_md = power_m.sqrt() * h_md.conj();
    let gain_sd = power_s * h_sd.norm_sqr();
    let gain_md = power_m * h_md.norm_sqr();
    let mut scores = vec![0.0f64; y_sd.len() * m];
    for k in 0..y_sd.len() {
        let on = active_md.is_none_or(|a| a[k]);
        let (z, gain, var) = if on {
            (
                w_sd * y_sd[k] + w_md * y_md[k],
                gain_sd + gain_md,
                gain_sd * var_sd + gain_md * var_md,
            )
        } else {
            (w_sd * y_sd[k], gain_sd, gain_sd * var_sd)
        };
        for (x, point) in points.iter().enumerate() {
            let e = z - gain * point;
            scores[k * m + x] = -e.norm_sqr() / var;
        }
    }
    SymbolPosteriors::from_log_scores(m, scores)
}

/// MRC with the true per-symbol noise states revealed: each branch is
/// weighted by its instantaneous inverse noise variance, the receiver the
/// analytic lower bounds assume.
#[allow(clippy::too_many_arguments)]
pub fn combine_mrc_genie(
    y_sd: &[Complex64],
    y_md: &[Complex64],
    link_sd: &LinkRealization,
    link_md: &LinkRealization,
    noise_sd: &NoiseParams,
    noise_md: &NoiseParams,
    modulation: Modulation,
    active_md: Option<&[bool]>,
) -> Result<SymbolPosteriors> {
    if y_md.len() != y_sd.len() {
        return Err(Error::LengthMismatch(format!(
            "branch frames disagree: {} vs {}",
            y_sd.len(),
            y_md.len()
        )));
    }
    let m = modulation.order();
    let points = modulation.points();
    let w_sd = link_sd.power.sqrt() * link_sd.h.conj();
    let w_md = link_md.power.sqrt() * link_md.h.conj();
    let gain_sd = link_sd.power * link_sd.h.norm_sqr();
    let gain_md = link_md.power * link_md.h.norm_sqr();
    let mut scores = vec![0.0f64; y_sd.len() * m];
    for k in 0..y_sd.len() {
        let var_sd = noise_sd.var(link_sd.states[k]);
        let on = active_md.is_none_or(|a| a[k]);
        let (z, gain) = if on {
            let var_md = noise_md.var(link_md.states[k]);
            (
                w_sd * y_sd[k] / var_sd + w_md * y_md[k] / var_md,
                gain_sd / var_sd + gain_md / var_md,
            )
        } else {
            (w_sd * y_sd[k] / var_sd, gain_sd / var_sd)
        };
        // The combined statistic is Gaussian with mean gain*x and variance
        // equal to the gain itself under these weights.
        for (x, point) in points.iter().enumerate() {
            let e = z - gain * point;
            scores[k * m + x] = -e.norm_sqr() / gain;
        }
    }
    SymbolPosteriors::from_log_scores(m, scores)
}

/// Single-link detection with the configured receiver family.
fn detect_single_link(
    cfg: &SchemeConfig,
    y: &[Complex64],
    link: &LinkRealization,
    noise: &NoiseParams,
) -> Result<SymbolPosteriors> {
    match cfg.receiver {
        ReceiverKind::Map => map_detect(y, link.h, link.power, noise, cfg.modulation, None),
        ReceiverKind::Memoryless => {
            memoryless_detect(y, link.h, link.power, noise, cfg.modulation, None)
        }
        ReceiverKind::AwgnMrc => awgn_detect(
            y,
            link.h,
            link.power,
            reference_var(cfg.awgn_variance_ref, noise),
            cfg.modulation,
            None,
        ),
        ReceiverKind::GenieMrc => genie_detect(
            y,
            link.h,
            link.power,
            noise,
            &link.states,
            cfg.modulation,
            None,
        ),
    }
}

/// Simulate one direct-transmission frame and return the destination's
/// symbol posteriors.
pub fn detect_dt_frame(
    cfg: &SchemeConfig,
    noise: &LinkNoise,
    bits: &[u8],
    streams: &mut FrameStreams,
) -> Result<SymbolPosteriors> {
    cfg.validate()?;
    if cfg.protocol != Protocol::Dt {
        return Err(Error::Config(format!(
            "scheme '{}' is not direct transmission",
            cfg.label
        )));
    }
    let symbols = cfg.modulation.modulate(bits)?;
    let link = LinkRealization::sample(
        cfg.geometry.sd()?,
        cfg.power_source,
        &noise.sd,
        symbols.len(),
        &mut streams.sd,
    );
    let y = link.transmit(&symbols);
    detect_single_link(cfg, &y, &link, &noise.sd)
}

/// Direct transmission frame producing per-bit LLRs.
pub fn run_dt_frame(
    cfg: &SchemeConfig,
    noise: &LinkNoise,
    bits: &[u8],
    streams: &mut FrameStreams,
) -> Result<LlrFrame> {
    demap_bits(&detect_dt_frame(cfg, noise, bits, streams)?)
}

/// One cooperative frame's destination posteriors plus what the relay did.
#[derive(Debug, Clone)]
pub struct CoopFrameOutcome {
    pub posteriors: SymbolPosteriors,
    pub relay: RelayDecision,
}

/// Simulate one cooperative (SR or SDFR) frame.
///
/// All three link realizations draw from their own dedicated random
/// streams, and all are always drawn, so every protocol consumes identical
/// randomness: protocols can be compared frame by frame on shared seeds.
/// `measured_theta` supplies the calibration value when the scheme uses
/// measured relay-error knowledge.
pub fn detect_cooperative_frame(
    cfg: &SchemeConfig,
    noise: &LinkNoise,
    bits: &[u8],
    streams: &mut FrameStreams,
    measured_theta: Option<f64>,
) -> Result<CoopFrameOutcome> {
    cfg.validate()?;
    if cfg.protocol == Protocol::Dt {
        return Err(Error::Config(format!(
            "scheme '{}' is not cooperative",
            cfg.label
        )));
    }
    let modulation = cfg.modulation;
    let symbols = modulation.modulate(bits)?;
    let k_len = symbols.len();

    let link_sd = LinkRealization::sample(
        cfg.geometry.sd()?,
        cfg.power_source,
        &noise.sd,
        k_len,
        &mut streams.sd,
    );
    let link_sm = LinkRealization::sample(
        cfg.geometry.sm()?,
        cfg.power_source,
        &noise.sm,
        k_len,
        &mut streams.sm,
    );
    let link_md = LinkRealization::sample(
        cfg.geometry.md()?,
        cfg.power_relay,
        &noise.md,
        k_len,
        &mut streams.md,
    );

    let y_sd = link_sd.transmit(&symbols);
    let y_sm = link_sm.transmit(&symbols);
    let relay = relay_process(&y_sm, &link_sm, cfg, &noise.sm)?;

    // Silence mask for the second slot: per-symbol for the genie relay,
    // all-or-nothing for SR and threshold SDFR.
    let bps = modulation.bits_per_symbol();
    let active: Vec<bool> = match cfg.protocol {
        Protocol::Sdfr(SdfrMode::Genie) => (0..k_len)
            .map(|k| relay.decoded_bits[k * bps..(k + 1) * bps] == bits[k * bps..(k + 1) * bps])
            .collect(),
        _ => vec![relay.forwarded; k_len],
    };
    let relay_symbols = modulation.modulate(&relay.decoded_bits)?;
    let y_md = link_md.transmit_masked(&relay_symbols, &active);

    let any_active = active.iter().any(|&a| a);
    let posteriors = if !any_active {
        // Fully silent second slot: the destination falls back to plain
        // direct-transmission detection of the first slot.
        detect_single_link(cfg, &y_sd, &link_sd, &noise.sd)?
    } else {
        let theta = destination_theta(cfg, relay.theta_reported, measured_theta)?;
        match cfg.receiver {
            ReceiverKind::Map => {
                let post_sd =
                    map_detect(&y_sd, link_sd.h, link_sd.power, &noise.sd, modulation, None)?;
                let post_md = map_detect_masked(
                    &y_md,
                    link_md.h,
                    link_md.power,
                    &noise.md,
                    modulation,
                    None,
                    &active,
                )?;
                combine_map_masked(&post_sd, &post_md, theta, &active)?
            }
            ReceiverKind::Memoryless => {
                let post_sd = memoryless_detect(
                    &y_sd,
                    link_sd.h,
                    link_sd.power,
                    &noise.sd,
                    modulation,
                    None,
                )?;
                let post_md = memoryless_detect(
                    &y_md,
                    link_md.h,
                    link_md.power,
                    &noise.md,
                    modulation,
                    None,
                )?;
                combine_map_masked(&post_sd, &post_md, theta, &active)?
            }
            ReceiverKind::AwgnMrc => combine_mrc(
                &y_sd,
                &y_md,
                link_sd.h,
                link_md.h,
                cfg.power_source,
                cfg.power_relay,
                reference_var(cfg.awgn_variance_ref, &noise.sd),
                reference_var(cfg.awgn_variance_ref, &noise.md),
                modulation,
                Some(&active),
            )?,
            ReceiverKind::GenieMrc => combine_mrc_genie(
                &y_sd,
                &y_md,
                &link_sd,
                &link_md,
                &noise.sd,
                &noise.md,
                modulation,
                Some(&active),
            )?,
        }
    };
    Ok(CoopFrameOutcome { posteriors, relay })
}

/// Cooperative frame producing per-bit LLRs at the destination.
pub fn run_cooperative_frame(
    cfg: &SchemeConfig,
    noise: &LinkNoise,
    bits: &[u8],
    streams: &mut FrameStreams,
) -> Result<LlrFrame> {
    demap_bits(&detect_cooperative_frame(cfg, noise, bits, streams, None)?.posteriors)
}
