//! Monte Carlo engine: sweeps SNR grids over configured schemes, runs
//! frames in parallel on deterministic per-frame streams, accumulates bit
//! error counts, and emits CSV.
//!
//! The SNR axis is anchored to the source-destination link at unit
//! distance: a grid point `snr_db` fixes the background noise power to
//! `sigma_G^2 = P_T / 10^(snr_db/10)` where `P_T` is the common total power
//! budget of all schemes (the full budget at the source for DT, split
//! across the two slots for cooperative schemes). All links share the same
//! background noise power.
//!
//! Reproducibility: every frame draws from streams derived from
//! `(master_seed, scheme index, SNR index, frame counter)`, frames are
//! dispatched in fixed batches of [`BATCH_FRAMES`], and stop rules are
//! evaluated only at batch boundaries, so error counts are bit-identical
//! for any worker count.

use crate::link::LinkRealization;
use crate::modem::demap_bits;
use crate::modem::Modulation;
use crate::noise::NoiseShape;
use crate::relaying::{
    detect_cooperative_frame, relay_process, run_dt_frame, LinkNoise, Protocol, ReceiverKind,
    RelayErrorKnowledge, SchemeConfig, SdfrMode,
};
use crate::streams::{FrameStreams, LaneId};
use crate::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;
use std::io::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

/// Frames dispatched per parallel batch. Fixed so that early-stop
/// decisions, taken between batches, do not depend on the worker count.
pub const BATCH_FRAMES: u64 = 64;

/// Frame count of the calibration pass that measures the relay error rate
/// for schemes using measured relay-error knowledge.
pub const CALIBRATION_FRAMES: u64 = 64;

/// Frame index base for calibration streams, far above any main-run frame
/// counter so the two never share randomness.
const CALIBRATION_FRAME_BASE: u64 = 1 << 62;

/// Divisor the desk-scale flag applies to the frame length and the bit
/// budget of a full-scale recipe.
pub const DESK_SCALE_DIVISOR: usize = 100;

/// Early-stop rule for one (scheme, SNR) point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    /// Stop once this many bit errors are seen.
    pub min_errors: u64,
    /// Hard cap on simulated bits.
    pub max_bits: u64,
}

impl Default for StopRule {
    fn default() -> StopRule {
        StopRule {
            min_errors: 200,
            max_bits: 200_000_000,
        }
    }
}

/// A full sweep description: which schemes, over which SNR grid, with
/// which noise shapes, frame sizing, stop rule, and seed.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub label: String,
    /// Strictly increasing SNR grid in dB.
    pub snr_grid_db: Vec<f64>,
    /// Frame length in symbols.
    pub frame_symbols: usize,
    /// Cap on frames per (scheme, SNR) point; zero runs nothing.
    pub max_frames: u64,
    pub stop: StopRule,
    pub master_seed: u64,
    /// Noise shapes per link; the background variance is set per SNR point.
    pub noise_sd: NoiseShape,
    pub noise_sm: NoiseShape,
    pub noise_md: NoiseShape,
    pub schemes: Vec<SchemeConfig>,
    /// Default CSV destination, overridable by the caller.
    pub output: Option<String>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.snr_grid_db.is_empty() {
            return Err(Error::Config("SNR grid is empty".into()));
        }
        if self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::Config("SNR grid contains a non-finite value".into()));
        }
        for w in self.snr_grid_db.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Config(format!(
                    "SNR grid must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if self.frame_symbols == 0 {
            return Err(Error::Config(
                "frame length must be at least 1 symbol".into(),
            ));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("no schemes configured".into()));
        }
        for scheme in &self.schemes {
            scheme.validate()?;
        }
        let p0 = self.schemes[0].total_power();
        for scheme in &self.schemes[1..] {
            if (scheme.total_power() - p0).abs() > 1e-9 {
                return Err(Error::Config(format!(
                    "schemes must share one total power budget for a common SNR axis: \
                     '{}' spends {} but '{}' spends {}",
                    self.schemes[0].label,
                    p0,
                    scheme.label,
                    scheme.total_power()
                )));
            }
        }
        if self.stop.min_errors == 0 {
            return Err(Error::Config(
                "stop rule needs a positive bit-error target".into(),
            ));
        }
        if self.stop.max_bits == 0 && self.max_frames > 0 {
            return Err(Error::Config(
                "stop rule allows no bits but frames are requested".into(),
            ));
        }
        // Shapes must be instantiable at some variance; probe with 1.0.
        self.noise_sd.with_good_var(1.0)?;
        self.noise_sm.with_good_var(1.0)?;
        self.noise_md.with_good_var(1.0)?;
        Ok(())
    }

    fn link_noise_at(&self, snr_db: f64) -> Result<LinkNoise> {
        let total = self.schemes[0].total_power();
        let sigma2 = total / 10f64.powf(snr_db / 10.0);
        Ok(LinkNoise {
            sd: self.noise_sd.with_good_var(sigma2)?,
            sm: self.noise_sm.with_good_var(sigma2)?,
            md: self.noise_md.with_good_var(sigma2)?,
        })
    }
}

/// Accumulated result of one (scheme, SNR) point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub snr_db: f64,
    pub scheme: String,
    pub receiver: String,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    /// Binomial standard error `sqrt(ber(1-ber)/bits)`. Understates the
    /// true uncertainty when frames fade as blocks; see the README.
    pub stderr: f64,
    pub seconds: f64,
}

pub fn receiver_id(receiver: ReceiverKind) -> &'static str {
    match receiver {
        ReceiverKind::Map => "map",
        ReceiverKind::Memoryless => "memoryless",
        ReceiverKind::AwgnMrc => "awgn-mrc",
        ReceiverKind::GenieMrc => "genie-mrc",
    }
}

/// Uniform random information bits for one frame.
pub fn draw_bits(len: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
    (0..len).map(|_| rng.gen_range(0..2u8)).collect()
}

fn simulate_frame(
    scheme: &SchemeConfig,
    noise: &LinkNoise,
    frame_symbols: usize,
    master_seed: u64,
    lane: LaneId,
    frame: u64,
    measured_theta: Option<f64>,
) -> Result<(u64, u64)> {
    let mut streams = FrameStreams::derive(master_seed, lane, frame);
    let n_bits = frame_symbols * scheme.modulation.bits_per_symbol();
    let bits = draw_bits(n_bits, &mut streams.bits);
    let llrs = match scheme.protocol {
        Protocol::Dt => run_dt_frame(scheme, noise, &bits, &mut streams)?,
        _ => demap_bits(
            &detect_cooperative_frame(scheme, noise, &bits, &mut streams, measured_theta)?
                .posteriors,
        )?,
    };
    let errors = llrs
        .hard_bits()
        .iter()
        .zip(&bits)
        .filter(|(a, b)| a != b)
        .count() as u64;
    Ok((n_bits as u64, errors))
}

#[allow(clippy::too_many_arguments)]
fn guarded_frame(
    scheme: &SchemeConfig,
    noise: &LinkNoise,
    frame_symbols: usize,
    master_seed: u64,
    lane: LaneId,
    snr_db: f64,
    frame: u64,
    measured_theta: Option<f64>,
) -> Result<(u64, u64)> {
    catch_unwind(AssertUnwindSafe(|| {
        simulate_frame(
            scheme,
            noise,
            frame_symbols,
            master_seed,
            lane,
            frame,
            measured_theta,
        )
    }))
    .unwrap_or_else(|payload| {
        let message = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "opaque panic payload".into());
        Err(Error::FramePanic {
            scheme: scheme.label.clone(),
            snr_db,
            frame,
            seed: master_seed,
            message,
        })
    })
}

/// Measure the relay's symbol error rate for one (scheme, SNR) point on a
/// dedicated calibration stream range.
fn calibrate_relay_error(
    scheme: &SchemeConfig,
    noise: &LinkNoise,
    frame_symbols: usize,
    master_seed: u64,
    lane: LaneId,
) -> Result<f64> {
    let bps = scheme.modulation.bits_per_symbol();
    let mut symbol_errors = 0u64;
    let mut symbols = 0u64;
    for i in 0..CALIBRATION_FRAMES {
        let mut streams = FrameStreams::derive(master_seed, lane, CALIBRATION_FRAME_BASE + i);
        let bits = draw_bits(frame_symbols * bps, &mut streams.bits);
        let src = scheme.modulation.modulate(&bits)?;
        let link_sm = LinkRealization::sample(
            scheme.geometry.sm()?,
            scheme.power_source,
            &noise.sm,
            src.len(),
            &mut streams.sm,
        );
        let y_sm = link_sm.transmit(&src);
        let relay = relay_process(&y_sm, &link_sm, scheme, &noise.sm)?;
        symbol_errors += (0..frame_symbols)
            .filter(|&k| relay.decoded_bits[k * bps..(k + 1) * bps] != bits[k * bps..(k + 1) * bps])
            .count() as u64;
        symbols += frame_symbols as u64;
    }
    let cap = (1.0 - 1.0 / scheme.modulation.order() as f64) - 1e-12;
    Ok((symbol_errors as f64 / symbols as f64).clamp(0.0, cap))
}

/// Run the full sweep. Deterministic given the master seed, for any worker
/// count; per-frame panics are surfaced with the coordinates needed to
/// replay the offending frame.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<BerRecord>> {
    spec.validate()?;
    let mut records = Vec::new();
    if spec.max_frames == 0 {
        return Ok(records);
    }
    for (scheme_idx, scheme) in spec.schemes.iter().enumerate() {
        for (snr_idx, &snr_db) in spec.snr_grid_db.iter().enumerate() {
            let lane = LaneId {
                scheme_idx: scheme_idx as u32,
                snr_idx: snr_idx as u32,
            };
            let noise = spec.link_noise_at(snr_db)?;
            let needs_calibration = scheme.protocol != Protocol::Dt
                && scheme.relay_error_knowledge == RelayErrorKnowledge::Measured;
            let measured_theta = if needs_calibration {
                Some(calibrate_relay_error(
                    scheme,
                    &noise,
                    spec.frame_symbols,
                    spec.master_seed,
                    lane,
                )?)
            } else {
                None
            };
            let start = Instant::now();
            let mut bits = 0u64;
            let mut errors = 0u64;
            let mut frame = 0u64;
            while frame < spec.max_frames
                && bits < spec.stop.max_bits
                && errors < spec.stop.min_errors
            {
                let batch_end = spec.max_frames.min(frame + BATCH_FRAMES);
                let outcomes: Vec<Result<(u64, u64)>> = (frame..batch_end)
                    .into_par_iter()
                    .map(|f| {
                        guarded_frame(
                            scheme,
                            &noise,
                            spec.frame_symbols,
                            spec.master_seed,
                            lane,
                            snr_db,
                            f,
                            measured_theta,
                        )
                    })
                    .collect();
                for outcome in outcomes {
                    let (b, e) = outcome?;
                    bits += b;
                    errors += e;
                }
                frame = batch_end;
            }
            let ber = if bits > 0 {
                errors as f64 / bits as f64
            } else {
                0.0
            };
            let stderr = if bits > 0 {
                (ber * (1.0 - ber) / bits as f64).sqrt()
            } else {
                0.0
            };
            records.push(BerRecord {
                snr_db,
                scheme: scheme.label.clone(),
                receiver: receiver_id(scheme.receiver).to_string(),
                bits,
                errors,
                ber,
                stderr,
                seconds: start.elapsed().as_secs_f64(),
            });
        }
    }
    Ok(records)
}

/// Format a value in plain decimal with six significant digits, falling
/// back to scientific notation outside a readable magnitude window.
/// Deterministic: a pure function of the value.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            let t = s.trim_end_matches('0').trim_end_matches('.');
            t.to_string()
        } else {
            s
        }
    } else {
        format!("{x:.5e}")
    }
}

/// Render records as CSV text: a header plus one row per record, LF line
/// endings, floats at six significant digits.
pub fn render_csv(records: &[BerRecord]) -> String {
    let mut out = String::from("snr_db,protocol,receiver,bits,errors,ber,stderr,seconds\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt6(r.snr_db),
            r.scheme,
            r.receiver,
            r.bits,
            r.errors,
            fmt6(r.ber),
            fmt6(r.stderr),
            fmt6(r.seconds),
        ));
    }
    out
}

/// Write records to a CSV file.
pub fn emit_csv(records: &[BerRecord], path: &Path) -> Result<()> {
    let text = render_csv(records);
    let wrap = |source: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let mut file = std::fs::File::create(path).map_err(wrap)?;
    file.write_all(text.as_bytes()).map_err(wrap)?;
    Ok(())
}

fn preset_noise_shape(memory: f64, power_ratio: f64) -> NoiseShape {
    NoiseShape {
        p_bad: 0.1,
        memory,
        power_ratio,
    }
}

fn preset_grid() -> Vec<f64> {
    (0..=15).map(|i| 2.0 * i as f64).collect()
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Build the experiment spec for one of the uncoded figure presets.
/// `desk_scale` divides the frame length and bit budget by
/// [`DESK_SCALE_DIVISOR`] for laptop-sized runs; full scale keeps
/// 64,800 information bits per frame and 2,000 frames.
pub fn figure_recipe(name: &str, desk_scale: bool) -> Result<ExperimentSpec> {
    let (noise, schemes, modulation) = match name {
        "fig3" => (
            preset_noise_shape(100.0, 100.0),
            fig3_schemes(Modulation::Bpsk),
            Modulation::Bpsk,
        ),
        "fig4" => (
            preset_noise_shape(100.0, 100.0),
            fig4_schemes(),
            Modulation::Bpsk,
        ),
        "fig5" => (
            preset_noise_shape(10.0, 10.0),
            fig5_schemes(),
            Modulation::Bpsk,
        ),
        "fig8" => (
            preset_noise_shape(100.0, 100.0),
            fig3_schemes(Modulation::Qpsk),
            Modulation::Qpsk,
        ),
        "fig6" | "fig7" | "fig9" | "fig10" => {
            return Err(Error::Config(format!(
                "{name} shows coded (LDPC) results, which are out of scope; \
                 uncoded presets are fig3, fig4, fig5, fig8"
            )))
        }
        other => {
            return Err(Error::Config(format!(
                "unknown figure id '{other}'; known presets are fig3, fig4, fig5, fig8"
            )))
        }
    };
    let info_bits = 64_800usize;
    let mut frame_symbols = info_bits / modulation.bits_per_symbol();
    let mut stop = StopRule::default();
    if desk_scale {
        frame_symbols /= DESK_SCALE_DIVISOR;
        stop.max_bits /= DESK_SCALE_DIVISOR as u64;
    }
    Ok(ExperimentSpec {
        label: name.to_string(),
        snr_grid_db: preset_grid(),
        frame_symbols,
        max_frames: 2000,
        stop,
        master_seed: 1,
        noise_sd: noise,
        noise_sm: noise,
        noise_md: noise,
        schemes,
        output: Some(format!("{name}.csv")),
    })
}

fn fig3_schemes(modulation: Modulation) -> Vec<SchemeConfig> {
    let genie = Protocol::Sdfr(SdfrMode::Genie);
    vec![
        SchemeConfig::dt("dt", ReceiverKind::Map, modulation, 1.0),
        SchemeConfig::cooperative("sdfr-genie", genie, ReceiverKind::Map, modulation, 0.5, 0.5),
        SchemeConfig::cooperative(
            "sdfr-genie",
            genie,
            ReceiverKind::Memoryless,
            modulation,
            0.5,
            0.5,
        ),
        SchemeConfig::cooperative(
            "sdfr-genie",
            genie,
            ReceiverKind::AwgnMrc,
            modulation,
            0.5,
            0.5,
        ),
    ]
}

fn fig4_schemes() -> Vec<SchemeConfig> {
    let m = Modulation::Bpsk;
    let mut no_theta =
        SchemeConfig::cooperative("sr-no-theta", Protocol::Sr, ReceiverKind::Map, m, 0.5, 0.5);
    no_theta.relay_error_knowledge = RelayErrorKnowledge::None;
    vec![
        SchemeConfig::dt("dt", ReceiverKind::Map, m, 1.0),
        SchemeConfig::cooperative("sr-theta", Protocol::Sr, ReceiverKind::Map, m, 0.5, 0.5),
        no_theta,
    ]
}

fn fig5_schemes() -> Vec<SchemeConfig> {
    let m = Modulation::Bpsk;
    let mut schemes = vec![SchemeConfig::cooperative(
        "sr-theta",
        Protocol::Sr,
        ReceiverKind::Map,
        m,
        0.5,
        0.5,
    )];
    for t_db in [0.0, 5.0, 10.0] {
        schemes.push(SchemeConfig::cooperative(
            &format!("sdfr-thr{}db", t_db as i64),
            Protocol::Sdfr(SdfrMode::Threshold {
                gamma_t: db_to_linear(t_db),
            }),
            ReceiverKind::Map,
            m,
            0.5,
            0.5,
        ));
    }
    schemes
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseSection {
    p_bad: f64,
    memory: f64,
    power_ratio: f64,
}

impl NoiseSection {
    fn shape(&self) -> NoiseShape {
        NoiseShape {
            p_bad: self.p_bad,
            memory: self.memory,
            power_ratio: self.power_ratio,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeSection {
    label: String,
    protocol: String,
    receiver: String,
    #[serde(default = "default_modulation")]
    modulation: String,
    power_source: f64,
    #[serde(default)]
    power_relay: f64,
    #[serde(default = "default_knowledge")]
    relay_error_knowledge: String,
    #[serde(default)]
    estimated_factor: Option<f64>,
    #[serde(default)]
    threshold_db: Option<f64>,
    #[serde(default = "default_awgn_ref")]
    awgn_variance_ref: String,
    #[serde(default = "default_threshold_ref")]
    threshold_snr_ref: String,
    #[serde(default)]
    lambda_sd: Option<f64>,
    #[serde(default)]
    lambda_sm: Option<f64>,
    #[serde(default)]
    lambda_md: Option<f64>,
    #[serde(default)]
    eta: Option<f64>,
}

fn default_modulation() -> String {
    "bpsk".into()
}
fn default_knowledge() -> String {
    "exact".into()
}
fn default_awgn_ref() -> String {
    "state-averaged".into()
}
fn default_threshold_ref() -> String {
    "good-state".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSpec {
    #[serde(default)]
    label: Option<String>,
    snr_db: Vec<f64>,
    frame_symbols: usize,
    max_frames: u64,
    #[serde(default)]
    master_seed: Option<u64>,
    #[serde(default)]
    min_errors: Option<u64>,
    #[serde(default)]
    max_bits: Option<u64>,
    #[serde(default)]
    output: Option<String>,
    noise: NoiseSection,
    #[serde(default)]
    noise_sd: Option<NoiseSection>,
    #[serde(default)]
    noise_sm: Option<NoiseSection>,
    #[serde(default)]
    noise_md: Option<NoiseSection>,
    scheme: Vec<SchemeSection>,
}

fn variance_ref_from(name: &str) -> Result<crate::relaying::VarianceRef> {
    use crate::relaying::VarianceRef;
    match name {
        "state-averaged" => Ok(VarianceRef::StateAveraged),
        "good-state" => Ok(VarianceRef::GoodState),
        other => Err(Error::Config(format!(
            "unknown variance reference '{other}' (expected state-averaged or good-state)"
        ))),
    }
}

impl SchemeSection {
    fn build(&self) -> Result<SchemeConfig> {
        let modulation = match self.modulation.as_str() {
            "bpsk" => Modulation::Bpsk,
            "qpsk" => Modulation::Qpsk,
            other => {
                return Err(Error::Config(format!(
                    "scheme '{}': unknown modulation '{other}' (expected bpsk or qpsk)",
                    self.label
                )))
            }
        };
        let protocol = match self.protocol.as_str() {
            "dt" => Protocol::Dt,
            "sr" => Protocol::Sr,
            "sdfr-genie" => Protocol::Sdfr(SdfrMode::Genie),
            "sdfr-threshold" => {
                let t_db = self.threshold_db.ok_or_else(|| {
                    Error::Config(format!(
                        "scheme '{}': sdfr-threshold requires threshold_db",
                        self.label
                    ))
                })?;
                Protocol::Sdfr(SdfrMode::Threshold {
                    gamma_t: db_to_linear(t_db),
                })
            }
            other => {
                return Err(Error::Config(format!(
                    "scheme '{}': unknown protocol '{other}' \
                     (expected dt, sr, sdfr-genie, or sdfr-threshold)",
                    self.label
                )))
            }
        };
        let receiver = match self.receiver.as_str() {
            "map" => ReceiverKind::Map,
            "memoryless" => ReceiverKind::Memoryless,
            "awgn-mrc" => ReceiverKind::AwgnMrc,
            "genie-mrc" => ReceiverKind::GenieMrc,
            other => {
                return Err(Error::Config(format!(
                    "scheme '{}': unknown receiver '{other}' \
                     (expected map, memoryless, awgn-mrc, or genie-mrc)",
                    self.label
                )))
            }
        };
        let relay_error_knowledge = match self.relay_error_knowledge.as_str() {
            "exact" => RelayErrorKnowledge::Exact,
            "none" => RelayErrorKnowledge::None,
            "measured" => RelayErrorKnowledge::Measured,
            "estimated" => {
                let factor = self.estimated_factor.ok_or_else(|| {
                    Error::Config(format!(
                        "scheme '{}': estimated knowledge requires estimated_factor",
                        self.label
                    ))
                })?;
                RelayErrorKnowledge::Estimated { factor }
            }
            other => {
                return Err(Error::Config(format!(
                    "scheme '{}': unknown relay_error_knowledge '{other}' \
                     (expected exact, none, measured, or estimated)",
                    self.label
                )))
            }
        };
        let mut cfg = SchemeConfig {
            label: self.label.clone(),
            protocol,
            receiver,
            modulation,
            geometry: Default::default(),
            power_source: self.power_source,
            power_relay: self.power_relay,
            relay_error_knowledge,
            awgn_variance_ref: variance_ref_from(&self.awgn_variance_ref)?,
            threshold_variance_ref: variance_ref_from(&self.threshold_snr_ref)?,
        };
        if let Some(v) = self.lambda_sd {
            cfg.geometry.lambda_sd = v;
        }
        if let Some(v) = self.lambda_sm {
            cfg.geometry.lambda_sm = v;
        }
        if let Some(v) = self.lambda_md {
            cfg.geometry.lambda_md = v;
        }
        if let Some(v) = self.eta {
            cfg.geometry.eta = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parse an experiment spec from TOML text. The schema is documented in
/// the README: top-level sweep keys, a `[noise]` section (with optional
/// `[noise_sd]`, `[noise_sm]`, `[noise_md]` overrides), and one
/// `[[scheme]]` section per curve.
pub fn parse_spec(text: &str) -> Result<ExperimentSpec> {
    let file: FileSpec =
        toml::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))?;
    let base = file.noise.shape();
    let spec = ExperimentSpec {
        label: file.label.unwrap_or_else(|| "sweep".into()),
        snr_grid_db: file.snr_db,
        frame_symbols: file.frame_symbols,
        max_frames: file.max_frames,
        stop: StopRule {
            min_errors: file.min_errors.unwrap_or(StopRule::default().min_errors),
            max_bits: file.max_bits.unwrap_or(StopRule::default().max_bits),
        },
        master_seed: file.master_seed.unwrap_or(1),
        noise_sd: file.noise_sd.map_or(base, |n| n.shape()),
        noise_sm: file.noise_sm.map_or(base, |n| n.shape()),
        noise_md: file.noise_md.map_or(base, |n| n.shape()),
        schemes: file
            .scheme
            .iter()
            .map(|s| s.build())
            .collect::<Result<Vec<_>>>()?,
        output: file.output,
    };
    spec.validate()?;
    Ok(spec)
}

/// Load an experiment spec from a TOML file.
pub fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec(&text)
}
