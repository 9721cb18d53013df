//! Command-line front end: run sweeps and figure presets, emit analytic
//! curves, or cross-check the trellis detector against brute-force
//! enumeration.
//!
//! Exit codes: 0 success, 1 configuration error (bad flags, config file,
//! or preset id), 2 runtime failure (simulation or output error).

use anyhow::Context;
use burstrelay::analytic;
use burstrelay::harness::{
    emit_csv, figure_recipe, fmt6, load_spec, run_experiment, ExperimentSpec,
};
use burstrelay::modem::Modulation;
use burstrelay::noise::NoiseParams;
use burstrelay::oracle::{enumerate_posteriors, MAX_ENUMERATION_LEN};
use burstrelay::relaying::{LinkNoise, Protocol, SchemeConfig, SdfrMode};
use burstrelay::{detector, link::LinkGeometry, link::LinkRealization};
use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "burstrelay",
    about = "Monte Carlo BER curves for cooperative relaying in bursty impulsive noise",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output CSV path override.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Shrink full-scale presets for a laptop-sized run.
    #[arg(long, global = true)]
    desk_scale: bool,
    /// Worker thread count (default: one per logical CPU).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Early-stop bit-error target override.
    #[arg(long, global = true)]
    min_errors: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML config file.
    Sweep {
        /// Path to the experiment config.
        config: PathBuf,
    },
    /// Run a named figure preset (fig3, fig4, fig5, fig8).
    Figure {
        /// Preset id.
        id: String,
    },
    /// Emit the analytic curves of a preset's parameter set (no simulation).
    Analytic {
        /// Preset id (fig3, fig4, fig5, fig8).
        id: String,
    },
    /// Cross-check the trellis detector against exhaustive state
    /// enumeration on random short frames.
    Oracle {
        /// Number of random frames to check.
        #[arg(long, default_value_t = 200)]
        frames: usize,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        let code = match err.downcast_ref::<burstrelay::Error>() {
            Some(burstrelay::Error::Config(_)) | Some(burstrelay::Error::InvalidParameter(_)) => 1,
            _ => 2,
        };
        std::process::exit(code);
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(burstrelay::Error::Config("worker count must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("setting up the worker pool")?;
    }
    match &cli.command {
        Command::Sweep { config } => {
            let spec = load_spec(config)?;
            run_sweep(&cli, spec)
        }
        Command::Figure { id } => {
            let spec = figure_recipe(id, cli.desk_scale)?;
            run_sweep(&cli, spec)
        }
        Command::Analytic { id } => run_analytic(&cli, id),
        Command::Oracle { frames } => run_oracle(&cli, *frames),
    }
}

fn run_sweep(cli: &Cli, mut spec: ExperimentSpec) -> anyhow::Result<()> {
    if let Some(seed) = cli.seed {
        spec.master_seed = seed;
    }
    if let Some(min_errors) = cli.min_errors {
        spec.stop.min_errors = min_errors;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| spec.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", spec.label)));
    let records = run_experiment(&spec)?;
    emit_csv(&records, &out)?;
    println!(
        "{}: wrote {} records to {}",
        spec.label,
        records.len(),
        out.display()
    );
    Ok(())
}

/// Analytic curve values for one scheme at one SNR point, labeled by the
/// scheme and the prediction it instantiates.
fn analytic_rows(
    scheme: &SchemeConfig,
    noise: &LinkNoise,
    snr_db: f64,
) -> anyhow::Result<Vec<(f64, String, f64)>> {
    let m = scheme.modulation.order();
    let mut rows = Vec::new();
    match scheme.protocol {
        Protocol::Dt => {
            let profile = scheme.dt_profile(noise)?;
            if m == 2 {
                rows.push((snr_db, "dt-ber".into(), analytic::dt_ber_bpsk(&profile)));
            } else {
                rows.push((snr_db, "dt-ser".into(), analytic::dt_ser_mpsk(&profile, m)?));
            }
        }
        Protocol::Sr => {
            let profiles = scheme.snr_profiles(noise)?;
            let label = if m == 2 { "sr-ber" } else { "sr-ser" };
            rows.push((snr_db, label.into(), analytic::sr_ber(&profiles, m, 1.0)?));
        }
        Protocol::Sdfr(SdfrMode::Genie) => {
            let profiles = scheme.snr_profiles(noise)?;
            let label = if m == 2 {
                "sdfr-lower-ber"
            } else {
                "sdfr-lower-ser"
            };
            rows.push((
                snr_db,
                label.into(),
                analytic::sdfr_ber_lower(&profiles, m)?,
            ));
        }
        Protocol::Sdfr(SdfrMode::Threshold { gamma_t }) => {
            let profiles = scheme.snr_profiles(noise)?;
            rows.push((
                snr_db,
                format!("{}-ber", scheme.label),
                analytic::sdfr_ber_threshold(&profiles, gamma_t, m)?,
            ));
        }
    }
    Ok(rows)
}

fn run_analytic(cli: &Cli, id: &str) -> anyhow::Result<()> {
    let spec = figure_recipe(id, cli.desk_scale)?;
    let mut rows: Vec<(f64, String, f64)> = Vec::new();
    // One row per distinct prediction; schemes differing only in receiver
    // share a curve, so deduplicate by (protocol, label).
    for &snr_db in &spec.snr_grid_db {
        let total = spec.schemes[0].total_power();
        let sigma2 = total / 10f64.powf(snr_db / 10.0);
        let noise = LinkNoise {
            sd: spec.noise_sd.with_good_var(sigma2)?,
            sm: spec.noise_sm.with_good_var(sigma2)?,
            md: spec.noise_md.with_good_var(sigma2)?,
        };
        let mut seen: Vec<String> = Vec::new();
        for scheme in &spec.schemes {
            for row in analytic_rows(scheme, &noise, snr_db)? {
                if !seen.contains(&row.1) {
                    seen.push(row.1.clone());
                    rows.push(row);
                }
            }
        }
    }
    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{id}-analytic.csv")));
    let mut text = String::from("snr_db,curve,value\n");
    for (snr_db, curve, value) in &rows {
        text.push_str(&format!("{},{},{}\n", fmt6(*snr_db), curve, fmt6(*value)));
    }
    std::fs::write(&out, text).map_err(|source| burstrelay::Error::Io {
        path: out.display().to_string(),
        source,
    })?;
    println!(
        "{id}: wrote {} analytic rows to {}",
        rows.len(),
        out.display()
    );
    Ok(())
}

fn run_oracle(cli: &Cli, frames: usize) -> anyhow::Result<()> {
    if frames == 0 {
        return Err(burstrelay::Error::Config("oracle needs at least one frame".into()).into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed.unwrap_or(1));
    let mut worst: f64 = 0.0;
    for _ in 0..frames {
        let k = rng.gen_range(1..=MAX_ENUMERATION_LEN.min(8));
        let p_bad = rng.gen_range(0.01..0.5);
        let memory = rng.gen_range(1.0..200.0);
        let ratio = rng.gen_range(1.0..200.0);
        let good_var = 10f64.powf(rng.gen_range(-2.0..0.5));
        let params = NoiseParams::new(p_bad, memory, ratio, good_var)?;
        let modulation = if rng.gen_bool(0.5) {
            Modulation::Bpsk
        } else {
            Modulation::Qpsk
        };
        let bits: Vec<u8> = (0..k * modulation.bits_per_symbol())
            .map(|_| rng.gen_range(0..2u8))
            .collect();
        let symbols = modulation.modulate(&bits)?;
        let geometry = LinkGeometry::new(rng.gen_range(0.3..1.5), 2.0)?;
        let link = LinkRealization::sample(geometry, rng.gen_range(0.2..1.0), &params, k, &mut rng);
        let y = link.transmit(&symbols);
        let fast = detector::map_detect(&y, link.h, link.power, &params, modulation, None)?;
        let slow = enumerate_posteriors(&y, link.h, link.power, &params, modulation, None, None)?;
        for i in 0..k {
            for (a, b) in fast.row(i).iter().zip(slow.row(i)) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    let pass = worst < 1e-9;
    println!(
        "oracle: {frames} frames checked, worst posterior deviation {} -> {}",
        fmt6(worst),
        if pass { "PASS" } else { "FAIL" }
    );
    if !pass {
        return Err(burstrelay::Error::InvalidParameter(format!(
            "trellis detector deviates from enumeration by {worst}"
        ))
        .into());
    }
    Ok(())
}
