//! Command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::bench::{fit_exponent, sweep, Axis, Geometry};
use crate::detectors::{detect, noise_spatial_glr, noise_temporal_glr, wilks_normalize, Decision, DetectorKind};
use crate::error::{Error, Result};
use crate::estimation::{sample_block_covariance, NoiseStructureCase};
use crate::iq::{read_csv_samples, read_iq, write_csv_samples, write_iq, IqFileHeader, SampleFormat};
use crate::montecarlo::{run_configured, ExperimentConfig};
use crate::presets;
use crate::signal::{apply_channel, gen_noise, gen_signal, mix_at_snr, ChannelSpec, NoiseSpec, Pulse, SignalSpec, SpatialNoise, TemporalNoise};
use crate::stats::{chi2_quantile, chi2_sf, DofCatalog};
use crate::transform::FrequencyTransform;

pub const EXIT_H0: i32 = 0;
pub const EXIT_H1: i32 = 10;
pub const EXIT_ERROR: i32 = 2;

const EXPERIMENT_HELP: &str = "\
Output files (written to --out):
  roc.csv    detector,pfa,pd                         (roc)
  auc.csv    detector,lambda,mu,auc,std_err          (roc, aur_grid)
  cdf.csv    detector,dof,value,empirical_cdf,chi2_cdf  (null_cdf)
  sweep.csv  sweep_param,sweep_value,detector,pfa,pd (robustness, snr_sweep)";

#[derive(Debug, Parser)]
#[command(name = "cyclodetect", version, about = "Detect cyclostationary signals in structured Gaussian noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a detector on an IQ file. Exit code 0 = H0, 10 = H1, 2 = error.
    Detect(DetectArgs),
    /// Run a Monte Carlo experiment from a JSON config or a bundled preset.
    #[command(after_help = EXPERIMENT_HELP)]
    Experiment(ExperimentArgs),
    /// Test noise-only samples for temporal whiteness and spatial correlation.
    Characterize(CharacterizeArgs),
    /// Time pipeline stages and fit scaling exponents.
    Bench(BenchArgs),
    /// Convert between CSV samples and the IQ format (direction from the input extension).
    Convert(ConvertArgs),
    /// Write a synthetic IQ file.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    pub file: PathBuf,
    /// Noise structure assumed under H0.
    #[arg(long, default_value = "white-correlated")]
    pub case: NoiseStructureCase,
    /// glrt, frob-sum or frob-avg. Defaults to frob-avg for white cases and frob-sum otherwise.
    #[arg(long)]
    pub detector: Option<DetectorKind>,
    #[arg(long, default_value_t = 0.01)]
    pub pfa: f64,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON experiment config.
    pub config: Option<PathBuf>,
    /// Bundled preset instead of a config file (fig2 … fig8).
    #[arg(long, conflicts_with = "config")]
    pub preset: Option<String>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Override the trial count.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Override the root seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CharacterizeArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    pub pfa: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Parameter to sweep: l, p, n or m.
    #[arg(long, default_value = "n")]
    pub axis: Axis,
    #[arg(long, value_delimiter = ',', default_value = "16,32,64,128,256")]
    pub values: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    pub l: usize,
    #[arg(long, default_value_t = 4)]
    pub p: usize,
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    #[arg(long, default_value_t = 32)]
    pub m: usize,
    #[arg(long, default_value_t = 5)]
    pub rounds: usize,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    /// Required for CSV input: cycle period, blocks and snapshots.
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long, default_value = "complex64")]
    pub format: SampleFormat,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    pub output: PathBuf,
    #[arg(long)]
    pub l: u32,
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub m: u32,
    /// Signal-to-noise ratio in dB; omit for noise only.
    #[arg(long, allow_hyphen_values = true)]
    pub snr_db: Option<f64>,
    /// qpsk, rrc:ROLLOFF or ofdm:SUBCARRIERS:CP. Single-carrier signals use P samples per symbol.
    #[arg(long, default_value = "qpsk")]
    pub signal: String,
    /// white, ma:LEN or exp:SIGMA.
    #[arg(long, default_value = "white")]
    pub temporal: String,
    /// uncorrelated or rho:VALUE.
    #[arg(long, default_value = "uncorrelated")]
    pub spatial: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "complex64")]
    pub format: SampleFormat,
}

/// Parses arguments, configures the thread pool and runs one command.
/// Returns the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_H0 };
            let _ = if e.use_stderr() { write!(stderr, "{}", e.render()) } else { write!(stdout, "{}", e.render()) };
            return code;
        }
    };
    configure_threads();
    match run(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if let Error::NotPositiveDefinite { .. } = e {
                let _ = writeln!(
                    stderr,
                    "hint: the sample covariance is singular; use more snapshots (M ≥ L·P) or fewer blocks per snapshot"
                );
            }
            EXIT_ERROR
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("CYCLODETECT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        // a second call fails harmlessly when the pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Detect(a) => cmd_detect(&a, out),
        Command::Experiment(a) => cmd_experiment(&a, out).map(|_| EXIT_H0),
        Command::Characterize(a) => cmd_characterize(&a, out).map(|_| EXIT_H0),
        Command::Bench(a) => cmd_bench(&a, out).map(|_| EXIT_H0),
        Command::Convert(a) => cmd_convert(&a, out).map(|_| EXIT_H0),
        Command::Generate(a) => cmd_generate(&a, out).map(|_| EXIT_H0),
    }
}

/// frob-avg when the case allows it, frob-sum otherwise.
pub fn default_detector(case: NoiseStructureCase) -> DetectorKind {
    if case.is_white() {
        DetectorKind::FrobeniusAvg
    } else {
        DetectorKind::FrobeniusSum
    }
}

fn read_iq_file(path: &Path) -> Result<(IqFileHeader, crate::transform::MultiChannel)> {
    read_iq(BufReader::new(File::open(path)?))
}

pub fn cmd_detect(a: &DetectArgs, out: &mut dyn Write) -> Result<i32> {
    let (h, x) = read_iq_file(&a.file)?;
    let kind = a.detector.unwrap_or_else(|| default_detector(a.case));
    let tf = FrequencyTransform::new(h.l as usize, h.p as usize, h.n as usize);
    let fbs = tf.transform_record(&x, h.m as usize)?;
    let r = detect(&fbs, a.case, kind, a.pfa)?;
    writeln!(
        out,
        "decision={} detector={} case={} statistic={} normalized={} dof={} threshold={} p_value={} pfa={}",
        r.decision, kind, a.case, r.statistic, r.normalized, r.dof, r.threshold, r.p_value, a.pfa
    )?;
    let verdict = match r.decision {
        Decision::H1 => "cyclostationary signal present",
        Decision::H0 => "no cyclostationary signal detected",
    };
    writeln!(
        out,
        "{}: {verdict} ({kind}, {} noise; normalized statistic {:.3} vs threshold {:.3} with {} dof, p = {:.3e})",
        r.decision, a.case, r.normalized, r.threshold, r.dof, r.p_value
    )?;
    Ok(if r.decision == Decision::H1 { EXIT_H1 } else { EXIT_H0 })
}

pub fn cmd_experiment(a: &ExperimentArgs, out: &mut dyn Write) -> Result<()> {
    let mut cfg = match (&a.config, &a.preset) {
        (Some(path), None) => ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?,
        (None, Some(name)) => presets::load(name)?,
        _ => return Err(Error::InvalidSpec("give either a config file or --preset".into())),
    };
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if let Some(s) = a.seed {
        cfg.root_seed = s;
    }
    cfg.validate()?;
    let result = run_configured(&cfg)?;
    std::fs::create_dir_all(&a.out)?;
    for (name, bytes) in &result.files {
        let path = a.out.join(name);
        std::fs::write(&path, bytes)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    for line in &result.summary {
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Outcome of one noise-structure test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureTest {
    pub normalized: f64,
    pub dof: u64,
    pub threshold: f64,
    pub p_value: f64,
    pub rejected: bool,
}

fn structure_test(log_glr: f64, m: usize, dof: u64, pfa: f64) -> Result<StructureTest> {
    let normalized = wilks_normalize(log_glr, m);
    let threshold = chi2_quantile(1.0 - pfa, dof)?;
    Ok(StructureTest { normalized, dof, threshold, p_value: chi2_sf(normalized.max(0.0), dof), rejected: normalized > threshold })
}

/// Temporal and spatial tests plus the implied null structure. The spatial
/// test is `None` for a single antenna.
pub fn characterize(x: &crate::transform::MultiChannel, h: &IqFileHeader, pfa: f64) -> Result<(StructureTest, Option<StructureTest>, NoiseStructureCase)> {
    if !(pfa > 0.0 && pfa < 1.0) {
        return Err(Error::InvalidPfa(pfa));
    }
    let (l, p, n, m) = (h.l as usize, h.p as usize, h.n as usize, h.m as usize);
    let fbs = FrequencyTransform::new(l, p, n).transform_record(x, m)?;
    let cov = sample_block_covariance(&fbs);
    let cat = DofCatalog::new(l, p, n);
    let temporal = structure_test(noise_temporal_glr(&cov)?, m, cat.noise_temporal(), pfa)?;
    let spatial = if l > 1 { Some(structure_test(noise_spatial_glr(&cov)?, m, cat.noise_spatial(), pfa)?) } else { None };
    let correlated = spatial.is_some_and(|s| s.rejected);
    let case = match (temporal.rejected, correlated) {
        (true, true) => NoiseStructureCase::ColoredCorrelated,
        (true, false) => NoiseStructureCase::ColoredUncorrelated,
        (false, true) => NoiseStructureCase::WhiteCorrelated,
        (false, false) => NoiseStructureCase::WhiteUncorrelated,
    };
    Ok((temporal, spatial, case))
}

pub fn cmd_characterize(a: &CharacterizeArgs, out: &mut dyn Write) -> Result<()> {
    let (h, x) = read_iq_file(&a.file)?;
    let (t, s, case) = characterize(&x, &h, a.pfa)?;
    let fmt = |t: &StructureTest| format!("statistic={:.3} dof={} threshold={:.3} p_value={:.3e}", t.normalized, t.dof, t.threshold, t.p_value);
    writeln!(out, "temporal: {} ({})", if t.rejected { "colored" } else { "white" }, fmt(&t))?;
    match s {
        Some(s) => writeln!(out, "spatial: {} ({})", if s.rejected { "correlated" } else { "uncorrelated" }, fmt(&s))?,
        None => writeln!(out, "spatial: uncorrelated (single antenna)")?,
    }
    writeln!(out, "recommended case: {case}")?;
    Ok(())
}

/// Operation counts of each stage, used as the reference scaling.
fn model_flops(g: Geometry) -> [f64; 5] {
    let (l, p, n, m) = (g.l as f64, g.p as f64, g.n as f64, g.m as f64);
    [
        5.0 * l * m * n * p * (n * p).log2(),
        m * n * (l * p).powi(2),
        2.0 * n * l.powi(3) * p.powi(2),
        n * l.powi(2) * p.powi(2),
        n * (l * p).powi(3) / 3.0,
    ]
}

pub fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let base = Geometry { l: a.l, p: a.p, n: a.n, m: a.m };
    let report = sweep(base, a.axis, &a.values, a.rounds.max(1), Duration::from_millis(20))?;
    writeln!(out, "{:>8} {:>12} {:>12} {:>12} {:>12} {:>12}", format!("{:?}", a.axis), "transform", "covariance", "coh-corr", "coh-uncorr", "glrt")?;
    for (v, t) in report.values.iter().zip(&report.timings) {
        writeln!(
            out,
            "{v:>8} {:>10.1}us {:>10.1}us {:>10.1}us {:>10.1}us {:>10.1}us",
            t.transform * 1e6,
            t.covariance * 1e6,
            t.coherence_correlated * 1e6,
            t.coherence_uncorrelated * 1e6,
            t.glrt * 1e6
        )?;
    }
    let xs: Vec<f64> = report.values.iter().map(|&v| v as f64).collect();
    let model: Vec<[f64; 5]> = report.timings.iter().map(|t| model_flops(t.geometry)).collect();
    let fitted = [
        report.transform_exponent,
        report.covariance_exponent,
        report.coherence_correlated_exponent,
        report.coherence_uncorrelated_exponent,
        report.glrt_exponent,
    ];
    writeln!(out, "{:>8} {:>12} {:>12} {:>12} {:>12} {:>12}", "stage", "fitted", "model", "", "", "")?;
    for (k, name) in ["transform", "covariance", "coh-corr", "coh-uncorr", "glrt"].iter().enumerate() {
        let ys: Vec<f64> = model.iter().map(|m| m[k]).collect();
        writeln!(out, "{name:>10} {:>10.3} {:>12.3}", fitted[k], fit_exponent(&xs, &ys)?)?;
    }
    Ok(())
}

fn has_extension(p: &Path, ext: &str) -> bool {
    p.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

pub fn cmd_convert(a: &ConvertArgs, out: &mut dyn Write) -> Result<()> {
    if has_extension(&a.input, "csv") {
        let x = read_csv_samples(BufReader::new(File::open(&a.input)?))?;
        let need = |v: Option<u32>, k: &str| v.ok_or_else(|| Error::InvalidSpec(format!("--{k} is required for CSV input")));
        let header = IqFileHeader { l: x.n_channels() as u32, p: need(a.p, "p")?, n: need(a.n, "n")?, m: need(a.m, "m")?, format: a.format };
        write_iq(BufWriter::new(File::create(&a.output)?), &header, &x)?;
        writeln!(out, "wrote {} ({} antennas, {} samples)", a.output.display(), header.l, x.len())?;
    } else {
        let (h, x) = read_iq_file(&a.input)?;
        write_csv_samples(BufWriter::new(File::create(&a.output)?), &x)?;
        writeln!(out, "wrote {} ({} antennas, {} samples, L={} P={} N={} M={})", a.output.display(), h.l, x.len(), h.l, h.p, h.n, h.m)?;
    }
    Ok(())
}

fn parse_signal(s: &str, p: usize) -> Result<SignalSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::InvalidSpec(format!("bad --signal `{s}`"));
    match parts.as_slice() {
        ["qpsk"] => Ok(SignalSpec::Qpsk { samples_per_symbol: p, pulse: Pulse::Rect }),
        ["rrc", r] => Ok(SignalSpec::Qpsk { samples_per_symbol: p, pulse: Pulse::Rrc { rolloff: r.parse().map_err(|_| bad())?, span: 8 } }),
        ["ofdm", k, cp] => Ok(SignalSpec::Ofdm { n_subcarriers: k.parse().map_err(|_| bad())?, cp_len: cp.parse().map_err(|_| bad())? }),
        _ => Err(bad()),
    }
}

fn parse_noise(temporal: &str, spatial: &str) -> Result<NoiseSpec> {
    let bad = |s: &str| Error::InvalidSpec(format!("bad noise description `{s}`"));
    let temporal = match temporal.split_once(':') {
        None if temporal == "white" => TemporalNoise::White,
        Some(("ma", v)) => TemporalNoise::MaColored { filter_len: v.parse().map_err(|_| bad(temporal))? },
        Some(("exp", v)) => TemporalNoise::ExpColored { sigma: v.parse().map_err(|_| bad(temporal))? },
        _ => return Err(bad(temporal)),
    };
    let spatial = match spatial.split_once(':') {
        None if spatial == "uncorrelated" => SpatialNoise::Uncorrelated,
        Some(("rho", v)) => SpatialNoise::Exponential { rho: v.parse().map_err(|_| bad(spatial))? },
        _ => return Err(bad(spatial)),
    };
    Ok(NoiseSpec { temporal, spatial })
}

pub fn cmd_generate(a: &GenerateArgs, out: &mut dyn Write) -> Result<()> {
    let header = IqFileHeader { l: a.l, p: a.p, n: a.n, m: a.m, format: a.format };
    if [a.l, a.p, a.n, a.m].contains(&0) {
        return Err(Error::InvalidSpec("l, p, n and m must be positive".into()));
    }
    let (l, total) = (a.l as usize, header.n_samples());
    let noise = gen_noise(&parse_noise(&a.temporal, &a.spatial)?, l, total, a.seed.wrapping_mul(3).wrapping_add(1))?;
    let x = match a.snr_db {
        None => noise,
        Some(snr) => {
            let spec = parse_signal(&a.signal, a.p as usize)?;
            let ch = ChannelSpec::default();
            let warm = ch.n_taps - 1;
            let sym = spec.symbol_len();
            let s = gen_signal(&spec, (total + warm).div_ceil(sym) * sym, a.seed.wrapping_mul(3).wrapping_add(2))?;
            let y = apply_channel(&s, &ch, l, a.seed.wrapping_mul(3).wrapping_add(3))?.slice(warm, total);
            mix_at_snr(&y, &noise, snr)?
        }
    };
    write_iq(BufWriter::new(File::create(&a.output)?), &header, &x)?;
    writeln!(out, "wrote {} (L={} P={} N={} M={})", a.output.display(), a.l, a.p, a.n, a.m)?;
    Ok(())
}
