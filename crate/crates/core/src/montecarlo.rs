//! Monte Carlo experiments: ROC curves, AUC grids, null-distribution checks
//! and parameter sweeps.
//!
//! Every trial draws its own signal, channel and noise from seeds derived from
//! `(root_seed, trial)`, and the H0 and H1 arms of a trial share the same
//! noise record. Trials run in parallel but are collected by index, so
//! outputs do not depend on scheduling.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::detectors::{combined_terms, detector_dof, evaluate, DetectorKind};
use crate::error::{Error, Result};
use crate::estimation::{estimate_coherence, sample_block_covariance, CoherenceBlocks, NoiseStructureCase};
use crate::signal::{convolve_channel, derive_seed, draw_channel, gen_signal, snr_scale, ChannelSpec, NoiseShaper, NoiseSpec, SignalSpec, Stream, TemporalNoise};
use crate::stats::{auc_std_error, chi2_cdf, empirical_cdf, ks_distance, pd_at_pfa, roc_and_auc, Roc};
use crate::transform::{FrequencyTransform, MultiChannel};

/// Smallest trial count for which ROC-type outputs are written.
pub const MIN_ROC_TRIALS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Roc,
    NullCdf,
    AurGrid,
    Robustness,
    SnrSweep,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSpec {
    pub label: String,
    pub detector: DetectorKind,
    pub case: NoiseStructureCase,
}

fn default_true() -> bool {
    true
}

fn default_pfa() -> f64 {
    0.01
}

/// Accepts a number or one of the strings `"-inf"` / `"off"` (no signal).
fn snr_value<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(v) => Ok(v),
        Raw::Text(s) if matches!(s.as_str(), "-inf" | "-infinity" | "off") => Ok(f64::NEG_INFINITY),
        Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub experiment: ExperimentKind,
    pub l: usize,
    pub p: usize,
    pub n: usize,
    pub m: usize,
    #[serde(deserialize_with = "snr_value")]
    pub snr_db: f64,
    pub trials: usize,
    pub signal: SignalSpec,
    #[serde(default)]
    pub channel: ChannelSpec,
    pub noise: NoiseSpec,
    pub detectors: Vec<DetectorSpec>,
    #[serde(default)]
    pub root_seed: u64,
    #[serde(default = "default_true")]
    pub single_long_observation: bool,
    /// False-alarm level for P_D outputs.
    #[serde(default = "default_pfa")]
    pub pfa: f64,
    /// σ values for `robustness`, SNRs in dB for `snr_sweep`.
    #[serde(default)]
    pub sweep: Vec<f64>,
    #[serde(default)]
    pub lambda_grid: Vec<f64>,
    #[serde(default)]
    pub mu_grid: Vec<f64>,
    /// Noise structure whose coherence blocks feed the AUC grid.
    #[serde(default)]
    pub grid_case: Option<NoiseStructureCase>,
}

fn config_err(key: &str, reason: impl Into<String>) -> Error {
    Error::Config { key: key.to_string(), reason: reason.into() }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Parse(format!("experiment config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (key, v) in [("l", self.l), ("p", self.p), ("n", self.n), ("m", self.m), ("trials", self.trials)] {
            if v == 0 {
                return Err(config_err(key, "must be positive"));
            }
        }
        if self.snr_db.is_nan() || self.snr_db == f64::INFINITY {
            return Err(config_err("snr_db", "must be a finite number or -inf"));
        }
        if !(self.pfa > 0.0 && self.pfa < 1.0) {
            return Err(config_err("pfa", "must lie in (0, 1)"));
        }
        self.signal.validate().map_err(|e| config_err("signal", e.to_string()))?;
        self.channel.validate().map_err(|e| config_err("channel", e.to_string()))?;
        NoiseShaper::new(&self.noise, self.l).map_err(|e| config_err("noise", e.to_string()))?;
        if self.detectors.is_empty() && self.experiment != ExperimentKind::AurGrid {
            return Err(config_err("detectors", "at least one detector is required"));
        }
        let mut labels = std::collections::BTreeSet::new();
        for d in &self.detectors {
            if !labels.insert(d.label.as_str()) {
                return Err(config_err("detectors", format!("duplicate label `{}`", d.label)));
            }
            if d.detector == DetectorKind::FrobeniusAvg && !d.case.is_white() {
                return Err(config_err("detectors", format!("`{}`: frob-avg needs a white-noise case", d.label)));
            }
            if d.detector == DetectorKind::Glrt && self.m < self.l * self.p {
                return Err(config_err("m", format!("the GLRT needs m ≥ l·p = {}", self.l * self.p)));
            }
        }
        if self.m < self.l {
            return Err(config_err("m", format!("need m ≥ l = {} for the null estimate", self.l)));
        }
        match self.experiment {
            ExperimentKind::Robustness | ExperimentKind::SnrSweep if self.sweep.is_empty() => {
                return Err(config_err("sweep", "sweep values are required for this experiment"))
            }
            ExperimentKind::AurGrid => {
                if self.lambda_grid.is_empty() || self.mu_grid.is_empty() {
                    return Err(config_err("lambda_grid", "both lambda_grid and mu_grid must be non-empty"));
                }
                if self.lambda_grid.iter().chain(&self.mu_grid).any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(config_err("lambda_grid", "grid weights must be finite and non-negative"));
                }
                if self.grid_case.is_none() {
                    return Err(config_err("grid_case", "required for aur_grid"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn total_samples(&self) -> usize {
        self.m * self.n * self.p
    }
}

/// Normalized scores of one detector over all trials.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectorScores {
    pub spec: DetectorSpec,
    pub null: Vec<f64>,
    pub alt: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialScores {
    pub detectors: Vec<DetectorScores>,
}

impl TrialScores {
    pub fn get(&self, label: &str) -> Option<&DetectorScores> {
        self.detectors.iter().find(|d| d.spec.label == label)
    }
}

/// Quantities recorded per arm.
#[derive(Clone, Debug, PartialEq)]
enum Probe {
    Detector(DetectorSpec),
    /// The three unweighted terms of the combined statistic.
    Terms(NoiseStructureCase),
}

/// Per-trial generator and scorer shared across worker threads.
struct Simulator<'a> {
    cfg: &'a ExperimentConfig,
    transform: FrequencyTransform,
    shaper: NoiseShaper,
    probes: Vec<Probe>,
}

impl<'a> Simulator<'a> {
    fn new(cfg: &'a ExperimentConfig, probes: Vec<Probe>) -> Result<Self> {
        Ok(Self {
            cfg,
            transform: FrequencyTransform::new(cfg.l, cfg.p, cfg.n),
            shaper: NoiseShaper::new(&cfg.noise, cfg.l)?,
            probes,
        })
    }

    fn noise(&self, trial: u64) -> MultiChannel {
        self.shaper.generate(self.cfg.total_samples(), derive_seed(self.cfg.root_seed, trial, Stream::Noise))
    }

    /// Received signal without noise: modulated, passed through a fresh
    /// channel, with the channel start-up transient discarded.
    fn received_signal(&self, trial: u64) -> Result<MultiChannel> {
        let cfg = self.cfg;
        let taps = draw_channel(&cfg.channel, cfg.l, derive_seed(cfg.root_seed, trial, Stream::Channel))?;
        let warm = cfg.channel.n_taps - 1;
        let sym = cfg.signal.symbol_len();
        let seed = derive_seed(cfg.root_seed, trial, Stream::Signal);
        let piece = |len: usize, seed: u64| -> Result<MultiChannel> {
            let gen_len = (len + warm).div_ceil(sym) * sym;
            let s = gen_signal(&cfg.signal, gen_len, seed)?;
            Ok(convolve_channel(&s, &taps).slice(warm, len))
        };
        if cfg.single_long_observation {
            piece(cfg.total_samples(), seed)
        } else {
            let snap = cfg.n * cfg.p;
            let mut out = piece(snap, derive_seed(seed, 0, Stream::Signal))?;
            for i in 1..cfg.m {
                out.extend(&piece(snap, derive_seed(seed, i as u64, Stream::Signal))?);
            }
            Ok(out)
        }
    }

    fn score(&self, x: &MultiChannel) -> Result<Vec<f64>> {
        let fbs = self.transform.transform_record(x, self.cfg.m)?;
        let cov = sample_block_covariance(&fbs);
        let mut cache: BTreeMap<NoiseStructureCase, CoherenceBlocks> = BTreeMap::new();
        let mut out = Vec::new();
        for probe in &self.probes {
            let case = match probe {
                Probe::Detector(d) => d.case,
                Probe::Terms(c) => *c,
            };
            if let std::collections::btree_map::Entry::Vacant(e) = cache.entry(case) {
                e.insert(estimate_coherence(&cov, case)?);
            }
            let cb = &cache[&case];
            match probe {
                Probe::Detector(d) => out.push(evaluate(cb, d.detector, self.cfg.m)?.normalized),
                Probe::Terms(_) => {
                    let (a, b, c) = combined_terms(cb);
                    out.extend([a, b, c]);
                }
            }
        }
        Ok(out)
    }

    /// Null-arm scores plus one alternative-arm score vector per SNR.
    fn trial(&self, trial: u64, snrs: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let noise = self.noise(trial);
        let null = self.score(&noise)?;
        if snrs.is_empty() {
            return Ok((null, Vec::new()));
        }
        let signal = self.received_signal(trial)?;
        let mut alts = Vec::with_capacity(snrs.len());
        for &snr in snrs {
            let alpha = snr_scale(&signal, &noise, snr);
            let mixed = MultiChannel::new(
                signal
                    .channels()
                    .iter()
                    .zip(noise.channels())
                    .map(|(s, w)| s.iter().zip(w).map(|(a, b)| a * alpha + b).collect())
                    .collect(),
            )?;
            alts.push(self.score(&mixed)?);
        }
        Ok((null, alts))
    }

    fn run(&self, snrs: &[f64]) -> Result<Vec<(Vec<f64>, Vec<Vec<f64>>)>> {
        (0..self.cfg.trials as u64).into_par_iter().map(|t| self.trial(t, snrs)).collect()
    }
}

fn ensure_roc_trials(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.trials < MIN_ROC_TRIALS {
        return Err(config_err("trials", format!("ROC-type outputs need at least {MIN_ROC_TRIALS} trials")));
    }
    Ok(())
}

fn detector_probes(cfg: &ExperimentConfig) -> Vec<Probe> {
    cfg.detectors.iter().cloned().map(Probe::Detector).collect()
}

/// Transposes per-trial score rows into per-detector columns.
fn collect_scores(cfg: &ExperimentConfig, rows: &[(Vec<f64>, Vec<Vec<f64>>)], snr_index: Option<usize>) -> TrialScores {
    let detectors = cfg
        .detectors
        .iter()
        .enumerate()
        .map(|(k, spec)| DetectorScores {
            spec: spec.clone(),
            null: rows.iter().map(|r| r.0[k]).collect(),
            alt: snr_index.map(|s| rows.iter().map(|r| r.1[s][k]).collect()).unwrap_or_default(),
        })
        .collect();
    TrialScores { detectors }
}

/// H0 and H1 scores for every configured detector at `cfg.snr_db`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<TrialScores> {
    cfg.validate()?;
    let sim = Simulator::new(cfg, detector_probes(cfg))?;
    let rows = sim.run(&[cfg.snr_db])?;
    Ok(collect_scores(cfg, &rows, Some(0)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RocSummary {
    pub label: String,
    pub roc: Roc,
    pub std_error: f64,
}

/// Empirical ROC and AUC with its DeLong standard error, per detector.
pub fn roc_summaries(scores: &TrialScores) -> Result<Vec<RocSummary>> {
    scores
        .detectors
        .iter()
        .map(|d| {
            Ok(RocSummary {
                label: d.spec.label.clone(),
                roc: roc_and_auc(&d.null, &d.alt)?,
                std_error: auc_std_error(&d.null, &d.alt)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct AucGrid {
    pub lambda_grid: Vec<f64>,
    pub mu_grid: Vec<f64>,
    /// `auc[i][k]` belongs to `(lambda_grid[i], mu_grid[k])`.
    pub auc: Vec<Vec<f64>>,
    pub std_error: Vec<Vec<f64>>,
    /// Reference detectors evaluated on the same trials.
    pub reference: Vec<RocSummary>,
    /// Unweighted terms `(Σ‖Ĉ_j‖², Σ‖C̄_j‖², ‖Ĉ_av‖²)` per trial, null then alternative.
    pub null_terms: Vec<[f64; 3]>,
    pub alt_terms: Vec<[f64; 3]>,
}

/// AUC of the combined statistic over a (λ, μ) grid. All grid points
/// reweight the same coherence blocks.
pub fn aur_grid(cfg: &ExperimentConfig, lambda_grid: &[f64], mu_grid: &[f64]) -> Result<AucGrid> {
    cfg.validate()?;
    if lambda_grid.is_empty() || mu_grid.is_empty() {
        return Err(config_err("lambda_grid", "grids must be non-empty"));
    }
    let case = cfg.grid_case.ok_or_else(|| config_err("grid_case", "required for aur_grid"))?;
    let mut probes = detector_probes(cfg);
    probes.push(Probe::Terms(case));
    let sim = Simulator::new(cfg, probes)?;
    let rows = sim.run(&[cfg.snr_db])?;
    let k = cfg.detectors.len();
    let terms = |v: &[f64]| [v[k], v[k + 1], v[k + 2]];
    let null_terms: Vec<[f64; 3]> = rows.iter().map(|r| terms(&r.0)).collect();
    let alt_terms: Vec<[f64; 3]> = rows.iter().map(|r| terms(&r.1[0])).collect();
    let (pf, nf) = (cfg.p as f64, cfg.n as f64);
    let weigh = |t: &[[f64; 3]], lambda: f64, mu: f64| -> Vec<f64> { t.iter().map(|t| t[0] + lambda * pf * t[1] + mu * nf * t[2]).collect() };
    let mut auc = Vec::new();
    let mut std_error = Vec::new();
    for &lambda in lambda_grid {
        let mut row = Vec::new();
        let mut se_row = Vec::new();
        for &mu in mu_grid {
            let (n0, n1) = (weigh(&null_terms, lambda, mu), weigh(&alt_terms, lambda, mu));
            row.push(roc_and_auc(&n0, &n1)?.auc);
            se_row.push(auc_std_error(&n0, &n1)?);
        }
        auc.push(row);
        std_error.push(se_row);
    }
    let reference = roc_summaries(&collect_scores(cfg, &rows, Some(0)))?;
    Ok(AucGrid { lambda_grid: lambda_grid.to_vec(), mu_grid: mu_grid.to_vec(), auc, std_error, reference, null_terms, alt_terms })
}

/// P_D at `cfg.pfa` per detector per sweep value.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub parameter: String,
    pub values: Vec<f64>,
    pub labels: Vec<String>,
    /// `pd[v][d]` for sweep value `v` and detector `d`.
    pub pd: Vec<Vec<f64>>,
    pub pfa: f64,
}

impl SweepTable {
    pub fn pd(&self, value_index: usize, label: &str) -> Option<f64> {
        let d = self.labels.iter().position(|l| l == label)?;
        self.pd.get(value_index).map(|row| row[d])
    }
}

fn pd_row(scores: &TrialScores, pfa: f64) -> Result<Vec<f64>> {
    scores.detectors.iter().map(|d| pd_at_pfa(&d.null, &d.alt, pfa)).collect()
}

/// Detection probability under exponentially colored noise of increasing
/// σ. Thresholds are empirical, taken from the null scores at each σ.
pub fn robustness_sweep(cfg: &ExperimentConfig, sigmas: &[f64]) -> Result<SweepTable> {
    cfg.validate()?;
    let mut pd = Vec::new();
    for &sigma in sigmas {
        let mut c = cfg.clone();
        c.noise.temporal = TemporalNoise::ExpColored { sigma };
        pd.push(pd_row(&run_experiment(&c)?, cfg.pfa)?);
    }
    Ok(SweepTable {
        parameter: "sigma".into(),
        values: sigmas.to_vec(),
        labels: cfg.detectors.iter().map(|d| d.label.clone()).collect(),
        pd,
        pfa: cfg.pfa,
    })
}

/// Detection probability versus SNR; the null arm and the noise are shared
/// across all SNR points.
pub fn snr_sweep(cfg: &ExperimentConfig, snrs: &[f64]) -> Result<SweepTable> {
    cfg.validate()?;
    let sim = Simulator::new(cfg, detector_probes(cfg))?;
    let rows = sim.run(snrs)?;
    let pd = (0..snrs.len()).map(|s| pd_row(&collect_scores(cfg, &rows, Some(s)), cfg.pfa)).collect::<Result<_>>()?;
    Ok(SweepTable {
        parameter: "snr_db".into(),
        values: snrs.to_vec(),
        labels: cfg.detectors.iter().map(|d| d.label.clone()).collect(),
        pd,
        pfa: cfg.pfa,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NullCdf {
    pub label: String,
    pub samples: Vec<f64>,
    pub dof: u64,
    pub ks: f64,
}

/// Normalized null statistics paired with their χ² reference.
pub fn null_cdf_experiment(cfg: &ExperimentConfig) -> Result<Vec<NullCdf>> {
    cfg.validate()?;
    let sim = Simulator::new(cfg, detector_probes(cfg))?;
    let rows = sim.run(&[])?;
    collect_scores(cfg, &rows, None)
        .detectors
        .into_iter()
        .map(|d| {
            let dof = detector_dof(d.spec.detector, d.spec.case, cfg.l, cfg.p, cfg.n)?;
            let ks = ks_distance(&d.null, dof)?;
            Ok(NullCdf { label: d.spec.label, samples: d.null, dof, ks })
        })
        .collect()
}

/// Fraction of null scores above the χ² threshold for `pfa`.
pub fn empirical_false_alarm_rate(samples: &[f64], dof: u64, pfa: f64) -> Result<f64> {
    let threshold = crate::stats::chi2_quantile(1.0 - pfa, dof)?;
    Ok(samples.iter().filter(|&&s| s > threshold).count() as f64 / samples.len() as f64)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// `detector,pfa,pd`
pub fn write_roc_csv<W: Write>(out: W, summaries: &[RocSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["detector", "pfa", "pd"]).map_err(csv_err)?;
    for s in summaries {
        for p in &s.roc.points {
            w.write_record([s.label.clone(), p.pfa.to_string(), p.pd.to_string()]).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `detector,lambda,mu,auc,std_err`; weights are empty for plain detectors.
pub fn write_auc_csv<W: Write>(out: W, summaries: &[RocSummary], grid: Option<&AucGrid>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["detector", "lambda", "mu", "auc", "std_err"]).map_err(csv_err)?;
    for s in summaries {
        w.write_record([s.label.clone(), String::new(), String::new(), s.roc.auc.to_string(), s.std_error.to_string()])
            .map_err(csv_err)?;
    }
    if let Some(g) = grid {
        for (i, lambda) in g.lambda_grid.iter().enumerate() {
            for (k, mu) in g.mu_grid.iter().enumerate() {
                w.write_record(["combined".to_string(), lambda.to_string(), mu.to_string(), g.auc[i][k].to_string(), g.std_error[i][k].to_string()])
                    .map_err(csv_err)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// `detector,dof,value,empirical_cdf,chi2_cdf`
pub fn write_cdf_csv<W: Write>(out: W, cdfs: &[NullCdf]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["detector", "dof", "value", "empirical_cdf", "chi2_cdf"]).map_err(csv_err)?;
    for c in cdfs {
        for (x, f) in empirical_cdf(&c.samples) {
            w.write_record([c.label.clone(), c.dof.to_string(), x.to_string(), f.to_string(), chi2_cdf(x.max(0.0), c.dof).to_string()])
                .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `sweep_param,sweep_value,detector,pfa,pd`
pub fn write_sweep_csv<W: Write>(out: W, table: &SweepTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sweep_param", "sweep_value", "detector", "pfa", "pd"]).map_err(csv_err)?;
    for (v, row) in table.values.iter().zip(&table.pd) {
        for (label, pd) in table.labels.iter().zip(row) {
            w.write_record([table.parameter.clone(), v.to_string(), label.clone(), table.pfa.to_string(), pd.to_string()])
                .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Which CSV files an experiment produced, with their contents.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentOutput {
    pub files: Vec<(String, Vec<u8>)>,
    /// Human-readable summary lines.
    pub summary: Vec<String>,
}

/// Runs whatever `cfg.experiment` names and renders its CSV artifacts.
pub fn run_configured(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let mut out = ExperimentOutput::default();
    match cfg.experiment {
        ExperimentKind::Roc => {
            ensure_roc_trials(cfg)?;
            let summaries = roc_summaries(&run_experiment(cfg)?)?;
            let (mut roc, mut auc) = (Vec::new(), Vec::new());
            write_roc_csv(&mut roc, &summaries)?;
            write_auc_csv(&mut auc, &summaries, None)?;
            for s in &summaries {
                out.summary.push(format!("{}: auc {:.4} ± {:.4}", s.label, s.roc.auc, s.std_error));
            }
            out.files.push(("roc.csv".into(), roc));
            out.files.push(("auc.csv".into(), auc));
        }
        ExperimentKind::AurGrid => {
            ensure_roc_trials(cfg)?;
            let grid = aur_grid(cfg, &cfg.lambda_grid, &cfg.mu_grid)?;
            let mut auc = Vec::new();
            write_auc_csv(&mut auc, &grid.reference, Some(&grid))?;
            let (mut best, mut at) = (f64::NEG_INFINITY, (0.0, 0.0));
            for (i, row) in grid.auc.iter().enumerate() {
                for (k, v) in row.iter().enumerate() {
                    if *v > best {
                        best = *v;
                        at = (grid.lambda_grid[i], grid.mu_grid[k]);
                    }
                }
            }
            out.summary.push(format!("best combined auc {best:.4} at lambda {} mu {}", at.0, at.1));
            for s in &grid.reference {
                out.summary.push(format!("{}: auc {:.4} ± {:.4}", s.label, s.roc.auc, s.std_error));
            }
            out.files.push(("auc.csv".into(), auc));
        }
        ExperimentKind::NullCdf => {
            let cdfs = null_cdf_experiment(cfg)?;
            let mut buf = Vec::new();
            write_cdf_csv(&mut buf, &cdfs)?;
            for c in &cdfs {
                out.summary.push(format!("{}: dof {} ks {:.4}", c.label, c.dof, c.ks));
            }
            out.files.push(("cdf.csv".into(), buf));
        }
        ExperimentKind::Robustness | ExperimentKind::SnrSweep => {
            ensure_roc_trials(cfg)?;
            let table = if cfg.experiment == ExperimentKind::Robustness {
                robustness_sweep(cfg, &cfg.sweep)?
            } else {
                snr_sweep(cfg, &cfg.sweep)?
            };
            let mut buf = Vec::new();
            write_sweep_csv(&mut buf, &table)?;
            for (v, row) in table.values.iter().zip(&table.pd) {
                let cells: Vec<String> = table.labels.iter().zip(row).map(|(l, p)| format!("{l} {p:.4}")).collect();
                out.summary.push(format!("{} {v}: pd {}", table.parameter, cells.join(", ")));
            }
            out.files.push(("sweep.csv".into(), buf));
        }
    }
    Ok(out)
}
