//! Seeded generators for cyclostationary test signals, fading channels and
//! structured Gaussian noise.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{sqrt, HermitianMatrix};
use crate::transform::MultiChannel;

/// Exponential filters are cut where the impulse response drops below this.
pub const EXP_FILTER_CUTOFF: f64 = 1e-4;

fn default_rrc_span() -> usize {
    8
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
#[derive(Default)]
pub enum Pulse {
    #[default]
    Rect,
    Rrc {
        rolloff: f64,
        /// Filter length in symbol periods.
        #[serde(default = "default_rrc_span")]
        span: usize,
    },
}


#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalSpec {
    /// Single-carrier QPSK; the cycle period equals `samples_per_symbol`.
    Qpsk {
        samples_per_symbol: usize,
        #[serde(default)]
        pulse: Pulse,
    },
    /// QPSK-loaded OFDM with a cyclic prefix.
    Ofdm { n_subcarriers: usize, cp_len: usize },
}

impl SignalSpec {
    pub fn symbol_len(&self) -> usize {
        match *self {
            SignalSpec::Qpsk { samples_per_symbol, .. } => samples_per_symbol,
            SignalSpec::Ofdm { n_subcarriers, cp_len } => n_subcarriers + cp_len,
        }
    }

    pub fn cycle_period(&self) -> usize {
        self.symbol_len()
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SignalSpec::Qpsk { samples_per_symbol: 0, .. } => Err(Error::InvalidSpec("samples_per_symbol must be positive".into())),
            SignalSpec::Qpsk { pulse: Pulse::Rrc { rolloff, span }, .. } if !(rolloff > 0.0 && rolloff <= 1.0) || span == 0 => {
                Err(Error::InvalidSpec(format!("rrc needs rolloff in (0, 1] and a positive span, got {rolloff}, {span}")))
            }
            SignalSpec::Ofdm { n_subcarriers: 0, .. } => Err(Error::InvalidSpec("n_subcarriers must be positive".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub n_taps: usize,
    /// Rate of the exponential power-delay profile, in taps.
    pub delay_decay: f64,
}

impl Default for ChannelSpec {
    fn default() -> Self {
        ChannelSpec { n_taps: 6, delay_decay: 2.0 }
    }
}

impl ChannelSpec {
    /// Tap powers `∝ exp(−d / delay_decay)`, summing to one.
    pub fn power_delay_profile(&self) -> Vec<f64> {
        let raw: Vec<f64> = (0..self.n_taps).map(|d| (-(d as f64) / self.delay_decay).exp()).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|p| p / total).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_taps == 0 || !(self.delay_decay > 0.0) {
            return Err(Error::InvalidSpec("channel needs n_taps ≥ 1 and delay_decay > 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TemporalNoise {
    White,
    /// Equal-tap moving average.
    MaColored { filter_len: usize },
    /// Impulse response `exp(−n/σ)`, truncated at [`EXP_FILTER_CUTOFF`].
    ExpColored { sigma: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SpatialNoise {
    Uncorrelated,
    /// Real correlation `ρ^|a−b|` between antennas `a` and `b`.
    Exponential { rho: f64 },
    /// Explicit correlation matrix, real and imaginary parts row by row.
    Matrix {
        real: Vec<Vec<f64>>,
        #[serde(default)]
        imag: Vec<Vec<f64>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub temporal: TemporalNoise,
    pub spatial: SpatialNoise,
}

impl NoiseSpec {
    pub fn white_uncorrelated() -> Self {
        NoiseSpec { temporal: TemporalNoise::White, spatial: SpatialNoise::Uncorrelated }
    }

    /// Unit-energy FIR filter realizing the temporal coloring.
    pub fn temporal_filter(&self) -> Result<Vec<f64>> {
        let taps = match self.temporal {
            TemporalNoise::White => vec![1.0],
            TemporalNoise::MaColored { filter_len: 0 } => {
                return Err(Error::InvalidSpec("moving-average filter_len must be positive".into()))
            }
            TemporalNoise::MaColored { filter_len } => vec![1.0; filter_len],
            TemporalNoise::ExpColored { sigma } if !(sigma >= 0.0) || !sigma.is_finite() => {
                return Err(Error::InvalidSpec(format!("sigma must be finite and non-negative, got {sigma}")))
            }
            TemporalNoise::ExpColored { sigma } => {
                let mut taps = vec![1.0];
                if sigma > 0.0 {
                    let mut n = 1;
                    loop {
                        let g = (-(n as f64) / sigma).exp();
                        if g < EXP_FILTER_CUTOFF {
                            break;
                        }
                        taps.push(g);
                        n += 1;
                    }
                }
                taps
            }
        };
        let norm = taps.iter().map(|t| t * t).sum::<f64>().sqrt();
        Ok(taps.into_iter().map(|t| t / norm).collect())
    }

    /// Correlation matrix for `l` antennas, `None` when uncorrelated.
    pub fn correlation_matrix(&self, l: usize) -> Result<Option<HermitianMatrix>> {
        let m = match &self.spatial {
            SpatialNoise::Uncorrelated => return Ok(None),
            SpatialNoise::Exponential { rho } => {
                if !(rho.abs() < 1.0) {
                    return Err(Error::InvalidSpec(format!("spatial rho must satisfy |rho| < 1, got {rho}")));
                }
                DMatrix::from_fn(l, l, |a, b| Complex64::new(rho.powi((a as i32 - b as i32).abs()), 0.0))
            }
            SpatialNoise::Matrix { real, imag } => {
                let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == l && rows.iter().all(|r| r.len() == l);
                if !shape_ok(real) || !(imag.is_empty() || shape_ok(imag)) {
                    return Err(Error::InvalidSpec(format!("correlation matrix must be {l}×{l}")));
                }
                DMatrix::from_fn(l, l, |a, b| Complex64::new(real[a][b], if imag.is_empty() { 0.0 } else { imag[a][b] }))
            }
        };
        if (&m - m.adjoint()).norm() > 1e-12 * m.norm() {
            return Err(Error::InvalidSpec("correlation matrix is not Hermitian".into()));
        }
        let h = HermitianMatrix::from_matrix(m)?;
        if h.real_diagonal().iter().any(|d| (d - 1.0).abs() > 1e-12) {
            return Err(Error::InvalidSpec("correlation matrix must have a unit diagonal".into()));
        }
        sqrt(&h).map_err(|e| Error::InvalidSpec(format!("correlation matrix is not positive definite: {e}")))?;
        Ok(Some(h))
    }
}

/// Independent random streams per trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Signal = 1,
    Channel = 2,
    Noise = 3,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-based seed for `(root, trial, stream)`; independent of the order
/// in which trials are executed.
pub fn derive_seed(root: u64, trial: u64, stream: Stream) -> u64 {
    splitmix64(splitmix64(splitmix64(root) ^ trial) ^ stream as u64)
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn qpsk_symbol(rng: &mut ChaCha8Rng) -> Complex64 {
    let re = if rng.random::<bool>() { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
    let im = if rng.random::<bool>() { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
    Complex64::new(re, im)
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

/// Root-raised-cosine impulse response at `t` symbol periods.
fn rrc(t: f64, beta: f64) -> f64 {
    if t.abs() < 1e-12 {
        return 1.0 - beta + 4.0 * beta / PI;
    }
    if ((4.0 * beta * t).abs() - 1.0).abs() < 1e-9 {
        let a = PI / (4.0 * beta);
        return beta / 2f64.sqrt() * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos());
    }
    let num = (PI * t * (1.0 - beta)).sin() + 4.0 * beta * t * (PI * t * (1.0 + beta)).cos();
    num / (PI * t * (1.0 - (4.0 * beta * t).powi(2)))
}

/// Unit-energy RRC taps spanning `span` symbols at `t` samples per symbol.
pub fn rrc_taps(rolloff: f64, span: usize, t: usize) -> Vec<f64> {
    let half = (span * t / 2) as isize;
    let taps: Vec<f64> = (-half..=half).map(|i| rrc(i as f64 / t as f64, rolloff)).collect();
    let norm = taps.iter().map(|v| v * v).sum::<f64>().sqrt();
    taps.into_iter().map(|v| v / norm).collect()
}

/// Unit-power cyclostationary baseband signal.
pub fn gen_signal(spec: &SignalSpec, n_samples: usize, seed: u64) -> Result<Vec<Complex64>> {
    spec.validate()?;
    let sym_len = spec.symbol_len();
    if !n_samples.is_multiple_of(sym_len) {
        return Err(Error::InvalidSpec(format!("{n_samples} samples is not a whole number of {sym_len}-sample symbols")));
    }
    let n_symbols = n_samples / sym_len;
    let mut rng = rng_for(seed);
    match *spec {
        SignalSpec::Qpsk { samples_per_symbol: t, pulse: Pulse::Rect } => {
            let mut out = Vec::with_capacity(n_samples);
            for _ in 0..n_symbols {
                let s = qpsk_symbol(&mut rng);
                out.extend(std::iter::repeat_n(s, t));
            }
            Ok(out)
        }
        SignalSpec::Qpsk { samples_per_symbol: t, pulse: Pulse::Rrc { rolloff, span } } => {
            let taps = rrc_taps(rolloff, span, t);
            let half = taps.len() / 2;
            // extra symbols on both sides so every output sample sees a full filter
            let pad = span.div_ceil(2) + 1;
            let total_symbols = n_symbols + 2 * pad;
            let symbols: Vec<Complex64> = (0..total_symbols).map(|_| qpsk_symbol(&mut rng)).collect();
            let gain = (t as f64).sqrt();
            let origin = pad * t;
            let out = (0..n_samples)
                .map(|n| {
                    let center = origin + n;
                    let mut acc = Complex64::new(0.0, 0.0);
                    // symbols at sample positions q·t within the filter support
                    let lo = (center - half).div_ceil(t);
                    let hi = (center + half) / t;
                    for q in lo..=hi {
                        acc += symbols[q] * taps[q * t + half - center];
                    }
                    acc * gain
                })
                .collect();
            Ok(out)
        }
        SignalSpec::Ofdm { n_subcarriers, cp_len } => {
            let ifft = FftPlanner::<f64>::new().plan_fft_inverse(n_subcarriers);
            let scale = 1.0 / (n_subcarriers as f64).sqrt();
            let mut out = Vec::with_capacity(n_samples);
            let mut buf = vec![Complex64::new(0.0, 0.0); n_subcarriers];
            for _ in 0..n_symbols {
                for v in buf.iter_mut() {
                    *v = qpsk_symbol(&mut rng);
                }
                ifft.process(&mut buf);
                out.extend(buf[n_subcarriers - cp_len..].iter().map(|v| v * scale));
                out.extend(buf.iter().map(|v| v * scale));
            }
            Ok(out)
        }
    }
}

/// Draws one channel realization: `l` antennas × `n_taps` complex gains.
pub fn draw_channel(ch: &ChannelSpec, l: usize, seed: u64) -> Result<Vec<Vec<Complex64>>> {
    ch.validate()?;
    let pdp = ch.power_delay_profile();
    let mut rng = rng_for(seed);
    Ok((0..l).map(|_| pdp.iter().map(|p| complex_gaussian(&mut rng) * p.sqrt()).collect()).collect())
}

/// Causal per-antenna convolution of a scalar signal with a freshly drawn
/// Rayleigh channel. The first `n_taps − 1` outputs carry the start-up
/// transient.
pub fn apply_channel(signal: &[Complex64], ch: &ChannelSpec, l: usize, seed: u64) -> Result<MultiChannel> {
    let taps = draw_channel(ch, l, seed)?;
    Ok(convolve_channel(signal, &taps))
}

pub fn convolve_channel(signal: &[Complex64], taps: &[Vec<Complex64>]) -> MultiChannel {
    let channels = taps
        .iter()
        .map(|h| {
            (0..signal.len())
                .map(|n| h.iter().enumerate().take(n + 1).map(|(d, g)| g * signal[n - d]).sum())
                .collect()
        })
        .collect();
    MultiChannel::new(channels).expect("non-empty antenna set")
}

/// Precomputed noise shaping: temporal filter and spatial square root.
#[derive(Clone, Debug)]
pub struct NoiseShaper {
    pub l: usize,
    filter: Arc<Vec<f64>>,
    spatial_root: Option<DMatrix<Complex64>>,
}

impl NoiseShaper {
    pub fn new(spec: &NoiseSpec, l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidSpec("at least one antenna is required".into()));
        }
        let filter = Arc::new(spec.temporal_filter()?);
        let spatial_root = match spec.correlation_matrix(l)? {
            Some(c) => Some(sqrt(&c)?.into_matrix()),
            None => None,
        };
        Ok(Self { l, filter, spatial_root })
    }

    pub fn filter(&self) -> &[f64] {
        &self.filter
    }

    pub fn generate(&self, n_samples: usize, seed: u64) -> MultiChannel {
        let mut rng = rng_for(seed);
        let warm = self.filter.len() - 1;
        let mut channels: Vec<Vec<Complex64>> = (0..self.l)
            .map(|_| {
                let white: Vec<Complex64> = (0..n_samples + warm).map(|_| complex_gaussian(&mut rng)).collect();
                if warm == 0 {
                    return white;
                }
                (0..n_samples)
                    .map(|n| self.filter.iter().enumerate().map(|(d, g)| white[n + warm - d] * *g).sum())
                    .collect()
            })
            .collect();
        if let Some(root) = &self.spatial_root {
            let mut v = vec![Complex64::new(0.0, 0.0); self.l];
            for n in 0..n_samples {
                for (a, slot) in v.iter_mut().enumerate() {
                    *slot = (0..self.l).map(|b| root[(a, b)] * channels[b][n]).sum();
                }
                for (a, val) in v.iter().enumerate() {
                    channels[a][n] = *val;
                }
            }
        }
        MultiChannel::new(channels).expect("non-empty antenna set")
    }
}

/// Proper complex Gaussian noise with unit power per antenna.
pub fn gen_noise(spec: &NoiseSpec, l: usize, n_samples: usize, seed: u64) -> Result<MultiChannel> {
    Ok(NoiseShaper::new(spec, l)?.generate(n_samples, seed))
}

/// Amplitude that puts the empirical signal power at `snr_db` relative to the
/// empirical noise power. Returns 0 for `−∞` or an all-zero signal.
pub fn snr_scale(signal: &MultiChannel, noise: &MultiChannel, snr_db: f64) -> f64 {
    let ps = signal.energy();
    if snr_db == f64::NEG_INFINITY || ps == 0.0 {
        return 0.0;
    }
    (10f64.powf(snr_db / 10.0) * noise.energy() / ps).sqrt()
}

/// `α·signal + noise` at the requested SNR.
pub fn mix_at_snr(signal: &MultiChannel, noise: &MultiChannel, snr_db: f64) -> Result<MultiChannel> {
    if signal.n_channels() != noise.n_channels() {
        return Err(Error::LengthMismatch { expected: noise.n_channels(), actual: signal.n_channels() });
    }
    if signal.len() != noise.len() {
        return Err(Error::LengthMismatch { expected: noise.len(), actual: signal.len() });
    }
    if snr_db.is_nan() {
        return Err(Error::InvalidSpec("snr_db is NaN".into()));
    }
    let alpha = snr_scale(signal, noise, snr_db);
    let channels = signal
        .channels()
        .iter()
        .zip(noise.channels())
        .map(|(s, w)| s.iter().zip(w).map(|(a, b)| a * alpha + b).collect())
        .collect();
    MultiChannel::new(channels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lag_corr(x: &[Complex64], lag: usize) -> Complex64 {
        let n = x.len() - lag;
        (0..n).map(|i| x[i + lag] * x[i].conj()).sum::<Complex64>() / n as f64
    }

    fn power(x: &[Complex64]) -> f64 {
        x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64
    }

    #[test]
    fn rect_qpsk_repeats_symbols() {
        let spec = SignalSpec::Qpsk { samples_per_symbol: 3, pulse: Pulse::Rect };
        let x = gen_signal(&spec, 9, 42).unwrap();
        for run in x.chunks(3) {
            assert!(run.iter().all(|v| *v == run[0]));
            assert!((run[0].re.abs() - FRAC_1_SQRT_2).abs() < 1e-15);
        }
        assert!(matches!(gen_signal(&spec, 10, 1), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn ofdm_cycle_period_and_prefix() {
        let spec = SignalSpec::Ofdm { n_subcarriers: 16, cp_len: 4 };
        assert_eq!(spec.cycle_period(), 20);
        let x = gen_signal(&spec, 200, 3).unwrap();
        for sym in x.chunks(20) {
            for i in 0..4 {
                assert!((sym[i] - sym[16 + i]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn unit_power_signals() {
        let specs = [
            SignalSpec::Qpsk { samples_per_symbol: 4, pulse: Pulse::Rect },
            SignalSpec::Qpsk { samples_per_symbol: 4, pulse: Pulse::Rrc { rolloff: 0.25, span: 8 } },
            SignalSpec::Ofdm { n_subcarriers: 16, cp_len: 4 },
        ];
        for spec in specs {
            let x = gen_signal(&spec, 100_000, 11).unwrap();
            assert!((power(&x) - 1.0).abs() < 0.02, "{spec:?}: {}", power(&x));
        }
    }

    #[test]
    fn rrc_taps_are_symmetric_and_nyquist() {
        let t = 4;
        let taps = rrc_taps(0.25, 8, t);
        assert_eq!(taps.len(), 33);
        for i in 0..taps.len() {
            assert!((taps[i] - taps[taps.len() - 1 - i]).abs() < 1e-15);
        }
        // RRC ⊛ RRC is (approximately, after truncation) zero at nonzero symbol lags
        let full: Vec<f64> = (0..2 * taps.len() - 1)
            .map(|k| (0..taps.len()).filter(|&i| k >= i && k - i < taps.len()).map(|i| taps[i] * taps[k - i]).sum())
            .collect();
        let mid = taps.len() - 1;
        for q in 1..4 {
            assert!(full[mid + q * t].abs() < 0.02 * full[mid]);
        }
        // β = 1 hits the singular point t = ±1/4 exactly
        assert!(rrc_taps(1.0, 4, 4).iter().all(|v| v.is_finite()));
    }

    #[test]
    fn channel_single_tap_is_memoryless() {
        let x = gen_signal(&SignalSpec::Qpsk { samples_per_symbol: 2, pulse: Pulse::Rect }, 40, 1).unwrap();
        let ch = ChannelSpec { n_taps: 1, delay_decay: 2.0 };
        let y = apply_channel(&x, &ch, 3, 99).unwrap();
        let gains = draw_channel(&ch, 3, 99).unwrap();
        for l in 0..3 {
            for (a, b) in y.channel(l).iter().zip(&x) {
                assert!((a - b * gains[l][0]).norm() < 1e-15);
            }
        }
        assert_eq!(apply_channel(&x, &ch, 3, 99).unwrap(), y);
    }

    #[test]
    fn channel_preserves_power_on_average() {
        let spec = SignalSpec::Qpsk { samples_per_symbol: 3, pulse: Pulse::Rect };
        let x = gen_signal(&spec, 300, 5).unwrap();
        let ch = ChannelSpec::default();
        let mut total = 0.0;
        let draws = 10_000;
        for s in 0..draws {
            let y = apply_channel(&x, &ch, 1, s).unwrap();
            total += power(&y.channel(0)[ch.n_taps..]);
        }
        let ratio = total / draws as f64 / power(&x);
        assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
        let pdp = ch.power_delay_profile();
        assert!((pdp.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(((pdp[0] / pdp[1]) - 0.5f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn white_noise_is_white_and_proper() {
        let n = 100_000;
        let w = gen_noise(&NoiseSpec::white_uncorrelated(), 2, n, 7).unwrap();
        for l in 0..2 {
            let x = w.channel(l);
            assert!(lag_corr(x, 1).norm() < 3.0 / (n as f64).sqrt());
            let pseudo = x.iter().map(|v| v * v).sum::<Complex64>() / n as f64;
            assert!(pseudo.norm() < 3.0 / (n as f64).sqrt());
            assert!((power(x) - 1.0).abs() < 0.02);
        }
    }

    #[test]
    fn exp_filter_degenerates_to_white() {
        let white = gen_noise(&NoiseSpec::white_uncorrelated(), 2, 500, 13).unwrap();
        let spec = NoiseSpec { temporal: TemporalNoise::ExpColored { sigma: 0.0 }, spatial: SpatialNoise::Uncorrelated };
        assert_eq!(gen_noise(&spec, 2, 500, 13).unwrap(), white);
        let spec = NoiseSpec { temporal: TemporalNoise::ExpColored { sigma: 20.0 }, spatial: SpatialNoise::Uncorrelated };
        let f = spec.temporal_filter().unwrap();
        assert_eq!(f.len(), 185);
        assert!((f.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn moving_average_lag_one_correlation() {
        let n = 1_000_000;
        let spec = NoiseSpec { temporal: TemporalNoise::MaColored { filter_len: 19 }, spatial: SpatialNoise::Uncorrelated };
        let w = gen_noise(&spec, 1, n, 19).unwrap();
        let x = w.channel(0);
        let rho = lag_corr(x, 1).re / power(x);
        assert!((rho - 18.0 / 19.0).abs() < 0.02, "{rho}");
        assert!((power(x) - 1.0).abs() < 0.05);
    }

    #[test]
    fn spatial_correlation_is_imposed() {
        let n = 200_000;
        let spec = NoiseSpec { temporal: TemporalNoise::White, spatial: SpatialNoise::Exponential { rho: 0.5 } };
        let w = gen_noise(&spec, 3, n, 23).unwrap();
        let cross = |a: usize, b: usize| (0..n).map(|i| w.channel(a)[i] * w.channel(b)[i].conj()).sum::<Complex64>() / n as f64;
        assert!((cross(0, 1).re - 0.5).abs() < 0.01);
        assert!((cross(0, 2).re - 0.25).abs() < 0.01);
        assert!((cross(1, 1).re - 1.0).abs() < 0.01);
    }

    #[test]
    fn bad_correlation_matrices_are_rejected() {
        let bad = [
            SpatialNoise::Exponential { rho: 1.0 },
            SpatialNoise::Matrix { real: vec![vec![1.0, 0.0], vec![0.0, 2.0]], imag: vec![] },
            SpatialNoise::Matrix { real: vec![vec![1.0, 2.0], vec![2.0, 1.0]], imag: vec![] },
            SpatialNoise::Matrix { real: vec![vec![1.0]], imag: vec![] },
            SpatialNoise::Matrix { real: vec![vec![1.0, 0.5], vec![0.2, 1.0]], imag: vec![] },
        ];
        for spatial in bad {
            let spec = NoiseSpec { temporal: TemporalNoise::White, spatial };
            assert!(matches!(gen_noise(&spec, 2, 10, 0), Err(Error::InvalidSpec(_))));
        }
    }

    #[test]
    fn mixing_hits_requested_snr() {
        let s = MultiChannel::new(vec![gen_signal(&SignalSpec::Ofdm { n_subcarriers: 8, cp_len: 2 }, 1000, 1).unwrap()]).unwrap();
        let w = gen_noise(&NoiseSpec::white_uncorrelated(), 1, 1000, 2).unwrap();
        let w_scaled = MultiChannel::new(vec![w.channel(0).iter().map(|v| v * (s.energy() / w.energy()).sqrt()).collect()]).unwrap();
        assert!((snr_scale(&s, &w_scaled, 0.0) - 1.0).abs() < 1e-12);

        let y = mix_at_snr(&s, &w, -10.0).unwrap();
        let alpha = snr_scale(&s, &w, -10.0);
        assert!((alpha * alpha * s.energy() / w.energy() - 0.1).abs() < 1e-10);
        let recovered: Vec<Complex64> = y.channel(0).iter().zip(w.channel(0)).map(|(a, b)| a - b).collect();
        assert!((power(&recovered) / power(w.channel(0)) - 0.1).abs() < 1e-10);

        assert_eq!(mix_at_snr(&s, &w, f64::NEG_INFINITY).unwrap(), w);
        let short = w.slice(0, 10);
        assert!(matches!(mix_at_snr(&s, &short, 0.0), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn cyclostationarity_is_visible() {
        let n = 100_000;
        let p = 4;
        // cyclic autocorrelation estimate at cycle frequency 1/P with its standard error
        let cyclic = |x: &[Complex64], lag: usize| {
            let terms: Vec<Complex64> = (0..x.len() - lag)
                .map(|i| x[i + lag] * x[i].conj() * Complex64::from_polar(1.0, -2.0 * PI * i as f64 / p as f64))
                .collect();
            let mean = terms.iter().sum::<Complex64>() / terms.len() as f64;
            let var = terms.iter().map(|t| (t - mean).norm_sqr()).sum::<f64>() / terms.len() as f64;
            (mean.norm(), (var / terms.len() as f64).sqrt())
        };
        let rrc = gen_signal(&SignalSpec::Qpsk { samples_per_symbol: p, pulse: Pulse::Rrc { rolloff: 0.25, span: 8 } }, n, 1).unwrap();
        let (v, se) = cyclic(&rrc, 0);
        assert!(v > 5.0 * se, "{v} vs {se}");
        // the rectangular pulse has constant envelope, so the structure shows up at lag 1
        let rect = gen_signal(&SignalSpec::Qpsk { samples_per_symbol: p, pulse: Pulse::Rect }, n, 2).unwrap();
        let (v, se) = cyclic(&rect, 1);
        assert!(v > 5.0 * se);
        let w = gen_noise(&NoiseSpec::white_uncorrelated(), 1, n, 3).unwrap();
        let (v, se) = cyclic(w.channel(0), 0);
        assert!(v < 3.0 * se);
    }

    #[test]
    fn seeds_are_counter_based() {
        let a = derive_seed(1, 5, Stream::Noise);
        assert_eq!(a, derive_seed(1, 5, Stream::Noise));
        assert_ne!(a, derive_seed(1, 5, Stream::Signal));
        assert_ne!(a, derive_seed(1, 6, Stream::Noise));
        assert_ne!(a, derive_seed(2, 5, Stream::Noise));
    }

    #[test]
    fn specs_parse_from_json() {
        let s: SignalSpec = serde_json::from_str(r#"{"kind":"qpsk","samples_per_symbol":4,"pulse":{"shape":"rrc","rolloff":0.25}}"#).unwrap();
        assert_eq!(s, SignalSpec::Qpsk { samples_per_symbol: 4, pulse: Pulse::Rrc { rolloff: 0.25, span: 8 } });
        let n: NoiseSpec = serde_json::from_str(r#"{"temporal":{"type":"ma_colored","filter_len":19},"spatial":{"type":"uncorrelated"}}"#).unwrap();
        assert_eq!(n.temporal, TemporalNoise::MaColored { filter_len: 19 });
    }
}
