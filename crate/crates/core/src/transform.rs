//! Time-to-frequency transform that block-diagonalizes the covariance.
//!
//! A snapshot `y` of `NP` samples from `L` channels is mapped to
//! `z = (L_{NP,N} ⊗ I_L)(F_{NP} ⊗ I_L)ᴴ y`, where `F_{NP}` is the unitary
//! DFT matrix with entries `e^{-2πi kn/NP} / √NP` and `L_{NP,N}` the
//! commutation matrix. In index form: `z` consists of `N` blocks of `LP`
//! entries, and sub-slot `k` of block `j` holds the `L` channel values at
//! frequency bin `kN + j` of the (conjugate-sign) unitary transform.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Multichannel complex baseband samples, stored one vector per channel.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiChannel {
    channels: Vec<Vec<Complex64>>,
}

impl MultiChannel {
    pub fn new(channels: Vec<Vec<Complex64>>) -> Result<Self> {
        let len = channels.first().map(Vec::len).ok_or(Error::EmptyInput("no channels"))?;
        if let Some(bad) = channels.iter().find(|c| c.len() != len) {
            return Err(Error::LengthMismatch { expected: len, actual: bad.len() });
        }
        Ok(Self { channels })
    }

    pub fn zeros(l: usize, len: usize) -> Self {
        Self { channels: vec![vec![Complex64::new(0.0, 0.0); len]; l] }
    }

    /// Builds from time-major interleaved samples: sample `t` of channel `c`
    /// at index `t * l + c`.
    pub fn from_interleaved(l: usize, data: &[Complex64]) -> Result<Self> {
        if l == 0 || !data.len().is_multiple_of(l) {
            return Err(Error::LengthMismatch { expected: l * (data.len() / l.max(1)), actual: data.len() });
        }
        let len = data.len() / l;
        let channels = (0..l).map(|c| (0..len).map(|t| data[t * l + c]).collect()).collect();
        Ok(Self { channels })
    }

    pub fn to_interleaved(&self) -> Vec<Complex64> {
        let l = self.n_channels();
        let mut out = Vec::with_capacity(l * self.len());
        for t in 0..self.len() {
            for c in 0..l {
                out.push(self.channels[c][t]);
            }
        }
        out
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    /// Number of time samples.
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn channel(&self, c: usize) -> &[Complex64] {
        &self.channels[c]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut Vec<Complex64> {
        &mut self.channels[c]
    }

    pub fn channels(&self) -> &[Vec<Complex64>] {
        &self.channels
    }

    pub fn slice(&self, start: usize, len: usize) -> MultiChannel {
        MultiChannel { channels: self.channels.iter().map(|c| c[start..start + len].to_vec()).collect() }
    }

    /// Appends another record of the same channel count in time.
    pub fn extend(&mut self, other: &MultiChannel) {
        for (a, b) in self.channels.iter_mut().zip(&other.channels) {
            a.extend_from_slice(b);
        }
    }

    /// Sum of `|x|²` over all channels and samples.
    pub fn energy(&self) -> f64 {
        self.channels.iter().flatten().map(Complex64::norm_sqr).sum()
    }

    /// Average power per sample and channel.
    pub fn mean_power(&self) -> f64 {
        self.energy() / (self.len() * self.n_channels()) as f64
    }
}

/// Splits a record of length `M·N·P` into `M` contiguous snapshots of `N·P`
/// samples; snapshot `i` starts at sample `i·N·P`.
pub fn segment(x: &MultiChannel, m: usize, n: usize, p: usize) -> Result<Vec<MultiChannel>> {
    let seg = n * p;
    if x.len() != m * seg {
        return Err(Error::LengthMismatch { expected: m * seg, actual: x.len() });
    }
    Ok((0..m).map(|i| x.slice(i * seg, seg)).collect())
}

/// Frequency bin held by sub-slot `k` of block `j`.
#[inline]
pub fn bin_index(j: usize, k: usize, n: usize) -> usize {
    k * n + j
}

/// Reusable transform for one `(L, P, N)` geometry.
#[derive(Clone)]
pub struct FrequencyTransform {
    l: usize,
    p: usize,
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FrequencyTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FrequencyTransform").field("l", &self.l).field("p", &self.p).field("n", &self.n).finish()
    }
}

impl FrequencyTransform {
    pub fn new(l: usize, p: usize, n: usize) -> Self {
        assert!(l > 0 && p > 0 && n > 0, "dimensions must be positive");
        // Fᴴ carries the positive exponent, i.e. the inverse FFT direction
        let fft = FftPlanner::new().plan_fft_inverse(n * p);
        Self { l, p, n, fft }
    }

    /// Transforms one snapshot of `N·P` samples, writing `N·LP` values into
    /// `out` in (block, sub-slot, channel) order.
    pub fn apply_into(&self, snapshot: &MultiChannel, out: &mut [Complex64]) -> Result<()> {
        let (l, p, n) = (self.l, self.p, self.n);
        let np = n * p;
        if snapshot.n_channels() != l {
            return Err(Error::LengthMismatch { expected: l, actual: snapshot.n_channels() });
        }
        if snapshot.len() != np {
            return Err(Error::LengthMismatch { expected: np, actual: snapshot.len() });
        }
        assert_eq!(out.len(), np * l);
        let scale = 1.0 / (np as f64).sqrt();
        let mut buf = vec![Complex64::new(0.0, 0.0); np];
        for c in 0..l {
            buf.copy_from_slice(snapshot.channel(c));
            self.fft.process(&mut buf);
            for j in 0..n {
                for k in 0..p {
                    out[(j * p + k) * l + c] = buf[bin_index(j, k, n)] * scale;
                }
            }
        }
        Ok(())
    }

    /// Transforms one snapshot into its `N` blocks of `LP` values.
    pub fn to_frequency_blocks(&self, snapshot: &MultiChannel) -> Result<Vec<Vec<Complex64>>> {
        let lp = self.l * self.p;
        let mut out = vec![Complex64::new(0.0, 0.0); self.n * lp];
        self.apply_into(snapshot, &mut out)?;
        Ok(out.chunks(lp).map(<[Complex64]>::to_vec).collect())
    }

    /// Transforms a list of snapshots.
    pub fn transform_snapshots(&self, snapshots: &[MultiChannel]) -> Result<FrequencyBlockSet> {
        let per = self.n * self.l * self.p;
        let mut data = vec![Complex64::new(0.0, 0.0); per * snapshots.len()];
        for (snap, out) in snapshots.iter().zip(data.chunks_mut(per)) {
            self.apply_into(snap, out)?;
        }
        Ok(FrequencyBlockSet { l: self.l, p: self.p, n: self.n, m: snapshots.len(), data })
    }

    /// Segments a record of length `M·N·P` and transforms every snapshot.
    pub fn transform_record(&self, x: &MultiChannel, m: usize) -> Result<FrequencyBlockSet> {
        let per = self.n * self.l * self.p;
        let seg = self.n * self.p;
        if x.len() != m * seg {
            return Err(Error::LengthMismatch { expected: m * seg, actual: x.len() });
        }
        let mut data = vec![Complex64::new(0.0, 0.0); per * m];
        for (i, out) in data.chunks_mut(per).enumerate() {
            self.apply_into(&x.slice(i * seg, seg), out)?;
        }
        Ok(FrequencyBlockSet { l: self.l, p: self.p, n: self.n, m, data })
    }
}

/// One-shot version of [`FrequencyTransform::to_frequency_blocks`].
pub fn to_frequency_blocks(snapshot: &MultiChannel, l: usize, p: usize, n: usize) -> Result<Vec<Vec<Complex64>>> {
    FrequencyTransform::new(l, p, n).to_frequency_blocks(snapshot)
}

/// `M` snapshots, each `N` frequency blocks of dimension `LP`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyBlockSet {
    pub l: usize,
    pub p: usize,
    pub n: usize,
    pub m: usize,
    data: Vec<Complex64>,
}

impl FrequencyBlockSet {
    /// Builds from raw per-snapshot vectors laid out as (block, sub-slot, channel).
    pub fn from_raw(l: usize, p: usize, n: usize, snapshots: Vec<Vec<Complex64>>) -> Result<Self> {
        let per = l * p * n;
        let m = snapshots.len();
        if m == 0 {
            return Err(Error::EmptyInput("no snapshots"));
        }
        let mut data = Vec::with_capacity(per * m);
        for s in snapshots {
            if s.len() != per {
                return Err(Error::LengthMismatch { expected: per, actual: s.len() });
            }
            data.extend(s);
        }
        Ok(Self { l, p, n, m, data })
    }

    pub fn block_dim(&self) -> usize {
        self.l * self.p
    }

    /// The `j`-th block of snapshot `i`.
    pub fn block(&self, i: usize, j: usize) -> &[Complex64] {
        let lp = self.block_dim();
        let start = (i * self.n + j) * lp;
        &self.data[start..start + lp]
    }

    pub fn snapshot(&self, i: usize) -> &[Complex64] {
        let per = self.n * self.block_dim();
        &self.data[i * per..(i + 1) * per]
    }

    pub fn snapshot_mut(&mut self, i: usize) -> &mut [Complex64] {
        let per = self.n * self.block_dim();
        &mut self.data[i * per..(i + 1) * per]
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(Complex64::norm_sqr).sum()
    }
}
