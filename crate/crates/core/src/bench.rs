//! Wall-clock timing of the pipeline stages and log-log scaling fits.

use std::hint::black_box;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::detectors::glrt_stat;
use crate::error::{Error, Result};
use crate::estimation::{coherence, s0_hat, sample_block_covariance, NoiseStructureCase};
use crate::transform::{FrequencyTransform, MultiChannel};

/// Pipeline geometry for one benchmark point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Geometry {
    pub l: usize,
    pub p: usize,
    pub n: usize,
    pub m: usize,
}

/// Seconds per call of each stage, minimum over repetitions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StageTimings {
    pub geometry: Geometry,
    pub transform: f64,
    pub covariance: f64,
    pub coherence_correlated: f64,
    pub coherence_uncorrelated: f64,
    pub glrt: f64,
}

/// Calls `f` in batches long enough to measure and returns the fastest
/// per-call time across `rounds` batches.
fn time_per_call<F: FnMut()>(mut f: F, rounds: usize, min_batch: Duration) -> f64 {
    let mut batch = 1usize;
    loop {
        let t = Instant::now();
        for _ in 0..batch {
            f();
        }
        if t.elapsed() >= min_batch || batch >= 1 << 20 {
            break;
        }
        batch *= 2;
    }
    (0..rounds)
        .map(|_| {
            let t = Instant::now();
            for _ in 0..batch {
                f();
            }
            t.elapsed().as_secs_f64() / batch as f64
        })
        .fold(f64::INFINITY, f64::min)
}

fn random_record(g: Geometry, seed: u64) -> MultiChannel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = g.m * g.n * g.p;
    let channels = (0..g.l)
        .map(|_| (0..len).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect())
        .collect();
    MultiChannel::new(channels).expect("non-empty")
}

/// Times transform, covariance, both coherence variants (white correlated
/// vs white uncorrelated null) and the GLRT on random data.
pub fn time_stages(g: Geometry, rounds: usize, min_batch: Duration) -> Result<StageTimings> {
    if g.m < g.l * g.p {
        return Err(Error::InvalidSpec(format!("benchmark needs m ≥ l·p, got m = {} for l·p = {}", g.m, g.l * g.p)));
    }
    let x = random_record(g, 1);
    let tf = FrequencyTransform::new(g.l, g.p, g.n);
    let fbs = tf.transform_record(&x, g.m)?;
    let cov = sample_block_covariance(&fbs);
    let s0_c = s0_hat(&cov, NoiseStructureCase::WhiteCorrelated)?;
    let s0_u = s0_hat(&cov, NoiseStructureCase::WhiteUncorrelated)?;
    let cb = coherence(&cov, &s0_c)?;

    let transform = time_per_call(|| drop(black_box(tf.transform_record(black_box(&x), g.m))), rounds, min_batch);
    let covariance = time_per_call(|| drop(black_box(sample_block_covariance(black_box(&fbs)))), rounds, min_batch);
    let coherence_correlated = time_per_call(|| drop(black_box(coherence(black_box(&cov), &s0_c))), rounds, min_batch);
    let coherence_uncorrelated = time_per_call(|| drop(black_box(coherence(black_box(&cov), &s0_u))), rounds, min_batch);
    let glrt = time_per_call(|| drop(black_box(glrt_stat(black_box(&cb), g.m))), rounds, min_batch);
    Ok(StageTimings { geometry: g, transform, covariance, coherence_correlated, coherence_uncorrelated, glrt })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_exponent(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { expected: xs.len(), actual: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::EmptyInput("need at least two points for a fit"));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidSpec("scaling fit needs positive values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidSpec("scaling fit needs at least two distinct sizes".into()));
    }
    Ok(sxy / sxx)
}

/// Which size parameter a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axis {
    L,
    P,
    N,
    M,
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l" => Ok(Axis::L),
            "p" => Ok(Axis::P),
            "n" => Ok(Axis::N),
            "m" => Ok(Axis::M),
            other => Err(Error::InvalidSpec(format!("unknown bench axis `{other}`"))),
        }
    }
}

impl Axis {
    fn apply(self, base: Geometry, v: usize) -> Geometry {
        match self {
            Axis::L => Geometry { l: v, ..base },
            Axis::P => Geometry { p: v, ..base },
            Axis::N => Geometry { n: v, ..base },
            Axis::M => Geometry { m: v, ..base },
        }
    }
}

/// Fitted exponents of each stage against the swept parameter.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub axis: Axis,
    pub values: Vec<usize>,
    pub timings: Vec<StageTimings>,
    pub transform_exponent: f64,
    pub covariance_exponent: f64,
    pub coherence_correlated_exponent: f64,
    pub coherence_uncorrelated_exponent: f64,
    pub glrt_exponent: f64,
}

/// Times every stage at `base` with `axis` set to each of `values`.
pub fn sweep(base: Geometry, axis: Axis, values: &[usize], rounds: usize, min_batch: Duration) -> Result<BenchReport> {
    let timings = values.iter().map(|&v| time_stages(axis.apply(base, v), rounds, min_batch)).collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = values.iter().map(|&v| v as f64).collect();
    let fit = |f: fn(&StageTimings) -> f64| fit_exponent(&xs, &timings.iter().map(f).collect::<Vec<_>>());
    Ok(BenchReport {
        axis,
        values: values.to_vec(),
        transform_exponent: fit(|t| t.transform)?,
        covariance_exponent: fit(|t| t.covariance)?,
        coherence_correlated_exponent: fit(|t| t.coherence_correlated)?,
        coherence_uncorrelated_exponent: fit(|t| t.coherence_uncorrelated)?,
        glrt_exponent: fit(|t| t.glrt)?,
        timings,
    })
}
