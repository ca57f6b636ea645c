//! χ² distribution, degrees-of-freedom catalog, ROC/AUC and KS utilities.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::estimation::NoiseStructureCase;

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 1_000_000;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Stirling-series remainder `ln Γ(a) − [(a − ½) ln a − a + ½ ln 2π]`.
fn stirling_remainder(a: f64) -> f64 {
    if a < 15.0 {
        return ln_gamma(a) - ((a - 0.5) * a.ln() - a + 0.5 * (2.0 * PI).ln());
    }
    let a2 = a * a;
    (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * a2)) / a2) / a2) / a
}

/// `ln(1 + u) − u`, accurate for small `u`.
fn log1pmx(u: f64) -> f64 {
    if u.abs() > 0.1 {
        return u.ln_1p() - u;
    }
    // -u²/2 + u³/3 - u⁴/4 + ...
    let mut term = u;
    let mut sum = 0.0;
    for k in 2..60 {
        term *= -u;
        let next = term / k as f64;
        sum += next;
        if next.abs() < EPS * sum.abs() {
            break;
        }
    }
    sum
}

/// `ln(x^a e^{-x} / Γ(a))` without catastrophic cancellation for large `a`.
fn ln_gamma_prefactor(a: f64, x: f64) -> f64 {
    a * log1pmx((x - a) / a) + 0.5 * a.ln() - 0.5 * (2.0 * PI).ln() - stirling_remainder(a)
}

/// Regularized incomplete gamma functions `(P(a, x), Q(a, x))`.
pub fn regularized_gamma(a: f64, x: f64) -> (f64, f64) {
    assert!(a > 0.0, "shape must be positive");
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if x.is_infinite() {
        return (1.0, 0.0);
    }
    let log_pref = ln_gamma_prefactor(a, x);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut n = 1.0;
        for _ in 0..MAX_ITER {
            term *= x / (a + n);
            sum += term;
            if term.abs() < sum.abs() * EPS {
                break;
            }
            n += 1.0;
        }
        let p = (log_pref + sum.ln()).exp().min(1.0);
        (p, 1.0 - p)
    } else {
        // modified Lentz for the continued fraction of Q
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                break;
            }
        }
        let q = (log_pref + h.ln()).exp().min(1.0);
        (1.0 - q, q)
    }
}

/// χ² cumulative distribution function.
pub fn chi2_cdf(x: f64, dof: u64) -> f64 {
    assert!(dof >= 1, "dof must be positive");
    if x <= 0.0 {
        return 0.0;
    }
    regularized_gamma(dof as f64 / 2.0, x / 2.0).0
}

/// χ² survival function `1 − CDF`, computed directly for tail accuracy.
pub fn chi2_sf(x: f64, dof: u64) -> f64 {
    assert!(dof >= 1, "dof must be positive");
    if x <= 0.0 {
        return 1.0;
    }
    regularized_gamma(dof as f64 / 2.0, x / 2.0).1
}

fn chi2_ln_pdf(x: f64, k: f64) -> f64 {
    let a = k / 2.0;
    (a - 1.0) * x.ln() - x / 2.0 - a * 2f64.ln() - ln_gamma(a)
}

/// Standard normal quantile (Acklam's rational approximation, ~1e-9).
pub fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    let low = 0.024_25;
    if p < low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -normal_quantile(1.0 - p)
    }
}

/// χ² quantile: bracketed Newton iteration seeded by Wilson–Hilferty.
pub fn chi2_quantile(p: f64, dof: u64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    assert!(dof >= 1, "dof must be positive");
    let k = dof as f64;
    let z = normal_quantile(p);
    let h = 2.0 / (9.0 * k);
    let mut x = k * (1.0 - h + z * h.sqrt()).powi(3);
    if !(x > 0.0) || !x.is_finite() {
        x = k.max(1e-3);
    }

    let (mut lo, mut hi) = (0.0_f64, x.max(1.0));
    while chi2_cdf(hi, dof) < p {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..500 {
        let f = chi2_cdf(x, dof) - p;
        if f.abs() < 1e-14 {
            break;
        }
        if f < 0.0 {
            lo = lo.max(x);
        } else {
            hi = hi.min(x);
        }
        let step = f / chi2_ln_pdf(x, k).exp();
        let mut next = x - step;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.max(1.0) {
            x = next;
            break;
        }
        x = next;
    }
    Ok(x)
}

/// Statistic families with a χ² reference law.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Statistic {
    /// GLRT and the Frobenius-sum statistic share the same dof.
    CoherenceFull,
    /// Frobenius norm of the block-averaged coherence.
    CoherenceAverage,
    NoiseTemporal,
    NoiseSpatial,
}

/// Wilks degrees of freedom for a given problem size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DofCatalog {
    pub l: u64,
    pub p: u64,
    pub n: u64,
}

impl DofCatalog {
    pub fn new(l: usize, p: usize, n: usize) -> Self {
        Self { l: l as u64, p: p as u64, n: n as u64 }
    }

    /// Dof of `−2M Σ log det Ĉ_j` and of `M(Σ ‖Ĉ_j‖² − LNP)`.
    pub fn full(&self, case: NoiseStructureCase) -> u64 {
        let Self { l, p, n } = *self;
        match case {
            NoiseStructureCase::ColoredCorrelated => l * l * n * p * (p - 1),
            NoiseStructureCase::ColoredUncorrelated => l * n * p * (l * p - 1),
            NoiseStructureCase::WhiteCorrelated => l * l * (n * p * p - 1),
            NoiseStructureCase::WhiteUncorrelated => l * (l * n * p * p - 1),
        }
    }

    /// Dof of `MN(‖Ĉ_av‖² − LP)`; only defined for white-noise cases.
    pub fn average(&self, case: NoiseStructureCase) -> Result<u64> {
        let Self { l, p, .. } = *self;
        match case {
            NoiseStructureCase::WhiteCorrelated => Ok(l * l * (p * p - 1)),
            NoiseStructureCase::WhiteUncorrelated => Ok(l * (l * p * p - 1)),
            other => Err(Error::WrongCase(other.to_string())),
        }
    }

    /// Temporal-whiteness test: `NP` free `L×L` Hermitian blocks against one.
    pub fn noise_temporal(&self) -> u64 {
        self.l * self.l * (self.n * self.p - 1)
    }

    /// Spatial-uncorrelatedness test: off-diagonal parameters of `NP` blocks.
    pub fn noise_spatial(&self) -> u64 {
        self.n * self.p * self.l * (self.l - 1)
    }

    pub fn lookup(&self, statistic: Statistic, case: NoiseStructureCase) -> Result<u64> {
        match statistic {
            Statistic::CoherenceFull => Ok(self.full(case)),
            Statistic::CoherenceAverage => self.average(case),
            Statistic::NoiseTemporal => Ok(self.noise_temporal()),
            Statistic::NoiseSpatial => Ok(self.noise_spatial()),
        }
    }
}

/// One point of an empirical ROC curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RocPoint {
    pub pfa: f64,
    pub pd: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Roc {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Empirical ROC (every distinct score is a threshold) and its trapezoidal
/// area. Ties between null and alternative scores contribute one half.
pub fn roc_and_auc(null_scores: &[f64], alt_scores: &[f64]) -> Result<Roc> {
    if null_scores.is_empty() {
        return Err(Error::EmptyInput("null scores"));
    }
    if alt_scores.is_empty() {
        return Err(Error::EmptyInput("alternative scores"));
    }
    let null = sorted(null_scores);
    let alt = sorted(alt_scores);
    let (n0, n1) = (null.len() as f64, alt.len() as f64);

    let mut thresholds: Vec<f64> = null.iter().chain(alt.iter()).copied().collect();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();

    let mut points = Vec::with_capacity(thresholds.len() + 1);
    points.push(RocPoint { pfa: 0.0, pd: 0.0 });
    for t in thresholds {
        let fa = null.len() - null.partition_point(|&s| s < t);
        let det = alt.len() - alt.partition_point(|&s| s < t);
        points.push(RocPoint { pfa: fa as f64 / n0, pd: det as f64 / n1 });
    }
    let auc = points
        .windows(2)
        .map(|w| (w[1].pfa - w[0].pfa) * (w[1].pd + w[0].pd) * 0.5)
        .sum();
    Ok(Roc { points, auc })
}

/// Probability of detection at an empirical false-alarm level: the threshold
/// is the `(1 − pfa)` order statistic of the null scores, decisions use `>`.
pub fn pd_at_pfa(null_scores: &[f64], alt_scores: &[f64], pfa: f64) -> Result<f64> {
    if null_scores.is_empty() || alt_scores.is_empty() {
        return Err(Error::EmptyInput("scores"));
    }
    if !(pfa > 0.0 && pfa < 1.0) {
        return Err(Error::InvalidPfa(pfa));
    }
    let threshold = empirical_threshold(null_scores, pfa);
    Ok(alt_scores.iter().filter(|&&s| s > threshold).count() as f64 / alt_scores.len() as f64)
}

/// Smallest threshold whose empirical false-alarm rate does not exceed `pfa`.
pub fn empirical_threshold(null_scores: &[f64], pfa: f64) -> f64 {
    let null = sorted(null_scores);
    let n = null.len();
    let allowed = (pfa * n as f64).floor() as usize;
    null[n - 1 - allowed.min(n - 1)]
}

/// Per-observation placement values (DeLong's structural components).
fn placements(null: &[f64], alt: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let sn = sorted(null);
    let sa = sorted(alt);
    let below = |sorted: &[f64], x: f64| {
        let lt = sorted.partition_point(|&s| s < x);
        let le = sorted.partition_point(|&s| s <= x);
        lt as f64 + 0.5 * (le - lt) as f64
    };
    let v10 = alt.iter().map(|&x| below(&sn, x) / sn.len() as f64).collect();
    let v01 = null.iter().map(|&y| (sa.len() as f64 - below(&sa, y)) / sa.len() as f64).collect();
    (v10, v01)
}

fn covariance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (n - 1.0)
}

/// DeLong standard error of an empirical AUC.
pub fn auc_std_error(null_scores: &[f64], alt_scores: &[f64]) -> Result<f64> {
    if null_scores.len() < 2 || alt_scores.len() < 2 {
        return Err(Error::EmptyInput("need at least two scores per arm"));
    }
    let (v10, v01) = placements(null_scores, alt_scores);
    let var = covariance(&v10, &v10) / alt_scores.len() as f64 + covariance(&v01, &v01) / null_scores.len() as f64;
    Ok(var.max(0.0).sqrt())
}

/// DeLong standard error of `AUC_a − AUC_b` when both detectors were
/// evaluated on the same trials (score `i` of each list comes from trial `i`).
pub fn auc_difference_std_error(null_a: &[f64], alt_a: &[f64], null_b: &[f64], alt_b: &[f64]) -> Result<f64> {
    if null_a.len() != null_b.len() {
        return Err(Error::LengthMismatch { expected: null_a.len(), actual: null_b.len() });
    }
    if alt_a.len() != alt_b.len() {
        return Err(Error::LengthMismatch { expected: alt_a.len(), actual: alt_b.len() });
    }
    if null_a.len() < 2 || alt_a.len() < 2 {
        return Err(Error::EmptyInput("need at least two scores per arm"));
    }
    let (v10a, v01a) = placements(null_a, alt_a);
    let (v10b, v01b) = placements(null_b, alt_b);
    let s10 = covariance(&v10a, &v10a) + covariance(&v10b, &v10b) - 2.0 * covariance(&v10a, &v10b);
    let s01 = covariance(&v01a, &v01a) + covariance(&v01b, &v01b) - 2.0 * covariance(&v01a, &v01b);
    let var = s10 / alt_a.len() as f64 + s01 / null_a.len() as f64;
    Ok(var.max(0.0).sqrt())
}

/// Kolmogorov–Smirnov distance between the empirical CDF of `samples` and
/// the χ²(dof) CDF.
pub fn ks_distance(samples: &[f64], dof: u64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("samples"));
    }
    let xs = sorted(samples);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        // step over ties so the ECDF jumps once per distinct value
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = chi2_cdf(xs[i], dof);
        d = d.max(f - i as f64 / n).max((j + 1) as f64 / n - f);
        i = j + 1;
    }
    Ok(d)
}

/// Empirical CDF evaluated at each sorted sample: `(x_(i), (i + 1) / n)`.
pub fn empirical_cdf(samples: &[f64]) -> Vec<(f64, f64)> {
    let xs = sorted(samples);
    let n = xs.len() as f64;
    xs.into_iter().enumerate().map(|(i, x)| (x, (i + 1) as f64 / n)).collect()
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn median(values: &[f64]) -> f64 {
    let v = sorted(values);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn cdf_closed_forms() {
        assert_eq!(chi2_cdf(0.0, 7), 0.0);
        let v = chi2_cdf(2.0, 2);
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-14);
        for &x in &[0.01, 0.5, 3.0, 17.0, 80.0] {
            assert!((chi2_cdf(x, 2) - (1.0 - (-x / 2.0).exp())).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn cdf_at_mean_high_dof() {
        // Edgeworth: F(k) ≈ 1/2 + skewness / (6·sqrt(2π)), skewness = sqrt(8/k)
        let k: f64 = 4608.0;
        let approx = 0.5 + (8.0 / k).sqrt() / (6.0 * (2.0 * PI).sqrt());
        let v = chi2_cdf(k, 4608);
        assert!((v - approx).abs() < 1e-5, "{v} vs {approx}");
        assert!((v - 0.502_770_439_176_563_5).abs() < 1e-10);
    }

    #[test]
    fn cdf_agrees_with_statrs() {
        for &k in &[1u64, 2, 3, 10, 72, 285, 3456, 4608, 5181, 20_000] {
            let reference = ChiSquared::new(k as f64).unwrap();
            for &r in &[0.05, 0.3, 0.8, 1.0, 1.2, 2.0, 4.0] {
                let x = r * k as f64;
                let ours = chi2_cdf(x, k);
                let theirs = reference.cdf(x);
                assert!((ours - theirs).abs() < 1e-10, "k={k} x={x}: {ours} vs {theirs}");
            }
        }
    }

    #[test]
    fn cdf_matches_high_precision_table() {
        // statrs drifts by ~1e-10 near the mean at these dof, so the oracle
        // is a 40-digit incomplete-gamma evaluation
        let table = [
            (100_000u64, 0.99, 0.012478315638082798768),
            (100_000, 0.998, 0.32779099324086210467),
            (100_000, 1.0, 0.50059470810479331139),
            (100_000, 1.002, 0.67306998937619541491),
            (100_000, 1.01, 0.98713115962276633014),
            (1_000_000, 0.99, 6.5001711800858376679e-13),
            (1_000_000, 0.998, 0.078580291987144946483),
            (1_000_000, 1.0, 0.50018806319660550048),
            (1_000_000, 1.002, 0.92128133861387036661),
            (1_000_000, 1.01, 0.99999999999909314712),
        ];
        for (k, r, expected) in table {
            let got = chi2_cdf(r * k as f64, k);
            assert!((got - expected).abs() < 1e-10, "k={k} r={r}: {got} vs {expected}");
        }
    }

    #[test]
    fn cdf_is_monotone() {
        for &k in &[1u64, 5, 72, 5181] {
            let mut prev = 0.0;
            for i in 0..400 {
                let x = i as f64 * 0.01 * k as f64;
                let v = chi2_cdf(x, k);
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn quantile_closed_form() {
        let q = chi2_quantile(0.95, 2).unwrap();
        assert!((q - (-2.0 * 0.05f64.ln())).abs() < 1e-9);
        assert!((q - 5.99146).abs() < 1e-5);
    }

    #[test]
    fn quantile_round_trip() {
        for &k in &[1u64, 2, 3, 72, 3456, 5181, 100_000] {
            for &p in &[1e-4, 0.01, 0.1, 0.5, 0.9, 0.99, 0.9999] {
                let x = chi2_quantile(p, k).unwrap();
                assert!((chi2_cdf(x, k) - p).abs() < 1e-9, "k={k} p={p}");
            }
        }
    }

    #[test]
    fn quantile_median_large_dof() {
        let q = chi2_quantile(0.5, 1000).unwrap();
        let wh = 1000.0 * (1.0 - 2.0 / 9000.0f64).powi(3);
        assert!((q - wh).abs() / wh < 1e-3);
        assert!((q - (1000.0 - 2.0 / 3.0)).abs() / 1000.0 < 0.01);
    }

    #[test]
    fn quantile_strictly_increasing_and_rejects_bad_p() {
        let mut prev = 0.0;
        for i in 1..100 {
            let q = chi2_quantile(i as f64 / 100.0, 33).unwrap();
            assert!(q > prev);
            prev = q;
        }
        assert!(matches!(chi2_quantile(0.0, 3), Err(Error::InvalidProbability(_))));
        assert!(chi2_quantile(1.0, 3).is_err());
        assert!(chi2_quantile(f64::NAN, 3).is_err());
    }

    #[test]
    fn dof_catalog_spot_values() {
        let cat = DofCatalog::new(3, 3, 64);
        assert_eq!(cat.full(NoiseStructureCase::ColoredCorrelated), 3456);
        assert_eq!(cat.full(NoiseStructureCase::ColoredUncorrelated), 4608);
        assert_eq!(cat.full(NoiseStructureCase::WhiteCorrelated), 5175);
        assert_eq!(cat.full(NoiseStructureCase::WhiteUncorrelated), 5181);
        assert_eq!(cat.average(NoiseStructureCase::WhiteCorrelated).unwrap(), 72);
        assert_eq!(cat.average(NoiseStructureCase::WhiteUncorrelated).unwrap(), 78);
        assert!(cat.average(NoiseStructureCase::ColoredUncorrelated).is_err());
    }

    fn pair_count_auc(null: &[f64], alt: &[f64]) -> f64 {
        let mut won = 0.0;
        for &a in alt {
            for &b in null {
                if a > b {
                    won += 1.0;
                } else if a == b {
                    won += 0.5;
                }
            }
        }
        won / (null.len() * alt.len()) as f64
    }

    #[test]
    fn auc_examples() {
        assert_eq!(roc_and_auc(&[0.0, 1.0, 2.0], &[3.0, 4.0]).unwrap().auc, 1.0);
        let same = [0.3, 1.0, 1.0, 2.5, 7.0];
        assert_eq!(roc_and_auc(&same, &same).unwrap().auc, 0.5);
        let auc = roc_and_auc(&[1.0, 2.0], &[3.0, 0.0]).unwrap().auc;
        assert_eq!(auc, pair_count_auc(&[1.0, 2.0], &[3.0, 0.0]));
        assert_eq!(auc, 0.5);
        assert!(roc_and_auc(&[], &[1.0]).is_err());
        assert!(roc_and_auc(&[1.0], &[]).is_err());
    }

    #[test]
    fn roc_endpoints() {
        let roc = roc_and_auc(&[1.0, 2.0, 3.0], &[2.0, 5.0]).unwrap();
        assert_eq!(roc.points.first().unwrap(), &RocPoint { pfa: 0.0, pd: 0.0 });
        assert_eq!(roc.points.last().unwrap(), &RocPoint { pfa: 1.0, pd: 1.0 });
    }

    #[test]
    fn pd_at_pfa_uses_empirical_threshold() {
        let null: Vec<f64> = (0..100).map(f64::from).collect();
        let alt: Vec<f64> = (0..100).map(|i| f64::from(i) + 50.0).collect();
        // 1% of 100 → one null score (99) may exceed; threshold = 98
        assert_eq!(empirical_threshold(&null, 0.01), 98.0);
        assert!((pd_at_pfa(&null, &alt, 0.01).unwrap() - 0.51).abs() < 1e-12);
    }

    #[test]
    fn delong_se_matches_binomial_scale() {
        // perfectly separated → zero variance
        assert_eq!(auc_std_error(&[0.0, 1.0, 2.0], &[5.0, 6.0]).unwrap(), 0.0);
        let a: Vec<f64> = (0..50).map(|i| (i * 37 % 50) as f64).collect();
        let b: Vec<f64> = (0..50).map(|i| (i * 13 % 50) as f64 + 10.0).collect();
        let se = auc_std_error(&a, &b).unwrap();
        assert!(se > 0.0 && se < 0.1);
        assert_eq!(auc_difference_std_error(&a, &b, &a, &b).unwrap(), 0.0);
    }

    #[test]
    fn ks_examples() {
        let n = 500;
        let k = 7;
        let samples: Vec<f64> = (0..n).map(|i| chi2_quantile((i as f64 + 0.5) / n as f64, k).unwrap()).collect();
        assert!(ks_distance(&samples, k).unwrap() < 1.0 / n as f64);
        let med = chi2_quantile(0.5, k).unwrap();
        let d = ks_distance(&[med; 10], k).unwrap();
        assert!((d - 0.5).abs() < 1e-9);
        assert!(ks_distance(&[], 3).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn auc_invariant_under_monotone_transform(
                null in proptest::collection::vec(-50.0f64..50.0, 1..40),
                alt in proptest::collection::vec(-50.0f64..50.0, 1..40),
            ) {
                let base = roc_and_auc(&null, &alt).unwrap().auc;
                let f = |x: &f64| (x / 10.0).exp() * 3.0 - 1.0;
                let tn: Vec<f64> = null.iter().map(f).collect();
                let ta: Vec<f64> = alt.iter().map(f).collect();
                let transformed = roc_and_auc(&tn, &ta).unwrap().auc;
                prop_assert!((base - transformed).abs() < 1e-12);
                prop_assert!((base - pair_count_auc(&null, &alt)).abs() < 1e-12);
            }
        }
    }
}
