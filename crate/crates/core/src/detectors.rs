//! Test statistics over coherence blocks and the resulting decisions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{estimate_coherence, sample_block_covariance, BlockCovariance, CoherenceBlocks, NoiseStructureCase};
use crate::matrix::{frob_sq, logdet, HermitianMatrix};
use crate::stats::{chi2_quantile, chi2_sf, DofCatalog};
use crate::transform::FrequencyBlockSet;

/// Which statistic to compute. `FrobeniusSum` covers the general-noise
/// LMPIT, the case-I LMPIT and the white-noise sum statistic; the noise
/// structure used during estimation picks between them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DetectorKind {
    Glrt,
    FrobeniusSum,
    FrobeniusAvg,
    Combined { lambda: f64, mu: f64 },
}

impl DetectorKind {
    pub fn combined(lambda: f64, mu: f64) -> Result<Self> {
        if !(lambda.is_finite() && mu.is_finite() && lambda >= 0.0 && mu >= 0.0) {
            return Err(Error::InvalidSpec(format!("combined weights must be finite and non-negative, got ({lambda}, {mu})")));
        }
        Ok(Self::Combined { lambda, mu })
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Glrt => f.write_str("glrt"),
            Self::FrobeniusSum => f.write_str("frob-sum"),
            Self::FrobeniusAvg => f.write_str("frob-avg"),
            Self::Combined { lambda, mu } => write!(f, "combined:{lambda},{mu}"),
        }
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "glrt" | "glr" => return Ok(Self::Glrt),
            "frob-sum" | "frobenius-sum" | "sum" => return Ok(Self::FrobeniusSum),
            "frob-avg" | "frobenius-avg" | "avg" => return Ok(Self::FrobeniusAvg),
            _ => {}
        }
        let weights = lower
            .strip_prefix("combined:")
            .ok_or_else(|| Error::InvalidSpec(format!("unknown detector `{s}`")))?;
        let (l, m) = weights
            .split_once(',')
            .ok_or_else(|| Error::InvalidSpec(format!("combined detector needs `combined:LAMBDA,MU`, got `{s}`")))?;
        let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| Error::InvalidSpec(format!("bad weight `{v}`: {e}")));
        Self::combined(parse(l)?, parse(m)?)
    }
}

impl TryFrom<String> for DetectorKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DetectorKind> for String {
    fn from(k: DetectorKind) -> String {
        k.to_string()
    }
}

/// A statistic before and after its χ² normalization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StatisticValue {
    pub raw: f64,
    pub normalized: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Decision {
    H0,
    H1,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::H0 => "H0",
            Decision::H1 => "H1",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetectionReport {
    pub statistic: f64,
    pub normalized: f64,
    pub dof: u64,
    pub threshold: f64,
    pub p_value: f64,
    pub decision: Decision,
}

/// `Σ_j log det Ĉ_j`, normalized as `−2M` times that.
pub fn glrt_stat(cb: &CoherenceBlocks, m: usize) -> Result<StatisticValue> {
    let mut raw = 0.0;
    for b in cb.blocks() {
        raw += logdet(b)?;
    }
    Ok(StatisticValue { raw, normalized: -2.0 * m as f64 * raw })
}

/// `Σ_j ‖Ĉ_j‖²_F`, normalized as `M(raw − LNP)`.
pub fn frob_sum_stat(cb: &CoherenceBlocks, m: usize) -> StatisticValue {
    let raw: f64 = cb.blocks().iter().map(frob_sq).sum();
    let lnp = (cb.l * cb.n * cb.p) as f64;
    StatisticValue { raw, normalized: m as f64 * (raw - lnp) }
}

/// `‖Ĉ_av‖²_F`, normalized as `MN(raw − LP)`. White-noise cases only.
pub fn frob_avg_stat(cb: &CoherenceBlocks, m: usize) -> Result<StatisticValue> {
    if !cb.case.is_white() {
        return Err(Error::WrongCase(cb.case.to_string()));
    }
    let raw = frob_sq(cb.average());
    let lp = (cb.l * cb.p) as f64;
    Ok(StatisticValue { raw, normalized: (m * cb.n) as f64 * (raw - lp) })
}

/// `Σ‖Ĉ_j‖² + λP Σ‖C̄_j‖² + μN‖Ĉ_av‖²`. Its null law is unknown, so it is
/// only ever compared empirically.
pub fn combined_stat(cb: &CoherenceBlocks, lambda: f64, mu: f64) -> Result<f64> {
    DetectorKind::combined(lambda, mu)?;
    let (sum, sub, avg) = combined_terms(cb);
    Ok(sum + lambda * cb.p as f64 * sub + mu * cb.n as f64 * avg)
}

/// The three Frobenius terms of the combined statistic, unweighted:
/// `(Σ‖Ĉ_j‖², Σ‖C̄_j‖², ‖Ĉ_av‖²)`.
pub fn combined_terms(cb: &CoherenceBlocks) -> (f64, f64, f64) {
    let sum = cb.blocks().iter().map(frob_sq).sum();
    let sub = cb.sub_averages().iter().map(frob_sq).sum();
    (sum, sub, frob_sq(cb.average()))
}

/// Raw and normalized value of `kind`. `Combined` has no normalization and
/// reports the raw value twice.
pub fn evaluate(cb: &CoherenceBlocks, kind: DetectorKind, m: usize) -> Result<StatisticValue> {
    match kind {
        DetectorKind::Glrt => glrt_stat(cb, m),
        DetectorKind::FrobeniusSum => Ok(frob_sum_stat(cb, m)),
        DetectorKind::FrobeniusAvg => frob_avg_stat(cb, m),
        DetectorKind::Combined { lambda, mu } => {
            let raw = combined_stat(cb, lambda, mu)?;
            Ok(StatisticValue { raw, normalized: raw })
        }
    }
}

/// χ² degrees of freedom used to threshold `kind` under `case`.
pub fn detector_dof(kind: DetectorKind, case: NoiseStructureCase, l: usize, p: usize, n: usize) -> Result<u64> {
    let cat = DofCatalog::new(l, p, n);
    match kind {
        DetectorKind::Glrt | DetectorKind::FrobeniusSum => Ok(cat.full(case)),
        DetectorKind::FrobeniusAvg => cat.average(case),
        DetectorKind::Combined { .. } => Err(Error::InvalidSpec("the combined statistic has no χ² reference".into())),
    }
}

/// Thresholds a right-tailed normalized statistic at the χ² upper quantile.
pub fn decide(normalized: f64, dof: u64, pfa: f64) -> Result<DetectionReport> {
    if !(pfa > 0.0 && pfa < 1.0) {
        return Err(Error::InvalidPfa(pfa));
    }
    if dof == 0 {
        return Err(Error::InvalidSpec("degrees of freedom must be positive".into()));
    }
    let threshold = chi2_quantile(1.0 - pfa, dof)?;
    let p_value = chi2_sf(normalized.max(0.0), dof);
    let decision = if normalized > threshold { Decision::H1 } else { Decision::H0 };
    Ok(DetectionReport { statistic: normalized, normalized, dof, threshold, p_value, decision })
}

/// Full pipeline from frequency blocks to a decision.
pub fn detect(fbs: &FrequencyBlockSet, case: NoiseStructureCase, kind: DetectorKind, pfa: f64) -> Result<DetectionReport> {
    let cov = sample_block_covariance(fbs);
    let cb = estimate_coherence(&cov, case)?;
    let value = evaluate(&cb, kind, fbs.m)?;
    let dof = detector_dof(kind, case, fbs.l, fbs.p, fbs.n)?;
    let mut report = decide(value.normalized, dof, pfa)?;
    report.statistic = value.raw;
    Ok(report)
}

/// Log-GLR for temporal whiteness: `Σ log det Ŝ^(k,k) − NP·log det(avg)`.
/// Never positive; small values reject whiteness.
pub fn noise_temporal_glr(cov: &BlockCovariance) -> Result<f64> {
    let subs = cov.diagonal_sub_blocks();
    let np = subs.len() as f64;
    let mut avg = HermitianMatrix::zeros(cov.l);
    let mut sum = 0.0;
    for s in &subs {
        sum += logdet(s)?;
        avg = avg.add(s);
    }
    let avg = avg.scale(1.0 / np);
    Ok(sum - np * logdet(&avg)?)
}

/// Log-GLR for spatial uncorrelatedness: `Σ log det Ŝ^(k,k) − Σ log det diag(Ŝ^(k,k))`.
pub fn noise_spatial_glr(cov: &BlockCovariance) -> Result<f64> {
    let mut total = 0.0;
    for s in cov.diagonal_sub_blocks() {
        let diag: f64 = s.real_diagonal().iter().map(|v| v.ln()).sum();
        total += logdet(&s)? - diag;
    }
    Ok(total)
}

/// `−2M` times a log-GLR, the Wilks-normalized form.
pub fn wilks_normalize(log_glr: f64, m: usize) -> f64 {
    -2.0 * m as f64 * log_glr
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::coherence;
    use crate::estimation::s0_hat;
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gauss(rng: &mut ChaCha8Rng) -> Complex64 {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    fn gaussian_fbs(l: usize, p: usize, n: usize, m: usize, rng: &mut ChaCha8Rng) -> FrequencyBlockSet {
        let snaps = (0..m).map(|_| (0..l * p * n).map(|_| gauss(rng)).collect()).collect();
        FrequencyBlockSet::from_raw(l, p, n, snaps).unwrap()
    }

    fn single_block(rows: &[Vec<Complex64>], case: NoiseStructureCase) -> CoherenceBlocks {
        let h = HermitianMatrix::from_rows(rows).unwrap();
        let dim = h.dim();
        CoherenceBlocks::from_blocks(case, 1, dim, vec![h]).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn identity_fixed_points() {
        let blocks = vec![HermitianMatrix::identity(6); 4];
        let cb = CoherenceBlocks::from_blocks(NoiseStructureCase::WhiteCorrelated, 2, 3, blocks).unwrap();
        let g = glrt_stat(&cb, 10).unwrap();
        assert_eq!((g.raw, g.normalized), (0.0, 0.0));
        let s = frob_sum_stat(&cb, 10);
        assert_eq!((s.raw, s.normalized), (24.0, 0.0));
        assert_eq!(frob_avg_stat(&cb, 10).unwrap().normalized, 0.0);
        let (lambda, mu) = (0.7, 1.3);
        let expected = 24.0 + lambda * 3.0 * 4.0 * 2.0 + mu * 4.0 * 6.0;
        assert!((combined_stat(&cb, lambda, mu).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn glrt_two_by_two_closed_form() {
        let cb = single_block(&[vec![c(1.0, 0.0), c(0.5, 0.0)], vec![c(0.5, 0.0), c(1.0, 0.0)]], NoiseStructureCase::WhiteCorrelated);
        let g = glrt_stat(&cb, 10).unwrap();
        assert!((g.raw - 0.75f64.ln()).abs() < 1e-14);
        assert!((g.normalized - 5.753641449035618).abs() < 1e-12);
    }

    #[test]
    fn frob_sum_off_diagonal_pair() {
        let x = 0.3;
        let cb = single_block(&[vec![c(1.0, 0.0), c(x, 0.0)], vec![c(x, 0.0), c(1.0, 0.0)]], NoiseStructureCase::WhiteCorrelated);
        let m = 17;
        assert!((frob_sum_stat(&cb, m).normalized - 2.0 * m as f64 * x * x).abs() < 1e-12);
    }

    #[test]
    fn frob_avg_rejects_colored_and_matches_sum_at_one_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fbs = gaussian_fbs(2, 3, 1, 20, &mut rng);
        let cov = sample_block_covariance(&fbs);
        for case in NoiseStructureCase::ALL {
            let cb = estimate_coherence(&cov, case).unwrap();
            if case.is_white() {
                let a = frob_avg_stat(&cb, 20).unwrap().raw;
                let s = frob_sum_stat(&cb, 20).raw;
                assert!((a - s).abs() < 1e-12);
            } else {
                assert!(matches!(frob_avg_stat(&cb, 20), Err(Error::WrongCase(_))));
            }
        }
    }

    #[test]
    fn combined_weight_degeneracy_and_linearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cov = sample_block_covariance(&gaussian_fbs(2, 3, 5, 30, &mut rng));
        let cb = estimate_coherence(&cov, NoiseStructureCase::WhiteCorrelated).unwrap();
        assert!((combined_stat(&cb, 0.0, 0.0).unwrap() - frob_sum_stat(&cb, 30).raw).abs() < 1e-12);
        let slope = 5.0 * frob_sq(cb.average());
        let d = combined_stat(&cb, 0.4, 2.5).unwrap() - combined_stat(&cb, 0.4, 1.5).unwrap();
        assert!((d - slope).abs() < 1e-9 * slope);
        assert!(combined_stat(&cb, -1.0, 0.0).is_err());
        assert!(combined_stat(&cb, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn decide_examples() {
        let r = decide(3.0, 2, 0.05).unwrap();
        assert!((r.threshold - 5.991464547107979).abs() < 1e-9);
        assert_eq!(r.decision, Decision::H0);
        let r = decide(0.0, 7, 0.5).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.decision, Decision::H0);
        let r = decide(6.0, 2, 0.05).unwrap();
        assert_eq!(r.decision, Decision::H1);
        assert!((r.p_value - (-3.0f64).exp()).abs() < 1e-12);
        for bad in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(matches!(decide(1.0, 2, bad), Err(Error::InvalidPfa(_))));
        }
        assert_eq!(detector_dof(DetectorKind::Glrt, NoiseStructureCase::ColoredUncorrelated, 3, 3, 64).unwrap(), 4608);
        assert!(detector_dof(DetectorKind::FrobeniusAvg, NoiseStructureCase::ColoredCorrelated, 3, 3, 64).is_err());
    }

    #[test]
    fn detector_names_round_trip() {
        for k in [DetectorKind::Glrt, DetectorKind::FrobeniusSum, DetectorKind::FrobeniusAvg, DetectorKind::Combined { lambda: 0.5, mu: 2.0 }] {
            assert_eq!(k.to_string().parse::<DetectorKind>().unwrap(), k);
        }
        assert!("combined:1".parse::<DetectorKind>().is_err());
        assert!("nope".parse::<DetectorKind>().is_err());
    }

    #[test]
    fn glrt_raw_is_never_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(1000);
        for t in 0..1000 {
            let case = NoiseStructureCase::ALL[t % 4];
            let m = 6 + t % 10;
            let cov = sample_block_covariance(&gaussian_fbs(2, 2, 2, m, &mut rng));
            let cb = estimate_coherence(&cov, case).unwrap();
            assert!(glrt_stat(&cb, m).unwrap().raw <= 1e-12, "trial {t}");
        }
    }

    #[test]
    fn noise_glrs_examples() {
        let (a, b) = (2.0f64, 5.0f64);
        let blocks = vec![HermitianMatrix::from_real_diagonal(&[a, b])];
        let cov = BlockCovariance::from_blocks(1, 2, 10, blocks).unwrap();
        let t = noise_temporal_glr(&cov).unwrap();
        assert!((t - ((a * b).ln() - 2.0 * ((a + b) / 2.0).ln())).abs() < 1e-14);
        assert_eq!(noise_spatial_glr(&cov).unwrap(), 0.0);

        let same = HermitianMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.3, 0.4)], vec![c(0.3, -0.4), c(1.0, 0.0)]]).unwrap();
        let mut m = DMatrix::<Complex64>::zeros(4, 4);
        m.view_mut((0, 0), (2, 2)).copy_from(same.as_matrix());
        m.view_mut((2, 2), (2, 2)).copy_from(same.as_matrix());
        let cov = BlockCovariance::from_blocks(2, 2, 10, vec![HermitianMatrix::from_matrix(m).unwrap()]).unwrap();
        assert!(noise_temporal_glr(&cov).unwrap().abs() < 1e-12);

        let rho = c(0.3, -0.5);
        let blk = HermitianMatrix::from_rows(&[vec![c(1.0, 0.0), rho], vec![rho.conj(), c(1.0, 0.0)]]).unwrap();
        let cov = BlockCovariance::from_blocks(2, 1, 10, vec![blk]).unwrap();
        assert!((noise_spatial_glr(&cov).unwrap() - (1.0 - rho.norm_sqr()).ln()).abs() < 1e-14);
    }

    #[test]
    fn noise_glrs_never_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for t in 0..1000 {
            let (l, p, n) = (1 + t % 3, 2, 2);
            let cov = sample_block_covariance(&gaussian_fbs(l, p, n, 8, &mut rng));
            assert!(noise_temporal_glr(&cov).unwrap() <= 1e-10);
            let s = noise_spatial_glr(&cov).unwrap();
            assert!(s <= 1e-10);
            if l == 1 {
                assert_eq!(s, 0.0);
            }
        }
    }

    fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
        let a = DMatrix::from_fn(dim, dim, |_, _| gauss(rng));
        a.qr().q()
    }

    /// Applies `(Π ⊗ Q ⊗ G)` to every snapshot, with `Π` the permutation `perm`.
    fn act(fbs: &FrequencyBlockSet, perm: &[usize], q: &DMatrix<Complex64>, g: &DMatrix<Complex64>) -> FrequencyBlockSet {
        let (l, p, n) = (fbs.l, fbs.p, fbs.n);
        let qg = q.kronecker(g);
        let snaps = (0..fbs.m)
            .map(|i| {
                let mut out = vec![c(0.0, 0.0); l * p * n];
                for j in 0..n {
                    let src = DMatrix::from_column_slice(l * p, 1, fbs.block(i, j));
                    let dst = &qg * src;
                    let tj = perm[j];
                    out[tj * l * p..(tj + 1) * l * p].copy_from_slice(dst.as_slice());
                }
                out
            })
            .collect();
        FrequencyBlockSet::from_raw(l, p, n, snaps).unwrap()
    }

    fn all_stats(fbs: &FrequencyBlockSet, case: NoiseStructureCase) -> Vec<f64> {
        let cov = sample_block_covariance(fbs);
        let cb = estimate_coherence(&cov, case).unwrap();
        let mut v = vec![glrt_stat(&cb, fbs.m).unwrap().raw, frob_sum_stat(&cb, fbs.m).raw, combined_stat(&cb, 0.6, 1.7).unwrap()];
        if case.is_white() {
            v.push(frob_avg_stat(&cb, fbs.m).unwrap().raw);
        }
        v
    }

    #[test]
    fn group_invariance_white_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let (l, p, n, m) = (2, 3, 4, 12);
        for case in [NoiseStructureCase::WhiteCorrelated, NoiseStructureCase::WhiteUncorrelated] {
            for _ in 0..50 {
                let fbs = gaussian_fbs(l, p, n, m, &mut rng);
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                let q = random_unitary(p, &mut rng);
                let g = if case.is_uncorrelated() {
                    DMatrix::from_fn(l, l, |a, b| if a == b { gauss(&mut rng) * 3.0 } else { c(0.0, 0.0) })
                } else {
                    DMatrix::from_fn(l, l, |_, _| gauss(&mut rng)) + DMatrix::identity(l, l)
                };
                let before = all_stats(&fbs, case);
                let after = all_stats(&act(&fbs, &perm, &q, &g), case);
                for (a, b) in before.iter().zip(&after) {
                    assert!(rel(*b, *a) < 1e-8 || (a - b).abs() < 1e-10, "{case}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn scale_invariance_all_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for case in NoiseStructureCase::ALL {
            let fbs = gaussian_fbs(2, 2, 3, 10, &mut rng);
            let scale = c(-3.7, 12.1);
            let snaps = (0..fbs.m).map(|i| fbs.snapshot(i).iter().map(|z| z * scale).collect()).collect();
            let scaled = FrequencyBlockSet::from_raw(2, 2, 3, snaps).unwrap();
            for (a, b) in all_stats(&fbs, case).iter().zip(all_stats(&scaled, case)) {
                assert!(rel(b, *a) < 1e-9 || (a - b).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn null_mean_matches_dof() {
        // χ² mean law for the normalized Frobenius statistics at M = 64
        let (l, p, n, m, trials) = (2, 2, 4, 64, 300);
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        for case in [NoiseStructureCase::WhiteCorrelated, NoiseStructureCase::WhiteUncorrelated, NoiseStructureCase::ColoredUncorrelated] {
            let mut sum_stats = Vec::new();
            let mut avg_stats = Vec::new();
            for _ in 0..trials {
                let cov = sample_block_covariance(&gaussian_fbs(l, p, n, m, &mut rng));
                let cb = coherence(&cov, &s0_hat(&cov, case).unwrap()).unwrap();
                sum_stats.push(frob_sum_stat(&cb, m).normalized);
                if case.is_white() {
                    avg_stats.push(frob_avg_stat(&cb, m).unwrap().normalized);
                }
            }
            let check = |xs: &[f64], dof: u64| {
                let mean = xs.iter().sum::<f64>() / xs.len() as f64;
                let se = (2.0 * dof as f64 / xs.len() as f64).sqrt();
                assert!((mean - dof as f64).abs() < 3.0 * se, "{case}: mean {mean} vs dof {dof}");
            };
            check(&sum_stats, detector_dof(DetectorKind::FrobeniusSum, case, l, p, n).unwrap());
            if case.is_white() {
                check(&avg_stats, detector_dof(DetectorKind::FrobeniusAvg, case, l, p, n).unwrap());
            }
        }
    }

    #[test]
    fn case_one_null_mean_large_geometry() {
        let (l, p, n, m, trials) = (3, 3, 64, 64, 40);
        let mut rng = ChaCha8Rng::seed_from_u64(4608);
        let mut total = 0.0;
        for _ in 0..trials {
            let cov = sample_block_covariance(&gaussian_fbs(l, p, n, m, &mut rng));
            let cb = estimate_coherence(&cov, NoiseStructureCase::ColoredUncorrelated).unwrap();
            total += frob_sum_stat(&cb, m).normalized;
        }
        let mean = total / trials as f64;
        assert!(rel(mean, 4608.0) < 0.02, "mean {mean}");
    }
}
