//! Sample covariance blocks, null-structure estimates, and coherence blocks.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{frob_sq_dense, inv_sqrt, BlockDiagonalMatrix, HermitianMatrix};
use crate::transform::FrequencyBlockSet;

/// Structure of the noise covariance under the null hypothesis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseStructureCase {
    /// Temporally colored, spatially correlated (no extra structure).
    ColoredCorrelated,
    /// Case I: temporally colored, spatially uncorrelated.
    ColoredUncorrelated,
    /// Case II: temporally white, spatially correlated.
    WhiteCorrelated,
    /// Case III: temporally white, spatially uncorrelated.
    WhiteUncorrelated,
}

impl NoiseStructureCase {
    pub const ALL: [NoiseStructureCase; 4] = [
        NoiseStructureCase::ColoredCorrelated,
        NoiseStructureCase::ColoredUncorrelated,
        NoiseStructureCase::WhiteCorrelated,
        NoiseStructureCase::WhiteUncorrelated,
    ];

    pub fn is_white(self) -> bool {
        matches!(self, Self::WhiteCorrelated | Self::WhiteUncorrelated)
    }

    pub fn is_uncorrelated(self) -> bool {
        matches!(self, Self::ColoredUncorrelated | Self::WhiteUncorrelated)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::ColoredCorrelated => "colored-correlated",
            Self::ColoredUncorrelated => "colored-uncorrelated",
            Self::WhiteCorrelated => "white-correlated",
            Self::WhiteUncorrelated => "white-uncorrelated",
        }
    }
}

impl fmt::Display for NoiseStructureCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseStructureCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "colored-correlated" | "general" | "case0" => Ok(Self::ColoredCorrelated),
            "colored-uncorrelated" | "case1" | "i" => Ok(Self::ColoredUncorrelated),
            "white-correlated" | "case2" | "ii" => Ok(Self::WhiteCorrelated),
            "white-uncorrelated" | "case3" | "iii" => Ok(Self::WhiteUncorrelated),
            other => Err(Error::InvalidSpec(format!("unknown noise structure case `{other}`"))),
        }
    }
}

/// The `N` diagonal `LP × LP` blocks of the sample covariance of `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockCovariance {
    pub l: usize,
    pub p: usize,
    pub n: usize,
    pub m: usize,
    blocks: Vec<HermitianMatrix>,
}

impl BlockCovariance {
    pub fn from_blocks(l: usize, p: usize, m: usize, blocks: Vec<HermitianMatrix>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::EmptyInput("no covariance blocks"));
        }
        if let Some(b) = blocks.iter().find(|b| b.dim() != l * p) {
            return Err(Error::LengthMismatch { expected: l * p, actual: b.dim() });
        }
        Ok(Self { l, p, n: blocks.len(), m, blocks })
    }

    pub fn blocks(&self) -> &[HermitianMatrix] {
        &self.blocks
    }

    /// `L × L` sub-block `(k, κ)` of block `j`.
    pub fn sub_block(&self, j: usize, k: usize, kappa: usize) -> DMatrix<Complex64> {
        self.blocks[j].sub_block(k, kappa, self.l)
    }

    /// All `NP` diagonal `L × L` sub-blocks, ordered `(j, k)` lexicographically.
    pub fn diagonal_sub_blocks(&self) -> Vec<HermitianMatrix> {
        self.blocks
            .iter()
            .flat_map(|b| (0..self.p).map(move |k| b.diagonal_block(k, self.l)))
            .collect()
    }
}

/// `Ŝ_j = (1/M) Σ_i z_{i,j} z_{i,j}ᴴ` for every block `j`.
pub fn sample_block_covariance(fbs: &FrequencyBlockSet) -> BlockCovariance {
    let lp = fbs.block_dim();
    let inv_m = 1.0 / fbs.m as f64;
    let blocks = (0..fbs.n)
        .map(|j| {
            // column-major upper triangle accumulation
            let mut acc = vec![Complex64::new(0.0, 0.0); lp * lp];
            for i in 0..fbs.m {
                let z = fbs.block(i, j);
                for b in 0..lp {
                    let zb = z[b].conj();
                    let col = &mut acc[b * lp..b * lp + b + 1];
                    for (a, slot) in col.iter_mut().enumerate() {
                        *slot += z[a] * zb;
                    }
                }
            }
            for b in 0..lp {
                for a in 0..b {
                    acc[a * lp + b] = acc[b * lp + a].conj();
                }
                acc[b * lp + b] = Complex64::new(acc[b * lp + b].re, 0.0);
            }
            for v in acc.iter_mut() {
                *v *= inv_m;
            }
            HermitianMatrix::from_hermitian_unchecked(DMatrix::from_vec(lp, lp, acc))
        })
        .collect();
    BlockCovariance { l: fbs.l, p: fbs.p, n: fbs.n, m: fbs.m, blocks }
}

/// Maximum-likelihood estimate of the null covariance: block-diagonal with
/// `L × L` blocks. Colored cases keep one block per frequency bin (`NP`
/// blocks, index `j·P + k`); white cases store the single shared block once.
#[derive(Clone, Debug, PartialEq)]
pub struct NullEstimate {
    pub case: NoiseStructureCase,
    pub l: usize,
    pub p: usize,
    pub n: usize,
    blocks: BlockDiagonalMatrix,
}

impl NullEstimate {
    pub fn blocks(&self) -> &BlockDiagonalMatrix {
        &self.blocks
    }

    pub fn is_shared(&self) -> bool {
        self.case.is_white()
    }

    /// The `L × L` block that applies to sub-slot `k` of frequency block `j`.
    pub fn block_for(&self, j: usize, k: usize) -> &HermitianMatrix {
        if self.is_shared() {
            &self.blocks.blocks()[0]
        } else {
            &self.blocks.blocks()[j * self.p + k]
        }
    }

    /// Expands the repetition structure into the full `NP` block list.
    pub fn expanded(&self) -> BlockDiagonalMatrix {
        let np = self.n * self.p;
        if self.is_shared() {
            BlockDiagonalMatrix::new(vec![self.blocks.blocks()[0].clone(); np]).expect("uniform blocks")
        } else {
            self.blocks.clone()
        }
    }
}

/// Null covariance estimate for the given noise structure.
pub fn s0_hat(cov: &BlockCovariance, case: NoiseStructureCase) -> Result<NullEstimate> {
    let l = cov.l;
    let subs = cov.diagonal_sub_blocks();
    let blocks = match case {
        NoiseStructureCase::ColoredCorrelated => subs,
        NoiseStructureCase::ColoredUncorrelated => subs.iter().map(HermitianMatrix::diagonal_part).collect(),
        NoiseStructureCase::WhiteCorrelated | NoiseStructureCase::WhiteUncorrelated => {
            let np = subs.len() as f64;
            let mut avg = HermitianMatrix::zeros(l);
            for s in &subs {
                avg = avg.add(s);
            }
            let avg = avg.scale(1.0 / np);
            if case == NoiseStructureCase::WhiteUncorrelated {
                vec![avg.diagonal_part()]
            } else {
                vec![avg]
            }
        }
    };
    for b in &blocks {
        let d = b.real_diagonal();
        if let Some(&bad) = d.iter().find(|&&v| !(v > 0.0)) {
            let max = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            return Err(Error::NotPositiveDefinite { min_eig: bad, max_eig: max });
        }
    }
    Ok(NullEstimate { case, l, p: cov.p, n: cov.n, blocks: BlockDiagonalMatrix::new(blocks)? })
}

/// Coherence blocks `Ĉ_j` plus the derived averages used by the statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceBlocks {
    pub case: NoiseStructureCase,
    pub l: usize,
    pub p: usize,
    pub n: usize,
    blocks: Vec<HermitianMatrix>,
    /// `Ĉ_av = (1/N) Σ_j Ĉ_j`.
    average: HermitianMatrix,
    /// `C̄_j = (1/P) Σ_k Ĉ_j^(k,k)`, one `L × L` matrix per block.
    sub_averages: Vec<HermitianMatrix>,
}

impl CoherenceBlocks {
    /// Wraps precomputed coherence blocks and derives the averages.
    pub fn from_blocks(case: NoiseStructureCase, l: usize, p: usize, blocks: Vec<HermitianMatrix>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::EmptyInput("no coherence blocks"));
        }
        if let Some(b) = blocks.iter().find(|b| b.dim() != l * p) {
            return Err(Error::LengthMismatch { expected: l * p, actual: b.dim() });
        }
        let n = blocks.len();
        let mut sum = DMatrix::<Complex64>::zeros(l * p, l * p);
        for b in &blocks {
            sum += b.as_matrix();
        }
        let average = HermitianMatrix::symmetrized(sum / Complex64::new(n as f64, 0.0));
        let sub_averages = blocks
            .iter()
            .map(|b| {
                let mut acc = DMatrix::<Complex64>::zeros(l, l);
                for k in 0..p {
                    acc += b.sub_block(k, k, l);
                }
                HermitianMatrix::symmetrized(acc / Complex64::new(p as f64, 0.0))
            })
            .collect();
        Ok(Self { case, l, p, n, blocks, average, sub_averages })
    }

    pub fn blocks(&self) -> &[HermitianMatrix] {
        &self.blocks
    }

    pub fn average(&self) -> &HermitianMatrix {
        &self.average
    }

    pub fn sub_averages(&self) -> &[HermitianMatrix] {
        &self.sub_averages
    }

    /// `Σ_j tr(Ĉ_j)`; equals `LNP` by construction of the normalization.
    pub fn trace_sum(&self) -> f64 {
        self.blocks.iter().map(HermitianMatrix::trace).sum()
    }
}

/// `Ĉ_j = R_j Ŝ_j R_j` with `R_j` the block-diagonal inverse square root of
/// the `j`-th `LP × LP` slice of `Ŝ₀`.
pub fn coherence(cov: &BlockCovariance, s0: &NullEstimate) -> Result<CoherenceBlocks> {
    let (l, p) = (cov.l, cov.p);
    let lp = l * p;
    if s0.l != l || s0.p != p || s0.n != cov.n {
        return Err(Error::InvalidSpec("null estimate does not match covariance geometry".into()));
    }
    let roots: Vec<HermitianMatrix> = s0.blocks().blocks().iter().map(inv_sqrt).collect::<Result<_>>()?;
    let root_for = |j: usize, k: usize| if s0.is_shared() { &roots[0] } else { &roots[j * p + k] };

    let blocks = if s0.case.is_uncorrelated() {
        cov.blocks()
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let d: Vec<f64> = (0..lp).map(|a| root_for(j, a / l).get(a % l, a % l).re).collect();
                let src = s.as_matrix();
                let m = DMatrix::from_fn(lp, lp, |a, b| src[(a, b)] * (d[a] * d[b]));
                HermitianMatrix::symmetrized(m)
            })
            .collect()
    } else {
        cov.blocks()
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let src = s.as_matrix();
                // U = S · diag(R_κ), then Ĉ = diag(R_k) · U
                let mut u = DMatrix::<Complex64>::zeros(lp, lp);
                for kappa in 0..p {
                    let r = root_for(j, kappa).as_matrix();
                    for c in 0..l {
                        let col = kappa * l + c;
                        for d in 0..l {
                            let w = r[(d, c)];
                            let scol = kappa * l + d;
                            for a in 0..lp {
                                u[(a, col)] += src[(a, scol)] * w;
                            }
                        }
                    }
                }
                let mut out = DMatrix::<Complex64>::zeros(lp, lp);
                for k in 0..p {
                    let r = root_for(j, k).as_matrix();
                    for b in 0..lp {
                        for row in 0..l {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for d in 0..l {
                                acc += r[(row, d)] * u[(k * l + d, b)];
                            }
                            out[(k * l + row, b)] = acc;
                        }
                    }
                }
                HermitianMatrix::symmetrized(out)
            })
            .collect()
    };
    CoherenceBlocks::from_blocks(s0.case, l, p, blocks)
}

/// Convenience: `s0_hat` followed by `coherence`.
pub fn estimate_coherence(cov: &BlockCovariance, case: NoiseStructureCase) -> Result<CoherenceBlocks> {
    coherence(cov, &s0_hat(cov, case)?)
}

/// One entry of the cyclic-coherence table: `‖Γ̂^(c)(2π·bin/NP)‖²_F`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CyclicCoherenceEntry {
    pub cycle: usize,
    pub bin: usize,
    pub frob_sq: f64,
}

/// Squared Frobenius norms of the sample cyclic coherence function for
/// cycle frequencies `c = 0 … P−1` (negative `c` mirror positive ones).
#[derive(Clone, Debug, PartialEq)]
pub struct CyclicCoherenceTable {
    pub l: usize,
    pub p: usize,
    pub n: usize,
    pub entries: Vec<CyclicCoherenceEntry>,
}

impl CyclicCoherenceTable {
    pub fn value(&self, cycle: usize, bin: usize) -> Option<f64> {
        self.entries.iter().find(|e| e.cycle == cycle && e.bin == bin).map(|e| e.frob_sq)
    }

    /// Number of bins available at cycle frequency `c`: `(P − c)·N`.
    pub fn bins_at(&self, cycle: usize) -> usize {
        (self.p - cycle) * self.n
    }

    /// `Σ_bin ‖Γ̂^(0)‖² + 2 Σ_{c≥1} Σ_bin ‖Γ̂^(c)‖²`, which reproduces
    /// `Σ_j ‖Ĉ_j‖²_F`.
    pub fn resummed_total(&self) -> f64 {
        self.entries.iter().map(|e| if e.cycle == 0 { e.frob_sq } else { 2.0 * e.frob_sq }).sum()
    }
}

/// Reads `Ĉ_j^(k,κ)` as the sample coherence function at cycle `k − κ` and
/// frequency bin `κN + j`.
pub fn cyclic_coherence_diagnostic(cb: &CoherenceBlocks) -> Result<CyclicCoherenceTable> {
    if !cb.case.is_white() {
        return Err(Error::WrongCase(cb.case.to_string()));
    }
    let (l, p, n) = (cb.l, cb.p, cb.n);
    let mut entries = Vec::new();
    for cycle in 0..p {
        for bin in 0..(p - cycle) * n {
            let (kappa, j) = (bin / n, bin % n);
            let k = kappa + cycle;
            let block = cb.blocks()[j].sub_block(k, kappa, l);
            entries.push(CyclicCoherenceEntry { cycle, bin, frob_sq: frob_sq_dense(&block) });
        }
    }
    Ok(CyclicCoherenceTable { l, p, n, entries })
}
