//! Monte Carlo engine: Haar-orthogonal sampling, truncated products, spectra
//! through the in-house Schur solver, and estimators for every statistic the
//! exact modules predict.
//!
//! Reproducibility contract: realization `i` of a run with master seed `s`
//! draws from an independent ChaCha stream (seed `s`, stream `i`), so results
//! are identical for any worker count; aggregation happens in realization
//! order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::corr::EnsembleSpec;
use crate::error::{Error, Result};
use crate::schur::{real_schur_spectrum, Mat};

/// Gaussian draws by Box-Muller over a dedicated counter-based stream.
pub struct GaussianStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(master_seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream);
        Self { rng, spare: None }
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1], u2 in [0, 1)
        let u1: f64 = 1.0 - self.rng.gen::<f64>();
        let u2: f64 = self.rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// Thin Householder QR of a column-major m x n matrix (m >= n), returning the
/// first `keep` rows of Q with the sign convention that makes the factor Haar
/// distributed (columns flipped so that the R diagonal is positive).
fn thin_q_block(a: &mut [f64], m: usize, n: usize, keep: usize) -> Mat {
    let mut betas = vec![0.0f64; n];
    let mut signs = vec![1.0f64; n];
    for k in 0..n {
        let col = &mut a[k * m..(k + 1) * m];
        let norm2: f64 = col[k..].iter().map(|x| x * x).sum();
        let norm = norm2.sqrt();
        if norm == 0.0 {
            betas[k] = 0.0;
            continue;
        }
        let sign = if col[k] >= 0.0 { 1.0 } else { -1.0 };
        col[k] += sign * norm;
        betas[k] = 1.0 / (sign * norm * col[k]);
        // R_kk = -sign * norm; the Haar correction flips column k by its sign
        signs[k] = -sign;
        let (head, rest) = a.split_at_mut((k + 1) * m);
        let v = &head[k * m + k..(k + 1) * m];
        let beta = betas[k];
        for j in 0..n - k - 1 {
            let colj = &mut rest[j * m + k..(j + 1) * m];
            let dot: f64 = v.iter().zip(colj.iter()).map(|(x, y)| x * y).sum();
            let f = beta * dot;
            for (x, y) in v.iter().zip(colj.iter_mut()) {
                *y -= f * x;
            }
        }
    }
    // accumulate Q e_c = H_0 ... H_{n-1} e_c; reflectors with index > c leave
    // e_c untouched
    let mut out = Mat::zeros(keep, n);
    let mut q = vec![0.0f64; m];
    for c in 0..n {
        q.iter_mut().for_each(|x| *x = 0.0);
        q[c] = 1.0;
        for k in (0..=c.min(n - 1)).rev() {
            if betas[k] == 0.0 {
                continue;
            }
            let v = &a[k * m + k..(k + 1) * m];
            let dot: f64 = v.iter().zip(q[k..].iter()).map(|(x, y)| x * y).sum();
            let f = betas[k] * dot;
            for (x, y) in v.iter().zip(q[k..].iter_mut()) {
                *y -= f * x;
            }
        }
        for r in 0..keep {
            out[(r, c)] = q[r] * signs[c];
        }
    }
    out
}

/// Haar-distributed n x n orthogonal matrix: QR of an iid Gaussian matrix
/// with the R-diagonal sign correction (Mezzadri's recipe).
pub fn haar_orthogonal(n: usize, stream: &mut GaussianStream) -> Mat {
    let mut g = vec![0.0f64; n * n];
    for x in g.iter_mut() {
        *x = stream.next_normal();
    }
    thin_q_block(&mut g, n, n, n)
}

/// N x N leading sub-block of an (l + n) x (l + n) Haar orthogonal matrix.
/// Only the first n columns of the big matrix are ever materialised.
pub fn sample_truncation(n: usize, l: u32, stream: &mut GaussianStream) -> Mat {
    let m = n + l as usize;
    let mut g = vec![0.0f64; m * n];
    for x in g.iter_mut() {
        *x = stream.next_normal();
    }
    thin_q_block(&mut g, m, n, n)
}

/// Product of m independent truncated factors.
pub fn sample_product(spec: &EnsembleSpec, stream: &mut GaussianStream) -> Mat {
    let n = spec.n();
    let mut p = sample_truncation(n, spec.ls()[0], stream);
    for &l in &spec.ls()[1..] {
        let x = sample_truncation(n, l, stream);
        p = p.matmul(&x);
    }
    p
}

/// Eigenvalues of one realization: real eigenvalues plus upper-half-plane
/// representatives of the conjugate pairs, with the stream bookkeeping.
#[derive(Clone, Debug)]
pub struct SpectrumSample {
    pub reals: Vec<f64>,
    pub complex_pairs: Vec<(f64, f64)>,
    pub index: u64,
    pub seed: u64,
}

impl SpectrumSample {
    pub fn real_count(&self) -> usize {
        self.reals.len()
    }
}

/// Draw realization `index` of the ensemble and compute its spectrum.
pub fn realization(spec: &EnsembleSpec, master_seed: u64, index: u64) -> Result<SpectrumSample> {
    let mut stream = GaussianStream::new(master_seed, index);
    let p = sample_product(spec, &mut stream);
    let s = real_schur_spectrum(&p)?;
    Ok(SpectrumSample {
        reals: s.reals,
        complex_pairs: s.complex_pairs,
        index,
        seed: master_seed,
    })
}

/// Histogram bin specification. Freedman-Diaconis by default; fixed edges for
/// law comparisons.
#[derive(Clone, Copy, Debug)]
pub enum BinSpec {
    FreedmanDiaconis,
    Fixed { lo: f64, hi: f64, count: usize },
}

impl Default for BinSpec {
    fn default() -> Self {
        BinSpec::FreedmanDiaconis
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub spec: EnsembleSpec,
    pub realizations: u64,
    pub seed: u64,
    /// 0 = use the global thread pool.
    pub workers: usize,
    pub bins: BinSpec,
    /// cap on retained scatter points
    pub scatter_cap: usize,
}

impl RunConfig {
    pub fn new(spec: EnsembleSpec, realizations: u64, seed: u64) -> Self {
        Self {
            spec,
            realizations,
            seed,
            workers: 0,
            bins: BinSpec::default(),
            scatter_cap: 4000,
        }
    }
}

/// Plain histogram with density normalisation.
#[derive(Clone, Debug, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// counts / (total * width): integrates to 1 over the binned range
    pub densities: Vec<f64>,
}

impl Histogram {
    pub fn new(data: &[f64], bins: BinSpec) -> Self {
        let (lo, hi, count) = match bins {
            BinSpec::Fixed { lo, hi, count } => (lo, hi, count.max(1)),
            BinSpec::FreedmanDiaconis => {
                if data.is_empty() {
                    (0.0, 1.0, 1)
                } else {
                    let mut sorted = data.to_vec();
                    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    let lo = sorted[0];
                    let hi = *sorted.last().unwrap();
                    let q1 = sorted[(sorted.len() - 1) / 4];
                    let q3 = sorted[3 * (sorted.len() - 1) / 4];
                    let iqr = (q3 - q1).max(1e-12);
                    let width = 2.0 * iqr / (sorted.len() as f64).cbrt();
                    let count = (((hi - lo) / width).ceil() as usize).clamp(1, 10_000);
                    (lo, hi, count)
                }
            }
        };
        let width = (hi - lo) / count as f64;
        let mut counts = vec![0u64; count];
        let mut total = 0u64;
        for &x in data {
            if x < lo || x > hi {
                continue;
            }
            let mut b = ((x - lo) / width) as usize;
            if b >= count {
                b = count - 1;
            }
            counts[b] += 1;
            total += 1;
        }
        let densities = counts
            .iter()
            .map(|&c| {
                if total == 0 {
                    0.0
                } else {
                    c as f64 / (total as f64 * width)
                }
            })
            .collect();
        let edges = (0..=count).map(|i| lo + i as f64 * width).collect();
        Self {
            edges,
            counts,
            densities,
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let total: u64 = self.counts.iter().sum();
        self.counts
            .iter()
            .map(|&c| if total == 0 { 0.0 } else { c as f64 / total as f64 })
            .collect()
    }
}

/// Binned total-variation distance: half the L1 distance between two
/// probability vectors on common bins.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Aggregated counting statistics of a run.
#[derive(Clone, Debug)]
pub struct CountsReport {
    pub spec: EnsembleSpec,
    pub realizations: u64,
    pub seed: u64,
    /// (k, frequency) for each k with the parity of N up to N
    pub counts: Vec<(usize, u64)>,
    pub mean: f64,
    pub variance: f64,
    /// standardized counts (k - mean)/sqrt((2 - sqrt 2) mean) for normality
    /// diagnostics
    pub standardized: Vec<f64>,
    pub elapsed_seconds: f64,
}

impl CountsReport {
    pub fn phat(&self, k: usize) -> f64 {
        self.counts
            .iter()
            .find(|&&(kk, _)| kk == k)
            .map_or(0.0, |&(_, c)| c as f64 / self.realizations as f64)
    }

    pub fn stderr(&self, k: usize) -> f64 {
        let p = self.phat(k);
        (p * (1.0 - p) / self.realizations as f64).sqrt()
    }

    pub fn variance_over_mean(&self) -> f64 {
        self.variance / self.mean
    }
}

/// Full per-eigenvalue data of a run.
#[derive(Clone, Debug)]
pub struct McReport {
    pub counts: CountsReport,
    pub all_reals: Vec<f64>,
    /// moduli of the upper-half-plane representatives
    pub pair_moduli: Vec<f64>,
    /// (re, im) sample of the spectrum, reals included with im = 0
    pub scatter: Vec<(f64, f64)>,
}

fn run_samples(config: &RunConfig) -> Result<Vec<SpectrumSample>> {
    let indices: Vec<u64> = (0..config.realizations).collect();
    let work = || -> Result<Vec<SpectrumSample>> {
        indices
            .par_iter()
            .map(|&i| realization(&config.spec, config.seed, i))
            .collect()
    };
    if config.workers == 0 {
        work()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
        pool.install(work)
    }
}

fn counts_from_samples(
    config: &RunConfig,
    samples: &[SpectrumSample],
    elapsed_seconds: f64,
) -> CountsReport {
    let n = config.spec.n();
    let mut freq = vec![0u64; n + 1];
    for s in samples {
        freq[s.real_count()] += 1;
    }
    let counts: Vec<(usize, u64)> = (n % 2..=n).step_by(2).map(|k| (k, freq[k])).collect();
    let total = config.realizations as f64;
    let mean = samples.iter().map(|s| s.real_count() as f64).sum::<f64>() / total;
    let variance = samples
        .iter()
        .map(|s| (s.real_count() as f64 - mean).powi(2))
        .sum::<f64>()
        / total;
    let sd = ((2.0 - 2f64.sqrt()) * mean).sqrt();
    let standardized = samples
        .iter()
        .map(|s| (s.real_count() as f64 - mean) / sd)
        .collect();
    CountsReport {
        spec: config.spec.clone(),
        realizations: config.realizations,
        seed: config.seed,
        counts,
        mean,
        variance,
        standardized,
        elapsed_seconds,
    }
}

/// Estimate the distribution of the number of real eigenvalues.
pub fn estimate_real_count_distribution(config: &RunConfig) -> Result<CountsReport> {
    let t0 = std::time::Instant::now();
    let samples = run_samples(config)?;
    Ok(counts_from_samples(config, &samples, t0.elapsed().as_secs_f64()))
}

/// Run the ensemble and keep all spectral data for density estimation.
pub fn estimate_densities(config: &RunConfig) -> Result<McReport> {
    let t0 = std::time::Instant::now();
    let samples = run_samples(config)?;
    let counts = counts_from_samples(config, &samples, t0.elapsed().as_secs_f64());
    let mut all_reals = Vec::new();
    let mut pair_moduli = Vec::new();
    let mut scatter = Vec::new();
    for s in &samples {
        all_reals.extend_from_slice(&s.reals);
        pair_moduli.extend(s.complex_pairs.iter().map(|(re, im)| (re * re + im * im).sqrt()));
        if scatter.len() < config.scatter_cap {
            for &x in &s.reals {
                scatter.push((x, 0.0));
            }
            for &(re, im) in &s.complex_pairs {
                scatter.push((re, im));
            }
        }
    }
    scatter.truncate(config.scatter_cap);
    Ok(McReport {
        counts,
        all_reals,
        pair_moduli,
        scatter,
    })
}

// ---- deterministic renderings of the run outputs ----

/// counts.csv: one row per admissible k.
pub fn counts_csv(report: &CountsReport) -> String {
    let mut out = String::from("k,count,phat,stderr\n");
    for &(k, c) in &report.counts {
        out.push_str(&format!(
            "{},{},{},{}\n",
            k,
            c,
            report.phat(k),
            report.stderr(k)
        ));
    }
    out
}

/// Histogram CSV with an optional law column evaluated at bin centres.
pub fn histogram_csv(hist: &Histogram, law: Option<&dyn Fn(f64) -> f64>) -> String {
    let mut out = String::from("bin_lo,bin_hi,center,count,density,law\n");
    for i in 0..hist.counts.len() {
        let lo = hist.edges[i];
        let hi = hist.edges[i + 1];
        let c = 0.5 * (lo + hi);
        let lv = law.map_or(0.0, |f| f(c));
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            lo, hi, c, hist.counts[i], hist.densities[i], lv
        ));
    }
    out
}

pub fn scatter_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("re,im\n");
    for &(re, im) in points {
        out.push_str(&format!("{},{}\n", re, im));
    }
    out
}

/// summary.json contents. The timing field is wall-clock and is the only
/// entry that varies between identical runs.
pub fn summary_json(report: &CountsReport) -> serde_json::Value {
    let counts: Vec<serde_json::Value> = report
        .counts
        .iter()
        .map(|&(k, c)| {
            serde_json::json!({
                "k": k,
                "count": c,
                "phat": report.phat(k),
                "stderr": report.stderr(k),
            })
        })
        .collect();
    serde_json::json!({
        "N": report.spec.n(),
        "Ls": report.spec.ls(),
        "realizations": report.realizations,
        "seed": report.seed,
        "mean": report.mean,
        "variance": report.variance,
        "variance_over_mean": report.variance_over_mean(),
        "counts": counts,
        "timing_seconds": report.elapsed_seconds,
    })
}

/// Anderson-Darling statistic of a sample against the standard normal with
/// fully specified parameters.
pub fn anderson_darling_normal(sample: &[f64]) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    let nf = n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let phi_lo = crate::special::normal_cdf(xs[i]).clamp(1e-300, 1.0 - 1e-16);
        let phi_hi = crate::special::normal_cdf(xs[n - 1 - i]).clamp(1e-300, 1.0 - 1e-16);
        acc += (2.0 * i as f64 + 1.0) * (phi_lo.ln() + (1.0 - phi_hi).ln());
    }
    -nf - acc / nf
}
