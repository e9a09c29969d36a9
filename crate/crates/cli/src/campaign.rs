//! Parallel evaluation of many orderings of one Hamiltonian.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use trotter_core::error_op::{build_error_operator, NormKind};
use trotter_core::hamiltonian::{
    factor_totally_commuting, FactoredHamiltonian, QubitHamiltonian, TrotterConfig,
};
use trotter_core::ordering::{enumerate_orderings, random_orderings, Enumeration};
use trotter_core::sim::{
    expectation, ground_state, measure_trotter_error_with, measure_unlogged, EigenPair,
    TrotterErrorReport, LOW_OVERLAP,
};

use crate::error::{CliError, Result};

/// Orderings evaluated per parallel task.
const CHUNK: u64 = 2048;

/// Measures Trotter errors of orderings of a Hamiltonian's active part.
///
/// The totally commuting terms are factored out first. They commute with
/// every other term, so their exponentials split off exactly and the error
/// of any full ordering equals that of its active part, measured on the
/// ground state of the full Hamiltonian.
#[derive(Debug)]
pub struct Evaluator {
    pub factored: FactoredHamiltonian,
    /// Ground state of the full Hamiltonian, with the active part's
    /// eigenvalue on it as the energy.
    pub ground: EigenPair,
    pub full_energy: f64,
    pub config: TrotterConfig,
    low_overlap: AtomicUsize,
}

impl Clone for Evaluator {
    fn clone(&self) -> Self {
        Evaluator {
            factored: self.factored.clone(),
            ground: self.ground.clone(),
            full_energy: self.full_energy,
            config: self.config,
            low_overlap: AtomicUsize::new(self.low_overlap.load(Ordering::Relaxed)),
        }
    }
}

impl Evaluator {
    pub fn new(h: &QubitHamiltonian, config: TrotterConfig) -> Result<Self> {
        let full = ground_state(h)?;
        Ok(Self::with_ground(h, full, config))
    }

    pub fn with_ground(h: &QubitHamiltonian, full: EigenPair, config: TrotterConfig) -> Self {
        let factored = factor_totally_commuting(h);
        let energy = expectation(&full.state, factored.active_part.terms()).re;
        let full_energy = full.energy;
        Evaluator {
            factored,
            ground: EigenPair { energy, ..full },
            full_energy,
            config,
            low_overlap: AtomicUsize::new(0),
        }
    }

    pub fn active(&self) -> &QubitHamiltonian {
        &self.factored.active_part
    }

    /// Report for the active part permuted by `perm`.
    pub fn report(&self, perm: &[usize]) -> Result<TrotterErrorReport> {
        let ordered = self.active().permuted(perm);
        let mut r = measure_trotter_error_with(&ordered, &self.ground, &self.config)?;
        r.permutation = Some(perm.to_vec());
        Ok(r)
    }

    pub fn error(&self, perm: &[usize]) -> Result<f64> {
        Ok(self.quiet(perm)?.measured_error)
    }

    fn quiet(&self, perm: &[usize]) -> Result<TrotterErrorReport> {
        let ordered = self.active().permuted(perm);
        let r = measure_unlogged(&ordered, &self.ground, &self.config)?;
        if r.overlap < LOW_OVERLAP {
            self.low_overlap.fetch_add(1, Ordering::Relaxed);
        }
        Ok(r)
    }

    /// Logs, once, how many evaluations since the last call had low overlap.
    pub fn flush_warnings(&self) {
        let n = self.low_overlap.swap(0, Ordering::Relaxed);
        if n > 0 {
            warn!("{n} orderings had |<psi0|U|psi0>| < {LOW_OVERLAP}; their phase estimates may be unreliable");
        }
    }

    /// Errors for permutations `range` of `space`, in index order.
    pub fn evaluate_range(&self, space: &Enumeration, range: Range<u64>) -> Result<Vec<f64>> {
        let chunks: Vec<Range<u64>> = (range.start..range.end)
            .step_by(CHUNK as usize)
            .map(|s| s..(s + CHUNK).min(range.end))
            .collect();
        let parts = chunks
            .into_par_iter()
            .map(|r| {
                space
                    .range(r)
                    .map(|p| self.error(&p))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(parts.concat())
    }

    /// Errors for explicit permutations, in input order.
    pub fn evaluate_all(&self, perms: &[Vec<usize>]) -> Result<Vec<f64>> {
        perms.par_iter().map(|p| self.error(p)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct CheckpointOptions {
    pub path: PathBuf,
    /// Orderings between checkpoint writes.
    pub interval: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Progress {
    tool: String,
    version: String,
    hamiltonian: String,
    config: TrotterConfig,
    total: u64,
    completed: u64,
}

fn rows_path(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".rows");
    PathBuf::from(p)
}

fn write_progress(path: &Path, progress: &Progress) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, serde_json::to_vec_pretty(progress)?)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Errors already recorded by a compatible checkpoint, if any.
fn resume(opts: &CheckpointOptions, expected: &Progress) -> Result<Vec<f64>> {
    let Ok(text) = fs::read_to_string(&opts.path) else {
        return Ok(Vec::new());
    };
    let saved: Progress = serde_json::from_str(&text)?;
    if saved.hamiltonian != expected.hamiltonian
        || saved.config != expected.config
        || saved.total != expected.total
    {
        return Err(CliError::Input(format!(
            "checkpoint {} belongs to a different campaign",
            opts.path.display()
        )));
    }
    let file = File::open(rows_path(&opts.path))?;
    let mut errors = Vec::with_capacity(saved.completed as usize);
    for line in BufReader::new(file).lines().take(saved.completed as usize) {
        let line = line?;
        errors.push(
            line.trim()
                .parse()
                .map_err(|_| CliError::Input(format!("corrupt checkpoint row `{line}`")))?,
        );
    }
    if errors.len() as u64 != saved.completed {
        return Err(CliError::Input("checkpoint rows truncated".into()));
    }
    Ok(errors)
}

/// All orderings of the active part with their errors, by permutation index.
#[derive(Debug, Clone)]
pub struct EnumerationOutcome {
    pub space: Enumeration,
    pub errors: Vec<f64>,
}

/// Exhaustively evaluates every ordering of the active part. With a
/// checkpoint, progress is saved every `interval` orderings and a rerun
/// resumes where the previous one stopped.
pub fn run_enumeration(
    eval: &Evaluator,
    cap: usize,
    checkpoint: Option<&CheckpointOptions>,
) -> Result<EnumerationOutcome> {
    let space = enumerate_orderings(eval.active(), cap)?;
    let total = space.len();
    let Some(opts) = checkpoint else {
        let errors = eval.evaluate_range(&space, 0..total)?;
        eval.flush_warnings();
        return Ok(EnumerationOutcome { space, errors });
    };
    let mut progress = Progress {
        tool: crate::output::TOOL.into(),
        version: crate::output::VERSION.into(),
        hamiltonian: eval.active().serialize(),
        config: eval.config,
        total,
        completed: 0,
    };
    let mut errors = resume(opts, &progress)?;
    if errors.is_empty() {
        File::create(rows_path(&opts.path))?;
    } else {
        info!("resuming at ordering {} of {total}", errors.len());
    }
    let interval = opts.interval.max(1);
    while (errors.len() as u64) < total {
        let start = errors.len() as u64;
        let end = (start + interval).min(total);
        let block = eval.evaluate_range(&space, start..end)?;
        let file = OpenOptions::new()
            .append(true)
            .open(rows_path(&opts.path))?;
        let mut w = BufWriter::new(file);
        for e in &block {
            writeln!(w, "{e:?}")?;
        }
        w.flush()?;
        errors.extend(block);
        progress.completed = end;
        write_progress(&opts.path, &progress)?;
        info!("checkpoint: {end} / {total}");
    }
    eval.flush_warnings();
    Ok(EnumerationOutcome { space, errors })
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Fraction of values `≤ threshold`.
pub fn fraction_at_most(values: &[f64], threshold: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().filter(|&&v| v <= threshold).count() as f64 / values.len() as f64
}

/// `(error, cumulative fraction)` at `bins` evenly spaced edges from the
/// minimum to the maximum, preceded by the minimum itself.
pub fn cdf_points(sorted: &[f64], bins: usize) -> Vec<[f64; 2]> {
    if sorted.is_empty() {
        return Vec::new();
    }
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    let n = sorted.len() as f64;
    let at = |x: f64| sorted.partition_point(|&v| v <= x) as f64 / n;
    let mut pts = vec![[lo, at(lo)]];
    for k in 1..=bins {
        let x = if k == bins {
            hi
        } else {
            lo + (hi - lo) * k as f64 / bins as f64
        };
        pts.push([x, at(x)]);
    }
    pts
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderingRef {
    pub perm_id: u64,
    pub error: f64,
    /// Active-part term strings in application order.
    pub order: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdFraction {
    pub threshold: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnumerationSummary {
    pub schema: &'static str,
    pub version: &'static str,
    pub label: String,
    pub qubits: usize,
    pub active_terms: usize,
    pub commuting_terms: usize,
    pub orderings: u64,
    pub trotter_order: u8,
    pub steps: usize,
    pub time: f64,
    pub min: f64,
    pub max: f64,
    /// `max / min`, absent when the minimum is zero.
    pub spread: Option<f64>,
    pub argmin: OrderingRef,
    pub argmax: OrderingRef,
    pub quantiles: Vec<[f64; 2]>,
    pub thresholds: Vec<ThresholdFraction>,
    pub cdf: Vec<[f64; 2]>,
    pub timestamp: u64,
}

pub const DEFAULT_QUANTILES: [f64; 7] = [0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99];

pub fn summarize(
    eval: &Evaluator,
    outcome: &EnumerationOutcome,
    thresholds: &[f64],
    bins: usize,
) -> EnumerationSummary {
    let errors = &outcome.errors;
    let mut sorted = errors.clone();
    sorted.sort_by(f64::total_cmp);
    // first index wins ties
    let arg = |better: fn(f64, f64) -> bool| {
        let mut best = 0;
        for (k, &e) in errors.iter().enumerate() {
            if better(e, errors[best]) {
                best = k;
            }
        }
        best as u64
    };
    let reference = |id: u64| {
        let perm = outcome.space.permutation(id);
        OrderingRef {
            perm_id: id,
            error: errors[id as usize],
            order: perm
                .iter()
                .map(|&i| eval.active().term(i).string.to_string())
                .collect(),
        }
    };
    let (imin, imax) = (arg(|a, b| a < b), arg(|a, b| a > b));
    let (min, max) = (errors[imin as usize], errors[imax as usize]);
    let active = eval.active();
    EnumerationSummary {
        schema: "enumerate-summary",
        version: crate::output::VERSION,
        label: active.label().to_string(),
        qubits: active.qubit_count(),
        active_terms: active.len(),
        commuting_terms: eval.factored.commuting_part.len(),
        orderings: outcome.space.len(),
        trotter_order: eval.config.order.number(),
        steps: eval.config.trotter_number,
        time: eval.config.total_time,
        min,
        max,
        spread: (min > 0.0).then(|| max / min),
        argmin: reference(imin),
        argmax: reference(imax),
        quantiles: DEFAULT_QUANTILES
            .iter()
            .map(|&q| [q, quantile(&sorted, q)])
            .collect(),
        thresholds: thresholds
            .iter()
            .map(|&t| ThresholdFraction {
                threshold: t,
                fraction: fraction_at_most(errors, t),
            })
            .collect(),
        cdf: cdf_points(&sorted, bins),
        timestamp: crate::output::timestamp(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleRow {
    pub sample_id: usize,
    /// Active-part indices in application order, space separated.
    pub permutation: String,
    pub error: f64,
    pub coeff_norm: f64,
    pub spectral_norm: Option<f64>,
}

/// Evaluates `count` seeded random orderings of the active part, with the
/// norms of their error operators at the configured step size.
pub fn sample_orderings(
    eval: &Evaluator,
    count: usize,
    seed: u64,
    spectral: bool,
) -> Result<Vec<SampleRow>> {
    let perms: Vec<Vec<usize>> = random_orderings(eval.active(), count, seed).collect();
    let dt = eval.config.step_size();
    let rows = perms
        .par_iter()
        .enumerate()
        .map(|(k, p)| {
            let ordered = eval.active().permuted(p);
            let error = eval.quiet(p)?.measured_error;
            let v = build_error_operator(&ordered, dt);
            let spectral_norm = if spectral {
                Some(v.norm(NormKind::Spectral)?)
            } else {
                None
            };
            Ok(SampleRow {
                sample_id: k,
                permutation: p
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
                error,
                coeff_norm: v.coeff_one_norm(),
                spectral_norm,
            })
        })
        .collect();
    eval.flush_warnings();
    rows
}

#[derive(Debug, Clone, Serialize)]
pub struct Histogram2d {
    pub schema: &'static str,
    pub version: &'static str,
    pub norm: NormKind,
    pub bins: usize,
    pub norm_range: [f64; 2],
    pub error_range: [f64; 2],
    /// Non-empty cells as `[norm_bin, error_bin, count]`.
    pub cells: Vec<[u64; 3]>,
}

fn bin_of(x: f64, lo: f64, hi: f64, bins: usize) -> usize {
    if hi <= lo {
        return 0;
    }
    (((x - lo) / (hi - lo) * bins as f64) as usize).min(bins - 1)
}

/// Joint `(norm, error)` histogram of samples.
pub fn joint_histogram(rows: &[SampleRow], norm: NormKind, bins: usize) -> Histogram2d {
    let bins = bins.max(1);
    let xs: Vec<f64> = rows
        .iter()
        .map(|r| match norm {
            NormKind::Spectral => r.spectral_norm.unwrap_or(r.coeff_norm),
            NormKind::CoeffOneNorm => r.coeff_norm,
        })
        .collect();
    let range = |v: &mut dyn Iterator<Item = f64>| {
        v.fold([f64::INFINITY, f64::NEG_INFINITY], |[a, b], x| {
            [a.min(x), b.max(x)]
        })
    };
    let nr = range(&mut xs.iter().copied());
    let er = range(&mut rows.iter().map(|r| r.error));
    let mut counts = std::collections::BTreeMap::<(usize, usize), u64>::new();
    for (x, r) in xs.iter().zip(rows) {
        let key = (
            bin_of(*x, nr[0], nr[1], bins),
            bin_of(r.error, er[0], er[1], bins),
        );
        *counts.entry(key).or_default() += 1;
    }
    Histogram2d {
        schema: "sample-histogram",
        version: crate::output::VERSION,
        norm,
        bins,
        norm_range: nr,
        error_range: er,
        cells: counts
            .into_iter()
            .map(|((i, j), c)| [i as u64, j as u64, c])
            .collect(),
    }
}
