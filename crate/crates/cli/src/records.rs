//! Strategy comparison records and rankings.

use serde::Serialize;
use trotter_core::error_op::{build_error_operator, NormKind};
use trotter_core::hamiltonian::{QubitHamiltonian, TrotterConfig};
use trotter_core::ordering::{order, OrderingStrategy, StrategyOptions};
use trotter_core::sim::{measure_trotter_error_with, EigenPair};

use crate::error::Result;

/// Errors closer than this are ranked as ties.
pub const TIE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisRecord {
    pub label: String,
    pub qubits: usize,
    pub term_count: usize,
    pub strategy: OrderingStrategy,
    pub trotter_order: u8,
    pub steps: usize,
    pub time: f64,
    pub measured_error: f64,
    /// `measured_error` minus that of the magnitude ordering.
    pub delta_vs_magnitude: f64,
    pub coeff_one_norm: Option<f64>,
    pub spectral_norm: Option<f64>,
    /// 1-based position in the ranking; tied strategies share a rank.
    pub rank: usize,
    pub timestamp: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StrategyRanking {
    pub label: String,
    /// Strategies by ascending measured error.
    pub order: Vec<OrderingStrategy>,
    pub ranks: Vec<usize>,
    pub tied: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct CompareOptions {
    pub strategy: StrategyOptions,
    pub config: TrotterConfig,
    /// Also report error-operator norms at `Δt`; spectral only when the
    /// register is small enough for a dense solve.
    pub norms: Option<NormKind>,
}

/// Measures every strategy on `h` and ranks them.
pub fn compare(
    h: &QubitHamiltonian,
    ground: &EigenPair,
    strategies: &[OrderingStrategy],
    opts: &CompareOptions,
) -> Result<(Vec<AnalysisRecord>, StrategyRanking)> {
    let measure = |s: OrderingStrategy| -> Result<(f64, QubitHamiltonian)> {
        let r = order(h, s, &opts.strategy)?;
        let e = measure_trotter_error_with(&r.ordered, ground, &opts.config)?.measured_error;
        Ok((e, r.ordered))
    };
    let baseline = measure(OrderingStrategy::Magnitude)?.0;
    let stamp = crate::output::timestamp();
    let dt = opts.config.step_size();
    let mut records = Vec::with_capacity(strategies.len());
    for &s in strategies {
        let (e, ordered) = measure(s)?;
        let (coeff, spectral) = match opts.norms {
            None => (None, None),
            Some(kind) => {
                let v = build_error_operator(&ordered, dt);
                let spectral = match kind {
                    NormKind::Spectral => Some(v.norm(NormKind::Spectral)?),
                    NormKind::CoeffOneNorm => None,
                };
                (Some(v.coeff_one_norm()), spectral)
            }
        };
        records.push(AnalysisRecord {
            label: h.label().to_string(),
            qubits: h.qubit_count(),
            term_count: h.len(),
            strategy: s,
            trotter_order: opts.config.order.number(),
            steps: opts.config.trotter_number,
            time: opts.config.total_time,
            measured_error: e,
            delta_vs_magnitude: e - baseline,
            coeff_one_norm: coeff,
            spectral_norm: spectral,
            rank: 0,
            timestamp: stamp,
        });
    }
    let ranking = rank(h.label(), &mut records);
    Ok((records, ranking))
}

/// Assigns ranks in place and returns the ranking. Sorting is stable, so
/// ties keep their input order.
pub fn rank(label: &str, records: &mut [AnalysisRecord]) -> StrategyRanking {
    let mut idx: Vec<usize> = (0..records.len()).collect();
    idx.sort_by(|&a, &b| {
        records[a]
            .measured_error
            .total_cmp(&records[b].measured_error)
    });
    let mut ranks = Vec::with_capacity(idx.len());
    let mut tied = false;
    let mut current = 0;
    for (pos, &i) in idx.iter().enumerate() {
        let same = pos > 0
            && (records[i].measured_error - records[idx[pos - 1]].measured_error).abs()
                <= TIE_TOLERANCE;
        if same {
            tied = true;
        } else {
            current = pos + 1;
        }
        records[i].rank = current;
        ranks.push(current);
    }
    StrategyRanking {
        label: label.to_string(),
        order: idx.iter().map(|&i| records[i].strategy).collect(),
        ranks,
        tied,
    }
}
