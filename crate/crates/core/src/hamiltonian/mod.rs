//! Qubit Hamiltonians: validated term lists, the text file format, the
//! totally-commuting factorisation and the evolution-time rule.
//!
//! The order of `terms` is the Trotter sequence order. Everything that
//! reorders a Hamiltonian produces a new value.

mod fixtures;

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{combine, PauliAxis, PauliError, PauliString, PauliTerm};

pub use fixtures::{
    builtin_fixture, reported_optimal_order, FIRST_ORDER_OPTIMAL_0_7414, FIXTURE_NAMES,
};

/// Coefficients with an imaginary part above this are rejected.
pub const REAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HamiltonianError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("term {index} has width {width}, expected {expected}")]
    WidthMismatch {
        index: usize,
        width: usize,
        expected: usize,
    },
    #[error("term {index} has non-real coefficient (imaginary part {imag:e})")]
    NonReal { index: usize, imag: f64 },
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("invalid Trotter configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// An ordered sum of real-weighted Pauli strings.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitHamiltonian {
    qubit_count: usize,
    terms: Vec<PauliTerm>,
    label: String,
}

impl QubitHamiltonian {
    /// Validates widths and Hermiticity and merges duplicate strings; the
    /// first occurrence of a string fixes its position.
    pub fn new(
        qubit_count: usize,
        terms: Vec<PauliTerm>,
        label: impl Into<String>,
    ) -> Result<Self, HamiltonianError> {
        for (index, t) in terms.iter().enumerate() {
            if t.width() != qubit_count {
                return Err(HamiltonianError::WidthMismatch {
                    index,
                    width: t.width(),
                    expected: qubit_count,
                });
            }
        }
        let mut terms = combine(terms);
        for (index, t) in terms.iter_mut().enumerate() {
            if t.coefficient.im.abs() >= REAL_TOLERANCE {
                return Err(HamiltonianError::NonReal {
                    index,
                    imag: t.coefficient.im,
                });
            }
            t.coefficient.im = 0.0;
        }
        Ok(QubitHamiltonian {
            qubit_count,
            terms,
            label: label.into(),
        })
    }

    /// Builds from `(coefficient, "Y3 Y2 X1 X0")` pairs.
    pub fn from_labels(
        qubit_count: usize,
        terms: &[(f64, &str)],
        label: impl Into<String>,
    ) -> Result<Self, HamiltonianError> {
        let terms = terms
            .iter()
            .map(|&(c, s)| {
                Ok(PauliTerm::real(
                    c,
                    PauliString::from_labels(qubit_count, s)?,
                ))
            })
            .collect::<Result<Vec<_>, PauliError>>()?;
        QubitHamiltonian::new(qubit_count, terms, label)
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn term(&self, i: usize) -> &PauliTerm {
        &self.terms[i]
    }

    /// Real coefficient of term `i`.
    pub fn coefficient(&self, i: usize) -> f64 {
        self.terms[i].coefficient.re
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms that take part in a Trotter sequence: non-identity with a
    /// non-zero coefficient.
    pub fn is_trotterizable(&self, i: usize) -> bool {
        let t = &self.terms[i];
        !t.string.is_identity() && t.coefficient.norm() != 0.0
    }

    pub fn trotterizable_indices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.is_trotterizable(i))
            .collect()
    }

    /// New Hamiltonian whose `k`-th term is `self.terms[perm[k]]`.
    ///
    /// Panics unless `perm` is a permutation of `0..len`.
    pub fn permuted(&self, perm: &[usize]) -> QubitHamiltonian {
        assert!(
            is_permutation(perm, self.len()),
            "not a permutation of 0..{}",
            self.len()
        );
        QubitHamiltonian {
            qubit_count: self.qubit_count,
            terms: perm.iter().map(|&i| self.terms[i].clone()).collect(),
            label: self.label.clone(),
        }
    }

    /// Subset of terms in the given order (indices must be distinct).
    pub fn select(&self, indices: &[usize]) -> QubitHamiltonian {
        QubitHamiltonian {
            qubit_count: self.qubit_count,
            terms: indices.iter().map(|&i| self.terms[i].clone()).collect(),
            label: self.label.clone(),
        }
    }

    /// Inserts `term` so that it ends up at `position`.
    pub fn inserted(&self, term: PauliTerm, position: usize) -> QubitHamiltonian {
        let mut terms = self.terms.clone();
        terms.insert(position, term);
        QubitHamiltonian {
            qubit_count: self.qubit_count,
            terms,
            label: self.label.clone(),
        }
    }

    /// Sum of `|c|` over all terms.
    pub fn coeff_one_norm(&self) -> f64 {
        self.terms.iter().map(PauliTerm::magnitude).sum()
    }

    pub fn parse(text: &str) -> Result<QubitHamiltonian, HamiltonianError> {
        parse(text)
    }

    pub fn serialize(&self) -> String {
        serialize(self)
    }
}

pub(crate) fn is_permutation(perm: &[usize], n: usize) -> bool {
    if perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}

/// Parses the line-oriented Hamiltonian format:
///
/// ```text
/// # comment
/// # label: h2
/// qubits: 4
/// -0.81262
/// -0.04532 Y3 Y2 X1 X0
/// ```
///
/// Duplicate strings are summed. Without a `qubits:` header the qubit count
/// is one more than the largest index seen (1 for identity-only input).
pub fn parse(text: &str) -> Result<QubitHamiltonian, HamiltonianError> {
    let err = |line: usize, message: String| HamiltonianError::Parse { line, message };

    let mut declared: Option<usize> = None;
    let mut label = String::new();
    // (line, coefficient, factors)
    type RawTerm = (usize, f64, Vec<(usize, PauliAxis)>);
    let mut raw: Vec<RawTerm> = Vec::new();

    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(l) = comment.trim().strip_prefix("label:") {
                label = l.trim().to_string();
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("qubits:") {
            if !raw.is_empty() {
                return Err(err(
                    line_no,
                    "`qubits:` header must precede all terms".into(),
                ));
            }
            if declared.is_some() {
                return Err(err(line_no, "duplicate `qubits:` header".into()));
            }
            let q: usize = rest
                .trim()
                .parse()
                .map_err(|_| err(line_no, format!("invalid qubit count `{}`", rest.trim())))?;
            if q == 0 {
                return Err(err(line_no, "qubit count must be at least 1".into()));
            }
            declared = Some(q);
            continue;
        }

        let mut tokens = line.split_whitespace();
        let coeff_tok = tokens.next().unwrap_or_default();
        let coefficient: f64 = coeff_tok
            .parse()
            .ok()
            .filter(|c: &f64| c.is_finite())
            .ok_or_else(|| err(line_no, format!("malformed coefficient `{coeff_tok}`")))?;

        let mut ops: Vec<(usize, PauliAxis)> = Vec::new();
        for tok in tokens {
            let mut chars = tok.chars();
            let axis = match chars.next().and_then(PauliAxis::from_char) {
                Some(a) if a != PauliAxis::I => a,
                _ => return Err(err(line_no, format!("unknown axis in `{tok}`"))),
            };
            let idx_str = chars.as_str();
            if idx_str.starts_with('-') {
                return Err(err(line_no, format!("negative qubit index in `{tok}`")));
            }
            let index: usize = idx_str
                .parse()
                .map_err(|_| err(line_no, format!("malformed qubit index in `{tok}`")))?;
            if let Some(q) = declared {
                if index >= q {
                    return Err(err(
                        line_no,
                        format!("qubit index {index} not below declared qubit count {q}"),
                    ));
                }
            }
            if ops.iter().any(|&(i, _)| i == index) {
                return Err(err(line_no, format!("qubit {index} appears twice")));
            }
            ops.push((index, axis));
        }
        raw.push((line_no, coefficient, ops));
    }

    let max_index = raw
        .iter()
        .flat_map(|(_, _, ops)| ops.iter().map(|&(i, _)| i))
        .max();
    let qubit_count = declared.unwrap_or_else(|| max_index.map_or(1, |m| m + 1));

    let mut terms = Vec::with_capacity(raw.len());
    for (line_no, c, ops) in raw {
        let s =
            PauliString::from_sparse(qubit_count, &ops).map_err(|e| err(line_no, e.to_string()))?;
        terms.push(PauliTerm::real(c, s));
    }
    QubitHamiltonian::new(qubit_count, terms, label)
}

/// Writes the header followed by the terms in their current order.
/// Coefficients use the shortest decimal form that round-trips exactly.
pub fn serialize(h: &QubitHamiltonian) -> String {
    let mut out = String::new();
    if !h.label.is_empty() {
        let _ = writeln!(out, "# label: {}", h.label);
    }
    let _ = writeln!(out, "qubits: {}", h.qubit_count);
    for t in &h.terms {
        let c = t.coefficient.re;
        if t.string.is_identity() {
            let _ = writeln!(out, "{c:?}");
        } else {
            let _ = writeln!(out, "{c:?} {}", t.string);
        }
    }
    out
}

/// The two halves of a Hamiltonian: terms commuting with every other term,
/// and the rest, which are the only ones that need Trotterising.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredHamiltonian {
    pub commuting_part: QubitHamiltonian,
    pub active_part: QubitHamiltonian,
    /// Original indices of `commuting_part` terms.
    pub commuting_indices: Vec<usize>,
    /// Original indices of `active_part` terms.
    pub active_indices: Vec<usize>,
}

pub fn factor_totally_commuting(h: &QubitHamiltonian) -> FactoredHamiltonian {
    let n = h.len();
    let mut commuting_indices = Vec::new();
    let mut active_indices = Vec::new();
    for i in 0..n {
        let s = &h.terms[i].string;
        let total = (0..n).all(|j| j == i || s.commutes_unchecked(&h.terms[j].string));
        if total {
            commuting_indices.push(i);
        } else {
            active_indices.push(i);
        }
    }
    FactoredHamiltonian {
        commuting_part: h.select(&commuting_indices),
        active_part: h.select(&active_indices),
        commuting_indices,
        active_indices,
    }
}

/// Evolution time from a reference energy: 1 when `|E| < 2π`, otherwise
/// `1 / (2π ⌊|E| / 2π⌋)`.
pub fn trotter_time(reference_energy: f64) -> f64 {
    let e = reference_energy.abs();
    if e < 2.0 * PI {
        1.0
    } else {
        1.0 / (2.0 * PI * (e / (2.0 * PI)).floor())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ApproximantOrder {
    First,
    Second,
}

impl ApproximantOrder {
    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(ApproximantOrder::First),
            2 => Some(ApproximantOrder::Second),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            ApproximantOrder::First => 1,
            ApproximantOrder::Second => 2,
        }
    }
}

/// Total evolution time, Trotter number and approximant order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrotterConfig {
    pub total_time: f64,
    pub trotter_number: usize,
    pub order: ApproximantOrder,
}

impl TrotterConfig {
    pub fn new(
        total_time: f64,
        trotter_number: usize,
        order: ApproximantOrder,
    ) -> Result<Self, HamiltonianError> {
        if !total_time.is_finite() {
            return Err(HamiltonianError::InvalidConfig(format!(
                "total time must be finite, got {total_time}"
            )));
        }
        if trotter_number == 0 {
            return Err(HamiltonianError::InvalidConfig(
                "Trotter number must be positive".into(),
            ));
        }
        Ok(TrotterConfig {
            total_time,
            trotter_number,
            order,
        })
    }

    /// `Δt = t / N_T`.
    pub fn step_size(&self) -> f64 {
        self.total_time / self.trotter_number as f64
    }
}

/// Sum of identity coefficients; shifts every eigenvalue, never the Trotter error.
pub fn identity_offset(h: &QubitHamiltonian) -> f64 {
    h.terms
        .iter()
        .filter(|t| t.string.is_identity())
        .map(|t| t.coefficient.re)
        .sum()
}
