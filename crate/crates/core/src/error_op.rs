//! Leading-order error operator of the second-order Trotter approximant.
//!
//! For an ordered Hamiltonian `H = Σ_k H_k` and step `Δt`,
//!
//! ```text
//! V = -Δt²/12 Σ_β Σ_{γ<β} Σ_{α≤β} [H_α (1 - δ_αβ/2), [H_β, H_γ]]
//! ```
//!
//! so that one step equals `exp(-iΔt (H + V))` up to `O(Δt⁴)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dense::{hermitian_spectral_norm, DENSE_QUBIT_THRESHOLD};
use crate::hamiltonian::QubitHamiltonian;
use crate::ordering::OrderingResult;
use crate::pauli::{commutator_unchecked, PauliError, PauliString, PauliSum, PauliTerm};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ErrorOpError {
    #[error("insertion position {position} out of range for {len} terms")]
    PositionOutOfRange { position: usize, len: usize },
    #[error(
        "spectral norm needs a dense matrix; {qubits} qubits exceeds the limit of {threshold}"
    )]
    DenseThreshold { qubits: usize, threshold: usize },
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// `Σ |c_k|`, an upper bound on the spectral norm.
    #[default]
    #[serde(rename = "coeff")]
    CoeffOneNorm,
    /// Largest singular value, from a dense eigensolve.
    Spectral,
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormKind::CoeffOneNorm => "coeff",
            NormKind::Spectral => "spectral",
        })
    }
}

impl FromStr for NormKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "coeff" | "one" | "coeff-one" | "coeff_one" => Ok(NormKind::CoeffOneNorm),
            "spectral" => Ok(NormKind::Spectral),
            _ => Err(format!("unknown norm `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorOperator {
    pub step_size: f64,
    pub qubit_count: usize,
    /// Combined terms; exact cancellations are kept as zero coefficients.
    pub terms: Vec<PauliTerm>,
    /// Strings of the Hamiltonian the operator was built from, in order.
    pub source_order: Vec<PauliString>,
}

impl ErrorOperator {
    pub fn coeff_one_norm(&self) -> f64 {
        self.terms.iter().map(PauliTerm::magnitude).sum()
    }

    pub fn norm(&self, kind: NormKind) -> Result<f64, ErrorOpError> {
        operator_norm(self.qubit_count, &self.terms, kind)
    }

    /// Largest `|Im c|`; zero up to rounding since `V` is Hermitian.
    pub fn max_imaginary(&self) -> f64 {
        self.terms
            .iter()
            .fold(0.0, |m, t| m.max(t.coefficient.im.abs()))
    }

    /// Coefficient of `string`, zero when absent.
    pub fn coefficient_of(&self, string: &PauliString) -> Complex64 {
        self.terms
            .iter()
            .find(|t| &t.string == string)
            .map_or(Complex64::new(0.0, 0.0), |t| t.coefficient)
    }
}

/// Norm of a Pauli sum. Spectral norms are refused above the dense limit.
pub fn operator_norm(
    qubit_count: usize,
    terms: &[PauliTerm],
    kind: NormKind,
) -> Result<f64, ErrorOpError> {
    operator_norm_with_threshold(qubit_count, terms, kind, DENSE_QUBIT_THRESHOLD)
}

pub fn operator_norm_with_threshold(
    qubit_count: usize,
    terms: &[PauliTerm],
    kind: NormKind,
    threshold: usize,
) -> Result<f64, ErrorOpError> {
    match kind {
        NormKind::CoeffOneNorm => Ok(terms.iter().map(PauliTerm::magnitude).sum()),
        NormKind::Spectral if qubit_count > threshold => Err(ErrorOpError::DenseThreshold {
            qubits: qubit_count,
            threshold,
        }),
        NormKind::Spectral => Ok(hermitian_spectral_norm(qubit_count, terms)),
    }
}

fn prefactor(dt: f64) -> f64 {
    -dt * dt / 12.0
}

/// One summand `-Δt²/12 [H_α (1 - δ_αβ/2), [H_β, H_γ]]`; `None` when it
/// vanishes because a commutator is zero.
pub fn term_operator_c(
    alpha: &PauliTerm,
    beta: &PauliTerm,
    gamma: &PauliTerm,
    alpha_is_beta: bool,
    dt: f64,
) -> Result<Option<PauliTerm>, PauliError> {
    let Some(inner) = crate::pauli::commutator(beta, gamma)? else {
        return Ok(None);
    };
    let outer = crate::pauli::commutator(alpha, &inner)?;
    let f = if alpha_is_beta { 0.5 } else { 1.0 };
    Ok(outer.map(|t| t.scale(Complex64::new(prefactor(dt) * f, 0.0))))
}

/// Adds `scale · [f H_α, inner]` to `acc`.
fn push_outer(acc: &mut PauliSum, alpha: &PauliTerm, inner: &PauliTerm, scale: f64) {
    if let Some(t) = commutator_unchecked(alpha, inner) {
        acc.add(t.scale(Complex64::new(scale, 0.0)));
    }
}

/// Contributions with outer index `β` fixed.
fn beta_slice(terms: &[PauliTerm], beta: usize, dt: f64) -> PauliSum {
    let pre = prefactor(dt);
    let mut acc = PauliSum::new();
    let hb = &terms[beta];
    for hg in &terms[..beta] {
        let Some(inner) = commutator_unchecked(hb, hg) else {
            continue;
        };
        for (alpha, ha) in terms[..=beta].iter().enumerate() {
            let f = if alpha == beta { 0.5 } else { 1.0 };
            push_outer(&mut acc, ha, &inner, pre * f);
        }
    }
    acc
}

const PARALLEL_MIN_TERMS: usize = 48;

/// Builds `V` for the terms of `h` in their current order.
pub fn build_error_operator(h: &QubitHamiltonian, dt: f64) -> ErrorOperator {
    let terms: Vec<PauliTerm> = h
        .terms()
        .iter()
        .filter(|t| t.coefficient.norm() != 0.0)
        .cloned()
        .collect();
    let n = terms.len();
    let slices: Vec<PauliSum> = if n >= PARALLEL_MIN_TERMS {
        (0..n)
            .into_par_iter()
            .map(|b| beta_slice(&terms, b, dt))
            .collect()
    } else {
        (0..n).map(|b| beta_slice(&terms, b, dt)).collect()
    };
    let mut total = PauliSum::new();
    for s in slices {
        for t in s.terms() {
            total.add_ref(t);
        }
    }
    ErrorOperator {
        step_size: dt,
        qubit_count: h.qubit_count(),
        terms: total.into_terms(),
        source_order: h.terms().iter().map(|t| t.string.clone()).collect(),
    }
}

/// Change in `V` when `term` is inserted at `position` of `h`.
///
/// Indices in the sums refer to the Hamiltonian after insertion, with `i`
/// the new term:
///
/// ```text
/// δV = -Δt²/12 ( Σ_{α≤i} Σ_{γ<i} [H_α(1-δ_αi/2), [H_i, H_γ]]
///              + Σ_{β>i} Σ_{γ<β} [H_i, [H_β, H_γ]]
///              + Σ_{β>i} Σ_{α≤β, α≠i} [H_α(1-δ_αβ/2), [H_β, H_i]] )
/// ```
pub fn term_insertion_delta(
    h: &QubitHamiltonian,
    term: &PauliTerm,
    position: usize,
    dt: f64,
) -> Result<Vec<PauliTerm>, ErrorOpError> {
    if position > h.len() {
        return Err(ErrorOpError::PositionOutOfRange {
            position,
            len: h.len(),
        });
    }
    if term.width() != h.qubit_count() {
        return Err(PauliError::WidthMismatch {
            left: h.qubit_count(),
            right: term.width(),
        }
        .into());
    }
    let mut terms = h.terms().to_vec();
    terms.insert(position, term.clone());
    Ok(insertion_delta(&terms, position, dt).into_terms())
}

fn insertion_delta(terms: &[PauliTerm], i: usize, dt: f64) -> PauliSum {
    let pre = prefactor(dt);
    let n = terms.len();
    let hi = &terms[i];
    let mut acc = PauliSum::new();
    if hi.coefficient.norm() == 0.0 {
        return acc;
    }
    for hg in &terms[..i] {
        let Some(inner) = commutator_unchecked(hi, hg) else {
            continue;
        };
        for (alpha, ha) in terms[..=i].iter().enumerate() {
            let f = if alpha == i { 0.5 } else { 1.0 };
            push_outer(&mut acc, ha, &inner, pre * f);
        }
    }
    for beta in i + 1..n {
        let hb = &terms[beta];
        for hg in &terms[..beta] {
            if let Some(inner) = commutator_unchecked(hb, hg) {
                push_outer(&mut acc, hi, &inner, pre);
            }
        }
        let Some(inner) = commutator_unchecked(hb, hi) else {
            continue;
        };
        for (alpha, ha) in terms[..=beta].iter().enumerate() {
            if alpha == i {
                continue;
            }
            let f = if alpha == beta { 0.5 } else { 1.0 };
            push_outer(&mut acc, ha, &inner, pre * f);
        }
    }
    acc
}

/// Norm of `V + δ` without materialising the sum for the coefficient norm.
fn norm_after(
    v: &PauliSum,
    v_norm: f64,
    delta: &PauliSum,
    qubits: usize,
    kind: NormKind,
) -> Result<f64, ErrorOpError> {
    match kind {
        NormKind::CoeffOneNorm => {
            let mut n = v_norm;
            for d in delta.terms() {
                let old = v.get(&d.string).unwrap_or_default();
                n += (old + d.coefficient).norm() - old.norm();
            }
            Ok(n)
        }
        NormKind::Spectral => {
            let mut merged = v.clone();
            for d in delta.terms() {
                merged.add_ref(d);
            }
            operator_norm(qubits, merged.terms(), kind)
        }
    }
}

/// Insertion ordering: terms are taken by priority and each is placed at
/// the position that minimises the norm of the resulting `V`. Ties go to the
/// earliest position.
pub fn order_error_operator_greedy(
    h: &QubitHamiltonian,
    dt: f64,
    kind: NormKind,
) -> Result<OrderingResult, ErrorOpError> {
    let qubits = h.qubit_count();
    if kind == NormKind::Spectral && qubits > DENSE_QUBIT_THRESHOLD {
        return Err(ErrorOpError::DenseThreshold {
            qubits,
            threshold: DENSE_QUBIT_THRESHOLD,
        });
    }
    let mut pool = h.trotterizable_indices();
    pool.sort_by(|&a, &b| h.term(a).priority_cmp(h.term(b)));

    let mut placed: Vec<usize> = Vec::with_capacity(pool.len());
    let mut placed_terms: Vec<PauliTerm> = Vec::with_capacity(pool.len());
    let mut v = PauliSum::new();
    let mut v_norm = 0.0;
    for idx in pool {
        let mut best: Option<(usize, f64, PauliSum)> = None;
        for pos in 0..=placed_terms.len() {
            let mut trial = placed_terms.clone();
            trial.insert(pos, h.term(idx).clone());
            let delta = insertion_delta(&trial, pos, dt);
            let val = norm_after(&v, v_norm, &delta, qubits, kind)?;
            let better = match &best {
                None => true,
                Some((_, b, _)) => val < b - 1e-12 * b.abs(),
            };
            if better {
                best = Some((pos, val, delta));
            }
        }
        let (pos, val, delta) = best.expect("at least one position");
        for d in delta.terms() {
            v.add_ref(d);
        }
        v_norm = match kind {
            NormKind::CoeffOneNorm => v.coeff_one_norm(),
            NormKind::Spectral => val,
        };
        placed.insert(pos, idx);
        placed_terms.insert(pos, h.term(idx).clone());
    }
    let mut perm: Vec<usize> = (0..h.len()).filter(|&i| !h.is_trotterizable(i)).collect();
    perm.extend(placed);
    Ok(OrderingResult::from_permutation(h, perm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::builtin_fixture;

    fn ps(n: usize, s: &str) -> PauliString {
        PauliString::from_labels(n, s).unwrap()
    }

    fn ham(n: usize, spec: &[(f64, &str)]) -> QubitHamiltonian {
        QubitHamiltonian::from_labels(n, spec, "").unwrap()
    }

    fn assert_same(a: &[PauliTerm], b: &[PauliTerm], tol: f64) {
        let sa = PauliSum::from_terms(a.iter().cloned());
        let sb = PauliSum::from_terms(b.iter().cloned());
        for t in sa.terms().iter().chain(sb.terms()) {
            let x = sa.get(&t.string).unwrap_or_default();
            let y = sb.get(&t.string).unwrap_or_default();
            assert!((x - y).norm() <= tol, "{}: {x} vs {y}", t.string);
        }
    }

    #[test]
    fn commuting_hamiltonian_has_no_error() {
        let h = ham(2, &[(0.3, "Z0"), (0.5, "Z1"), (0.2, "Z0 Z1")]);
        let v = build_error_operator(&h, 0.7);
        assert!(v.terms.is_empty());
        assert_eq!(v.norm(NormKind::Spectral).unwrap(), 0.0);
    }

    #[test]
    fn two_term_closed_form() {
        // V = -Δt²/12 ([a X, [b Z, a X]] + 1/2 [b Z, [b Z, a X]])
        let (a, b, dt) = (0.3, 0.7, 0.5);
        let h = ham(1, &[(a, "X0"), (b, "Z0")]);
        let v = build_error_operator(&h, dt);
        // [Z, X] = 2iY; [X, 2iY] = 2i·2iZ = -4Z; [Z, 2iY] = 2i·(-2iX) = 4X
        let pre = -dt * dt / 12.0;
        let want_z = pre * a * a * b * -4.0;
        let want_x = pre * 0.5 * b * b * a * 4.0;
        assert!((v.coefficient_of(&ps(1, "Z0")).re - want_z).abs() < 1e-15);
        assert!((v.coefficient_of(&ps(1, "X0")).re - want_x).abs() < 1e-15);
        assert_eq!(v.terms.len(), 2);
    }

    #[test]
    fn single_summand_matches_build() {
        let (a, b) = (
            PauliTerm::real(0.3, ps(1, "X0")),
            PauliTerm::real(0.7, ps(1, "Z0")),
        );
        let c = term_operator_c(&a, &b, &a, false, 0.5).unwrap().unwrap();
        assert_eq!(c.string, ps(1, "Z0"));
        assert!(term_operator_c(&a, &b, &b, false, 0.5).unwrap().is_none());
    }

    #[test]
    fn h2_error_operator_is_hermitian() {
        for name in ["h2_sto3g_0.7414", "h2_active_0.7414", "h2_active_10.000"] {
            let h = builtin_fixture(name).unwrap();
            let v = build_error_operator(&h, 1.0);
            assert!(v.max_imaginary() <= 1e-12, "{name}");
            let sn = v.norm(NormKind::Spectral).unwrap();
            assert!(sn <= v.coeff_one_norm() + 1e-12);
        }
    }

    #[test]
    fn insertion_delta_matches_rebuild() {
        let h = builtin_fixture("h2_active_0.7414").unwrap();
        let dt = 0.37;
        for skip in 0..h.len() {
            let rest: Vec<usize> = (0..h.len()).filter(|&k| k != skip).collect();
            let base = h.select(&rest);
            let v0 = build_error_operator(&base, dt);
            for pos in 0..=base.len() {
                let delta = term_insertion_delta(&base, h.term(skip), pos, dt).unwrap();
                let v1 = build_error_operator(&base.inserted(h.term(skip).clone(), pos), dt);
                let mut sum = v0.terms.clone();
                sum.extend(delta);
                assert_same(&sum, &v1.terms, 1e-14);
            }
        }
    }

    #[test]
    fn insertion_position_checked() {
        let h = ham(1, &[(0.3, "X0")]);
        let t = PauliTerm::real(0.1, ps(1, "Z0"));
        assert_eq!(
            term_insertion_delta(&h, &t, 2, 1.0).unwrap_err(),
            ErrorOpError::PositionOutOfRange {
                position: 2,
                len: 1
            }
        );
        let wide = PauliTerm::real(0.1, ps(2, "Z1"));
        assert!(matches!(
            term_insertion_delta(&h, &wide, 0, 1.0),
            Err(ErrorOpError::Pauli(PauliError::WidthMismatch { .. }))
        ));
    }

    #[test]
    fn spectral_threshold_is_enforced() {
        let t = [PauliTerm::real(1.0, PauliString::identity(3))];
        assert!(operator_norm_with_threshold(3, &t, NormKind::Spectral, 2).is_err());
        assert_eq!(
            operator_norm_with_threshold(3, &t, NormKind::CoeffOneNorm, 2).unwrap(),
            1.0
        );
    }

    #[test]
    fn greedy_is_deterministic_and_complete() {
        let h = builtin_fixture("h2_sto3g_0.7414").unwrap();
        for kind in [NormKind::CoeffOneNorm, NormKind::Spectral] {
            let a = order_error_operator_greedy(&h, 1.0, kind).unwrap();
            let b = order_error_operator_greedy(&h, 1.0, kind).unwrap();
            assert_eq!(a.permutation, b.permutation);
            assert_eq!(a.permutation[0], 0, "identity first");
            let mut p = a.permutation.clone();
            p.sort();
            assert_eq!(p, (0..15).collect::<Vec<_>>());
        }
    }

    #[test]
    fn greedy_places_anticommuting_pair() {
        // With two terms, either order gives the same |V| up to the ½ weight;
        // the greedy choice must be no worse than the alternative.
        let h = ham(1, &[(0.9, "X0"), (0.2, "Z0")]);
        let r = order_error_operator_greedy(&h, 1.0, NormKind::CoeffOneNorm).unwrap();
        let chosen = build_error_operator(&r.ordered, 1.0).coeff_one_norm();
        let flipped = build_error_operator(&h.permuted(&[r.permutation[1], r.permutation[0]]), 1.0);
        assert!(chosen <= flipped.coeff_one_norm() + 1e-15);
    }

    #[test]
    fn norm_kind_parsing() {
        assert_eq!("coeff".parse::<NormKind>().unwrap(), NormKind::CoeffOneNorm);
        assert_eq!("spectral".parse::<NormKind>().unwrap(), NormKind::Spectral);
        assert!("l2".parse::<NormKind>().is_err());
    }
}
