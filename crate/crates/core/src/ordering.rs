//! Trotter ordering strategies and ordering-space enumeration.
//!
//! Every strategy returns a permutation of the input terms. Identity and
//! zero-coefficient terms never take part in a strategy: they are placed at
//! the front, in their original relative order, and the strategy orders the
//! rest. Ties are always broken by [`PauliTerm::priority_cmp`], i.e. larger
//! magnitude first and then the lexicographic string key.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error_op::{self, ErrorOpError, NormKind};
use crate::graph::{build_graph, greedy_color, Coloring, ColoringStrategy};
use crate::hamiltonian::{is_permutation, QubitHamiltonian};
use crate::pauli::PauliTerm;

/// Default cap on the number of terms whose orderings may be enumerated.
pub const DEFAULT_ENUMERATION_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrderingError {
    #[error("{terms} orderable terms exceed the enumeration cap of {cap}")]
    CapExceeded { terms: usize, cap: usize },
    #[error("unknown ordering strategy `{0}`")]
    UnknownStrategy(String),
    #[error("coloring covers {got} terms, Hamiltonian has {expected}")]
    ColoringMismatch { got: usize, expected: usize },
    #[error(transparent)]
    ErrorOperator(#[from] ErrorOpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingStrategy {
    Magnitude,
    Lexicographic,
    DepleteGroups,
    EqualiseGroups,
    Commutator,
    ReverseCommutator,
    ErrorOperatorGreedy,
    AsGiven,
}

impl OrderingStrategy {
    pub const ALL: [OrderingStrategy; 8] = [
        OrderingStrategy::Magnitude,
        OrderingStrategy::Lexicographic,
        OrderingStrategy::DepleteGroups,
        OrderingStrategy::EqualiseGroups,
        OrderingStrategy::Commutator,
        OrderingStrategy::ReverseCommutator,
        OrderingStrategy::ErrorOperatorGreedy,
        OrderingStrategy::AsGiven,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OrderingStrategy::Magnitude => "magnitude",
            OrderingStrategy::Lexicographic => "lexicographic",
            OrderingStrategy::DepleteGroups => "deplete_groups",
            OrderingStrategy::EqualiseGroups => "equalise_groups",
            OrderingStrategy::Commutator => "commutator",
            OrderingStrategy::ReverseCommutator => "reverse_commutator",
            OrderingStrategy::ErrorOperatorGreedy => "error_operator_greedy",
            OrderingStrategy::AsGiven => "as_given",
        }
    }

    /// Strategies that need a coloring of the incompatibility graph.
    pub fn needs_coloring(self) -> bool {
        matches!(
            self,
            OrderingStrategy::DepleteGroups | OrderingStrategy::EqualiseGroups
        )
    }
}

impl fmt::Display for OrderingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OrderingStrategy {
    type Err = OrderingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.replace('-', "_");
        let alias = match norm.as_str() {
            "depletegroups" => "deplete_groups",
            "equalisegroups" | "equalize_groups" | "equalizegroups" => "equalise_groups",
            "reversecommutator" => "reverse_commutator",
            "error_operator" | "erroroperator" => "error_operator_greedy",
            other => other,
        };
        OrderingStrategy::ALL
            .into_iter()
            .find(|st| st.name() == alias)
            .ok_or_else(|| OrderingError::UnknownStrategy(s.to_string()))
    }
}

/// A permutation of a Hamiltonian together with the reordered Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingResult {
    /// `permutation[k]` is the original index of the `k`-th ordered term.
    pub permutation: Vec<usize>,
    pub ordered: QubitHamiltonian,
}

impl OrderingResult {
    pub fn from_permutation(h: &QubitHamiltonian, permutation: Vec<usize>) -> Self {
        let ordered = h.permuted(&permutation);
        OrderingResult {
            permutation,
            ordered,
        }
    }
}

/// Fixed (non-orderable) indices first, then the strategy's order.
fn assemble(h: &QubitHamiltonian, order: Vec<usize>) -> OrderingResult {
    let mut perm: Vec<usize> = (0..h.len()).filter(|&i| !h.is_trotterizable(i)).collect();
    perm.extend(order);
    debug_assert!(is_permutation(&perm, h.len()));
    OrderingResult::from_permutation(h, perm)
}

fn by_priority(h: &QubitHamiltonian, mut idx: Vec<usize>) -> Vec<usize> {
    idx.sort_by(|&a, &b| h.term(a).priority_cmp(h.term(b)));
    idx
}

fn commutes(h: &QubitHamiltonian, i: usize, j: usize) -> bool {
    h.term(i).string.commutes_unchecked(&h.term(j).string)
}

/// Options consumed by [`order`] for strategies that need them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyOptions {
    pub coloring: ColoringStrategy,
    /// Step size used by the error-operator greedy ordering.
    pub step_size: f64,
    pub norm: NormKind,
}

impl Default for StrategyOptions {
    fn default() -> Self {
        StrategyOptions {
            coloring: ColoringStrategy::IndependentSet,
            step_size: 1.0,
            norm: NormKind::CoeffOneNorm,
        }
    }
}

/// Runs any strategy from the catalogue.
pub fn order(
    h: &QubitHamiltonian,
    strategy: OrderingStrategy,
    options: &StrategyOptions,
) -> Result<OrderingResult, OrderingError> {
    let coloring = || greedy_color(&build_graph(h), options.coloring);
    Ok(match strategy {
        OrderingStrategy::Magnitude => order_magnitude(h),
        OrderingStrategy::Lexicographic => order_lexicographic(h),
        OrderingStrategy::DepleteGroups => order_deplete_groups(h, &coloring())?,
        OrderingStrategy::EqualiseGroups => order_equalise_groups(h, &coloring())?,
        OrderingStrategy::Commutator => order_commutator(h),
        OrderingStrategy::ReverseCommutator => order_reverse_commutator(h),
        OrderingStrategy::ErrorOperatorGreedy => {
            error_op::order_error_operator_greedy(h, options.step_size, options.norm)?
        }
        OrderingStrategy::AsGiven => order_as_given(h),
    })
}

pub fn order_as_given(h: &QubitHamiltonian) -> OrderingResult {
    assemble(h, h.trotterizable_indices())
}

/// Largest `|c|` first.
pub fn order_magnitude(h: &QubitHamiltonian) -> OrderingResult {
    assemble(h, by_priority(h, h.trotterizable_indices()))
}

/// Ascending lexicographic string key.
pub fn order_lexicographic(h: &QubitHamiltonian) -> OrderingResult {
    let mut idx = h.trotterizable_indices();
    idx.sort_by(|&a, &b| h.term(a).string.lex_cmp(&h.term(b).string));
    assemble(h, idx)
}

/// Color classes restricted to orderable terms, each sorted by priority,
/// paired with their color id. Empty classes are dropped.
fn priority_classes(
    h: &QubitHamiltonian,
    c: &Coloring,
) -> Result<Vec<(usize, Vec<usize>)>, OrderingError> {
    if c.assignment.len() != h.len() {
        return Err(OrderingError::ColoringMismatch {
            got: c.assignment.len(),
            expected: h.len(),
        });
    }
    Ok(c.classes()
        .into_iter()
        .enumerate()
        .map(|(color, members)| {
            let members = members
                .into_iter()
                .filter(|&i| h.is_trotterizable(i))
                .collect();
            (color, by_priority(h, members))
        })
        .filter(|(_, m): &(usize, Vec<usize>)| !m.is_empty())
        .collect())
}

/// Cycles through the color classes, taking the largest remaining term from
/// each. The cycle visits classes by descending magnitude of their largest
/// member, then ascending color id, and skips depleted classes.
pub fn order_deplete_groups(
    h: &QubitHamiltonian,
    c: &Coloring,
) -> Result<OrderingResult, OrderingError> {
    let mut classes = priority_classes(h, c)?;
    classes.sort_by(|(ca, a), (cb, b)| {
        h.term(b[0])
            .magnitude()
            .total_cmp(&h.term(a[0]).magnitude())
            .then(ca.cmp(cb))
    });
    let total: usize = classes.iter().map(|(_, m)| m.len()).sum();
    let mut heads = vec![0usize; classes.len()];
    let mut out = Vec::with_capacity(total);
    while out.len() < total {
        for (k, (_, members)) in classes.iter().enumerate() {
            if heads[k] < members.len() {
                out.push(members[heads[k]]);
                heads[k] += 1;
            }
        }
    }
    Ok(assemble(h, out))
}

/// At each step takes the highest-priority term among all classes that
/// currently have the most remaining terms.
pub fn order_equalise_groups(
    h: &QubitHamiltonian,
    c: &Coloring,
) -> Result<OrderingResult, OrderingError> {
    let classes = priority_classes(h, c)?;
    let total: usize = classes.iter().map(|(_, m)| m.len()).sum();
    let mut heads = vec![0usize; classes.len()];
    let mut out = Vec::with_capacity(total);
    while out.len() < total {
        let largest = classes
            .iter()
            .zip(&heads)
            .map(|((_, m), &hd)| m.len() - hd)
            .max()
            .unwrap_or(0);
        let pick = classes
            .iter()
            .enumerate()
            .filter(|(k, (_, m))| m.len() - heads[*k] == largest)
            .min_by(|(ka, (_, a)), (kb, (_, b))| {
                h.term(a[heads[*ka]]).priority_cmp(h.term(b[heads[*kb]]))
            })
            .map(|(k, _)| k)
            .expect("some class has remaining terms");
        out.push(classes[pick].1[heads[pick]]);
        heads[pick] += 1;
    }
    Ok(assemble(h, out))
}

/// Greedy: next term is the highest-priority one among the unordered terms
/// that commute with the fewest already-ordered terms. Starts from the
/// highest-priority term.
pub fn order_commutator(h: &QubitHamiltonian) -> OrderingResult {
    let mut pool = by_priority(h, h.trotterizable_indices());
    // commuting_with_ordered[k] tracks pool[k]
    let mut counts = vec![0usize; pool.len()];
    let mut out = Vec::with_capacity(pool.len());
    while !pool.is_empty() {
        let min = *counts.iter().min().expect("pool not empty");
        // pool is priority-sorted, so the first minimal entry wins ties
        let k = counts.iter().position(|&c| c == min).expect("min exists");
        let chosen = pool.remove(k);
        counts.remove(k);
        for (cnt, &j) in counts.iter_mut().zip(&pool) {
            if commutes(h, chosen, j) {
                *cnt += 1;
            }
        }
        out.push(chosen);
    }
    assemble(h, out)
}

/// Greedy: next term is the highest-priority one among the unordered terms
/// that commute with the most other unordered terms.
pub fn order_reverse_commutator(h: &QubitHamiltonian) -> OrderingResult {
    let mut pool = by_priority(h, h.trotterizable_indices());
    let mut counts: Vec<usize> = pool
        .iter()
        .map(|&i| {
            pool.iter()
                .filter(|&&j| j != i && commutes(h, i, j))
                .count()
        })
        .collect();
    let mut out = Vec::with_capacity(pool.len());
    while !pool.is_empty() {
        let max = *counts.iter().max().expect("pool not empty");
        let k = counts.iter().position(|&c| c == max).expect("max exists");
        let chosen = pool.remove(k);
        counts.remove(k);
        for (cnt, &j) in counts.iter_mut().zip(&pool) {
            if commutes(h, chosen, j) {
                *cnt -= 1;
            }
        }
        out.push(chosen);
    }
    assemble(h, out)
}

/// The full ordering space of a Hamiltonian's orderable terms, in
/// lexicographic permutation order.
#[derive(Debug, Clone)]
pub struct Enumeration {
    fixed: Vec<usize>,
    movable: Vec<usize>,
    total: u64,
}

/// Prepares exhaustive enumeration; refuses when there are more than `cap`
/// orderable terms.
pub fn enumerate_orderings(h: &QubitHamiltonian, cap: usize) -> Result<Enumeration, OrderingError> {
    let movable = h.trotterizable_indices();
    if movable.len() > cap || movable.len() > 20 {
        return Err(OrderingError::CapExceeded {
            terms: movable.len(),
            cap,
        });
    }
    let fixed = (0..h.len()).filter(|&i| !h.is_trotterizable(i)).collect();
    let total = (1..=movable.len() as u64).product();
    Ok(Enumeration {
        fixed,
        movable,
        total,
    })
}

impl Enumeration {
    /// Number of orderings, `n!`.
    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn movable(&self) -> &[usize] {
        &self.movable
    }

    /// The `k`-th permutation of orderable ranks (factorial number system).
    fn ranks_at(&self, mut k: u64) -> Vec<usize> {
        let n = self.movable.len();
        let mut avail: Vec<usize> = (0..n).collect();
        let mut out = Vec::with_capacity(n);
        for pos in 0..n {
            let f: u64 = (1..(n - pos) as u64).product();
            let d = (k / f) as usize;
            k %= f;
            out.push(avail.remove(d));
        }
        out
    }

    fn full(&self, ranks: &[usize]) -> Vec<usize> {
        self.fixed
            .iter()
            .copied()
            .chain(ranks.iter().map(|&r| self.movable[r]))
            .collect()
    }

    /// Full-Hamiltonian permutation with index `k` in `0..len()`.
    pub fn permutation(&self, k: u64) -> Vec<usize> {
        assert!(k < self.total, "permutation index {k} out of range");
        self.full(&self.ranks_at(k))
    }

    pub fn iter(&self) -> PermutationIter<'_> {
        self.range(0..self.total)
    }

    /// Permutations with index in `range`, in order.
    pub fn range(&self, range: Range<u64>) -> PermutationIter<'_> {
        let end = range.end.min(self.total);
        let start = range.start.min(end);
        PermutationIter {
            space: self,
            ranks: if start < end {
                self.ranks_at(start)
            } else {
                Vec::new()
            },
            next: start,
            end,
        }
    }

    /// Splits `0..len()` into `parts` contiguous, disjoint ranges.
    pub fn partition(&self, parts: usize) -> Vec<Range<u64>> {
        let parts = parts.max(1) as u64;
        let chunk = self.total.div_ceil(parts);
        (0..parts)
            .map(|p| (p * chunk).min(self.total)..((p + 1) * chunk).min(self.total))
            .filter(|r| !r.is_empty())
            .collect()
    }
}

pub struct PermutationIter<'a> {
    space: &'a Enumeration,
    ranks: Vec<usize>,
    next: u64,
    end: u64,
}

impl Iterator for PermutationIter<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.next >= self.end {
            return None;
        }
        let out = self.space.full(&self.ranks);
        self.next += 1;
        if self.next < self.end {
            next_permutation(&mut self.ranks);
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Seeded stream of uniformly random orderings (Fisher–Yates shuffles of
/// the orderable terms).
pub fn random_orderings(h: &QubitHamiltonian, count: usize, seed: u64) -> RandomOrderings {
    RandomOrderings {
        fixed: (0..h.len()).filter(|&i| !h.is_trotterizable(i)).collect(),
        movable: h.trotterizable_indices(),
        rng: ChaCha8Rng::seed_from_u64(seed),
        remaining: count,
    }
}

pub struct RandomOrderings {
    fixed: Vec<usize>,
    movable: Vec<usize>,
    rng: ChaCha8Rng,
    remaining: usize,
}

impl Iterator for RandomOrderings {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let mut m = self.movable.clone();
        m.shuffle(&mut self.rng);
        Some(self.fixed.iter().copied().chain(m).collect())
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

/// Convenience for sorting arbitrary term slices by the universal priority.
pub fn sort_by_priority(terms: &mut [PauliTerm]) {
    terms.sort_by(|a, b| a.priority_cmp(b));
}
