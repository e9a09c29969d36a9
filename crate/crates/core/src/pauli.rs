//! Pauli-string algebra in the symplectic representation.
//!
//! A string on `width` qubits is stored as two bitmasks: bit `q` of the X-mask
//! is set when qubit `q` carries X or Y, bit `q` of the Z-mask when it carries
//! Z or Y. Qubit 0 is the least-significant tensor factor, so the string
//! `Y3 Y2 X1 X0` acts with X on qubit 0 and Y on qubit 3.
//!
//! Products track their phase as a power of `i`, which keeps every
//! multiplication and commutator exact.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use smallvec::SmallVec;
use thiserror::Error;

const WORD: usize = 64;

type Words = SmallVec<[u64; 2]>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("width mismatch: {left} qubits vs {right} qubits")]
    WidthMismatch { left: usize, right: usize },
    #[error("qubit index {index} out of range for width {width}")]
    QubitOutOfRange { index: usize, width: usize },
    #[error("qubit {0} appears more than once")]
    DuplicateQubit(usize),
    #[error("invalid Pauli token `{0}`")]
    InvalidToken(String),
}

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliAxis {
    I,
    X,
    Y,
    Z,
}

impl PauliAxis {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliAxis::I,
            (true, false) => PauliAxis::X,
            (true, true) => PauliAxis::Y,
            (false, true) => PauliAxis::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            PauliAxis::I => (false, false),
            PauliAxis::X => (true, false),
            PauliAxis::Y => (true, true),
            PauliAxis::Z => (false, true),
        }
    }

    /// Rank used by the lexicographic key: I < X < Y < Z.
    pub fn rank(self) -> u8 {
        match self {
            PauliAxis::I => 0,
            PauliAxis::X => 1,
            PauliAxis::Y => 2,
            PauliAxis::Z => 3,
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(PauliAxis::I),
            'X' => Some(PauliAxis::X),
            'Y' => Some(PauliAxis::Y),
            'Z' => Some(PauliAxis::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            PauliAxis::I => 'I',
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }
}

/// A power of `i`: the phase picked up by a Pauli product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    /// Exponent `k` in `i^k`, in `0..4`.
    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;

    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// Tensor product of single-qubit Paulis over a fixed number of qubits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    width: usize,
    x: Words,
    z: Words,
}

impl PauliString {
    pub fn identity(width: usize) -> Self {
        let blocks = width.div_ceil(WORD).max(1);
        PauliString {
            width,
            x: SmallVec::from_elem(0, blocks),
            z: SmallVec::from_elem(0, blocks),
        }
    }

    /// Builds a string from one axis per qubit, qubit 0 first.
    pub fn from_axes(axes: &[PauliAxis]) -> Self {
        let mut s = PauliString::identity(axes.len());
        for (q, &a) in axes.iter().enumerate() {
            s.put(q, a);
        }
        s
    }

    /// Builds a string from `(qubit, axis)` pairs; unlisted qubits are identity.
    pub fn from_sparse(width: usize, ops: &[(usize, PauliAxis)]) -> Result<Self, PauliError> {
        let mut s = PauliString::identity(width);
        let mut seen = vec![false; width];
        for &(q, a) in ops {
            if q >= width {
                return Err(PauliError::QubitOutOfRange { index: q, width });
            }
            if seen[q] {
                return Err(PauliError::DuplicateQubit(q));
            }
            seen[q] = true;
            s.put(q, a);
        }
        Ok(s)
    }

    /// Parses whitespace-separated tokens such as `Y3 Y2 X1 X0`; a bare `I`
    /// is the identity.
    pub fn from_labels(width: usize, labels: &str) -> Result<Self, PauliError> {
        let mut ops = Vec::new();
        for tok in labels.split_whitespace() {
            if tok == "I" {
                continue;
            }
            let mut chars = tok.chars();
            let axis = chars
                .next()
                .and_then(PauliAxis::from_char)
                .ok_or_else(|| PauliError::InvalidToken(tok.to_string()))?;
            let index: usize = chars
                .as_str()
                .parse()
                .map_err(|_| PauliError::InvalidToken(tok.to_string()))?;
            if axis != PauliAxis::I {
                ops.push((index, axis));
            }
        }
        PauliString::from_sparse(width, &ops)
    }

    fn put(&mut self, q: usize, a: PauliAxis) {
        let (xb, zb) = a.bits();
        let (w, bit) = (q / WORD, 1u64 << (q % WORD));
        if xb {
            self.x[w] |= bit;
        } else {
            self.x[w] &= !bit;
        }
        if zb {
            self.z[w] |= bit;
        } else {
            self.z[w] &= !bit;
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn axis(&self, q: usize) -> PauliAxis {
        assert!(
            q < self.width,
            "qubit {q} out of range for width {}",
            self.width
        );
        let (w, s) = (q / WORD, q % WORD);
        PauliAxis::from_bits((self.x[w] >> s) & 1 == 1, (self.z[w] >> s) & 1 == 1)
    }

    /// Axes indexed by qubit, qubit 0 first.
    pub fn axes(&self) -> Vec<PauliAxis> {
        (0..self.width).map(|q| self.axis(q)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(self.z.iter()).all(|&w| w == 0)
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    /// Masks as single words; only valid for strings of at most 64 qubits.
    pub fn masks_u64(&self) -> (u64, u64) {
        assert!(self.width <= WORD, "string too wide for a single-word mask");
        (self.x[0], self.z[0])
    }

    fn check_width(&self, other: &PauliString) -> Result<(), PauliError> {
        if self.width != other.width {
            Err(PauliError::WidthMismatch {
                left: self.width,
                right: other.width,
            })
        } else {
            Ok(())
        }
    }

    /// True iff the two strings commute. They anticommute exactly when the
    /// number of positions where both are non-identity and differ is odd.
    pub fn commutes(&self, other: &PauliString) -> Result<bool, PauliError> {
        self.check_width(other)?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &PauliString) -> bool {
        let parity = self
            .x
            .iter()
            .zip(&self.z)
            .zip(other.x.iter().zip(&other.z))
            .fold(0u32, |acc, ((xa, za), (xb, zb))| {
                acc ^ ((xa & zb) ^ (za & xb)).count_ones()
            });
        parity % 2 == 0
    }

    /// Returns `(phase, product)` with `self · other = phase · product`.
    pub fn multiply(&self, other: &PauliString) -> Result<(Phase, PauliString), PauliError> {
        self.check_width(other)?;
        Ok(self.multiply_unchecked(other))
    }

    pub(crate) fn multiply_unchecked(&self, other: &PauliString) -> (Phase, PauliString) {
        let mut exponent: i64 = 0;
        let mut out = PauliString::identity(self.width);
        for w in 0..self.x.len() {
            let (xa, za, xb, zb) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            let (ax, ay, az) = (xa & !za, xa & za, !xa & za);
            let (bx, by, bz) = (xb & !zb, xb & zb, !xb & zb);
            // XY = iZ, YZ = iX, ZX = iY; reversed pairs pick up -i.
            let cyclic = (ax & by) | (ay & bz) | (az & bx);
            let anti = (ay & bx) | (az & by) | (ax & bz);
            exponent += cyclic.count_ones() as i64 - anti.count_ones() as i64;
            out.x[w] = xa ^ xb;
            out.z[w] = za ^ zb;
        }
        (Phase::from_exponent(exponent), out)
    }

    /// Canonical ordering key comparison. The string is read as a base-4
    /// numeral with digits I < X < Y < Z and qubit 0 as the least-significant
    /// digit; strings of different width compare as if padded with I.
    pub fn lex_cmp(&self, other: &PauliString) -> Ordering {
        let top = self.width.max(other.width);
        for q in (0..top).rev() {
            let a = if q < self.width {
                self.axis(q)
            } else {
                PauliAxis::I
            };
            let b = if q < other.width {
                other.axis(q)
            } else {
                PauliAxis::I
            };
            match a.rank().cmp(&b.rank()) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.width.cmp(&other.width)
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lex_cmp(other)
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    /// Non-identity factors from the highest qubit down, e.g. `Y3 Y2 X1 X0`;
    /// the identity string prints as `I`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for q in (0..self.width).rev() {
            let a = self.axis(q);
            if a == PauliAxis::I {
                continue;
            }
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", a.as_char(), q)?;
            first = false;
        }
        if first {
            f.write_str("I")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString[{}]({})", self.width, self)
    }
}

/// A complex-weighted Pauli string.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: Complex64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: Complex64, string: PauliString) -> Self {
        PauliTerm {
            coefficient,
            string,
        }
    }

    pub fn real(coefficient: f64, string: PauliString) -> Self {
        PauliTerm::new(Complex64::new(coefficient, 0.0), string)
    }

    pub fn width(&self) -> usize {
        self.string.width()
    }

    pub fn magnitude(&self) -> f64 {
        self.coefficient.norm()
    }

    pub fn scale(&self, factor: Complex64) -> PauliTerm {
        PauliTerm::new(self.coefficient * factor, self.string.clone())
    }

    pub fn commutes(&self, other: &PauliTerm) -> Result<bool, PauliError> {
        self.string.commutes(&other.string)
    }

    /// Descending coefficient magnitude, ties broken by the lexicographic
    /// string key. This is the universal deterministic tie-break.
    pub fn priority_cmp(&self, other: &PauliTerm) -> Ordering {
        other
            .magnitude()
            .total_cmp(&self.magnitude())
            .then_with(|| self.string.lex_cmp(&other.string))
    }

    pub fn multiply(&self, other: &PauliTerm) -> Result<PauliTerm, PauliError> {
        let (phase, string) = self.string.multiply(&other.string)?;
        Ok(PauliTerm::new(
            self.coefficient * other.coefficient * phase.to_complex(),
            string,
        ))
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficient.im == 0.0 {
            write!(f, "{} {}", self.coefficient.re, self.string)
        } else {
            write!(f, "({}) {}", self.coefficient, self.string)
        }
    }
}

/// Exact commutator `[a, b] = ab - ba`; `None` when the strings commute.
pub fn commutator(a: &PauliTerm, b: &PauliTerm) -> Result<Option<PauliTerm>, PauliError> {
    a.string.check_width(&b.string)?;
    Ok(commutator_unchecked(a, b))
}

pub(crate) fn commutator_unchecked(a: &PauliTerm, b: &PauliTerm) -> Option<PauliTerm> {
    if a.string.commutes_unchecked(&b.string) {
        return None;
    }
    let (phase, string) = a.string.multiply_unchecked(&b.string);
    let c = a.coefficient * b.coefficient * phase.to_complex() * 2.0;
    Some(PauliTerm::new(c, string))
}

/// Accumulator that merges like strings by summing coefficients.
///
/// Strings keep the position of their first appearance, so iteration order
/// is deterministic.
#[derive(Debug, Clone, Default)]
pub struct PauliSum {
    index: HashMap<PauliString, usize>,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new() -> Self {
        PauliSum::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = PauliTerm>) -> Self {
        let mut sum = PauliSum::new();
        sum.extend(terms);
        sum
    }

    pub fn add(&mut self, term: PauliTerm) {
        match self.index.get(&term.string) {
            Some(&i) => self.terms[i].coefficient += term.coefficient,
            None => {
                self.index.insert(term.string.clone(), self.terms.len());
                self.terms.push(term);
            }
        }
    }

    pub fn add_ref(&mut self, term: &PauliTerm) {
        match self.index.get(&term.string) {
            Some(&i) => self.terms[i].coefficient += term.coefficient,
            None => {
                self.index.insert(term.string.clone(), self.terms.len());
                self.terms.push(term.clone());
            }
        }
    }

    pub fn extend(&mut self, terms: impl IntoIterator<Item = PauliTerm>) {
        for t in terms {
            self.add(t);
        }
    }

    pub fn get(&self, string: &PauliString) -> Option<Complex64> {
        self.index.get(string).map(|&i| self.terms[i].coefficient)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<PauliTerm> {
        self.terms
    }

    /// Sum of coefficient magnitudes.
    pub fn coeff_one_norm(&self) -> f64 {
        self.terms.iter().map(PauliTerm::magnitude).sum()
    }
}

/// Merges like strings by coefficient summation. Zero coefficients are kept.
pub fn combine(terms: impl IntoIterator<Item = PauliTerm>) -> Vec<PauliTerm> {
    PauliSum::from_terms(terms).into_terms()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(width: usize, s: &str) -> PauliString {
        PauliString::from_labels(width, s).unwrap()
    }

    #[test]
    fn single_qubit_table() {
        use PauliAxis::*;
        let cases = [
            (X, Y, Phase::I, Z),
            (Y, Z, Phase::I, X),
            (Z, X, Phase::I, Y),
            (Y, X, Phase::MINUS_I, Z),
            (Z, Y, Phase::MINUS_I, X),
            (X, Z, Phase::MINUS_I, Y),
            (X, X, Phase::ONE, I),
            (I, Y, Phase::ONE, Y),
        ];
        for (a, b, phase, prod) in cases {
            let (p, s) = PauliString::from_axes(&[a])
                .multiply(&PauliString::from_axes(&[b]))
                .unwrap();
            assert_eq!((p, s.axis(0)), (phase, prod), "{a:?}*{b:?}");
        }
    }

    #[test]
    fn zz_is_involution() {
        let zz = ps(2, "Z0 Z1");
        let (p, s) = zz.multiply(&zz).unwrap();
        assert_eq!(p, Phase::ONE);
        assert!(s.is_identity());
    }

    #[test]
    fn width_mismatch_is_reported() {
        let a = ps(2, "X0");
        let b = ps(3, "X0");
        assert_eq!(
            a.commutes(&b),
            Err(PauliError::WidthMismatch { left: 2, right: 3 })
        );
        assert!(a.multiply(&b).is_err());
        let ta = PauliTerm::real(1.0, a);
        let tb = PauliTerm::real(1.0, b);
        assert!(commutator(&ta, &tb).is_err());
    }

    #[test]
    fn commutation_examples() {
        assert!(!ps(1, "Z0").commutes(&ps(1, "X0")).unwrap());
        assert!(ps(4, "Z3 Z2").commutes(&ps(4, "Y3 Y2 X1 X0")).unwrap());
        assert!(!ps(4, "Z0").commutes(&ps(4, "Y3 Y2 X1 X0")).unwrap());
    }

    #[test]
    fn commutator_zx() {
        let z = PauliTerm::real(1.0, ps(1, "Z0"));
        let x = PauliTerm::real(1.0, ps(1, "X0"));
        let c = commutator(&z, &x).unwrap().unwrap();
        assert_eq!(c.string, ps(1, "Y0"));
        assert_eq!(c.coefficient, Complex64::new(0.0, 2.0));
        let zz = PauliTerm::real(0.3, ps(2, "Z0 Z1"));
        let xx = PauliTerm::real(0.7, ps(2, "X0 X1"));
        assert!(commutator(&zz, &xx).unwrap().is_none());
    }

    #[test]
    fn combine_merges_and_keeps_zeros() {
        let x0 = ps(1, "X0");
        let out = combine(vec![
            PauliTerm::real(2.0, x0.clone()),
            PauliTerm::real(3.0, x0.clone()),
        ]);
        assert_eq!(out, vec![PauliTerm::real(5.0, x0.clone())]);
        let out = combine(vec![
            PauliTerm::real(1.0, x0.clone()),
            PauliTerm::real(-1.0, x0.clone()),
        ]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].coefficient, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn lexicographic_key() {
        assert!(ps(1, "X0") < ps(1, "Z0"));
        assert!(ps(2, "X0") < ps(2, "X1"));
        assert!(ps(4, "Z2") < ps(4, "Z3"));
        assert!(ps(2, "X0") < ps(3, "X2"));
        assert_eq!(ps(2, "I").lex_cmp(&ps(2, "I")), Ordering::Equal);
    }

    #[test]
    fn display_and_parse() {
        let s = ps(4, "X0 X1 Y2 Y3");
        assert_eq!(s.to_string(), "Y3 Y2 X1 X0");
        assert_eq!(PauliString::identity(3).to_string(), "I");
        assert_eq!(s.weight(), 4);
        assert!(matches!(
            PauliString::from_labels(2, "X0 Z0"),
            Err(PauliError::DuplicateQubit(0))
        ));
        assert!(matches!(
            PauliString::from_labels(2, "X5"),
            Err(PauliError::QubitOutOfRange { index: 5, width: 2 })
        ));
        assert!(PauliString::from_labels(2, "Q1").is_err());
    }

    #[test]
    fn wide_strings_span_words() {
        let a = ps(130, "X0 Z64 Y129");
        let b = ps(130, "Z0 Z64 X129");
        // X0 vs Z0 anticommute, Y129 vs X129 anticommute: net commute.
        assert!(a.commutes(&b).unwrap());
        let (phase, prod) = a.multiply(&b).unwrap();
        assert_eq!(prod, ps(130, "Y0 Z129"));
        // XZ = -iY, YX = -iZ
        assert_eq!(phase, Phase::MINUS_ONE);
    }
}
