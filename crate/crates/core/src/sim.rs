//! Statevector simulation of Trotter sequences and ground states.

use log::warn;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dense::{hermitian_eigen, pauli_sum_matrix, y_phase, DENSE_QUBIT_THRESHOLD};
use crate::error_op::build_error_operator;
use crate::hamiltonian::{ApproximantOrder, QubitHamiltonian, TrotterConfig};
use crate::pauli::{PauliString, PauliTerm};

/// Simulation refuses registers wider than this.
pub const MAX_QUBITS: usize = 24;

/// Gap below which the ground state is reported as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// Overlap `|⟨ψ₀|U|ψ₀⟩|` below which the phase estimate is considered
/// unreliable and a warning is logged.
pub const LOW_OVERLAP: f64 = 0.999;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("{qubits} qubits exceeds the simulator limit of {limit}")]
    TooManyQubits { qubits: usize, limit: usize },
    #[error("width mismatch: state has {state} qubits, operator has {operator}")]
    WidthMismatch { state: usize, operator: usize },
    #[error("amplitude vector of length {len} is not 2^{qubits}")]
    BadLength { len: usize, qubits: usize },
    #[error("eigensolver did not converge: residual {residual:e} after {matvecs} products")]
    NonConvergence { residual: f64, matvecs: usize },
    #[error("total evolution time must be non-zero")]
    ZeroTime,
    #[error("empty Hamiltonian")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    qubit_count: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// Computational basis state `|index⟩`.
    pub fn basis(qubit_count: usize, index: usize) -> Result<Self, SimError> {
        check_width(qubit_count)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubit_count];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Statevector { qubit_count, amps })
    }

    pub fn from_amplitudes(qubit_count: usize, amps: Vec<Complex64>) -> Result<Self, SimError> {
        check_width(qubit_count)?;
        if amps.len() != 1 << qubit_count {
            return Err(SimError::BadLength {
                len: amps.len(),
                qubits: qubit_count,
            });
        }
        Ok(Statevector { qubit_count, amps })
    }

    /// Normalised state with Gaussian-like random amplitudes from a seed.
    pub fn random(qubit_count: usize, seed: u64) -> Result<Self, SimError> {
        check_width(qubit_count)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1usize << qubit_count)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let mut s = Statevector { qubit_count, amps };
        s.normalize();
        Ok(s)
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|ψ⟩ ← P|ψ⟩`.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<(), SimError> {
        self.check_operator(p.width())?;
        let (x, z) = p.masks_u64();
        let ph = y_phase(x, z);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (j, a) in self.amps.iter().enumerate() {
            let s = if (j as u64 & z).count_ones() % 2 == 1 {
                -ph
            } else {
                ph
            };
            out[(j as u64 ^ x) as usize] = s * a;
        }
        self.amps = out;
        Ok(())
    }

    /// `|ψ⟩ ← exp(-iθP)|ψ⟩ = (cos θ - i sin θ P)|ψ⟩`, in place.
    pub fn apply_exponential(&mut self, p: &PauliString, theta: f64) -> Result<(), SimError> {
        self.check_operator(p.width())?;
        let (x, z) = p.masks_u64();
        let ph = y_phase(x, z);
        let (c, s) = (theta.cos(), theta.sin());
        let mis = Complex64::new(0.0, -s);
        let sign = |j: usize| {
            if (j as u64 & z).count_ones() % 2 == 1 {
                -ph
            } else {
                ph
            }
        };
        if x == 0 {
            for (j, a) in self.amps.iter_mut().enumerate() {
                *a *= c + mis * sign(j);
            }
            return Ok(());
        }
        let high = 1u64 << (63 - x.leading_zeros());
        for k in 0..self.amps.len() {
            if k as u64 & high != 0 {
                continue;
            }
            let j = (k as u64 ^ x) as usize;
            let (a, b) = (self.amps[k], self.amps[j]);
            // P|j⟩ = sign(j)|k⟩ and P|k⟩ = sign(k)|j⟩
            self.amps[k] = a * c + mis * sign(j) * b;
            self.amps[j] = b * c + mis * sign(k) * a;
        }
        Ok(())
    }

    fn check_operator(&self, width: usize) -> Result<(), SimError> {
        if width != self.qubit_count {
            Err(SimError::WidthMismatch {
                state: self.qubit_count,
                operator: width,
            })
        } else {
            Ok(())
        }
    }
}

fn check_width(qubits: usize) -> Result<(), SimError> {
    if qubits > MAX_QUBITS {
        Err(SimError::TooManyQubits {
            qubits,
            limit: MAX_QUBITS,
        })
    } else {
        Ok(())
    }
}

/// `(Σ c P)|ψ⟩` without building a matrix.
pub fn apply_sum(terms: &[PauliTerm], state: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    for t in terms {
        let (x, z) = t.string.masks_u64();
        let c = t.coefficient * y_phase(x, z);
        for (j, a) in state.iter().enumerate() {
            let v = if (j as u64 & z).count_ones() % 2 == 1 {
                -c
            } else {
                c
            };
            out[(j as u64 ^ x) as usize] += v * a;
        }
    }
    out
}

/// `⟨ψ|Σ c P|ψ⟩`.
pub fn expectation(state: &Statevector, terms: &[PauliTerm]) -> Complex64 {
    let hp = apply_sum(terms, &state.amps);
    state.amps.iter().zip(&hp).map(|(a, b)| a.conj() * b).sum()
}

/// Applies `N` Trotter steps of `h` in its stored order. Identity terms act
/// as a global phase; zero-coefficient terms are skipped.
pub fn trotter_apply(
    state: &mut Statevector,
    h: &QubitHamiltonian,
    config: &TrotterConfig,
) -> Result<(), SimError> {
    state.check_operator(h.qubit_count())?;
    let active: Vec<&PauliTerm> = h
        .terms()
        .iter()
        .filter(|t| t.coefficient.re != 0.0)
        .collect();
    let dt = config.step_size();
    for _ in 0..config.trotter_number {
        match config.order {
            ApproximantOrder::First => {
                for t in &active {
                    state.apply_exponential(&t.string, t.coefficient.re * dt)?;
                }
            }
            ApproximantOrder::Second => {
                for t in active.iter().chain(active.iter().rev()) {
                    state.apply_exponential(&t.string, t.coefficient.re * dt / 2.0)?;
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub energy: f64,
    pub state: Statevector,
    /// Set when the gap to the next eigenvalue is below [`DEGENERACY_GAP`].
    pub degenerate: bool,
    /// Estimated gap to the next eigenvalue, when known.
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStateOptions {
    /// Registers up to this size use a dense eigensolve.
    pub dense_threshold: usize,
    pub tolerance: f64,
    pub max_matvecs: usize,
    /// Seeds the Lanczos start vector.
    pub seed: u64,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        GroundStateOptions {
            dense_threshold: DENSE_QUBIT_THRESHOLD,
            tolerance: 1e-9,
            max_matvecs: 10_000,
            seed: 0x5eed,
        }
    }
}

pub fn ground_state(h: &QubitHamiltonian) -> Result<EigenPair, SimError> {
    ground_state_with(h, &GroundStateOptions::default())
}

pub fn ground_state_with(
    h: &QubitHamiltonian,
    opts: &GroundStateOptions,
) -> Result<EigenPair, SimError> {
    check_width(h.qubit_count())?;
    if h.is_empty() {
        return Err(SimError::Empty);
    }
    if h.qubit_count() <= opts.dense_threshold {
        Ok(dense_ground(h))
    } else {
        lanczos_ground(h, opts)
    }
}

/// Rotates the global phase so the largest amplitude is real and positive.
fn fix_phase(v: &mut [Complex64]) {
    let big = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
        .unwrap_or_default();
    if big.norm() > 0.0 {
        let rot = big.conj() / big.norm();
        v.iter_mut().for_each(|a| *a *= rot);
    }
}

fn dense_ground(h: &QubitHamiltonian) -> EigenPair {
    let n = h.qubit_count();
    let (vals, vecs) = hermitian_eigen(pauli_sum_matrix(n, h.terms()));
    let mut amps: Vec<Complex64> = vecs.column(0).iter().copied().collect();
    fix_phase(&mut amps);
    let mut state = Statevector {
        qubit_count: n,
        amps,
    };
    state.normalize();
    let gap = vals.get(1).map(|v| v - vals[0]);
    EigenPair {
        energy: vals[0],
        state,
        degenerate: gap.is_some_and(|g| g < DEGENERACY_GAP),
        gap,
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Restarted Lanczos with full reorthogonalisation and matrix-free products.
fn lanczos_ground(h: &QubitHamiltonian, opts: &GroundStateOptions) -> Result<EigenPair, SimError> {
    let n = h.qubit_count();
    let dim = 1usize << n;
    let terms = h.terms();
    // Krylov basis capped at roughly 1 GiB of vectors.
    let per_vec = dim * std::mem::size_of::<Complex64>();
    let krylov = ((1usize << 30) / per_vec).clamp(4, 40).min(dim);

    let mut start = Statevector::random(n, opts.seed)?.amps;
    let mut matvecs = 0usize;
    let residual = loop {
        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for j in 0..krylov {
            let mut w = apply_sum(terms, &basis[j]);
            matvecs += 1;
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &w);
                    w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = norm(&w);
            if j + 1 == krylov || b < 1e-12 || matvecs >= opts.max_matvecs {
                break;
            }
            beta.push(b);
            w.iter_mut().for_each(|x| *x /= b);
            basis.push(w);
        }
        let k = alpha.len();
        let t = DMatrix::<f64>::from_fn(k, k, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let theta = eig.eigenvalues[order[0]];
        let y = eig.eigenvectors.column(order[0]);
        let mut ritz = vec![Complex64::new(0.0, 0.0); dim];
        for (v, &c) in basis.iter().zip(y.iter()) {
            ritz.iter_mut().zip(v).for_each(|(r, x)| *r += c * x);
        }
        let rn = norm(&ritz);
        ritz.iter_mut().for_each(|x| *x /= rn);
        let hr = apply_sum(terms, &ritz);
        matvecs += 1;
        let residual = norm(
            &hr.iter()
                .zip(&ritz)
                .map(|(a, b)| a - theta * b)
                .collect::<Vec<_>>(),
        );
        if residual <= opts.tolerance {
            fix_phase(&mut ritz);
            let gap = (k > 1).then(|| eig.eigenvalues[order[1]] - theta);
            return Ok(EigenPair {
                energy: theta,
                state: Statevector {
                    qubit_count: n,
                    amps: ritz,
                },
                degenerate: gap.is_some_and(|g| g < DEGENERACY_GAP),
                gap,
            });
        }
        if matvecs >= opts.max_matvecs {
            break residual;
        }
        start = ritz;
    };
    Err(SimError::NonConvergence { residual, matvecs })
}

/// Outcome of one Trotter-error measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrotterErrorReport {
    /// `|E₀ - E_eff|`.
    pub measured_error: f64,
    /// `E₀ - E_eff`, same sign convention as `⟨ψ₀|V|ψ₀⟩`.
    pub signed_error: f64,
    pub exact_energy: f64,
    pub estimated_energy: f64,
    /// `|⟨ψ₀|U|ψ₀⟩|`.
    pub overlap: f64,
    pub config: TrotterConfig,
    pub permutation: Option<Vec<usize>>,
    pub degenerate_ground: bool,
}

/// Measures the ground-state energy error of `h`'s Trotter sequence.
pub fn measure_trotter_error(
    h: &QubitHamiltonian,
    config: &TrotterConfig,
) -> Result<TrotterErrorReport, SimError> {
    let g = ground_state(h)?;
    measure_trotter_error_with(h, &g, config)
}

/// As [`measure_trotter_error`], reusing a precomputed ground state. Any
/// ordering of the same terms shares it.
///
/// The effective energy comes from the phase of `z = ⟨ψ₀|U|ψ₀⟩`:
/// `E_eff = E₀ - arg(z e^{iE₀t}) / t`, with the branch chosen nearest `E₀`.
pub fn measure_trotter_error_with(
    h: &QubitHamiltonian,
    ground: &EigenPair,
    config: &TrotterConfig,
) -> Result<TrotterErrorReport, SimError> {
    let r = measure_unlogged(h, ground, config)?;
    if r.overlap < LOW_OVERLAP {
        warn!(
            "overlap |<psi0|U|psi0>| = {:.6} < {LOW_OVERLAP}; phase estimate may be unreliable",
            r.overlap
        );
    }
    Ok(r)
}

/// As [`measure_trotter_error_with`] without the low-overlap warning, for
/// campaigns that aggregate it themselves.
pub fn measure_unlogged(
    h: &QubitHamiltonian,
    ground: &EigenPair,
    config: &TrotterConfig,
) -> Result<TrotterErrorReport, SimError> {
    let t = config.total_time;
    if t == 0.0 {
        return Err(SimError::ZeroTime);
    }
    let mut psi = ground.state.clone();
    trotter_apply(&mut psi, h, config)?;
    let z = ground.state.inner(&psi);
    let e0 = ground.energy;
    let signed = (z * Complex64::from_polar(1.0, e0 * t)).arg() / t;
    Ok(TrotterErrorReport {
        measured_error: signed.abs(),
        signed_error: signed,
        exact_energy: e0,
        estimated_energy: e0 - signed,
        overlap: z.norm(),
        config: *config,
        permutation: None,
        degenerate_ground: ground.degenerate,
    })
}

/// Measured error for each Trotter number in `steps`.
pub fn error_vs_steps(
    h: &QubitHamiltonian,
    total_time: f64,
    order: ApproximantOrder,
    steps: &[usize],
) -> Result<Vec<(usize, f64)>, SimError> {
    let g = ground_state(h)?;
    steps
        .iter()
        .map(|&n| {
            let cfg = TrotterConfig {
                total_time,
                trotter_number: n.max(1),
                order,
            };
            measure_trotter_error_with(h, &g, &cfg).map(|r| (n, r.measured_error))
        })
        .collect()
}

/// `⟨ψ₀|V|ψ₀⟩` for the second-order error operator at step `Δt`.
pub fn error_operator_expectation(h: &QubitHamiltonian, ground: &EigenPair, dt: f64) -> f64 {
    let v = build_error_operator(h, dt);
    expectation(&ground.state, &v.terms).re
}
