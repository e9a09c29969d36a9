mod common;

use common::*;
use proptest::prelude::*;
use trotter_core::hamiltonian::{builtin_fixture, ApproximantOrder, TrotterConfig};
use trotter_core::sim::{
    error_vs_steps, ground_state, ground_state_with, measure_trotter_error_with, trotter_apply,
    GroundStateOptions, Statevector,
};

fn dense_trotter(
    h: &trotter_core::hamiltonian::QubitHamiltonian,
    cfg: &TrotterConfig,
) -> nalgebra::DMatrix<num_complex::Complex64> {
    let n = h.qubit_count();
    let dt = cfg.step_size();
    let mut u = expm_hermitian(&terms_matrix(n, &[]), 0.0);
    let factors: Vec<_> = h
        .terms()
        .iter()
        .map(|t| {
            let m = terms_matrix(n, std::slice::from_ref(t));
            match cfg.order {
                ApproximantOrder::First => expm_hermitian(&m, dt),
                ApproximantOrder::Second => expm_hermitian(&m, dt / 2.0),
            }
        })
        .collect();
    for _ in 0..cfg.trotter_number {
        for f in &factors {
            u = f * u;
        }
        if cfg.order == ApproximantOrder::Second {
            for f in factors.iter().rev() {
                u = f * u;
            }
        }
    }
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trotter_circuit_matches_dense_product(
        h in hamiltonian(3, 6),
        seed in any::<u64>(),
        steps in 1usize..4,
        second in any::<bool>(),
        t in 0.1f64..2.0,
    ) {
        let order = if second { ApproximantOrder::Second } else { ApproximantOrder::First };
        let cfg = TrotterConfig::new(t, steps, order).unwrap();
        let s0 = Statevector::random(3, seed).unwrap();
        let mut s = s0.clone();
        trotter_apply(&mut s, &h, &cfg).unwrap();
        let want = dense_trotter(&h, &cfg) * nalgebra::DVector::from_column_slice(s0.amplitudes());
        for (a, b) in s.amplitudes().iter().zip(want.iter()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ground_energy_is_order_invariant(h in hamiltonian(3, 6), perm_seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..h.len()).collect();
        let mut x = perm_seed;
        for i in (1..perm.len()).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (x >> 33) as usize % (i + 1));
        }
        let a = ground_state(&h).unwrap().energy;
        let b = ground_state(&h.permuted(&perm)).unwrap().energy;
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn lanczos_matches_dense(h in hamiltonian(4, 8)) {
        let dense = ground_state(&h).unwrap();
        let opts = GroundStateOptions { dense_threshold: 0, ..Default::default() };
        let lz = ground_state_with(&h, &opts).unwrap();
        prop_assert!((dense.energy - lz.energy).abs() < 1e-8);
    }
}

#[test]
fn second_order_error_falls_quadratically() {
    for name in ["h2_active_0.7414", "h2_sto3g_0.7414"] {
        let h = builtin_fixture(name).unwrap();
        let r = error_vs_steps(&h, 1.0, ApproximantOrder::Second, &[8, 16]).unwrap();
        let ratio = r[0].1 / r[1].1;
        assert!((ratio - 4.0).abs() < 0.2, "{name}: {ratio}");
    }
}

#[test]
fn measured_error_vanishes_with_many_steps() {
    let h = builtin_fixture("h2_sto3g_0.7414").unwrap();
    let g = ground_state(&h).unwrap();
    let cfg = TrotterConfig::new(1.0, 2000, ApproximantOrder::First).unwrap();
    let r = measure_trotter_error_with(&h, &g, &cfg).unwrap();
    assert!(r.measured_error < 1e-5);
    assert!(r.overlap > 0.999);
    assert!(((r.exact_energy - r.estimated_energy).abs() - r.measured_error).abs() < 1e-14);
}
