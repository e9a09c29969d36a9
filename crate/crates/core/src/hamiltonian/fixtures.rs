//! Built-in H₂ (STO-3G, Jordan–Wigner) Hamiltonians.
//!
//! `h2_sto3g_0.7414` is the full 15-term equilibrium Hamiltonian in its
//! conventional listing order. The `h2_active_*` fixtures carry only the
//! eight non-totally-commuting terms for each bond length, stored in
//! magnitude-descending order with lexicographic tie-break.

use super::{HamiltonianError, QubitHamiltonian};
use crate::pauli::{PauliString, PauliTerm};

pub const FIXTURE_NAMES: [&str; 6] = [
    "h2_sto3g_0.7414",
    "h2_active_0.3707",
    "h2_active_0.7414",
    "h2_active_1.1121",
    "h2_active_1.4828",
    "h2_active_10.000",
];

const YXXY: &str = "Y3 X2 X1 Y0";
const XYYX: &str = "X3 Y2 Y1 X0";
const XXYY: &str = "X3 X2 Y1 Y0";
const YYXX: &str = "Y3 Y2 X1 X0";

const STO3G_0_7414: [(f64, &str); 15] = [
    (-0.81262, ""),
    (0.17120, "Z0"),
    (0.17120, "Z1"),
    (-0.22279, "Z2"),
    (-0.22279, "Z3"),
    (0.16862, "Z1 Z0"),
    (0.12054, "Z2 Z0"),
    (0.16587, "Z3 Z0"),
    (0.16587, "Z2 Z1"),
    (0.12054, "Z3 Z1"),
    (0.17435, "Z3 Z2"),
    (-0.04532, YYXX),
    (0.04532, XYYX),
    (0.04532, YXXY),
    (-0.04532, XXYY),
];

/// Per bond length: Z0, Z1, Z2, Z3 coefficients and the XY-set magnitude.
/// XY-set signs are fixed: YXXY and XYYX positive, XXYY and YYXX negative.
struct ActiveColumn {
    bond: &'static str,
    z: [f64; 4],
    xy: f64,
    optimal: [&'static str; 8],
}

const COLUMNS: [ActiveColumn; 5] = [
    ActiveColumn {
        bond: "0.3707",
        z: [0.24197, 0.24197, -0.48079, -0.48079],
        xy: 0.04084,
        optimal: ["Z1", YXXY, "Z0", YYXX, "Z3", XXYY, "Z2", XYYX],
    },
    ActiveColumn {
        bond: "0.7414",
        z: [0.17120, 0.17120, -0.22279, -0.22279],
        xy: 0.04532,
        optimal: ["Z1", YXXY, "Z0", YYXX, "Z3", XXYY, "Z2", XYYX],
    },
    ActiveColumn {
        bond: "1.1121",
        z: [0.12533, 0.12533, -0.10205, -0.10205],
        xy: 0.05100,
        optimal: ["Z2", YXXY, "Z3", XYYX, "Z0", YYXX, "Z1", XXYY],
    },
    ActiveColumn {
        bond: "1.4828",
        z: [0.09462, 0.09462, -0.03780, -0.03780],
        xy: 0.05711,
        optimal: ["Z2", YXXY, "Z3", XYYX, "Z0", YYXX, "Z1", XXYY],
    },
    ActiveColumn {
        bond: "10.000",
        z: [0.03964, 0.03964, 0.03964, 0.03964],
        xy: 0.09021,
        optimal: [YXXY, XYYX, XXYY, YYXX, "Z0", "Z1", "Z3", "Z2"],
    },
];

/// Reported optimal first-order sequence at 0.7414 Å (first applied first).
pub const FIRST_ORDER_OPTIMAL_0_7414: [&str; 8] = [XYYX, "Z2", YYXX, "Z3", XXYY, "Z1", YXXY, "Z0"];

fn column(name: &str) -> Option<&'static ActiveColumn> {
    let bond = name.strip_prefix("h2_active_")?;
    COLUMNS.iter().find(|c| c.bond == bond)
}

pub fn builtin_fixture(name: &str) -> Result<QubitHamiltonian, HamiltonianError> {
    if name == FIXTURE_NAMES[0] {
        return QubitHamiltonian::from_labels(4, &STO3G_0_7414, name);
    }
    let col = column(name).ok_or_else(|| HamiltonianError::UnknownFixture(name.to_string()))?;
    let spec = [
        (col.z[0], "Z0"),
        (col.z[1], "Z1"),
        (col.z[2], "Z2"),
        (col.z[3], "Z3"),
        (col.xy, YXXY),
        (col.xy, XYYX),
        (-col.xy, XXYY),
        (-col.xy, YYXX),
    ];
    let mut terms = spec
        .iter()
        .map(|&(c, s)| Ok(PauliTerm::real(c, PauliString::from_labels(4, s)?)))
        .collect::<Result<Vec<_>, crate::pauli::PauliError>>()?;
    terms.sort_by(|a, b| a.priority_cmp(b));
    QubitHamiltonian::new(4, terms, name)
}

/// The reference optimal second-order sequence for an active fixture,
/// as strings in application order.
pub fn reported_optimal_order(name: &str) -> Option<Vec<PauliString>> {
    let col = column(name)?;
    Some(
        col.optimal
            .iter()
            .map(|s| PauliString::from_labels(4, s).expect("static labels are valid"))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeff_of(h: &QubitHamiltonian, label: &str) -> f64 {
        let s = PauliString::from_labels(4, label).unwrap();
        h.terms()
            .iter()
            .find(|t| t.string == s)
            .unwrap()
            .coefficient
            .re
    }

    #[test]
    fn every_name_loads() {
        for name in FIXTURE_NAMES {
            let h = builtin_fixture(name).unwrap();
            assert_eq!(h.qubit_count(), 4);
            assert_eq!(h.label(), name);
        }
        assert!(matches!(
            builtin_fixture("h2_active_9.9"),
            Err(HamiltonianError::UnknownFixture(_))
        ));
    }

    #[test]
    fn equilibrium_full_values() {
        let h = builtin_fixture("h2_sto3g_0.7414").unwrap();
        assert_eq!(h.len(), 15);
        assert_eq!(h.coefficient(0), -0.81262);
        assert_eq!(coeff_of(&h, "Z0"), 0.17120);
    }

    #[test]
    fn asymptotic_values() {
        let h = builtin_fixture("h2_active_10.000").unwrap();
        for z in ["Z0", "Z1", "Z2", "Z3"] {
            assert_eq!(coeff_of(&h, z), 0.03964);
        }
        for xy in [YXXY, XYYX, XXYY, YYXX] {
            assert_eq!(coeff_of(&h, xy).abs(), 0.09021);
        }
    }

    #[test]
    fn short_bond_value() {
        let h = builtin_fixture("h2_active_0.3707").unwrap();
        assert_eq!(coeff_of(&h, "Z3"), -0.48079);
    }

    #[test]
    fn active_fixtures_are_magnitude_sorted() {
        for name in &FIXTURE_NAMES[1..] {
            let h = builtin_fixture(name).unwrap();
            assert_eq!(h.len(), 8);
            for w in h.terms().windows(2) {
                assert!(w[0].priority_cmp(&w[1]).is_lt());
            }
        }
    }

    #[test]
    fn reported_orders_are_permutations_of_fixture() {
        for name in &FIXTURE_NAMES[1..] {
            let h = builtin_fixture(name).unwrap();
            let order = reported_optimal_order(name).unwrap();
            let mut a: Vec<_> = order.clone();
            let mut b: Vec<_> = h.terms().iter().map(|t| t.string.clone()).collect();
            a.sort();
            b.sort();
            assert_eq!(a, b, "{name}");
        }
    }
}
