mod common;

use hovqe::eigen::{eigenvalues, symmetric_eigen};
use hovqe::encoding::{encode, EncodingKind};
use hovqe::hamiltonian::*;
use proptest::prelude::*;

/// Number of eigenvalues below `x`, from the signs of the LDLᵀ pivots of M − xI.
fn count_below(m: &RealMatrix, x: f64) -> usize {
    let n = m.dim();
    let mut a: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| m.get(i, j) - if i == j { x } else { 0.0 }).collect()).collect();
    let mut neg = 0;
    for k in 0..n {
        let mut p = a[k][k];
        if p == 0.0 {
            p = -1e-300;
        }
        if p < 0.0 {
            neg += 1;
        }
        for i in k + 1..n {
            let f = a[i][k] / p;
            for j in k + 1..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    neg
}

/// Smallest eigenvalue by bisection on the inertia count.
fn bisect_lowest(m: &RealMatrix) -> f64 {
    let r = m.max_abs() * m.dim() as f64 + 1.0;
    let (mut lo, mut hi) = (-r, r);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(m, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn worked_example() -> RealMatrix {
    let hw = hbar_omega_rule(16);
    let spec = HamiltonianSpec {
        system: NuclearSystem::neutron_on(16, hw),
        potential: PotentialSpec::Exponential { v0: -2.79, c: 1.0 / (4.7 * 4.7) },
        n: 4,
        k: 2,
    };
    assemble_with(&spec, PowerConstruction::Truncated).unwrap()
}

const ONEHOT_PRINTED: [(&str, f64); 15] = [
    ("IIII", 67.117),
    ("IIIZ", -4.674),
    ("IIZI", -12.751),
    ("IZII", -20.812),
    ("ZIII", -28.880),
    ("IIXX", -4.814),
    ("IIYY", -4.814),
    ("IXXI", -8.801),
    ("IYYI", -8.801),
    ("XXII", -12.772),
    ("YYII", -12.772),
    ("IXIX", -0.004),
    ("IYIY", -0.004),
    ("XIXI", -0.014),
    ("YIYI", -0.014),
];

const BINARY_PRINTED: [(&str, f64); 10] = [
    ("II", 33.556),
    ("ZI", -8.073),
    ("IZ", -16.134),
    ("ZZ", -0.004),
    ("IX", -0.014),
    ("XZ", 7.959),
    ("ZX", -0.006),
    ("XI", -17.586),
    ("XX", -8.801),
    ("YY", -8.801),
];

const GRAY_PRINTED: [(&str, f64); 10] = [
    ("II", 33.556),
    ("ZI", -16.133),
    ("IZ", -0.004),
    ("ZZ", -8.073),
    ("IX", -17.586),
    ("ZX", 7.959),
    ("XZ", 8.801),
    ("XI", -8.801),
    ("XX", -0.014),
    ("YY", -0.006),
];

/// Printed terms (qubit 0 rightmost) that disagree with an otherwise matching matrix.
fn misprint(kind: EncodingKind, printed: &str) -> bool {
    matches!(
        (kind, printed),
        (EncodingKind::OneHot, "XIXI" | "YIYI") | (EncodingKind::Binary, "II" | "ZX") | (EncodingKind::Gray, "II")
    )
}

#[test]
fn worked_example_coefficients_match_printed_truncation() {
    let h = worked_example();
    for (kind, printed, n) in [
        (EncodingKind::OneHot, &ONEHOT_PRINTED[..], 4),
        (EncodingKind::Binary, &BINARY_PRINTED[..], 2),
        (EncodingKind::Gray, &GRAY_PRINTED[..], 2),
    ] {
        let sum = encode(&h, kind, 2).unwrap();
        assert_eq!(sum.len(), printed.len(), "{kind}");
        let expected = common::reversed_sum(n, printed);
        for (p, c) in expected.iter() {
            let got = sum.coeff(p);
            let printed_str: String = p.to_string().chars().rev().collect();
            let close = (got - c).abs() < 1e-3;
            assert_eq!(close, !misprint(kind, &printed_str), "{kind} {printed_str}: printed {c}, computed {got}");
        }
    }
}

#[test]
fn worked_example_sums_share_one_matrix() {
    // Identity coefficients: one-hot carries Tr/2, compact codes Tr/4.
    let h = worked_example();
    let tr: f64 = (0..4).map(|i| h.get(i, i)).sum();
    let oh = encode(&h, EncodingKind::OneHot, 2).unwrap();
    let gray = encode(&h, EncodingKind::Gray, 2).unwrap();
    assert!((oh.coeff(&"IIII".parse().unwrap()) - tr / 2.0).abs() < 1e-12);
    assert!((gray.coeff(&"II".parse().unwrap()) - tr / 4.0).abs() < 1e-12);
}

#[test]
fn binary_printed_sum_densifies_to_the_matrix() {
    let h = worked_example();
    let dense = common::reversed_sum(2, &BINARY_PRINTED).dense_matrix().unwrap();
    let code = hovqe::encoding::binary_code(2);
    let mut worst: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            let d = dense.get(code.entries[a] as usize, code.entries[b] as usize).re - h.get(a, b);
            // The misprinted identity and XZ terms shift entries by at most 0.003 + 2·0.0124.
            worst = worst.max(d.abs());
        }
    }
    assert!(worst < 0.03, "{worst}");
}

#[test]
fn stated_demo_matrix_shape() {
    let h = assemble(&demo_spec()).unwrap();
    assert!(h.is_symmetric());
    assert_eq!(h.bandwidth(), 2);
    let t = kinetic_matrix(4, 15.95);
    assert!((h.get(0, 0) - t.get(0, 0) - (-2.79) * (1.0 - 0.05 * 1.5 + 0.00125 * 3.75)).abs() < 1e-12);
}

#[test]
fn carbon_energy_rows() {
    let padded = |a, n| lowest_eigenvalue(&assemble(&n_carbon_spec(a, n, 3).unwrap()).unwrap()).unwrap();
    let truncated = |a, n| {
        lowest_eigenvalue(&assemble_with(&n_carbon_spec(a, n, 3).unwrap(), PowerConstruction::Truncated).unwrap())
            .unwrap()
    };
    assert!((padded(10, 8) - -6.5364).abs() < 5e-5);
    assert!((padded(10, 16) - -6.7346).abs() < 5e-5);
    assert!((padded(12, 16) - -1.70020).abs() < 5e-6);
    assert!((padded(14, 16) - -1.0070).abs() < 5e-5);
    // The N=8 rows of 12C and 14C follow the truncated-space powers.
    assert!((truncated(12, 8) - -1.18495).abs() < 5e-6);
    assert!((truncated(14, 8) - -0.49963).abs() < 5e-6);
    assert!((padded(12, 8) - -1.184993).abs() < 5e-7);
}

#[test]
fn alpha_energy_rows_within_coefficient_rounding() {
    let e = |hw, n, k| lowest_eigenvalue(&assemble(&n_alpha_spec(hw, n, k).unwrap()).unwrap()).unwrap();
    for (hw, n, k, printed) in [
        (12, 8, 1, -17.7986),
        (12, 16, 1, -17.7987),
        (12, 8, 2, -16.6190),
        (12, 16, 2, -16.6191),
        (16, 8, 1, -20.7735),
        (16, 8, 2, -18.9470),
    ] {
        let got = e(hw, n, k);
        assert!((got - printed).abs() < 1e-2, "ħω={hw} N={n} K={k}: {got} vs {printed}");
    }
}

#[test]
fn eigensolver_matches_inertia_bisection() {
    let mut rng = common::rng(7);
    for dim in 1..=12 {
        for k in 0..4 {
            let m = common::signed_banded(dim, k, &mut rng);
            let a = lowest_eigenvalue(&m).unwrap();
            let b = bisect_lowest(&m);
            assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "dim {dim}: {a} vs {b}");
        }
    }
    for a in [10, 12, 14] {
        let m = assemble(&n_carbon_spec(a, 16, 3).unwrap()).unwrap();
        assert!((lowest_eigenvalue(&m).unwrap() - bisect_lowest(&m)).abs() < 1e-9);
    }
}

#[test]
fn eigenvectors_are_orthonormal() {
    let m = assemble(&n_alpha_spec(16, 8, 2).unwrap()).unwrap();
    let e = symmetric_eigen(&m).unwrap();
    let n = m.dim();
    for a in 0..n {
        for b in 0..n {
            let dot: f64 = (0..n).map(|i| e.vectors[a][i] * e.vectors[b][i]).sum();
            assert!((dot - if a == b { 1.0 } else { 0.0 }).abs() < 1e-10);
        }
    }
    assert!(eigenvalues(&m).unwrap().windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn model_space_monotonicity() {
    for a in [10, 12, 14, 16, 18] {
        let e8 = lowest_eigenvalue(&assemble(&n_carbon_spec(a, 8, 3).unwrap()).unwrap()).unwrap();
        let e16 = lowest_eigenvalue(&assemble(&n_carbon_spec(a, 16, 3).unwrap()).unwrap()).unwrap();
        assert!(e16 <= e8 + 1e-12, "A={a}");
    }
}

#[test]
fn hbar_omega_rule_for_a16() {
    assert!((hbar_omega_rule(16) - 15.95).abs() < 0.005);
}

#[test]
fn truncated_power_differs_only_in_corner() {
    let p = r2k_matrix_with(4, 2, PowerConstruction::Padded);
    let t = r2k_matrix_with(4, 2, PowerConstruction::Truncated);
    for i in 0..4 {
        for j in 0..4 {
            let same = (p.get(i, j) - t.get(i, j)).abs() < 1e-12;
            assert_eq!(same, !(i == 3 && j == 3), "({i},{j})");
        }
    }
}

#[test]
fn single_state_is_the_oscillator_diagonal() {
    let spec = HamiltonianSpec {
        system: NuclearSystem::neutron_on(4, 2.0),
        potential: PotentialSpec::Polynomial { v: vec![0.0] },
        n: 2,
        k: 0,
    };
    let h = assemble_sized(&spec, 1, PowerConstruction::Padded).unwrap();
    assert_eq!(h.dim(), 1);
    // ħω (2·0 + 3/2) / 2
    assert!((h.get(0, 0) - 1.5).abs() < 1e-14);
    assert!(assemble_sized(&spec, 0, PowerConstruction::Padded).is_err());
}

#[test]
fn sized_assembly_matches_spec_size() {
    for (a, n) in [(10, 2), (12, 5), (14, 16)] {
        let spec = n_carbon_spec(a, n, 3).unwrap();
        let other = n_carbon_spec(a, 7, 3).unwrap();
        for c in [PowerConstruction::Padded, PowerConstruction::Truncated] {
            assert_eq!(assemble_with(&spec, c).unwrap(), assemble_sized(&other, n, c).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(common::quiet(64))]

    #[test]
    fn padding_is_exact(dim in 1usize..=8, k in 0usize..=4, extra in 0usize..=4) {
        let small = r2k_matrix_dimensionless(dim, k);
        let big = r2k_matrix_dimensionless(dim + extra, k).truncate(dim);
        prop_assert!(small.as_slice().iter().zip(big.as_slice()).all(|(a, b)| (a - b).abs() <= 1e-9 * (1.0 + a.abs())));
    }

    #[test]
    fn assembled_matrices_are_symmetric_and_banded(
        dim in 2usize..=16, k in 0usize..=4, v0 in -80.0f64..0.0, c in 0.0f64..0.2, hw in 5.0f64..30.0,
    ) {
        let spec = HamiltonianSpec {
            system: NuclearSystem::neutron_on(12, hw),
            potential: PotentialSpec::Exponential { v0, c },
            n: dim,
            k,
        };
        let h = assemble(&spec).unwrap();
        prop_assert!(h.is_symmetric());
        for i in 0..dim {
            for j in 0..dim {
                if i.abs_diff(j) > k.max(1) {
                    prop_assert_eq!(h.get(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn r2k_bandwidth(dim in 1usize..=12, k in 0usize..=5) {
        prop_assert!(r2k_matrix_dimensionless(dim, k).bandwidth() <= k);
    }
}
