//! Property tests for the structural invariants: similarity preserves
//! spectra, symmetrization preserves coupling products, the metric's free
//! scale cancels, Sturm counts are monotone, and constant-site-energy chains
//! have spectra symmetric about the site energy.

mod common;

use common::r;
use proptest::prelude::*;
use qherm_core::metric::{compute_metric, symmetrize, verify_intertwining};
use qherm_core::{analytic, eigen, ChainSpec, Complex64, TridiagMatrix};

/// One bond of a quasi-Hermitian real chain: magnitudes bounded away from
/// zero, both couplings sharing a sign so the product is positive.
fn qh_bond() -> impl Strategy<Value = (f64, f64)> {
    (0.05f64..2.0, 0.05f64..2.0, any::<bool>()).prop_map(|(a, b, neg)| {
        let s = if neg { -1.0 } else { 1.0 };
        (s * a, s * b)
    })
}

fn real_qh_chain() -> impl Strategy<Value = TridiagMatrix> {
    (2usize..=12).prop_flat_map(|n| {
        (
            proptest::collection::vec(qh_bond(), n - 1),
            proptest::collection::vec(-2.0f64..2.0, n),
        )
            .prop_map(|(bonds, omega)| {
                let upper = bonds.iter().map(|(a, _)| r(*a)).collect();
                let lower = bonds.iter().map(|(_, b)| r(*b)).collect();
                let onsite = omega.iter().map(|w| r(*w)).collect();
                TridiagMatrix::from_spec(&ChainSpec::open(upper, lower, onsite)).unwrap()
            })
    })
}

/// Constant site energy, couplings with independent signs (so the coupling
/// product may be negative and the spectrum complex).
fn constant_energy_chain() -> impl Strategy<Value = (TridiagMatrix, f64)> {
    (2usize..=10, -2.0f64..2.0).prop_flat_map(|(n, omega)| {
        proptest::collection::vec(
            (0.05f64..2.0, 0.05f64..2.0, any::<bool>(), any::<bool>()),
            n - 1,
        )
        .prop_map(move |bonds| {
            let upper = bonds
                .iter()
                .map(|(a, _, sa, _)| r(if *sa { -*a } else { *a }))
                .collect();
            let lower = bonds
                .iter()
                .map(|(_, b, _, sb)| r(if *sb { -*b } else { *b }))
                .collect();
            let onsite = vec![r(omega); n];
            (
                TridiagMatrix::from_spec(&ChainSpec::open(upper, lower, onsite)).unwrap(),
                omega,
            )
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn similarity_preserves_the_spectrum(m in real_qh_chain()) {
        let q = compute_metric(&m, 1.0).unwrap();
        let t = symmetrize(&m, &q).unwrap();
        let sym = eigen::symmetric_eigenvalues(&t, 1e-12).unwrap();
        let gen = eigen::general_eigenvalues(&m, 1e-10).unwrap();
        prop_assert!(sym.all_real);
        let dev = eigen::spectrum_deviation(&sym.values, &gen.values);
        prop_assert!(dev <= 1e-8, "deviation {dev}");
    }

    #[test]
    fn symmetrization_preserves_coupling_products(m in real_qh_chain()) {
        let q = compute_metric(&m, 1.0).unwrap();
        let t = symmetrize(&m, &q).unwrap();
        for j in 0..m.n() - 1 {
            let before = m.upper()[j] * m.lower()[j];
            let after = t.upper()[j] * t.lower()[j];
            prop_assert!((before - after).norm() <= 1e-13 * before.norm());
        }
    }

    #[test]
    fn the_free_metric_scale_cancels_in_symmetrization(m in real_qh_chain()) {
        let qa = compute_metric(&m, 1.0).unwrap();
        let qb = compute_metric(&m, -2.5).unwrap();
        let ta = symmetrize(&m, &qa).unwrap();
        let tb = symmetrize(&m, &qb).unwrap();
        for j in 0..m.n() - 1 {
            let rel_u = (ta.upper()[j] - tb.upper()[j]).norm()
                / (1.0 + ta.upper()[j].norm());
            let rel_l = (ta.lower()[j] - tb.lower()[j]).norm()
                / (1.0 + ta.lower()[j].norm());
            prop_assert!(rel_u <= 1e-13 && rel_l <= 1e-13);
        }
    }

    #[test]
    fn metric_entries_reproduce_the_ratio_chain(m in real_qh_chain()) {
        let q = compute_metric(&m, 1.0).unwrap();
        let values = q.values().expect("small chains stay in direct mode");
        for j in 0..m.n() - 1 {
            let got = (values[j + 1] * values[j + 1]) / (values[j] * values[j]);
            let want = q.ratios()[j];
            prop_assert!((got - want).abs() <= 1e-12 * want.abs());
        }
    }

    #[test]
    fn intertwining_residual_stays_within_the_contract(m in real_qh_chain()) {
        let q = compute_metric(&m, 1.0).unwrap();
        prop_assert!(verify_intertwining(&m, &q) <= 1e-13 * m.n() as f64);
    }

    #[test]
    fn char_poly_is_monic_at_large_arguments(m in real_qh_chain()) {
        let z = r(1e6 * m.scale());
        let p = m.char_poly_eval_scaled(z);
        let expected_log = m.n() as f64 * z.norm().log10();
        let ratio = 10f64.powf(p.abs_log10() - expected_log);
        prop_assert!((ratio - 1.0).abs() <= 1e-3, "|p/z^n| = {ratio}");
    }

    #[test]
    fn sturm_count_is_monotone_and_saturates(
        m in real_qh_chain(),
        x1 in -10.0f64..10.0,
        x2 in -10.0f64..10.0,
    ) {
        let q = compute_metric(&m, 1.0).unwrap();
        let t = symmetrize(&m, &q).unwrap();
        let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
        prop_assert!(eigen::sturm_count(&t, lo).unwrap() <= eigen::sturm_count(&t, hi).unwrap());
        let bound = t.spectral_bound();
        prop_assert_eq!(eigen::sturm_count(&t, bound + 1.0).unwrap(), t.n());
        prop_assert_eq!(eigen::sturm_count(&t, -bound - 1.0).unwrap(), 0);
    }

    #[test]
    fn constant_energy_spectra_pair_off_symmetrically((m, omega) in constant_energy_chain()) {
        let s = eigen::general_eigenvalues(&m, 1e-10).unwrap();
        prop_assert!(analytic::symmetry_pairing_check(&s, r(omega), 1e-8));
        if m.n() % 2 == 1 {
            let closest = s
                .values
                .iter()
                .map(|v| (v - r(omega)).norm())
                .fold(f64::INFINITY, f64::min);
            prop_assert!(closest <= 1e-8, "odd chain missing E = omega ({closest})");
        }
    }

    #[test]
    fn alternating_sign_map_flips_the_offset_eigenvalue((m, omega) in constant_energy_chain()) {
        let s = eigen::general_eigenvalues(&m, 1e-10).unwrap();
        // For an eigenvalue omega + eps, flipping every other component of
        // the recurrence eigenvector gives an eigenvector for omega - eps.
        let e = s.values[0];
        let mut v = common::recurrence_eigenvector(&m, e);
        for (j, x) in v.iter_mut().enumerate() {
            if j % 2 == 1 {
                *x = -*x;
            }
        }
        let mirror = r(2.0 * omega) - e;
        let hv = m.apply(&v);
        let worst = hv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b * mirror).norm())
            .fold(0.0f64, f64::max);
        prop_assert!(worst <= 1e-8 * m.scale(), "map residual {worst}");
    }
}

#[test]
fn metric_freedom_extends_to_eigenvectors() {
    // Same chain, two metric gauges: eigenvalues agree and the chain-basis
    // vectors differ exactly by the gauge ratio.
    let m = TridiagMatrix::from_spec(&ChainSpec::open(
        vec![r(1.0), r(0.5)],
        vec![r(4.0), r(2.0)],
        vec![r(0.3), r(-0.1), r(0.8)],
    ))
    .unwrap();
    let qa = compute_metric(&m, 1.0).unwrap();
    let qb = compute_metric(&m, 3.0).unwrap();
    let pa = eigen::diagonalize(&m, &qa, 1e-13).unwrap();
    let pb = eigen::diagonalize(&m, &qb, 1e-13).unwrap();
    for (a, b) in pa.iter().zip(&pb) {
        assert!((a.value - b.value).norm() < 1e-11);
        for (ca, cb) in a.chain_basis.iter().zip(&b.chain_basis) {
            assert!((cb - ca * Complex64::new(3.0, 0.0)).norm() < 1e-12);
        }
    }
}
