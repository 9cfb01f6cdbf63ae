//! Randomised invariants of the transfer function, cumulants and bispectrum.

use std::f64::consts::PI;

use bispec_core::bispec::{analytic_bispectrum, realness_statistic, DEFAULT_SPECTRUM_FLOOR};
use bispec_core::cumulant::{canonical_lags, model_cumulant, model_cumulant_table};
use bispec_core::linmodel::reverse_model;
use bispec_core::{FilterCoefficients, InnovationSpec, LinearModel, Symmetry};
use proptest::prelude::*;

fn filter_strategy() -> impl Strategy<Value = FilterCoefficients> {
    (
        -6i64..=6,
        prop::collection::vec(-1.0f64..1.0, 1..=9),
        prop::bool::ANY,
    )
        .prop_filter_map("edge coefficients must be nonzero", |(k, mut v, tweak)| {
            let n = v.len();
            if tweak {
                v[0] += 1.5;
            }
            if v[0].abs() < 1e-3 || v[n - 1].abs() < 1e-3 {
                return None;
            }
            FilterCoefficients::new(k, v).ok()
        })
}

fn exp_model(f: FilterCoefficients) -> LinearModel {
    LinearModel::new(f, InnovationSpec::centered_exponential(1.0).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transfer_function_is_periodic_and_hermitian(f in filter_strategy(), w in 0.0f64..(2.0 * PI)) {
        let a = f.transfer_function(w);
        let b = f.transfer_function(w + 2.0 * PI);
        let c = f.transfer_function(-w);
        prop_assert!((a - b).norm() <= 1e-9);
        prop_assert!((a.conj() - c).norm() <= 1e-12);
        prop_assert!((f.spectrum(w) - a.norm_sqr()).abs() <= 1e-12 * (1.0 + a.norm_sqr()));
        prop_assert!(f.spectrum(w) >= 0.0);
    }

    #[test]
    fn cumulant_scales_cubically(f in filter_strategy(), alpha in -3.0f64..3.0, t1 in -10i64..10, t2 in -10i64..10) {
        prop_assume!(alpha.abs() > 1e-3);
        let base = model_cumulant(&exp_model(f.clone()), t1, t2);
        let scaled = model_cumulant(&exp_model(f.scaled(alpha).unwrap()), t1, t2);
        prop_assert!((scaled - alpha.powi(3) * base).abs() <= 1e-9 * (1.0 + base.abs() * alpha.abs().powi(3)));
    }

    #[test]
    fn cumulant_table_symmetries(f in filter_strategy()) {
        let t = model_cumulant_table(&exp_model(f), 6).unwrap();
        for (t1, t2, v) in t.iter() {
            prop_assert_eq!(v, t.get(t2, t1).unwrap());
            if (t2 - t1).abs() <= 6 {
                prop_assert_eq!(v, t.get(-t1, t2 - t1).unwrap());
            }
        }
    }

    #[test]
    fn canonical_lags_are_shift_and_permutation_invariant(t1 in -20i64..20, t2 in -20i64..20) {
        let (a, b) = canonical_lags(t1, t2);
        prop_assert!(a <= b);
        prop_assert_eq!((a, b), canonical_lags(t2, t1));
        // {0, t1, t2} shifted by -t1
        prop_assert_eq!((a, b), canonical_lags(-t1, t2 - t1));
    }

    #[test]
    fn bispectrum_scales_and_shifts(f in filter_strategy(), alpha in 0.1f64..3.0, d in -5i64..5) {
        let g = 32;
        let a = analytic_bispectrum(&exp_model(f.clone()), g).unwrap();
        let b = analytic_bispectrum(&exp_model(f.scaled(alpha).unwrap()), g).unwrap();
        let c = analytic_bispectrum(&exp_model(f.shifted(d)), g).unwrap();
        let scale = a.max_abs().max(1e-300);
        for (x, (y, z)) in a.values().iter().zip(b.values().iter().zip(c.values())) {
            prop_assert!((x * alpha.powi(3) - y).norm() <= 1e-9 * scale * alpha.powi(3));
            // a time shift multiplies phi(w1) phi(w2) conj(phi(w1 + w2)) by one
            prop_assert!((x - z).norm() <= 1e-9 * scale);
        }
    }

    #[test]
    fn bispectrum_symmetries_hold(f in filter_strategy()) {
        let a = analytic_bispectrum(&exp_model(f), 40).unwrap();
        let scale = a.max_abs();
        prop_assert!(a.conjugation_defect() <= 1e-12 * (1.0 + scale));
        prop_assert!(a.permutation_defect() <= 1e-12 * (1.0 + scale));
    }

    #[test]
    fn reversal_conjugates_field_and_is_involutive(f in filter_strategy()) {
        let m = exp_model(f);
        prop_assert_eq!(&reverse_model(&reverse_model(&m)), &m);
        let a = analytic_bispectrum(&m, 24).unwrap();
        let b = analytic_bispectrum(&reverse_model(&m), 24).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x.conj() - y).norm() <= 1e-12 * (1.0 + a.max_abs()));
        }
    }

    #[test]
    fn symmetric_filters_give_real_fields(half in prop::collection::vec(0.1f64..1.0, 1..=5), k in -4i64..4, odd in prop::bool::ANY) {
        let mut v = half.clone();
        let tail: Vec<f64> = half.iter().rev().skip(usize::from(odd)).copied().collect();
        v.extend(tail);
        let f = FilterCoefficients::new(k, v).unwrap();
        let symmetric = matches!(f.symmetry(), Symmetry::Symmetric { .. });
        prop_assert!(symmetric);
        let a = analytic_bispectrum(&exp_model(f), 32).unwrap();
        prop_assert!(realness_statistic(&a, DEFAULT_SPECTRUM_FLOOR) <= 1e-9);
    }
}
