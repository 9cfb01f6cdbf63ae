//! Exact-arithmetic cross-checks against independently coded oracles.

use std::f64::consts::PI;

use bispec_core::bispec::{
    analytic_bispectrum, correspondence_check, realness_statistic, triple_product_bound_check,
    DEFAULT_SPECTRUM_FLOOR,
};
use bispec_core::cumulant::{model_cumulant, model_cumulant_table, third_order_symmetry_defect};
use bispec_core::linmodel::{
    random_filter, random_skew_symmetric_filter, random_symmetric_filter, SimRng,
};
use bispec_core::phase::{
    cocycle_residual, extract_phase, fit_best_decomposition, fit_half_integer_slope, slope_bound,
    symmetry_index_from_phase,
};
use bispec_core::{Complex64, FilterCoefficients, InnovationSpec, LinearModel, Symmetry};
use rand::{Rng, SeedableRng};

fn exp_model(filter: FilterCoefficients) -> LinearModel {
    LinearModel::new(filter, InnovationSpec::centered_exponential(1.0).unwrap())
}

/// cum(X(0), X(t1), X(t2)) by expanding all three moving averages and keeping
/// the index triples that hit the same innovation.
fn brute_force_cumulant(f: &FilterCoefficients, cum3: f64, t1: i64, t2: i64) -> f64 {
    let mut total = 0.0;
    for k0 in f.k_min()..=f.k_max() {
        for k1 in f.k_min()..=f.k_max() {
            for k2 in f.k_min()..=f.k_max() {
                // innovations Z(-k0), Z(t1 - k1), Z(t2 - k2)
                if -k0 == t1 - k1 && -k0 == t2 - k2 {
                    total += f.coefficient(k0) * f.coefficient(k1) * f.coefficient(k2);
                }
            }
        }
    }
    cum3 * total
}

/// Direct double sum of the definition of the bispectrum quadrature, without
/// the twiddle tables used by the library.
fn naive_quadrature(model: &LinearModel, g: usize, t1: i64, t2: i64) -> Complex64 {
    let phi = |w: f64| -> Complex64 {
        model
            .filter
            .iter()
            .map(|(k, c)| Complex64::from_polar(c, -(k as f64) * w))
            .sum()
    };
    let h = 2.0 * PI / g as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..g {
        for k in 0..g {
            let (w1, w2) = (h * j as f64, h * k as f64);
            let b = phi(w1) * phi(w2) * phi(-w1 - w2) * (model.innovations.cum3() / (4.0 * PI * PI));
            acc += Complex64::from_polar(1.0, t1 as f64 * w1 + t2 as f64 * w2) * b;
        }
    }
    acc * h * h
}

#[test]
fn model_table_matches_brute_force() {
    let mut rng = SimRng::seed_from_u64(101);
    for trial in 0..60 {
        let width = 1 + trial % 9;
        let k_min = rng.random_range(-4..=4);
        let m = exp_model(random_filter(&mut rng, k_min, width));
        let t = width + 1;
        let table = model_cumulant_table(&m, t).unwrap();
        for (t1, t2, v) in table.iter() {
            let oracle = brute_force_cumulant(&m.filter, 2.0, t1, t2);
            assert!((v - oracle).abs() <= 1e-9, "trial {trial} ({t1},{t2}): {v} vs {oracle}");
        }
    }
}

#[test]
fn model_table_example_values() {
    let m = exp_model(FilterCoefficients::new(0, vec![1.0, 1.0]).unwrap());
    assert_eq!(brute_force_cumulant(&m.filter, 2.0, 0, 0), 4.0);
    assert_eq!(brute_force_cumulant(&m.filter, 2.0, 1, 1), 2.0);
    assert_eq!(model_cumulant(&m, 0, 0), 4.0);
    assert_eq!(model_cumulant(&m, 1, 1), 2.0);
}

#[test]
fn quadrature_library_matches_naive_sum() {
    let m = exp_model(FilterCoefficients::new(-1, vec![1.0, 0.5, -0.25]).unwrap());
    let g = 32;
    let field = analytic_bispectrum(&m, g).unwrap();
    let quad = bispec_core::bispec::inverse_transform(&field, 2);
    let mut idx = 0;
    for t1 in -2..=2 {
        for t2 in -2..=2 {
            let naive = naive_quadrature(&m, g, t1, t2);
            assert!((quad[idx] - naive).norm() < 1e-12, "({t1},{t2})");
            assert!((naive.re - brute_force_cumulant(&m.filter, 2.0, t1, t2)).abs() < 1e-12);
            idx += 1;
        }
    }
}

#[test]
fn correspondence_over_random_filters() {
    let mut rng = SimRng::seed_from_u64(7);
    for trial in 0..20 {
        let width = 1 + trial % 9;
        let k_min = rng.random_range(-3..=3);
        let m = exp_model(random_filter(&mut rng, k_min, width));
        let err = correspondence_check(&m, 128, 5).unwrap();
        assert!(err <= 1e-9, "trial {trial}: {err}");
    }
}

#[test]
fn analytic_field_symmetries() {
    let mut rng = SimRng::seed_from_u64(8);
    for width in 1..=9 {
        let m = exp_model(random_filter(&mut rng, -2, width));
        let f = analytic_bispectrum(&m, 64).unwrap();
        assert!(f.conjugation_defect() <= 1e-10);
        assert!(f.permutation_defect() <= 1e-10);
    }
}

#[test]
fn reversed_model_conjugates_field() {
    let mut rng = SimRng::seed_from_u64(9);
    for width in 1..=9 {
        let m = exp_model(random_filter(&mut rng, 1, width));
        let a = analytic_bispectrum(&m, 48).unwrap();
        let b = analytic_bispectrum(&m.reversed(), 48).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x.conj() - y).norm() <= 1e-10);
        }
    }
}

#[test]
fn symmetric_fields_real_skew_fields_imaginary() {
    let mut rng = SimRng::seed_from_u64(10);
    for width in 1..=9 {
        let m = exp_model(random_symmetric_filter(&mut rng, -3, width));
        let f = analytic_bispectrum(&m, 64).unwrap();
        assert!(f.max_abs_imag() <= 1e-10 * f.max_abs());
        if width >= 2 {
            let m = exp_model(random_skew_symmetric_filter(&mut rng, 0, width));
            let f = analytic_bispectrum(&m, 64).unwrap();
            assert!(f.max_abs_real() <= 1e-10 * f.max_abs(), "width {width}");
        }
    }
}

#[test]
fn realness_examples() {
    let f = analytic_bispectrum(&exp_model(FilterCoefficients::new(0, vec![1.0, 2.0, 1.0]).unwrap()), 64).unwrap();
    assert!(realness_statistic(&f, DEFAULT_SPECTRUM_FLOOR) <= 1e-12);
    let f = analytic_bispectrum(&exp_model(FilterCoefficients::new(0, vec![1.0, 0.5]).unwrap()), 64).unwrap();
    assert!(realness_statistic(&f, DEFAULT_SPECTRUM_FLOOR) > 0.1);
}

#[test]
fn triple_product_bound_random_transfer_functions() {
    let mut rng = SimRng::seed_from_u64(11);
    let g = 64;
    for _ in 0..100 {
        let psi: Vec<Vec<Complex64>> = (0..3)
            .map(|_| {
                let w = rng.random_range(1..=9);
                let k_min = rng.random_range(-4..=4);
                random_filter(&mut rng, k_min, w).transfer_on_grid(g)
            })
            .collect();
        let r = triple_product_bound_check(&psi[0], &psi[1], &psi[2]).unwrap();
        assert!(r.holds(), "{r:?}");
    }
}

#[test]
fn symmetry_defect_of_symmetric_filter_table() {
    let m = exp_model(FilterCoefficients::new(0, vec![1.0, 2.0, 1.0]).unwrap());
    let table = model_cumulant_table(&m, 3).unwrap();
    // both orientations from the oracle
    for (t1, t2, _) in table.iter() {
        let a = brute_force_cumulant(&m.filter, 2.0, t1, t2);
        let b = brute_force_cumulant(&m.filter, 2.0, -t1, -t2);
        assert!((a - b).abs() <= 1e-12);
    }
    assert!(third_order_symmetry_defect(&table) <= 1e-12);
}

#[test]
fn phase_recovers_symmetry_index() {
    let mut rng = SimRng::seed_from_u64(12);
    for trial in 0..200 {
        let width = 1 + trial % 9;
        let k_min = rng.random_range(-5..=5);
        let f = random_symmetric_filter(&mut rng, k_min, width);
        let Symmetry::Symmetric { index } = f.symmetry() else {
            panic!("constructed filter not symmetric");
        };
        let p = extract_phase(&f, 256, 1e-6).unwrap();
        let d = fit_half_integer_slope(&p, slope_bound(&f));
        assert!(d.residual <= 1e-9, "trial {trial}: {}", d.residual);
        assert_eq!(symmetry_index_from_phase(&d, 1e-6), Some(index));
        let cocycle = cocycle_residual(&p).unwrap();
        assert!(cocycle <= 2.0 * d.residual + 1e-12, "{cocycle} vs {}", d.residual);
    }
}

#[test]
fn phase_recovers_skew_symmetry_index() {
    let mut rng = SimRng::seed_from_u64(13);
    for trial in 0..100 {
        let width = 2 + trial % 8;
        let k_min = rng.random_range(-5..=5);
        let f = random_skew_symmetric_filter(&mut rng, k_min, width);
        let Symmetry::SkewSymmetric { index } = f.symmetry() else {
            panic!("constructed filter not skew-symmetric");
        };
        let p = extract_phase(&f, 256, 1e-6).unwrap();
        let d = fit_best_decomposition(&p, slope_bound(&f));
        assert!(d.residual <= 1e-9);
        assert_eq!(symmetry_index_from_phase(&d, 1e-6), Some(index));
    }
}

#[test]
fn time_shift_moves_slope_by_two_per_lag() {
    let mut rng = SimRng::seed_from_u64(14);
    for trial in 0..50 {
        let width = 1 + trial % 9;
        let f = if trial % 2 == 0 {
            random_symmetric_filter(&mut rng, 0, width)
        } else {
            random_filter(&mut rng, 0, width)
        };
        let d = rng.random_range(-4..=4);
        let g = f.shifted(d);
        let bound = slope_bound(&f).max(slope_bound(&g)) + 8;
        let a = fit_half_integer_slope(&extract_phase(&f, 256, 1e-6).unwrap(), bound);
        let b = fit_half_integer_slope(&extract_phase(&g, 256, 1e-6).unwrap(), bound);
        if a.residual <= 1e-6 {
            assert_eq!(b.n, a.n - 2 * d);
        }
        let shifted_residual =
            fit_residual_at(&extract_phase(&g, 256, 1e-6).unwrap(), a.n - 2 * d);
        assert!((shifted_residual - a.residual).abs() <= 1e-10);
    }
}

fn fit_residual_at(p: &bispec_core::PhaseFunction, n: i64) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..p.grid() {
        if p.valid()[j] {
            let r = p.values()[j] - 0.5 * n as f64 * p.frequency(j);
            worst = worst.max((r - PI * (r / PI).round()).abs());
        }
    }
    worst
}

#[test]
fn nonsymmetric_phase_fails_cocycle() {
    let f = FilterCoefficients::new(0, vec![1.0, 0.5]).unwrap();
    let p = extract_phase(&f, 64, 1e-6).unwrap();
    // brute force over every pair
    let mut worst: f64 = 0.0;
    for i in 0..64 {
        for j in 0..64 {
            let r = p.values()[i] + p.values()[j] - p.values()[(i + j) % 64];
            worst = worst.max((r - PI * (r / PI).round()).abs());
        }
    }
    assert!(worst > 0.05);
    assert_eq!(cocycle_residual(&p).unwrap(), worst);
}
