//! Seeded Monte Carlo checks of the simulator, the moment estimators and the
//! averaged biperiodogram against closed-form values.

use std::f64::consts::PI;

use bispec_core::bispec::{
    analytic_bispectrum, estimate_bispectrum, estimate_segments, realness_statistic,
    DEFAULT_SPECTRUM_FLOOR,
};
use bispec_core::cumulant::sample_cumulant;
use bispec_core::diagnose::{
    diagnose_series, empirical_reversibility_probe, SeriesThresholds, CAVEAT_ZERO_BISPECTRUM,
};
use bispec_core::linmodel::simulate;
use bispec_core::{
    EstimationPlan, FilterCoefficients, InnovationSpec, LinearModel, Taper, Verdict,
};

fn model(c: &[f64], inn: InnovationSpec) -> LinearModel {
    LinearModel::new(FilterCoefficients::new(0, c.to_vec()).unwrap(), inn)
}

fn exp1() -> InnovationSpec {
    InnovationSpec::centered_exponential(1.0).unwrap()
}

fn mean_and_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, var.sqrt())
}

fn lagged_mean(x: &[f64], h: usize) -> f64 {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    (0..x.len() - h).map(|t| (x[t] - m) * (x[t + h] - m)).sum::<f64>() / (x.len() - h) as f64
}

#[test]
fn simulated_mean_and_variance() {
    let m = model(&[1.0, 1.0], exp1());
    let x = simulate(&m, 100_000, 42).unwrap();
    let (mean, sd) = mean_and_sd(x.values());
    // long-run variance of the mean: sum_h gamma(h) = 2 + 2 * 1
    assert!(mean.abs() <= 4.0 * (4.0 / 1e5f64).sqrt(), "mean {mean}");
    assert!((sd * sd - 2.0).abs() <= 0.05 * 2.0, "variance {}", sd * sd);
}

#[test]
fn simulation_is_deterministic() {
    let m = model(&[1.0], InnovationSpec::gaussian(1.0).unwrap());
    let a = simulate(&m, 10, 7).unwrap();
    let b = simulate(&m, 10, 7).unwrap();
    assert_eq!(a.values(), b.values());
    assert_eq!(a.len(), 10);
    assert_ne!(a.values(), simulate(&m, 10, 8).unwrap().values());
}

#[test]
fn autocovariance_converges() {
    let m = model(&[1.0, -0.5, 0.25], exp1());
    for h in 0..4 {
        let stats: Vec<f64> = (0..10)
            .map(|s| lagged_mean(simulate(&m, 50_000, 100 + s).unwrap().values(), h))
            .collect();
        let (mean, sd) = mean_and_sd(&stats);
        let exact = m.autocovariance(h as i64);
        assert!((mean - exact).abs() <= 5.0 * sd / 10f64.sqrt() + 1e-12, "h={h}: {mean} vs {exact}");
    }
}

#[test]
fn sample_cumulants_converge() {
    let m = model(&[1.0, 1.0], exp1());
    let runs: Vec<Vec<f64>> = (0..10)
        .map(|s| simulate(&m, 200_000, 1000 + s).unwrap().values().to_vec())
        .collect();
    for ((t1, t2), exact) in [((0, 0), 4.0), ((1, 1), 2.0), ((0, 1), 2.0)] {
        let stats: Vec<f64> = runs.iter().map(|x| sample_cumulant(x, t1, t2).unwrap()).collect();
        let (mean, sd) = mean_and_sd(&stats);
        assert!((mean - exact).abs() <= 5.0 * sd / 10f64.sqrt(), "({t1},{t2}): {mean}");
    }
}

#[test]
fn estimator_matches_analytic_value_near_half_half() {
    let m = model(&[1.0, 1.0], exp1());
    let plan = EstimationPlan::new(128, 1024, Taper::None).unwrap();
    let exact = analytic_bispectrum(&m, 128).unwrap();
    let j = exact.nearest_index(0.5);
    let target = exact.at(j, j);
    let mut sum = bispec_core::Complex64::new(0.0, 0.0);
    for s in 0..10 {
        let x = simulate(&m, 1 << 17, 500 + s).unwrap();
        sum += estimate_bispectrum(&x, &plan).unwrap().at(j, j);
    }
    let avg = sum / 10.0;
    assert!((avg - target).norm() <= 0.25 * target.norm(), "{avg} vs {target}");
}

#[test]
fn hann_taper_is_unbiased_in_scale() {
    let m = model(&[1.0, 1.0], exp1());
    let plan = EstimationPlan::new(128, 1024, Taper::Hann).unwrap();
    let exact = analytic_bispectrum(&m, 128).unwrap();
    let j = exact.nearest_index(0.5);
    let mut sum = bispec_core::Complex64::new(0.0, 0.0);
    for s in 0..10 {
        let x = simulate(&m, 1 << 17, 600 + s).unwrap();
        sum += estimate_bispectrum(&x, &plan).unwrap().at(j, j);
    }
    let avg = sum / 10.0;
    assert!((avg - exact.at(j, j)).norm() <= 0.25 * exact.at(j, j).norm());
}

#[test]
fn time_reversed_sample_conjugates_estimate() {
    let m = model(&[1.0, 0.5], exp1());
    let x = simulate(&m, 4096, 3).unwrap();
    let plan = EstimationPlan::new(64, 64, Taper::None).unwrap();
    let a = estimate_bispectrum(&x, &plan).unwrap();
    let b = estimate_bispectrum(&x.time_reversed(), &plan).unwrap();
    let scale = a.max_abs();
    for (u, v) in a.values().iter().zip(b.values()) {
        assert!((u.conj() - v).norm() <= 1e-9 * scale);
    }
}

#[test]
fn gaussian_estimate_stays_within_noise_floor() {
    let l = 128usize;
    let gauss = model(&[1.0, 1.0], InnovationSpec::gaussian(1.0).unwrap());
    let plan = EstimationPlan::new(l, 1024, Taper::None).unwrap();
    let est = estimate_segments(&simulate(&gauss, 1 << 17, 9).unwrap(), &plan).unwrap();
    // per-point standard deviation of the unbiased estimator under a zero
    // bispectrum: sqrt(L S_j S_k S_{j+k} / ((2 pi) M))
    let s = gauss.filter.spectrum_on_grid(l);
    let sd = |j: usize, k: usize| {
        let spec = |i: usize| s[i % l] / (2.0 * PI);
        (l as f64 * spec(j) * spec(k) * spec(j + k) / (2.0 * PI * 1024.0)).sqrt()
    };
    let s_max = s.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut worst: f64 = 0.0;
    for j in 1..l / 2 {
        for k in 1..l / 2 {
            // leakage dominates next to the spectral zero at pi
            if [j, k, j + k].iter().any(|&i| s[i % l] < 0.1 * s_max) {
                continue;
            }
            let z = est.field.at(j, k).norm() / sd(j, k);
            worst = worst.max(z);
        }
    }
    assert!(worst < 5.0, "largest standardized modulus {worst}");
    let skewed = analytic_bispectrum(&model(&[1.0, 1.0], exp1()), l).unwrap();
    let mean_abs = |f: &bispec_core::BifrequencyField| f.l1_norm() / (l * l) as f64;
    assert!(mean_abs(&est.field) < 0.5 * mean_abs(&skewed));
}

fn realness_across_seeds(c: &[f64], seed0: u64) -> Vec<f64> {
    let m = model(c, exp1());
    let plan = EstimationPlan::new(128, 1024, Taper::None).unwrap();
    (0..10)
        .map(|s| {
            let x = simulate(&m, 1 << 17, seed0 + s).unwrap();
            realness_statistic(&estimate_bispectrum(&x, &plan).unwrap(), DEFAULT_SPECTRUM_FLOOR)
        })
        .collect()
}

#[test]
fn realness_statistic_orders_symmetric_below_asymmetric() {
    let sym = realness_across_seeds(&[1.0, 2.0, 1.0], 10);
    let asym = realness_across_seeds(&[1.0, 0.5], 20);
    let sym_max = sym.iter().fold(0.0f64, |a, &b| a.max(b));
    let asym_min = asym.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    assert!(sym_max < asym_min, "{sym:?} vs {asym:?}");
}

#[test]
fn series_diagnosis_examples() {
    let plan = EstimationPlan::new(128, 1024, Taper::None).unwrap();
    let th = SeriesThresholds::default();
    let run = |c: &[f64], inn: InnovationSpec, seed| {
        let x = simulate(&model(c, inn), 1 << 17, seed).unwrap();
        diagnose_series(&x, &plan, &th).unwrap()
    };
    let r = run(&[1.0, 2.0, 1.0], exp1(), 31);
    assert!(r.bispectrum.nonzero);
    assert_eq!(r.reversible, Verdict::Yes);
    let r = run(&[1.0, 0.5], exp1(), 32);
    assert_eq!(r.reversible, Verdict::No, "{r:?}");
    let r = run(&[1.0], InnovationSpec::gaussian(1.0).unwrap(), 33);
    assert_eq!(r.reversible, Verdict::Undetermined);
    assert!(r.caveats.iter().any(|c| c == CAVEAT_ZERO_BISPECTRUM));
}

#[test]
fn reversibility_probe_separates_models() {
    let probe = |c: &[f64], seed| {
        let x = simulate(&model(c, exp1()), 100_000, seed).unwrap();
        empirical_reversibility_probe(x.values(), 3).unwrap()
    };
    // m(2,1;1) - m(1,2;1) = cum3 (c0^2 c1 - c0 c1^2) = 2 * 0.25 for [1, 0.5]
    let asym = probe(&[1.0, 0.5], 41);
    assert!((asym - 0.5).abs() < 0.15, "{asym}");
    let sym = probe(&[1.0, 2.0, 1.0], 42);
    assert!(sym < 0.4, "{sym}");
    let gauss = simulate(&model(&[1.0, 0.5], InnovationSpec::gaussian(1.0).unwrap()), 100_000, 43)
        .unwrap();
    assert!(empirical_reversibility_probe(gauss.values(), 3).unwrap() < 0.05);
}
