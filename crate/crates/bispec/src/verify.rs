//! Cross-module invariant battery run by `bispec verify`.

use std::fmt;

use bispec_core::bispec::{
    analytic_bispectrum, correspondence_error, realness_statistic, triple_product_bound_check,
    DEFAULT_SPECTRUM_FLOOR,
};
use bispec_core::diagnose::{diagnose_model, third_order_reversibility_check};
use bispec_core::linmodel::{
    random_filter, random_skew_symmetric_filter, random_symmetric_filter, SimRng,
};
use bispec_core::phase::{
    cocycle_residual, extract_phase, fit_best_decomposition, fit_half_integer_slope, slope_bound,
    symmetry_index_from_phase,
};
use bispec_core::{
    BifrequencyField, Complex64, FilterCoefficients, InnovationSpec, LinearModel, Symmetry,
    Verdict,
};
use rand::{Rng, SeedableRng};

/// Tolerances and trial counts of the battery.
#[derive(Debug, Clone, PartialEq)]
pub struct BatteryConfig {
    pub seed: u64,
    pub grid: usize,
    pub correspondence_max_lag: usize,
    pub correspondence_random_filters: usize,
    pub correspondence_tol: f64,
    pub pathway_filters: usize,
    pub realness_zero_tol: f64,
    pub realness_gap: f64,
    pub triple_trials: usize,
    pub equality_tol: f64,
    pub phase_trials: usize,
    pub phase_grid: usize,
    pub phase_residual_tol: f64,
    pub nonsymmetric_residual_min: f64,
    pub cocycle_tol: f64,
    pub cocycle_gap: f64,
    /// Extra models checked alongside the built-in ones.
    pub models: Vec<LinearModel>,
    /// Test fixture: drops the `1 / (2 pi)^2` factor before the
    /// correspondence check.
    pub inject_fault: bool,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            seed: 1,
            grid: 128,
            correspondence_max_lag: 5,
            correspondence_random_filters: 50,
            correspondence_tol: 1e-9,
            pathway_filters: 500,
            realness_zero_tol: 1e-9,
            realness_gap: 1e-3,
            triple_trials: 100,
            equality_tol: 1e-9,
            phase_trials: 200,
            phase_grid: 256,
            phase_residual_tol: 1e-9,
            nonsymmetric_residual_min: 0.01,
            cocycle_tol: 1e-9,
            cocycle_gap: 0.05,
            models: Vec::new(),
            inject_fault: false,
        }
    }
}

/// One line of the verification log.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    /// Relation between `measured` and `tolerance`, e.g. `<=`.
    pub relation: &'static str,
    pub tolerance: f64,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: measured {:e} {} {:e} ({})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.relation,
            self.tolerance,
            self.detail
        )
    }
}

fn at_most(name: &'static str, measured: f64, tolerance: f64, detail: String) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: measured <= tolerance,
        measured,
        relation: "<=",
        tolerance,
        detail,
    }
}

fn at_least(name: &'static str, measured: f64, tolerance: f64, detail: String) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: measured >= tolerance,
        measured,
        relation: ">=",
        tolerance,
        detail,
    }
}

fn exp1() -> InnovationSpec {
    InnovationSpec::centered_exponential(1.0).expect("valid rate")
}

fn fixed(k_min: i64, c: &[f64], inn: InnovationSpec) -> LinearModel {
    LinearModel::new(
        FilterCoefficients::new(k_min, c.to_vec()).expect("valid filter"),
        inn,
    )
}

/// Named models every battery run includes.
pub fn builtin_models() -> Vec<LinearModel> {
    vec![
        fixed(0, &[1.0], exp1()),
        fixed(0, &[1.0, 1.0], exp1()),
        fixed(0, &[1.0, 2.0, 1.0], exp1()),
        fixed(0, &[1.0, 0.5], exp1()),
        fixed(-2, &[0.3, -1.0, 2.0, -1.0, 0.3], exp1()),
        fixed(0, &[1.0, 0.0, -1.0], InnovationSpec::two_point(0.5).expect("valid p")),
        fixed(0, &[1.0, 0.0, -1.0], InnovationSpec::gaussian(1.0).expect("valid sigma")),
        fixed(
            3,
            &[0.5, -0.25, 1.0],
            InnovationSpec::centered_gamma(2.0, 1.5).expect("valid gamma"),
        ),
        fixed(-1, &[1.0, 0.5, -0.3], InnovationSpec::two_point(0.2).expect("valid p")),
    ]
}

fn random_width(rng: &mut SimRng, lo: usize) -> usize {
    rng.random_range(lo..=9)
}

fn random_k_min(rng: &mut SimRng) -> i64 {
    rng.random_range(-4..=4)
}

fn analytic_field(model: &LinearModel, grid: usize, inject_fault: bool) -> BifrequencyField {
    let field = analytic_bispectrum(model, grid).expect("grid checked by caller");
    if !inject_fault {
        return field;
    }
    let scale = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
    BifrequencyField::from_values(
        grid,
        field.values().iter().map(|z| z * scale).collect(),
        field.kind(),
        field.source().clone(),
    )
    .expect("same shape")
}

/// Quadrature of the analytic bispectrum against the triple-sum cumulants.
pub fn check_correspondence(cfg: &BatteryConfig) -> CheckOutcome {
    let mut rng = SimRng::seed_from_u64(cfg.seed);
    let mut models = builtin_models();
    models.extend(cfg.models.iter().cloned());
    for _ in 0..cfg.correspondence_random_filters {
        let width = random_width(&mut rng, 1);
        let k_min = random_k_min(&mut rng);
        models.push(LinearModel::new(random_filter(&mut rng, k_min, width), exp1()));
    }
    let mut worst: f64 = 0.0;
    let mut grids = Vec::new();
    for m in &models {
        let required = bispec_core::bispec::correspondence_min_grid(m, cfg.correspondence_max_lag);
        let g = cfg.grid.max(required);
        grids.push(g);
        let field = analytic_field(m, g, cfg.inject_fault);
        worst = worst.max(correspondence_error(&field, m, cfg.correspondence_max_lag));
    }
    at_most(
        "correspondence_check",
        worst,
        cfg.correspondence_tol,
        format!(
            "{} models, |t1|,|t2| <= {}, G = {}..={}",
            models.len(),
            cfg.correspondence_max_lag,
            grids.iter().min().copied().unwrap_or(cfg.grid),
            grids.iter().max().copied().unwrap_or(cfg.grid)
        ),
    )
}

/// Filter mix for the pathway battery: symmetric, skew-symmetric and generic.
pub fn pathway_filters(seed: u64, count: usize) -> Vec<FilterCoefficients> {
    let mut rng = SimRng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let k_min = random_k_min(&mut rng);
            match i % 3 {
                0 => {
                    let w = random_width(&mut rng, 1);
                    random_symmetric_filter(&mut rng, k_min, w)
                }
                1 => {
                    let w = random_width(&mut rng, 2);
                    random_skew_symmetric_filter(&mut rng, k_min, w)
                }
                _ => {
                    let w = random_width(&mut rng, 2);
                    random_filter(&mut rng, k_min, w)
                }
            }
        })
        .collect()
}

/// Innovation family for the `i`-th pathway model; every fifth one has zero
/// third cumulant.
fn pathway_innovations(i: usize) -> InnovationSpec {
    match i % 5 {
        0 | 1 => exp1(),
        2 => InnovationSpec::new(bispec_core::linmodel::Innovations::CenteredGamma {
            shape: 0.5,
            scale: 1.0,
            negated: true,
        })
        .expect("valid gamma"),
        3 => InnovationSpec::two_point(0.3).expect("valid p"),
        _ if i.is_multiple_of(2) => InnovationSpec::gaussian(1.0).expect("valid sigma"),
        _ => InnovationSpec::two_point(0.5).expect("valid p"),
    }
}

/// Results of the pathway battery.
#[derive(Debug, Clone, PartialEq)]
pub struct PathwayTally {
    pub models: usize,
    /// Leading entries of the battery that are random filters.
    pub random_models: usize,
    /// Random filters whose two routes do not contradict each other.
    pub random_agreements: usize,
    pub both_decided: usize,
    pub agreements: usize,
    pub errors: Vec<String>,
    /// Realness misclassifications among skewed innovations.
    pub realness_misclassified: usize,
    pub realness_checked: usize,
    pub max_symmetric_realness: f64,
    pub min_asymmetric_realness: f64,
    /// Third-order check vs reversible verdict, restricted to
    /// `cum3(X(0)) != 0`.
    pub corollary_checked: usize,
    pub corollary_agreements: usize,
}

pub fn pathway_tally(cfg: &BatteryConfig) -> PathwayTally {
    let mut t = PathwayTally {
        models: 0,
        random_models: cfg.pathway_filters,
        random_agreements: 0,
        both_decided: 0,
        agreements: 0,
        errors: Vec::new(),
        realness_misclassified: 0,
        realness_checked: 0,
        max_symmetric_realness: 0.0,
        min_asymmetric_realness: f64::INFINITY,
        corollary_checked: 0,
        corollary_agreements: 0,
    };
    let filters = pathway_filters(cfg.seed, cfg.pathway_filters);
    let mut models: Vec<LinearModel> = filters
        .into_iter()
        .enumerate()
        .map(|(i, f)| LinearModel::new(f, pathway_innovations(i)))
        .collect();
    models.extend(builtin_models());
    models.extend(cfg.models.iter().cloned());
    for (index, m) in models.iter().enumerate() {
        t.models += 1;
        let random = index < cfg.pathway_filters;
        let grid = cfg
            .grid
            .max(bispec_core::diagnose::diagnose_min_grid(&m.filter));
        let report = match diagnose_model(m, grid) {
            Ok(r) => r,
            Err(e) => {
                t.errors.push(format!("{}: {e}", m.identifier()));
                continue;
            }
        };
        if let (a, Some(b)) = (report.pathways.real_bispectrum, report.pathways.coefficient_symmetry) {
            let decided = a.is_decided() && b.is_decided();
            if decided {
                t.both_decided += 1;
                if a == b {
                    t.agreements += 1;
                }
            }
            if random && (!decided || a == b) {
                t.random_agreements += 1;
            }
        }
        if m.innovations.cum3() != 0.0 {
            let field = analytic_bispectrum(m, grid).expect("grid accepted above");
            let stat = realness_statistic(&field, DEFAULT_SPECTRUM_FLOOR);
            let min_spec = m
                .filter
                .spectrum_on_grid(grid)
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            let symmetric = matches!(m.filter.symmetry(), Symmetry::Symmetric { .. });
            if symmetric {
                t.realness_checked += 1;
                t.max_symmetric_realness = t.max_symmetric_realness.max(stat);
                if stat > cfg.realness_zero_tol {
                    t.realness_misclassified += 1;
                }
            } else if min_spec > 1e-6 {
                t.realness_checked += 1;
                t.min_asymmetric_realness = t.min_asymmetric_realness.min(stat);
                if stat < cfg.realness_gap {
                    t.realness_misclassified += 1;
                }
            }
        }
        let lag = m.filter.width();
        match third_order_reversibility_check(m, lag) {
            Ok(check) if check.skewness_nonzero && report.reversible.is_decided() => {
                t.corollary_checked += 1;
                if check.is_consistent() == (report.reversible == Verdict::Yes) {
                    t.corollary_agreements += 1;
                }
            }
            Ok(_) => {}
            Err(e) => t.errors.push(format!("{}: {e}", m.identifier())),
        }
    }
    t
}

pub fn check_pathways(cfg: &BatteryConfig) -> Vec<CheckOutcome> {
    let t = pathway_tally(cfg);
    let disagreements = (t.both_decided - t.agreements) + t.errors.len();
    let mut detail = format!(
        "pathway agreement {}/{} random filters; {}/{} pairs decided by both routes over {} models",
        t.random_agreements, t.random_models, t.agreements, t.both_decided, t.models
    );
    if let Some(e) = t.errors.first() {
        detail.push_str(&format!("; first error: {e}"));
    }
    vec![
        at_most("pathway_agreement", disagreements as f64, 0.0, detail),
        at_most(
            "realness_symmetry_equivalence",
            t.realness_misclassified as f64,
            0.0,
            format!(
                "{} skewed models; symmetric max {:e} <= {:e}, non-symmetric min {:e} >= {:e}",
                t.realness_checked,
                t.max_symmetric_realness,
                cfg.realness_zero_tol,
                t.min_asymmetric_realness,
                cfg.realness_gap
            ),
        ),
        at_most(
            "third_order_corollary",
            (t.corollary_checked - t.corollary_agreements) as f64,
            0.0,
            format!(
                "agreement {}/{} models with nonzero marginal third cumulant",
                t.corollary_agreements, t.corollary_checked
            ),
        ),
    ]
}

pub fn check_triple_product(cfg: &BatteryConfig) -> Vec<CheckOutcome> {
    let mut rng = SimRng::seed_from_u64(cfg.seed.wrapping_add(1));
    let g = 64;
    let mut violations = 0usize;
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..cfg.triple_trials {
        let psi: Vec<Vec<Complex64>> = (0..3)
            .map(|_| {
                let w = random_width(&mut rng, 1);
                let k = random_k_min(&mut rng);
                random_filter(&mut rng, k, w).transfer_on_grid(g)
            })
            .collect();
        let r = triple_product_bound_check(&psi[0], &psi[1], &psi[2]).expect("grid is fine");
        let (left, right) = r.sides();
        worst_ratio = worst_ratio.max(left / right);
        if !r.holds() {
            violations += 1;
        }
    }
    let ones = vec![Complex64::new(1.0, 0.0); g];
    let (left, right) = triple_product_bound_check(&ones, &ones, &ones)
        .expect("grid is fine")
        .sides();
    vec![
        at_most(
            "triple_product_bound",
            violations as f64,
            0.0,
            format!(
                "{} trials, largest left/right ratio {worst_ratio:.6}",
                cfg.triple_trials
            ),
        ),
        at_most(
            "triple_product_equality",
            ((left - right) / right).abs(),
            cfg.equality_tol,
            "constant functions, relative gap".to_string(),
        ),
    ]
}

pub fn check_phase(cfg: &BatteryConfig) -> Vec<CheckOutcome> {
    let mut rng = SimRng::seed_from_u64(cfg.seed.wrapping_add(2));
    let g = cfg.phase_grid;
    let floor = bispec_core::diagnose::PHASE_FLOOR;
    let mut worst_sym: f64 = 0.0;
    let mut worst_cocycle: f64 = 0.0;
    let mut index_mismatches = 0usize;
    for _ in 0..cfg.phase_trials {
        let w = random_width(&mut rng, 1);
        let k = rng.random_range(-5..=5);
        let f = random_symmetric_filter(&mut rng, k, w);
        let p = extract_phase(&f, g, floor).expect("grid is fine");
        let d = fit_half_integer_slope(&p, slope_bound(&f));
        worst_sym = worst_sym.max(d.residual);
        worst_cocycle = worst_cocycle.max(cocycle_residual(&p).expect("phase is valid"));
        let expected = match f.symmetry() {
            Symmetry::Symmetric { index } => Some(index),
            _ => None,
        };
        if expected.is_none()
            || symmetry_index_from_phase(&d, cfg.phase_residual_tol) != expected
        {
            index_mismatches += 1;
        }
    }
    let mut best_nonsym = f64::INFINITY;
    for _ in 0..cfg.phase_trials {
        let f = loop {
            let w = random_width(&mut rng, 2);
            let k = rng.random_range(-5..=5);
            let f = random_filter(&mut rng, k, w);
            if f.symmetry() == Symmetry::Neither {
                break f;
            }
        };
        let p = extract_phase(&f, g, floor).expect("grid is fine");
        best_nonsym = best_nonsym.min(fit_best_decomposition(&p, slope_bound(&f)).residual);
    }
    let asym = FilterCoefficients::new(0, vec![1.0, 0.5]).expect("valid filter");
    let asym_cocycle =
        cocycle_residual(&extract_phase(&asym, g, floor).expect("grid is fine")).expect("valid");
    vec![
        at_most(
            "phase_symmetric_residual",
            worst_sym,
            cfg.phase_residual_tol,
            format!("{} symmetric filters, G = {g}", cfg.phase_trials),
        ),
        at_most(
            "phase_symmetry_index",
            index_mismatches as f64,
            0.0,
            "s = -n against classify_symmetry".to_string(),
        ),
        at_least(
            "phase_nonsymmetric_residual",
            best_nonsym,
            cfg.nonsymmetric_residual_min,
            format!("{} non-symmetric filters, smallest best residual", cfg.phase_trials),
        ),
        at_most(
            "cocycle_symmetric",
            worst_cocycle,
            cfg.cocycle_tol,
            format!("{} symmetric filters, G = {g}", cfg.phase_trials),
        ),
        at_least(
            "cocycle_asymmetric",
            asym_cocycle,
            cfg.cocycle_gap,
            "c = [1, 0.5]".to_string(),
        ),
    ]
}

/// Runs every check in a fixed order.
pub fn run_battery(cfg: &BatteryConfig) -> Vec<CheckOutcome> {
    let mut out = vec![check_correspondence(cfg)];
    out.extend(check_pathways(cfg));
    out.extend(check_triple_product(cfg));
    out.extend(check_phase(cfg));
    out
}
