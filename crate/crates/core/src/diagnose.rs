//! Reversibility and causality verdicts.
//!
//! Two independent routes decide reversibility of a linear model:
//!
//! - **real-bispectrum route**: a real, not almost-everywhere-zero bispectrum
//!   together with an almost-everywhere positive spectrum implies
//!   reversibility; a nonzero bispectrum that is not real rules it out
//!   (reversible series have real polyspectra).
//! - **coefficient-symmetry route**: with positive spectrum a linear series is
//!   reversible iff its filter is symmetric about some index, or skew-symmetric
//!   with symmetrically distributed innovations. Gaussian series are always
//!   reversible.
//!
//! Verdicts are three-valued. A route whose hypotheses fail answers
//! [`Verdict::Undetermined`] instead of guessing, and two decided routes that
//! disagree are reported as [`Error::InternalInconsistency`].

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::SeedableRng;

use crate::bispec::{
    analytic_bispectrum, estimate_segments, realness_statistic, EstimationPlan, FieldKind,
    SegmentEstimate, DEFAULT_SPECTRUM_FLOOR,
};
use crate::cumulant::{model_cumulant_table, third_order_symmetry_defect};
use crate::linmodel::{
    simulate, FilterCoefficients, InnovationSpec, Innovations, LinearModel, SimRng, Symmetry,
    TimeSeriesSample,
};
use crate::math;
use crate::phase::{
    extract_phase, fit_best_decomposition, slope_bound, symmetry_index_from_phase, PhaseOffset,
    DEFAULT_RESIDUAL_TOL_ANALYTIC,
};
use crate::{Error, Result};

/// Realness threshold for analytic fields.
pub const ANALYTIC_REALNESS_TOL: f64 = 1e-9;
/// A field is "not a.e. zero" when its L1 grid norm exceeds this times `G^2`.
pub const ANALYTIC_NONZERO_TOL: f64 = 1e-12;
/// Relative `|phi|` floor for the phase fit in [`diagnose_model`].
pub const PHASE_FLOOR: f64 = 1e-6;
/// Third-order symmetry defect accepted as "consistent".
pub const THIRD_ORDER_TOL: f64 = 1e-9;
/// Relative spectrum level treated as a zero on the grid.
const SPECTRUM_ZERO_REL: f64 = 1e-20;
/// Same for estimated (averaged periodogram) spectra.
const ESTIMATED_SPECTRUM_ZERO_REL: f64 = 1e-10;

pub const CAVEAT_ZERO_BISPECTRUM: &str = "bispectrum a.e. zero";
pub const CAVEAT_ZERO_SKEWNESS: &str = "skewness zero — Corollary silent";
pub const CAVEAT_BOUNDARY: &str = "finite-symmetric-filter boundary case";
pub const CAVEAT_ONE_SIDED_FILTER: &str = "supplied filter is itself one-sided (k_min >= 0)";
pub const CAVEAT_GAUSSIAN: &str = "gaussian innovations: coefficient-symmetry criterion does not apply";
pub const CAVEAT_SPECTRUM_ZEROS: &str = "spectrum vanishes on too many grid points";
pub const CAVEAT_NOISE_FLOOR: &str = "estimated bispectrum within noise floor";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    Yes,
    No,
    Undetermined,
}

impl Verdict {
    pub fn is_decided(self) -> bool {
        self != Verdict::Undetermined
    }
}

/// Almost-everywhere positivity proxy for the spectrum on the grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectrumCheck {
    pub positive: bool,
    pub min_value: f64,
    pub zero_points: usize,
    pub allowed_zero_points: usize,
}

/// "Not a.e. zero" proxy for the bispectrum.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NonzeroCheck {
    pub nonzero: bool,
    pub l1_norm: f64,
    /// L1 norm for analytic fields; mean standardised squared modulus for
    /// estimated ones (about 1 under a zero bispectrum).
    pub statistic: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RealnessCheck {
    pub statistic: f64,
    pub threshold: f64,
    pub spectrum_floor: f64,
    pub real: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseFitSummary {
    pub n: i64,
    pub offset: PhaseOffset,
    pub residual: f64,
    pub residual_tol: f64,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub symmetry_index: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Pathways {
    pub real_bispectrum: Verdict,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub coefficient_symmetry: Option<Verdict>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiagnosticReport {
    pub subject: String,
    pub mode: FieldKind,
    pub grid: usize,
    pub reversible: Verdict,
    pub causal_linear_possible: Verdict,
    pub spectrum: SpectrumCheck,
    pub bispectrum: NonzeroCheck,
    pub realness: RealnessCheck,
    pub pathways: Pathways,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub skewness: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub symmetry: Option<Symmetry>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub phase_fit: Option<PhaseFitSummary>,
    pub caveats: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CausalityVerdict {
    NoCausalRepresentation,
    Possible,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalityAssessment {
    pub verdict: CausalityVerdict,
    pub caveats: Vec<String>,
}

/// Real, nonzero bispectrum plus positive spectrum excludes a causal linear
/// representation.
///
/// The boundary-case caveat is always attached: a finite symmetric filter
/// such as `[1, 2, 1]` at `k_min = 0` meets the hypotheses while being
/// one-sided itself.
pub fn causality_verdict(report: &DiagnosticReport) -> CausalityAssessment {
    let verdict = if report.spectrum.positive && report.bispectrum.nonzero && report.realness.real {
        CausalityVerdict::NoCausalRepresentation
    } else if report.bispectrum.nonzero && !report.realness.real {
        CausalityVerdict::Possible
    } else {
        CausalityVerdict::Undetermined
    };
    CausalityAssessment {
        verdict,
        caveats: alloc::vec![CAVEAT_BOUNDARY.to_string()],
    }
}

fn real_bispectrum_route(spectrum: &SpectrumCheck, nonzero: &NonzeroCheck, realness: &RealnessCheck) -> Verdict {
    if !nonzero.nonzero {
        Verdict::Undetermined
    } else if !realness.real {
        Verdict::No
    } else if spectrum.positive {
        Verdict::Yes
    } else {
        Verdict::Undetermined
    }
}

fn coefficient_symmetry_route(
    spectrum: &SpectrumCheck,
    symmetry: Symmetry,
    innovations: &InnovationSpec,
) -> Verdict {
    if !spectrum.positive {
        return Verdict::Undetermined;
    }
    match symmetry {
        Symmetry::Symmetric { .. } => Verdict::Yes,
        Symmetry::SkewSymmetric { .. } if innovations.is_symmetric() => Verdict::Yes,
        // the criterion is stated for non-gaussian innovations
        _ if innovations.is_gaussian() => Verdict::Undetermined,
        _ => Verdict::No,
    }
}

fn combine(a: Verdict, b: Option<Verdict>) -> Result<Verdict> {
    match (a, b) {
        (x, Some(y)) if x.is_decided() && y.is_decided() && x != y => Err(Error::InternalInconsistency(
            alloc::format!("real-bispectrum route says {x:?}, coefficient-symmetry route says {y:?}"),
        )),
        (x, _) if x.is_decided() => Ok(x),
        (_, Some(y)) => Ok(y),
        _ => Ok(Verdict::Undetermined),
    }
}

fn finish(mut report: DiagnosticReport) -> DiagnosticReport {
    let causal = causality_verdict(&report);
    report.causal_linear_possible = match causal.verdict {
        CausalityVerdict::NoCausalRepresentation => Verdict::No,
        CausalityVerdict::Possible => Verdict::Yes,
        CausalityVerdict::Undetermined => Verdict::Undetermined,
    };
    if causal.verdict == CausalityVerdict::NoCausalRepresentation {
        report.caveats.extend(causal.caveats);
    }
    report
}

/// Whether `cum3(X(0))` is zero up to rounding.
pub fn marginal_skewness_is_zero(model: &LinearModel) -> bool {
    let gamma = model.innovations.cum3();
    let scale: f64 = model.filter.values().iter().map(|c| math::abs(c * c * c)).sum();
    math::abs(model.marginal_cum3()) <= 1e-12 * math::abs(gamma) * scale
}

/// Smallest grid accepted by [`diagnose_model`].
pub fn diagnose_min_grid(filter: &FilterCoefficients) -> usize {
    8 * (filter.width() + 2)
}

/// Full analytic diagnosis of a model on a `G x G` grid.
pub fn diagnose_model(model: &LinearModel, grid: usize) -> Result<DiagnosticReport> {
    let required = diagnose_min_grid(&model.filter);
    if grid < required {
        return Err(Error::GridTooCoarse { grid, required });
    }
    let field = analytic_bispectrum(model, grid)?;

    let s = model.filter.spectrum_on_grid(grid);
    let s_max = s.iter().fold(0.0, |m, &v| f64::max(m, v));
    let zero_points = s.iter().filter(|&&v| v <= SPECTRUM_ZERO_REL * s_max).count();
    let allowed = model.filter.width();
    let spectrum = SpectrumCheck {
        positive: zero_points <= allowed,
        min_value: s.iter().fold(f64::INFINITY, |m, &v| m.min(v)),
        zero_points,
        allowed_zero_points: allowed,
    };

    let l1 = field.l1_norm();
    let nonzero_threshold = ANALYTIC_NONZERO_TOL * (grid * grid) as f64;
    let bispectrum = NonzeroCheck {
        nonzero: l1 > nonzero_threshold,
        l1_norm: l1,
        statistic: l1,
        threshold: nonzero_threshold,
    };

    let stat = realness_statistic(&field, DEFAULT_SPECTRUM_FLOOR);
    let realness = RealnessCheck {
        statistic: stat,
        threshold: ANALYTIC_REALNESS_TOL,
        spectrum_floor: DEFAULT_SPECTRUM_FLOOR,
        real: stat <= ANALYTIC_REALNESS_TOL,
    };

    let phase = extract_phase(&model.filter, grid, PHASE_FLOOR)?;
    let decomp = fit_best_decomposition(&phase, slope_bound(&model.filter));
    let phase_fit = PhaseFitSummary {
        n: decomp.n,
        offset: decomp.offset,
        residual: decomp.residual,
        residual_tol: DEFAULT_RESIDUAL_TOL_ANALYTIC,
        symmetry_index: symmetry_index_from_phase(&decomp, DEFAULT_RESIDUAL_TOL_ANALYTIC),
    };

    let symmetry = model.filter.symmetry();
    let by_realness = real_bispectrum_route(&spectrum, &bispectrum, &realness);
    let by_symmetry = coefficient_symmetry_route(&spectrum, symmetry, &model.innovations);
    let reversible = combine(by_realness, Some(by_symmetry))?;

    let mut caveats = Vec::new();
    if !spectrum.positive {
        caveats.push(CAVEAT_SPECTRUM_ZEROS.to_string());
    }
    if !bispectrum.nonzero {
        caveats.push(CAVEAT_ZERO_BISPECTRUM.to_string());
    }
    if marginal_skewness_is_zero(model) {
        caveats.push(CAVEAT_ZERO_SKEWNESS.to_string());
    }
    if model.innovations.is_gaussian() {
        caveats.push(CAVEAT_GAUSSIAN.to_string());
    }
    let one_sided = model.filter.k_min() >= 0;
    let mut report = finish(DiagnosticReport {
        subject: model.identifier(),
        mode: FieldKind::Analytic,
        grid,
        reversible,
        causal_linear_possible: Verdict::Undetermined,
        spectrum,
        bispectrum,
        realness,
        pathways: Pathways {
            real_bispectrum: by_realness,
            coefficient_symmetry: Some(by_symmetry),
        },
        skewness: Some(model.skewness()),
        symmetry: Some(symmetry),
        phase_fit: Some(phase_fit),
        caveats,
    });
    if one_sided && report.causal_linear_possible == Verdict::No {
        report.caveats.push(CAVEAT_ONE_SIDED_FILTER.to_string());
    }
    Ok(report)
}

/// Thresholds for [`diagnose_series`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesThresholds {
    /// Fixed realness threshold; `None` calibrates one from symmetric surrogates.
    pub realness: Option<f64>,
    pub spectrum_floor: f64,
    pub calibration_replicates: usize,
    pub calibration_seed: u64,
    /// Upper quantile of the surrogate realness statistics used as threshold.
    pub calibration_quantile: f64,
}

impl Default for SeriesThresholds {
    fn default() -> Self {
        SeriesThresholds {
            realness: None,
            spectrum_floor: DEFAULT_SPECTRUM_FLOOR,
            calibration_replicates: 20,
            calibration_seed: 0x5eed,
            calibration_quantile: 0.99,
        }
    }
}

/// Mean of `|T_jk|^2 M / (P_j P_k P_{j+k})` over grid points off the
/// degenerate lines `j = 0`, `k = 0`, `j + k = 0 (mod L)`.
///
/// `T` is the segment-averaged triple product and `P` the averaged periodogram;
/// the ratio has mean about 1 when the bispectrum is zero.
pub fn standardized_bispectrum_power(est: &SegmentEstimate) -> f64 {
    let l = est.plan.segment_len;
    let m = est.plan.segments as f64;
    let p = &est.raw_periodogram;
    let mut sum = 0.0;
    let mut count = 0usize;
    for j in 1..l {
        for k in 1..l {
            let jk = (j + k) % l;
            let denom = p[j] * p[k] * p[jk];
            if jk == 0 || denom <= 0.0 {
                continue;
            }
            sum += est.raw_triple[j * l + k].norm_sqr() * m / denom;
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Threshold on [`standardized_bispectrum_power`] above which an estimated
/// bispectrum counts as nonzero.
pub fn estimated_nonzero_threshold(segment_len: usize) -> f64 {
    // about 1365 independent cells at L = 128; the statistic's null sd is
    // roughly sqrt(12) / L
    1.0 + f64::max(0.25, 5.0 * math::sqrt(12.0) / segment_len as f64)
}

/// Squared standardised innovation skewness implied by the bispectrum power
/// of a linear process.
fn implied_skewness_sq(est: &SegmentEstimate, power: f64) -> f64 {
    let m = est.plan.segments as f64;
    let w2 = est.window_power2;
    let w3 = est.window_power3;
    (power - 1.0) * w2 * w2 * w2 / (m * w3 * w3)
}

/// Zero-phase filter whose spectrum matches the averaged periodogram at the
/// grid frequencies.
///
/// The filter is the inverse DFT of `sqrt(P_j)` laid out on `-L/2..=L/2`, with
/// the Nyquist lag split evenly between both ends so the grid values are exact.
fn surrogate_filter(est: &SegmentEstimate) -> Result<FilterCoefficients> {
    let l = est.plan.segment_len;
    let amp: Vec<f64> = est.raw_periodogram.iter().map(|&p| math::sqrt(p)).collect();
    let half = l / 2;
    let mut right: Vec<f64> = (0..=half)
        .map(|k| {
            amp.iter()
                .enumerate()
                .map(|(j, a)| a * math::cos(2.0 * PI * ((k * j) % l) as f64 / l as f64))
                .sum::<f64>()
                / l as f64
        })
        .collect();
    right[half] *= 0.5;
    let max = right.iter().fold(0.0, |m, v| f64::max(m, math::abs(*v)));
    for v in right.iter_mut() {
        if math::abs(*v) <= 1e-12 * max {
            *v = 0.0;
        }
    }
    let mut values: Vec<f64> = right.iter().rev().copied().collect();
    values.extend_from_slice(&right[1..]);
    FilterCoefficients::trimmed(-(half as i64), values)
}

/// Outcome of the surrogate calibration behind [`diagnose_series`].
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub threshold: f64,
    pub statistics: Vec<f64>,
    pub innovation_skewness: f64,
    pub surrogate_width: usize,
}

/// Upper-quantile realness statistic of symmetric surrogates matching the
/// sample's spectrum and bispectrum power.
///
/// Each surrogate is a zero-phase filter with `|phi|^2` equal to the averaged
/// periodogram, driven by centred gamma innovations whose skewness matches the
/// one implied by the estimated bispectrum power.
pub fn calibrate_realness_threshold(
    est: &SegmentEstimate,
    n: usize,
    thresholds: &SeriesThresholds,
) -> Result<Calibration> {
    if thresholds.calibration_replicates == 0 {
        return Err(Error::InvalidArgument(
            "calibration needs at least one replicate".into(),
        ));
    }
    let power = standardized_bispectrum_power(est);
    let kappa_sq = implied_skewness_sq(est, power).clamp(4.0 / 1e6, 4.0 / 1e-3);
    let shape = 4.0 / kappa_sq;
    let model = LinearModel::new(
        surrogate_filter(est)?,
        InnovationSpec::new(Innovations::CenteredGamma {
            shape,
            scale: 1.0,
            negated: false,
        })?,
    );
    let mut seeds = SimRng::seed_from_u64(thresholds.calibration_seed);
    let mut stats = Vec::with_capacity(thresholds.calibration_replicates);
    for _ in 0..thresholds.calibration_replicates {
        let seed = rand::Rng::random::<u64>(&mut seeds);
        let x = simulate(&model, n, seed)?;
        let f = estimate_segments(&x, &est.plan)?.field;
        stats.push(realness_statistic(&f, thresholds.spectrum_floor));
    }
    let mut sorted = stats.clone();
    sorted.sort_by(f64::total_cmp);
    let rank = libm::ceil(thresholds.calibration_quantile * sorted.len() as f64) as usize;
    let threshold = sorted[rank.clamp(1, sorted.len()) - 1];
    Ok(Calibration {
        threshold,
        statistics: stats,
        innovation_skewness: math::sqrt(kappa_sq),
        surrogate_width: model.filter.width(),
    })
}

/// Diagnosis of a sampled path through the averaged biperiodogram.
pub fn diagnose_series(
    series: &TimeSeriesSample,
    plan: &EstimationPlan,
    thresholds: &SeriesThresholds,
) -> Result<DiagnosticReport> {
    let est = estimate_segments(series, plan)?;
    let l = plan.segment_len;

    let p_max = est.raw_periodogram.iter().fold(0.0, |m, &v| f64::max(m, v));
    let zero_points = est
        .raw_periodogram
        .iter()
        .filter(|&&v| v <= ESTIMATED_SPECTRUM_ZERO_REL * p_max)
        .count();
    // the mean-removed DC bin is always zero
    let allowed = 1 + l / 16;
    let spectrum = SpectrumCheck {
        positive: p_max > 0.0 && zero_points <= allowed,
        min_value: est.spectrum.iter().fold(f64::INFINITY, |m, &v| m.min(v)),
        zero_points,
        allowed_zero_points: allowed,
    };

    let power = standardized_bispectrum_power(&est);
    let power_threshold = estimated_nonzero_threshold(l);
    let bispectrum = NonzeroCheck {
        nonzero: power > power_threshold,
        l1_norm: est.field.l1_norm(),
        statistic: power,
        threshold: power_threshold,
    };

    let stat = realness_statistic(&est.field, thresholds.spectrum_floor);
    let threshold = match thresholds.realness {
        Some(t) => t,
        None if bispectrum.nonzero && spectrum.positive => {
            calibrate_realness_threshold(&est, series.len(), thresholds)?.threshold
        }
        // calibration is meaningless without a detectable bispectrum
        None => f64::NAN,
    };
    let realness = RealnessCheck {
        statistic: stat,
        threshold: if threshold.is_nan() { 0.0 } else { threshold },
        spectrum_floor: thresholds.spectrum_floor,
        real: !threshold.is_nan() && stat <= threshold,
    };

    let by_realness = real_bispectrum_route(&spectrum, &bispectrum, &realness);
    let mut caveats = Vec::new();
    if !spectrum.positive {
        caveats.push(CAVEAT_SPECTRUM_ZEROS.to_string());
    }
    if !bispectrum.nonzero {
        caveats.push(CAVEAT_NOISE_FLOOR.to_string());
        caveats.push(CAVEAT_ZERO_BISPECTRUM.to_string());
    }
    Ok(finish(DiagnosticReport {
        subject: series.provenance().to_string(),
        mode: FieldKind::Estimated,
        grid: l,
        reversible: by_realness,
        causal_linear_possible: Verdict::Undetermined,
        spectrum,
        bispectrum,
        realness,
        pathways: Pathways {
            real_bispectrum: by_realness,
            coefficient_symmetry: None,
        },
        skewness: None,
        symmetry: None,
        phase_fit: None,
        caveats,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThirdOrderVerdict {
    Consistent,
    Defect(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThirdOrderCheck {
    pub verdict: ThirdOrderVerdict,
    pub defect: f64,
    /// `cum3(X(0)) != 0`; only then does third-order reversibility imply
    /// full reversibility.
    pub skewness_nonzero: bool,
    pub caveats: Vec<String>,
}

impl ThirdOrderCheck {
    pub fn is_consistent(&self) -> bool {
        self.verdict == ThirdOrderVerdict::Consistent
    }
}

/// Third-order time-reversal symmetry of the model cumulants on `[-T, T]^2`.
pub fn third_order_reversibility_check(model: &LinearModel, max_lag: usize) -> Result<ThirdOrderCheck> {
    if max_lag < model.filter.width() {
        return Err(Error::InvalidArgument(alloc::format!(
            "max lag {max_lag} must be at least the support width {}",
            model.filter.width()
        )));
    }
    let table = model_cumulant_table(model, max_lag)?;
    let defect = third_order_symmetry_defect(&table);
    let skewness_nonzero = !marginal_skewness_is_zero(model);
    let mut caveats = Vec::new();
    if !skewness_nonzero {
        caveats.push(CAVEAT_ZERO_SKEWNESS.to_string());
    }
    Ok(ThirdOrderCheck {
        verdict: if defect <= THIRD_ORDER_TOL {
            ThirdOrderVerdict::Consistent
        } else {
            ThirdOrderVerdict::Defect(defect)
        },
        defect,
        skewness_nonzero,
        caveats,
    })
}

/// Signed gaps `m(2,1;h) - m(1,2;h)` for `h = 1..=max_lag`, where
/// `m(a,b;h)` is the mean of `x_t^a x_{t+h}^b` over the mean-removed series.
pub fn reversibility_moment_gaps(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if max_lag == 0 {
        return Err(Error::InvalidArgument("max lag must be at least 1".into()));
    }
    if max_lag * 10 >= series.len() {
        return Err(Error::InsufficientLength {
            needed: 10 * max_lag + 1,
            available: series.len(),
        });
    }
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let x: Vec<f64> = series.iter().map(|v| v - mean).collect();
    Ok((1..=max_lag)
        .map(|h| {
            let count = x.len() - h;
            let (mut m21, mut m12) = (0.0, 0.0);
            for t in 0..count {
                let (a, b) = (x[t], x[t + h]);
                m21 += a * a * b;
                m12 += a * b * b;
            }
            (m21 - m12) / count as f64
        })
        .collect())
}

/// `max_h |m(2,1;h) - m(1,2;h)|`: zero in expectation for reversible series.
pub fn empirical_reversibility_probe(series: &[f64], max_lag: usize) -> Result<f64> {
    Ok(reversibility_moment_gaps(series, max_lag)?
        .into_iter()
        .fold(0.0, |m, g| f64::max(m, math::abs(g))))
}
