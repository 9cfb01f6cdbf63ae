//! Bispectra on the uniform grid `omega_j = 2 pi j / G` over `[0, 2 pi)^2`.
//!
//! The analytic bispectrum of a linear model is
//! `B(w1, w2) = cum3(Z) / (2 pi)^2 * phi(w1) phi(w2) conj(phi(w1 + w2))`.
//! Its inverse Fourier transform over `[0, 2 pi)^2` is the triple cumulant
//! sequence; for a finite filter `B` is a trigonometric polynomial, so the
//! uniform trapezoid rule reproduces the cumulants exactly once the grid
//! exceeds the bandwidth (see [`correspondence_check`]).
//!
//! The field is only meaningful up to sets of measure zero: at grid points
//! where `phi` vanishes the value is zero and carries no phase information.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::cumulant::model_cumulant;
use crate::dft::Twiddles;
use crate::linmodel::{LinearModel, TimeSeriesSample};
use crate::math;
use crate::{Error, Result};

/// Default relative magnitude floor for [`realness_statistic`].
pub const DEFAULT_SPECTRUM_FLOOR: f64 = 1e-3;

/// Relative slack allowed by [`triple_product_bound_check`].
pub const TRIPLE_PRODUCT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FieldKind {
    Analytic,
    Estimated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Taper {
    None,
    Hann,
}

/// Segment-averaging parameters for [`estimate_bispectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimationPlan {
    pub segment_len: usize,
    pub segments: usize,
    pub taper: Taper,
}

impl EstimationPlan {
    pub fn new(segment_len: usize, segments: usize, taper: Taper) -> Result<Self> {
        let plan = EstimationPlan {
            segment_len,
            segments,
            taper,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// Uses as many whole segments of length `segment_len` as fit in `n`.
    pub fn for_length(n: usize, segment_len: usize, taper: Taper) -> Result<Self> {
        if segment_len == 0 || n < segment_len {
            return Err(Error::InsufficientLength {
                needed: segment_len.max(1),
                available: n,
            });
        }
        Self::new(segment_len, n / segment_len, taper)
    }

    pub fn validate(&self) -> Result<()> {
        if self.segment_len < 4 || !self.segment_len.is_multiple_of(2) {
            return Err(Error::InvalidPlan(alloc::format!(
                "segment length must be even and at least 4, got {}",
                self.segment_len
            )));
        }
        if self.segments == 0 {
            return Err(Error::InvalidPlan("segment count must be positive".into()));
        }
        Ok(())
    }

    pub fn required_length(&self) -> usize {
        self.segment_len * self.segments
    }

    fn window(&self) -> Vec<f64> {
        let l = self.segment_len;
        match self.taper {
            Taper::None => alloc::vec![1.0; l],
            Taper::Hann => (0..l)
                .map(|t| 0.5 - 0.5 * math::cos(2.0 * PI * t as f64 / l as f64))
                .collect(),
        }
    }
}

/// Where a field came from.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "source", rename_all = "snake_case"))]
pub enum FieldSource {
    Model { identifier: String },
    Estimate { provenance: String, plan: EstimationPlan },
    Other { description: String },
}

/// Complex values on the `G x G` frequency grid, row-major in `omega1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BifrequencyField {
    grid: usize,
    values: Vec<Complex64>,
    kind: FieldKind,
    source: FieldSource,
}

impl BifrequencyField {
    pub fn from_values(
        grid: usize,
        values: Vec<Complex64>,
        kind: FieldKind,
        source: FieldSource,
    ) -> Result<Self> {
        if grid == 0 || values.len() != grid * grid {
            return Err(Error::InvalidArgument(alloc::format!(
                "field of grid {grid} needs {} values, got {}",
                grid * grid,
                values.len()
            )));
        }
        Ok(BifrequencyField {
            grid,
            values,
            kind,
            source,
        })
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn source(&self) -> &FieldSource {
        &self.source
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Value at grid indices `(j, k)`; indices are taken modulo `G`.
    #[inline]
    pub fn at(&self, j: usize, k: usize) -> Complex64 {
        self.values[(j % self.grid) * self.grid + (k % self.grid)]
    }

    pub fn frequency(&self, j: usize) -> f64 {
        crate::dft::grid_frequency(j, self.grid)
    }

    /// Grid index nearest to `omega` (taken modulo `2 pi`).
    pub fn nearest_index(&self, omega: f64) -> usize {
        let g = self.grid as f64;
        let idx = math::round(omega / (2.0 * PI) * g) as i64;
        idx.rem_euclid(self.grid as i64) as usize
    }

    /// `(omega1, omega2, value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, Complex64)> + '_ {
        let g = self.grid;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.frequency(i / g), self.frequency(i % g), v))
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .fold(0.0, |m, &z| f64::max(m, math::modulus(z)))
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.values
            .iter()
            .fold(0.0, |m, z| f64::max(m, math::abs(z.im)))
    }

    pub fn max_abs_real(&self) -> f64 {
        self.values
            .iter()
            .fold(0.0, |m, z| f64::max(m, math::abs(z.re)))
    }

    /// Sum of `|value|` over the grid.
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|&z| math::modulus(z)).sum()
    }

    /// `max |B(w1, w2) - conj(B(-w1, -w2))|`.
    pub fn conjugation_defect(&self) -> f64 {
        let g = self.grid;
        let mut worst = 0.0;
        for j in 0..g {
            for k in 0..g {
                let d = self.at(j, k) - self.at((g - j) % g, (g - k) % g).conj();
                worst = f64::max(worst, math::modulus(d));
            }
        }
        worst
    }

    /// `max |B(w1, w2) - B(w2, w1)|`.
    pub fn permutation_defect(&self) -> f64 {
        let g = self.grid;
        let mut worst = 0.0;
        for j in 0..g {
            for k in 0..j {
                worst = f64::max(worst, math::modulus(self.at(j, k) - self.at(k, j)));
            }
        }
        worst
    }

    /// Pointwise complex conjugate.
    pub fn conj(&self) -> Self {
        BifrequencyField {
            values: self.values.iter().map(|z| z.conj()).collect(),
            ..self.clone()
        }
    }
}

/// Evaluates the analytic bispectrum of `model` on a `G x G` grid.
pub fn analytic_bispectrum(model: &LinearModel, grid: usize) -> Result<BifrequencyField> {
    if grid < 4 {
        return Err(Error::GridTooCoarse { grid, required: 4 });
    }
    let phi = model.filter.transfer_on_grid(grid);
    let scale = model.innovations.cum3() / (4.0 * PI * PI);
    let mut values = Vec::with_capacity(grid * grid);
    for j in 0..grid {
        for k in 0..grid {
            // phi(-w1 - w2) = conj(phi(w1 + w2)) for a real filter
            values.push(phi[j] * phi[k] * phi[(j + k) % grid].conj() * scale);
        }
    }
    BifrequencyField::from_values(
        grid,
        values,
        FieldKind::Analytic,
        FieldSource::Model {
            identifier: model.identifier(),
        },
    )
}

/// Smallest grid accepted by [`correspondence_check`].
pub fn correspondence_min_grid(model: &LinearModel, max_lag: usize) -> usize {
    8 * (model.filter.width() + max_lag)
}

/// Trapezoid quadrature of `int int exp(i (t1 w1 + t2 w2)) B dw1 dw2` for all
/// `|t1|, |t2| <= T`, row-major in `t1`.
pub fn inverse_transform(field: &BifrequencyField, max_lag: usize) -> Vec<Complex64> {
    let g = field.grid();
    let tw = Twiddles::new(g);
    let t = max_lag as i64;
    let cell = (2.0 * PI / g as f64) * (2.0 * PI / g as f64);
    // rows[t2][j] = sum_k exp(i t2 w_k) B(w_j, w_k)
    let rows: Vec<Vec<Complex64>> = (-t..=t)
        .map(|t2| {
            (0..g)
                .map(|j| {
                    (0..g)
                        .map(|k| tw.inverse(t2, k) * field.at(j, k))
                        .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(rows.len() * rows.len());
    for t1 in -t..=t {
        for row in &rows {
            let s = (0..g)
                .map(|j| tw.inverse(t1, j) * row[j])
                .fold(Complex64::new(0.0, 0.0), |a, b| a + b);
            out.push(s * cell);
        }
    }
    out
}

/// Maximum deviation between the quadrature of `field` and the model's
/// triple-sum cumulants over `|t1|, |t2| <= T`.
pub fn correspondence_error(field: &BifrequencyField, model: &LinearModel, max_lag: usize) -> f64 {
    let t = max_lag as i64;
    let quad = inverse_transform(field, max_lag);
    let mut worst = 0.0;
    let mut idx = 0;
    for t1 in -t..=t {
        for t2 in -t..=t {
            let exact = model_cumulant(model, t1, t2);
            worst = f64::max(worst, math::modulus(quad[idx] - exact));
            idx += 1;
        }
    }
    worst
}

/// Checks that the analytic bispectrum inverts to the model cumulants.
///
/// Requires `G >= 8 (width + T)`; returns the maximum absolute error.
pub fn correspondence_check(model: &LinearModel, grid: usize, max_lag: usize) -> Result<f64> {
    let required = correspondence_min_grid(model, max_lag);
    if grid < required {
        return Err(Error::GridTooCoarse { grid, required });
    }
    let field = analytic_bispectrum(model, grid)?;
    Ok(correspondence_error(&field, model, max_lag))
}

/// Averaged biperiodogram plus the averaged periodogram it was built from.
#[derive(Debug, Clone)]
pub struct SegmentEstimate {
    pub field: BifrequencyField,
    /// Mean of `|d_j|^2` over segments (tapered, mean-removed DFT).
    pub raw_periodogram: Vec<f64>,
    /// `raw_periodogram / (2 pi sum w^2)`: spectral density estimate.
    pub spectrum: Vec<f64>,
    /// Mean over segments of `d_j d_k conj(d_{j+k})` before normalisation.
    pub raw_triple: Vec<Complex64>,
    pub plan: EstimationPlan,
    /// `sum_t w(t)^2` and `sum_t w(t)^3` of the taper.
    pub window_power2: f64,
    pub window_power3: f64,
}

/// Averaged-biperiodogram estimate keeping the intermediate quantities.
pub fn estimate_segments(series: &TimeSeriesSample, plan: &EstimationPlan) -> Result<SegmentEstimate> {
    plan.validate()?;
    let x = series.values();
    if x.len() < plan.required_length() {
        return Err(Error::InsufficientLength {
            needed: plan.required_length(),
            available: x.len(),
        });
    }
    let l = plan.segment_len;
    let window = plan.window();
    let tw = Twiddles::new(l);
    let mut seg = alloc::vec![0.0; l];
    let mut d = alloc::vec![Complex64::new(0.0, 0.0); l];
    let mut triple = alloc::vec![Complex64::new(0.0, 0.0); l * l];
    let mut power = alloc::vec![0.0; l];
    for chunk in x.chunks_exact(l).take(plan.segments) {
        let mean = chunk.iter().sum::<f64>() / l as f64;
        for ((s, &v), &w) in seg.iter_mut().zip(chunk).zip(&window) {
            *s = (v - mean) * w;
        }
        tw.dft_real(&seg, &mut d);
        for j in 0..l {
            power[j] += d[j].norm_sqr();
            let row = &mut triple[j * l..(j + 1) * l];
            for (k, slot) in row.iter_mut().enumerate() {
                let jk = if j + k >= l { j + k - l } else { j + k };
                *slot += d[j] * d[k] * d[jk].conj();
            }
        }
    }
    let m = plan.segments as f64;
    for p in power.iter_mut() {
        *p /= m;
    }
    for z in triple.iter_mut() {
        *z /= m;
    }
    let window_power2: f64 = window.iter().map(|w| w * w).sum();
    let window_power3: f64 = window.iter().map(|w| w * w * w).sum();
    let norm = window_power3 * 4.0 * PI * PI;
    let field = BifrequencyField::from_values(
        l,
        triple.iter().map(|z| z / norm).collect(),
        FieldKind::Estimated,
        FieldSource::Estimate {
            provenance: series.provenance().into(),
            plan: *plan,
        },
    )?;
    let spectrum = power
        .iter()
        .map(|p| p / (2.0 * PI * window_power2))
        .collect();
    Ok(SegmentEstimate {
        field,
        raw_periodogram: power,
        spectrum,
        raw_triple: triple,
        plan: *plan,
        window_power2,
        window_power3,
    })
}

/// Averaged biperiodogram over `M` non-overlapping segments of length `L`.
///
/// Each segment is mean-removed and optionally tapered; the per-segment
/// biperiodogram `d_j d_k conj(d_{j+k}) / (sum w^3 (2 pi)^2)` is averaged on the
/// `L x L` grid. Without a taper `sum w^3 = L`.
pub fn estimate_bispectrum(series: &TimeSeriesSample, plan: &EstimationPlan) -> Result<BifrequencyField> {
    Ok(estimate_segments(series, plan)?.field)
}

/// `sum |Im B| / sum |B|` over grid points with `|B| > floor * max |B|`.
///
/// Zero for an all-zero field.
pub fn realness_statistic(field: &BifrequencyField, spectrum_floor: f64) -> f64 {
    let max = field.max_abs();
    if max == 0.0 {
        return 0.0;
    }
    let cut = spectrum_floor * max;
    let (mut im, mut total) = (0.0, 0.0);
    for &z in field.values() {
        let a = math::modulus(z);
        if a > cut {
            im += math::abs(z.im);
            total += a;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        im / total
    }
}

/// Outcome of [`triple_product_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TripleProductBound {
    Holds { left: f64, right: f64 },
    Violated { by: f64, left: f64, right: f64 },
}

impl TripleProductBound {
    pub fn holds(&self) -> bool {
        matches!(self, TripleProductBound::Holds { .. })
    }

    pub fn sides(&self) -> (f64, f64) {
        match *self {
            TripleProductBound::Holds { left, right } => (left, right),
            TripleProductBound::Violated { left, right, .. } => (left, right),
        }
    }
}

/// Checks `int int |p1(w1) p2(w2) p3(-w1 - w2)| <= sqrt(2 pi) |p1|_2 |p2|_2 |p3|_2`
/// by trapezoid quadrature of grid functions on `[0, 2 pi)`.
pub fn triple_product_bound_check(
    psi1: &[Complex64],
    psi2: &[Complex64],
    psi3: &[Complex64],
) -> Result<TripleProductBound> {
    let g = psi1.len();
    if psi2.len() != g || psi3.len() != g {
        return Err(Error::InvalidArgument(
            "grid functions must share one grid".into(),
        ));
    }
    if g < 8 {
        return Err(Error::GridTooCoarse { grid: g, required: 8 });
    }
    let h = 2.0 * PI / g as f64;
    let mut left = 0.0;
    for (j, &a) in psi1.iter().enumerate() {
        let a = math::modulus(a);
        let mut row = 0.0;
        for (k, &b) in psi2.iter().enumerate() {
            let idx = (2 * g - j - k) % g;
            row += math::modulus(b) * math::modulus(psi3[idx]);
        }
        left += a * row;
    }
    left *= h * h;
    let norm = |p: &[Complex64]| math::sqrt(h * p.iter().map(|z| z.norm_sqr()).sum::<f64>());
    let right = math::sqrt(2.0 * PI) * norm(psi1) * norm(psi2) * norm(psi3);
    Ok(if left <= right * (1.0 + TRIPLE_PRODUCT_SLACK) {
        TripleProductBound::Holds { left, right }
    } else {
        TripleProductBound::Violated {
            by: left - right,
            left,
            right,
        }
    })
}
