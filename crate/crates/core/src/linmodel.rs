//! Finite moving-average models, their innovations, and sample-path simulation.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Exp, Gamma, Normal};

use crate::dft::Twiddles;
use crate::math;
use crate::{Error, Result};

/// Relative tolerance used by [`FilterCoefficients::symmetry`].
pub const DEFAULT_SYMMETRY_TOL: f64 = 1e-9;

/// The random number generator behind [`simulate`]; seeded with
/// `ChaCha8Rng::seed_from_u64`, which is portable across platforms.
pub type SimRng = ChaCha8Rng;

/// Real filter `c(k)` supported on `k_min..=k_max`, with nonzero end points.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawFilter", into = "RawFilter"))]
pub struct FilterCoefficients {
    k_min: i64,
    values: Vec<f64>,
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
struct RawFilter {
    k_min: i64,
    values: Vec<f64>,
}

#[cfg(feature = "serde")]
impl TryFrom<RawFilter> for FilterCoefficients {
    type Error = Error;

    fn try_from(raw: RawFilter) -> Result<Self> {
        FilterCoefficients::new(raw.k_min, raw.values)
    }
}

#[cfg(feature = "serde")]
impl From<FilterCoefficients> for RawFilter {
    fn from(f: FilterCoefficients) -> Self {
        RawFilter {
            k_min: f.k_min,
            values: f.values,
        }
    }
}

/// Coefficient symmetry verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Symmetry {
    /// `c(l) = c(index - l)` for all `l`.
    Symmetric { index: i64 },
    /// `c(l) = -c(index - l)` for all `l`.
    SkewSymmetric { index: i64 },
    Neither,
}

impl FilterCoefficients {
    /// Builds a filter whose first coefficient sits at lag `k_min`.
    ///
    /// The support must be tight: `values` is nonempty, finite, and both of
    /// its end points are nonzero.
    pub fn new(k_min: i64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidFilter("no coefficients"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidFilter("non-finite coefficient"));
        }
        if values[0] == 0.0 || values[values.len() - 1] == 0.0 {
            return Err(Error::InvalidFilter(
                "first and last coefficients must be nonzero",
            ));
        }
        Ok(FilterCoefficients { k_min, values })
    }

    /// Like [`new`](Self::new), but strips exact zeros from both ends first.
    pub fn trimmed(k_min: i64, values: Vec<f64>) -> Result<Self> {
        let Some(first) = values.iter().position(|&v| v != 0.0) else {
            return Err(Error::InvalidFilter("all coefficients are zero"));
        };
        let last = values.iter().rposition(|&v| v != 0.0).unwrap_or(first);
        Self::new(k_min + first as i64, values[first..=last].to_vec())
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.values.len() as i64 - 1
    }

    /// Number of lags in the support window.
    pub fn width(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `c(k)`, zero outside the support.
    pub fn coefficient(&self, k: i64) -> f64 {
        let j = k - self.k_min;
        if j < 0 || j >= self.values.len() as i64 {
            0.0
        } else {
            self.values[j as usize]
        }
    }

    /// `(k, c(k))` over the support.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(j, &v)| (self.k_min + j as i64, v))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| f64::max(m, math::abs(*v)))
    }

    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Self::new(self.k_min, self.values.iter().map(|v| v * alpha).collect())
    }

    /// Moves the support window by `d` lags.
    pub fn shifted(&self, d: i64) -> Self {
        FilterCoefficients {
            k_min: self.k_min + d,
            values: self.values.clone(),
        }
    }

    /// `c~(k) = c(-k)`.
    pub fn reversed(&self) -> Self {
        FilterCoefficients {
            k_min: -self.k_max(),
            values: self.values.iter().rev().copied().collect(),
        }
    }

    /// `phi(omega) = sum_k c(k) exp(-i k omega)` by direct summation.
    pub fn transfer_function(&self, omega: f64) -> Complex64 {
        self.iter()
            .map(|(k, c)| math::cis(-(k as f64) * omega) * c)
            .fold(Complex64::new(0.0, 0.0), |acc, z| acc + z)
    }

    /// `S(omega) = |phi(omega)|^2`, without the innovation variance factor.
    pub fn spectrum(&self, omega: f64) -> f64 {
        self.transfer_function(omega).norm_sqr()
    }

    /// Transfer function at `omega_j = 2 pi j / G`, `j = 0..G`.
    ///
    /// Uses integer phase reduction, so `phi(omega_{G-j}) == conj(phi(omega_j))`
    /// holds bit-for-bit.
    pub fn transfer_on_grid(&self, grid: usize) -> Vec<Complex64> {
        let tw = Twiddles::new(grid);
        (0..grid)
            .map(|j| {
                self.iter()
                    .map(|(k, c)| tw.forward(k, j) * c)
                    .fold(Complex64::new(0.0, 0.0), |acc, z| acc + z)
            })
            .collect()
    }

    pub fn spectrum_on_grid(&self, grid: usize) -> Vec<f64> {
        self.transfer_on_grid(grid)
            .into_iter()
            .map(|z| z.norm_sqr())
            .collect()
    }

    /// Classifies the coefficients with an absolute tolerance.
    ///
    /// For tight support the only candidate centre is `k_min + k_max`.
    /// Symmetric wins if both checks pass.
    pub fn classify_symmetry(&self, tol: f64) -> Symmetry {
        let index = self.k_min + self.k_max();
        let mirrored = |l: i64| self.coefficient(index - l);
        if self.iter().all(|(l, c)| math::abs(c - mirrored(l)) <= tol) {
            Symmetry::Symmetric { index }
        } else if self.iter().all(|(l, c)| math::abs(c + mirrored(l)) <= tol) {
            Symmetry::SkewSymmetric { index }
        } else {
            Symmetry::Neither
        }
    }

    /// [`classify_symmetry`](Self::classify_symmetry) with tolerance
    /// `DEFAULT_SYMMETRY_TOL * max|c|`.
    pub fn symmetry(&self) -> Symmetry {
        self.classify_symmetry(DEFAULT_SYMMETRY_TOL * self.max_abs())
    }

    /// `sum_k c(k) c(k + h)`.
    pub fn autocorrelation_sum(&self, h: i64) -> f64 {
        self.iter().map(|(k, c)| c * self.coefficient(k + h)).sum()
    }

    pub fn sum_of_cubes(&self) -> f64 {
        self.values.iter().map(|v| v * v * v).sum()
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    fn describe(&self) -> String {
        let mut s = format!("ma[k_min={};", self.k_min);
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&format!("{v}"));
        }
        s.push(']');
        s
    }
}

/// Innovation families. All are stored pre-centred.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Innovations {
    /// `N(0, sigma^2)`.
    Gaussian { sigma: f64 },
    /// `sign * (E - 1/rate)` with `E ~ Exp(rate)`.
    CenteredExponential { rate: f64, negated: bool },
    /// `sign * (G - shape * scale)` with `G ~ Gamma(shape, scale)`.
    CenteredGamma {
        shape: f64,
        scale: f64,
        negated: bool,
    },
    /// Standardised Bernoulli: `(B - p) / sqrt(p (1 - p))`, unit variance.
    TwoPoint { p: f64 },
}

/// Validated innovation distribution with closed-form moments.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "Innovations", into = "Innovations"))]
pub struct InnovationSpec {
    family: Innovations,
}

impl TryFrom<Innovations> for InnovationSpec {
    type Error = Error;

    fn try_from(family: Innovations) -> Result<Self> {
        InnovationSpec::new(family)
    }
}

impl From<InnovationSpec> for Innovations {
    fn from(spec: InnovationSpec) -> Self {
        spec.family
    }
}

fn positive_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInnovations(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl InnovationSpec {
    pub fn new(family: Innovations) -> Result<Self> {
        match family {
            Innovations::Gaussian { sigma } => positive_finite("sigma", sigma)?,
            Innovations::CenteredExponential { rate, .. } => positive_finite("rate", rate)?,
            Innovations::CenteredGamma { shape, scale, .. } => {
                positive_finite("shape", shape)?;
                positive_finite("scale", scale)?;
            }
            Innovations::TwoPoint { p } => {
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::InvalidInnovations(format!(
                        "p must lie in (0, 1), got {p}"
                    )));
                }
            }
        }
        Ok(InnovationSpec { family })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::new(Innovations::Gaussian { sigma })
    }

    pub fn centered_exponential(rate: f64) -> Result<Self> {
        Self::new(Innovations::CenteredExponential {
            rate,
            negated: false,
        })
    }

    pub fn centered_gamma(shape: f64, scale: f64) -> Result<Self> {
        Self::new(Innovations::CenteredGamma {
            shape,
            scale,
            negated: false,
        })
    }

    pub fn two_point(p: f64) -> Result<Self> {
        Self::new(Innovations::TwoPoint { p })
    }

    pub fn family(&self) -> Innovations {
        self.family
    }

    pub fn kind_name(&self) -> &'static str {
        match self.family {
            Innovations::Gaussian { .. } => "gaussian",
            Innovations::CenteredExponential { .. } => "centered_exponential",
            Innovations::CenteredGamma { .. } => "centered_gamma",
            Innovations::TwoPoint { .. } => "two_point",
        }
    }

    pub fn mean(&self) -> f64 {
        0.0
    }

    pub fn variance(&self) -> f64 {
        match self.family {
            Innovations::Gaussian { sigma } => sigma * sigma,
            Innovations::CenteredExponential { rate, .. } => 1.0 / (rate * rate),
            Innovations::CenteredGamma { shape, scale, .. } => shape * scale * scale,
            Innovations::TwoPoint { .. } => 1.0,
        }
    }

    /// Third cumulant `cum3(Z(0))`.
    pub fn cum3(&self) -> f64 {
        let sign = |negated: bool| if negated { -1.0 } else { 1.0 };
        match self.family {
            Innovations::Gaussian { .. } => 0.0,
            Innovations::CenteredExponential { rate, negated } => {
                sign(negated) * 2.0 / (rate * rate * rate)
            }
            Innovations::CenteredGamma {
                shape,
                scale,
                negated,
            } => sign(negated) * 2.0 * shape * scale * scale * scale,
            Innovations::TwoPoint { p } => (1.0 - 2.0 * p) / math::sqrt(p * (1.0 - p)),
        }
    }

    /// Whether `Z(0)` and `-Z(0)` have the same law.
    pub fn is_symmetric(&self) -> bool {
        match self.family {
            Innovations::Gaussian { .. } => true,
            Innovations::TwoPoint { p } => p == 0.5,
            _ => false,
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.family, Innovations::Gaussian { .. })
    }

    /// Draws `count` innovations from `rng`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        let sign = |negated: bool| if negated { -1.0 } else { 1.0 };
        // Parameters were validated at construction; the distribution
        // constructors cannot fail here.
        match self.family {
            Innovations::Gaussian { sigma } => {
                let d = Normal::new(0.0, sigma).expect("validated sigma");
                (0..count).map(|_| d.sample(rng)).collect()
            }
            Innovations::CenteredExponential { rate, negated } => {
                let d = Exp::new(rate).expect("validated rate");
                let s = sign(negated);
                (0..count).map(|_| s * (d.sample(rng) - 1.0 / rate)).collect()
            }
            Innovations::CenteredGamma {
                shape,
                scale,
                negated,
            } => {
                let d = Gamma::new(shape, scale).expect("validated gamma");
                let s = sign(negated);
                let m = shape * scale;
                (0..count).map(|_| s * (d.sample(rng) - m)).collect()
            }
            Innovations::TwoPoint { p } => {
                let d = Bernoulli::new(p).expect("validated p");
                let sd = math::sqrt(p * (1.0 - p));
                let hi = (1.0 - p) / sd;
                let lo = -p / sd;
                (0..count)
                    .map(|_| if d.sample(rng) { hi } else { lo })
                    .collect()
            }
        }
    }

    fn describe(&self) -> String {
        match self.family {
            Innovations::Gaussian { sigma } => format!("gaussian(sigma={sigma})"),
            Innovations::CenteredExponential { rate, negated } => {
                format!("centered_exponential(rate={rate},negated={negated})")
            }
            Innovations::CenteredGamma {
                shape,
                scale,
                negated,
            } => format!("centered_gamma(shape={shape},scale={scale},negated={negated})"),
            Innovations::TwoPoint { p } => format!("two_point(p={p})"),
        }
    }
}

/// `X(t) = sum_k c(k) Z(t - k)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinearModel {
    pub filter: FilterCoefficients,
    pub innovations: InnovationSpec,
}

impl LinearModel {
    pub fn new(filter: FilterCoefficients, innovations: InnovationSpec) -> Self {
        LinearModel {
            filter,
            innovations,
        }
    }

    /// Stable textual identifier, used as provenance for samples and fields.
    pub fn identifier(&self) -> String {
        format!("{}/{}", self.filter.describe(), self.innovations.describe())
    }

    /// `Var X(0) = var(Z) sum c(k)^2`.
    pub fn variance(&self) -> f64 {
        self.innovations.variance() * self.filter.sum_of_squares()
    }

    /// `cum3(X(0)) = cum3(Z) sum c(k)^3`.
    pub fn marginal_cum3(&self) -> f64 {
        self.innovations.cum3() * self.filter.sum_of_cubes()
    }

    /// Standardised third cumulant of the marginal law.
    pub fn skewness(&self) -> f64 {
        let v = self.variance();
        self.marginal_cum3() / (v * math::sqrt(v))
    }

    /// `var(Z) sum_k c(k) c(k + h)`.
    pub fn autocovariance(&self, h: i64) -> f64 {
        self.innovations.variance() * self.filter.autocorrelation_sum(h)
    }

    /// Time-reversed model: filter `c(-k)`, same innovations.
    pub fn reversed(&self) -> Self {
        LinearModel {
            filter: self.filter.reversed(),
            innovations: self.innovations,
        }
    }
}

/// Time-reversed model; see [`LinearModel::reversed`].
pub fn reverse_model(model: &LinearModel) -> LinearModel {
    model.reversed()
}

/// A sampled path together with how it was produced.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimeSeriesSample {
    values: Vec<f64>,
    seed: Option<u64>,
    provenance: String,
}

impl TimeSeriesSample {
    pub fn new(values: Vec<f64>, seed: Option<u64>, provenance: String) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientLength {
                needed: 1,
                available: 0,
            });
        }
        Ok(TimeSeriesSample {
            values,
            seed,
            provenance,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Same sample read backwards in time.
    pub fn time_reversed(&self) -> Self {
        TimeSeriesSample {
            values: self.values.iter().rev().copied().collect(),
            seed: self.seed,
            provenance: format!("reversed({})", self.provenance),
        }
    }
}

/// Raw innovation draws used by [`simulate`] for `count` innovations.
pub fn draw_innovations(spec: &InnovationSpec, count: usize, seed: u64) -> Vec<f64> {
    let mut rng = SimRng::seed_from_u64(seed);
    spec.draw(&mut rng, count)
}

/// Simulates `X(0..n)` exactly from `n + width - 1` innovations.
///
/// Innovation draw `m` is `Z(m - k_max)`, so with a finite filter the output
/// is exactly stationary from the first sample.
pub fn simulate(model: &LinearModel, n: usize, seed: u64) -> Result<TimeSeriesSample> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let w = model.filter.width();
    let z = draw_innovations(&model.innovations, n + w - 1, seed);
    let c = model.filter.values();
    let values = (0..n)
        .map(|t| {
            // X(t) = sum_j c[j] Z(t - k_min - j) = sum_j c[j] z[t + w - 1 - j]
            c.iter()
                .enumerate()
                .map(|(j, &cj)| cj * z[t + w - 1 - j])
                .sum()
        })
        .collect();
    TimeSeriesSample::new(values, Some(seed), model.identifier())
}

/// Smallest magnitude [`random_filter`] draws for the two end coefficients.
pub const RANDOM_EDGE_MIN: f64 = 0.1;

/// Filter of the given width with interior coefficients uniform in `[-1, 1]`.
///
/// The two end coefficients have magnitude uniform in `[RANDOM_EDGE_MIN, 1]`
/// and a random sign, so the support is tight with room to spare.
pub fn random_filter<R: Rng + ?Sized>(rng: &mut R, k_min: i64, width: usize) -> FilterCoefficients {
    assert!(width > 0);
    let mut values: Vec<f64> = (0..width).map(|_| rng.random_range(-1.0..=1.0)).collect();
    for idx in [0, width - 1] {
        let magnitude = rng.random_range(RANDOM_EDGE_MIN..=1.0);
        values[idx] = if rng.random::<bool>() { magnitude } else { -magnitude };
    }
    FilterCoefficients::new(k_min, values).expect("tight by construction")
}

/// Random filter with `c(l) = c(k_min + k_max - l)`.
pub fn random_symmetric_filter<R: Rng + ?Sized>(
    rng: &mut R,
    k_min: i64,
    width: usize,
) -> FilterCoefficients {
    let base = random_filter(rng, k_min, width);
    let v = base.values();
    let values = (0..width)
        .map(|j| if j < width - 1 - j { v[j] } else { v[width - 1 - j] })
        .collect();
    FilterCoefficients::new(k_min, values).expect("tight by construction")
}

/// Random filter with `c(l) = -c(k_min + k_max - l)`; width must be at least 2.
pub fn random_skew_symmetric_filter<R: Rng + ?Sized>(
    rng: &mut R,
    k_min: i64,
    width: usize,
) -> FilterCoefficients {
    assert!(width >= 2);
    let base = random_filter(rng, k_min, width);
    let v = base.values();
    let values = (0..width)
        .map(|j| {
            let m = width - 1 - j;
            match j.cmp(&m) {
                core::cmp::Ordering::Less => v[j],
                core::cmp::Ordering::Equal => 0.0,
                core::cmp::Ordering::Greater => -v[m],
            }
        })
        .collect();
    FilterCoefficients::new(k_min, values).expect("tight by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;

    fn filter(k_min: i64, v: &[f64]) -> FilterCoefficients {
        FilterCoefficients::new(k_min, v.to_vec()).unwrap()
    }

    #[test]
    fn rejects_loose_support() {
        assert!(FilterCoefficients::new(0, vec![]).is_err());
        assert!(FilterCoefficients::new(0, vec![0.0, 1.0]).is_err());
        assert!(FilterCoefficients::new(0, vec![1.0, 0.0]).is_err());
        assert!(FilterCoefficients::new(0, vec![1.0, f64::NAN]).is_err());
        let t = FilterCoefficients::trimmed(0, vec![0.0, 1.0, 2.0, 0.0]).unwrap();
        assert_eq!((t.k_min(), t.values()), (1, &[1.0, 2.0][..]));
        assert!(FilterCoefficients::trimmed(3, vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn transfer_function_examples() {
        let ma1 = filter(0, &[1.0, 1.0]);
        assert!((ma1.transfer_function(0.0) - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        assert!(ma1.transfer_function(PI).norm() < 1e-15);
        let half = filter(0, &[1.0, 0.5]);
        let z = half.transfer_function(PI / 2.0);
        assert!((z - Complex64::new(1.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn spectrum_examples() {
        let ma1 = filter(0, &[1.0, 1.0]);
        assert!((ma1.spectrum(0.0) - 4.0).abs() < 1e-14);
        assert!(ma1.spectrum(PI) < 1e-30);
        assert!((filter(0, &[1.0, 0.5]).spectrum(PI / 2.0) - 1.25).abs() < 1e-14);
    }

    #[test]
    fn grid_transfer_matches_direct() {
        let f = filter(-3, &[0.3, -1.0, 2.0, 0.7]);
        let g = 24;
        for (j, z) in f.transfer_on_grid(g).into_iter().enumerate() {
            let w = 2.0 * PI * j as f64 / g as f64;
            assert!((z - f.transfer_function(w)).norm() < 1e-13);
        }
    }

    #[test]
    fn symmetry_examples() {
        assert_eq!(
            filter(0, &[1.0, 2.0, 1.0]).symmetry(),
            Symmetry::Symmetric { index: 2 }
        );
        assert_eq!(
            filter(0, &[1.0, 0.0, -1.0]).symmetry(),
            Symmetry::SkewSymmetric { index: 2 }
        );
        assert_eq!(filter(0, &[1.0, 0.5]).symmetry(), Symmetry::Neither);
        assert_eq!(
            filter(-4, &[3.0]).symmetry(),
            Symmetry::Symmetric { index: -8 }
        );
        // within tolerance
        assert_eq!(
            filter(1, &[1.0, 1.0 + 1e-12]).classify_symmetry(1e-9),
            Symmetry::Symmetric { index: 3 }
        );
    }

    #[test]
    fn reverse_examples() {
        let r = filter(0, &[1.0, 2.0, 1.0]).reversed();
        assert_eq!((r.k_min(), r.values()), (-2, &[1.0, 2.0, 1.0][..]));
        let r = filter(0, &[1.0, 0.5]).reversed();
        assert_eq!((r.k_min(), r.values()), (-1, &[0.5, 1.0][..]));
        let m = LinearModel::new(
            filter(2, &[0.1, -0.4, 0.9]),
            InnovationSpec::centered_exponential(1.0).unwrap(),
        );
        assert_eq!(reverse_model(&reverse_model(&m)), m);
    }

    #[test]
    fn innovation_moments() {
        let e = InnovationSpec::centered_exponential(2.0).unwrap();
        assert_eq!(e.variance(), 0.25);
        assert_eq!(e.cum3(), 0.25);
        let g = InnovationSpec::new(Innovations::CenteredGamma {
            shape: 3.0,
            scale: 0.5,
            negated: true,
        })
        .unwrap();
        assert_eq!(g.variance(), 0.75);
        assert_eq!(g.cum3(), -0.75);
        let tp = InnovationSpec::two_point(0.5).unwrap();
        assert_eq!((tp.variance(), tp.cum3()), (1.0, 0.0));
        assert!(tp.is_symmetric());
        assert!(InnovationSpec::two_point(1.0).is_err());
        assert!(InnovationSpec::gaussian(0.0).is_err());
        assert!(InnovationSpec::centered_exponential(f64::INFINITY).is_err());
    }

    #[test]
    fn identity_filter_reproduces_draws() {
        let spec = InnovationSpec::centered_gamma(2.0, 1.5).unwrap();
        let m = LinearModel::new(filter(0, &[1.0]), spec);
        let x = simulate(&m, 100, 99).unwrap();
        assert_eq!(x.values(), &draw_innovations(&spec, 100, 99)[..]);
    }

    #[test]
    fn simulation_is_deterministic() {
        let m = LinearModel::new(
            filter(-1, &[0.5, 1.0, -0.25]),
            InnovationSpec::two_point(0.3).unwrap(),
        );
        let a = simulate(&m, 257, 5).unwrap();
        let b = simulate(&m, 257, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.values(), simulate(&m, 257, 6).unwrap().values());
        assert!(simulate(&m, 0, 5).is_err());
    }

    #[test]
    fn simulation_applies_filter_to_shifted_innovations() {
        let spec = InnovationSpec::gaussian(1.0).unwrap();
        let m = LinearModel::new(filter(-1, &[2.0, -1.0, 0.5]), spec);
        let n = 20;
        let z = draw_innovations(&spec, n + 2, 11);
        let x = simulate(&m, n, 11).unwrap();
        // z[m] = Z(m - k_max) with k_max = 1
        let zed = |tau: i64| z[(tau + 1) as usize];
        for t in 0..n as i64 {
            let expect = 2.0 * zed(t + 1) - zed(t) + 0.5 * zed(t - 1);
            assert!((x.values()[t as usize] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn random_constructions_have_requested_symmetry() {
        let mut rng = SimRng::seed_from_u64(3);
        for w in 1..10 {
            let s = random_symmetric_filter(&mut rng, -2, w);
            assert!(matches!(s.symmetry(), Symmetry::Symmetric { .. }));
            if w >= 2 {
                let a = random_skew_symmetric_filter(&mut rng, 1, w);
                assert!(matches!(a.symmetry(), Symmetry::SkewSymmetric { .. }));
            }
        }
    }
}
