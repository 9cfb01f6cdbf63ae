//! Third-order joint cumulants `cum(X(0), X(t1), X(t2))`.
//!
//! Every lag pair is first reduced to its canonical form `(0, a, b)` with
//! `0 <= a <= b`: the cumulant of a stationary series only depends on the
//! multiset `{0, t1, t2}` up to a common shift. Computing through the canonical
//! form makes the permutation and shift symmetries of [`CumulantTable`] hold
//! bit-for-bit.

use alloc::vec::Vec;

use crate::linmodel::LinearModel;
use crate::math;
use crate::{Error, Result};

/// Canonical non-negative lags `(a, b)`, `a <= b`, of the triple `(0, t1, t2)`.
pub fn canonical_lags(t1: i64, t2: i64) -> (usize, usize) {
    let mut v = [0i64, t1, t2];
    v.sort_unstable();
    ((v[1] - v[0]) as usize, (v[2] - v[0]) as usize)
}

/// Cumulants on the square lag window `[-T, T]^2`, row-major in `t1`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CumulantTable {
    max_lag: usize,
    values: Vec<f64>,
}

impl CumulantTable {
    fn from_canonical(max_lag: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        // Canonical lags on the window satisfy b <= 2T.
        let span = 2 * max_lag + 1;
        let mut cache = alloc::vec![f64::NAN; span * span];
        let t = max_lag as i64;
        let mut values = Vec::with_capacity(span * span);
        for t1 in -t..=t {
            for t2 in -t..=t {
                let (a, b) = canonical_lags(t1, t2);
                let slot = &mut cache[a * span + b];
                if slot.is_nan() {
                    *slot = f(a, b);
                }
                values.push(*slot);
            }
        }
        CumulantTable { max_lag, values }
    }

    pub fn max_lag(&self) -> usize {
        self.max_lag
    }

    fn index(&self, t1: i64, t2: i64) -> Option<usize> {
        let t = self.max_lag as i64;
        if t1.abs() > t || t2.abs() > t {
            return None;
        }
        let span = 2 * t + 1;
        Some(((t1 + t) * span + (t2 + t)) as usize)
    }

    /// Value at `(t1, t2)`, or `None` outside the window.
    pub fn get(&self, t1: i64, t2: i64) -> Option<f64> {
        self.index(t1, t2).map(|i| self.values[i])
    }

    /// Raw values, row-major with `t1` outer and both lags ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(t1, t2, value)` in row-major lag order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, f64)> + '_ {
        let t = self.max_lag as i64;
        let span = (2 * t + 1) as usize;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| ((i / span) as i64 - t, (i % span) as i64 - t, v))
    }

    /// Rebuilds a table from row-major values, e.g. after deserialisation.
    pub fn from_values(max_lag: usize, values: Vec<f64>) -> Result<Self> {
        let span = 2 * max_lag + 1;
        if max_lag == 0 || values.len() != span * span {
            return Err(Error::InvalidArgument(alloc::format!(
                "cumulant table with max lag {max_lag} needs {} values, got {}",
                span * span,
                values.len()
            )));
        }
        Ok(CumulantTable { max_lag, values })
    }
}

/// `cum(X(0), X(t1), X(t2)) = cum3(Z) sum_k c(k) c(t1 + k) c(t2 + k)`.
///
/// Exact finite sum over the intersection of the shifted supports; zero when
/// they are disjoint.
pub fn model_cumulant(model: &LinearModel, t1: i64, t2: i64) -> f64 {
    let (a, b) = canonical_lags(t1, t2);
    canonical_model_cumulant(model, a, b)
}

fn canonical_model_cumulant(model: &LinearModel, a: usize, b: usize) -> f64 {
    let c = model.filter.values();
    if b >= c.len() {
        return 0.0;
    }
    let s: f64 = (0..c.len() - b).map(|j| c[j] * c[j + a] * c[j + b]).sum();
    model.innovations.cum3() * s
}

/// [`model_cumulant`] tabulated over `[-T, T]^2`.
pub fn model_cumulant_table(model: &LinearModel, max_lag: usize) -> Result<CumulantTable> {
    if max_lag == 0 {
        return Err(Error::InvalidArgument("max lag must be at least 1".into()));
    }
    Ok(CumulantTable::from_canonical(max_lag, |a, b| {
        canonical_model_cumulant(model, a, b)
    }))
}

fn sample_mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn centered_third_moment(x: &[f64], mean: f64, t1: usize, t2: usize) -> f64 {
    let count = x.len() - t2;
    let s: f64 = (0..count)
        .map(|t| (x[t] - mean) * (x[t + t1] - mean) * (x[t + t2] - mean))
        .sum();
    s / count as f64
}

/// Moment estimator of `cum(X(0), X(t1), X(t2))` for `0 <= t1 <= t2`.
///
/// `(1 / (N - t2)) sum_t (x_t - m)(x_{t+t1} - m)(x_{t+t2} - m)` with `m` the
/// sample mean.
pub fn sample_cumulant(series: &[f64], t1: usize, t2: usize) -> Result<f64> {
    if t1 > t2 {
        return Err(Error::InvalidArgument(alloc::format!(
            "lags must satisfy t1 <= t2, got ({t1}, {t2})"
        )));
    }
    if series.len() < t2 + 1 {
        return Err(Error::InsufficientLength {
            needed: t2 + 1,
            available: series.len(),
        });
    }
    Ok(centered_third_moment(series, sample_mean(series), t1, t2))
}

/// Sample cumulants over `[-T, T]^2`, filled by symmetry from canonical lags.
pub fn sample_cumulant_table(series: &[f64], max_lag: usize) -> Result<CumulantTable> {
    if max_lag == 0 {
        return Err(Error::InvalidArgument("max lag must be at least 1".into()));
    }
    if series.len() < 2 * max_lag + 1 {
        return Err(Error::InsufficientLength {
            needed: 2 * max_lag + 1,
            available: series.len(),
        });
    }
    let m = sample_mean(series);
    Ok(CumulantTable::from_canonical(max_lag, |a, b| {
        centered_third_moment(series, m, a, b)
    }))
}

/// `max |value(t1, t2) - value(-t1, -t2)|` over the table.
pub fn third_order_symmetry_defect(table: &CumulantTable) -> f64 {
    table.iter().fold(0.0, |acc, (t1, t2, v)| {
        let mirrored = table.get(-t1, -t2).expect("window is symmetric");
        f64::max(acc, math::abs(v - mirrored))
    })
}
