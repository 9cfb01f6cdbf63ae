//! Transfer-function phase modulo `pi`.
//!
//! If the bispectrum of a linear model is real, the principal phase
//! `psi(w) = arg phi(w)` satisfies `psi(w1) + psi(w2) - psi(w1 + w2) in pi Z`
//! and therefore has the form `psi(w) = (n / 2) w + k(w)` with integer `n` and
//! `k(w) in pi Z`. With `phi(w) = sum c(k) exp(-i k w)`, a filter symmetric
//! about `s` has `n = -s`.
//!
//! Grid points where `|phi|` falls below a relative floor are masked: they play
//! the role of the null sets excluded by the almost-everywhere statements, and
//! their labels carry no structure.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::dft::grid_frequency;
use crate::linmodel::FilterCoefficients;
use crate::math;
use crate::{Error, Result};

/// Residual tolerance for phases of exactly known filters.
pub const DEFAULT_RESIDUAL_TOL_ANALYTIC: f64 = 1e-6;
/// Residual tolerance for phases derived from estimated quantities.
pub const DEFAULT_RESIDUAL_TOL_ESTIMATED: f64 = 0.1;

const TIE_EPS: f64 = 1e-12;

/// Principal phase `psi(omega_j)` with a validity mask.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseFunction {
    grid: usize,
    values: Vec<f64>,
    valid: Vec<bool>,
}

impl PhaseFunction {
    /// Builds a phase function from raw values; values outside `[-pi, pi)` at
    /// valid points are rejected.
    pub fn from_parts(values: Vec<f64>, valid: Vec<bool>) -> Result<Self> {
        if values.len() != valid.len() || values.is_empty() {
            return Err(Error::InvalidArgument(
                "phase values and mask must have the same nonzero length".into(),
            ));
        }
        if values
            .iter()
            .zip(&valid)
            .any(|(&v, &ok)| ok && !(-PI..PI).contains(&v))
        {
            return Err(Error::InvalidArgument(
                "valid phase values must lie in [-pi, pi)".into(),
            ));
        }
        Ok(PhaseFunction {
            grid: values.len(),
            values,
            valid,
        })
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    pub fn frequency(&self, j: usize) -> f64 {
        grid_frequency(j, self.grid)
    }
}

/// `psi(omega_j) = arg phi(omega_j)` in `[-pi, pi)` on a `G`-point grid.
///
/// Points with `|phi| <= floor * max |phi|` are masked invalid.
pub fn extract_phase(filter: &FilterCoefficients, grid: usize, floor: f64) -> Result<PhaseFunction> {
    if grid < 8 {
        return Err(Error::GridTooCoarse { grid, required: 8 });
    }
    if floor.is_nan() || floor <= 0.0 {
        return Err(Error::InvalidArgument("phase floor must be positive".into()));
    }
    let phi = filter.transfer_on_grid(grid);
    let max = phi.iter().fold(0.0, |m, &z| f64::max(m, math::modulus(z)));
    let valid: Vec<bool> = phi.iter().map(|&z| math::modulus(z) > floor * max).collect();
    if !valid.iter().any(|&v| v) {
        return Err(Error::TransferFunctionVanishes);
    }
    let values = phi
        .iter()
        .zip(&valid)
        .map(|(&z, &ok)| if ok { math::principal_arg(z) } else { 0.0 })
        .collect();
    Ok(PhaseFunction {
        grid,
        values,
        valid,
    })
}

/// Largest distance to `pi Z` of `psi(w_i) + psi(w_j) - psi(w_i + w_j)` over
/// all valid pairs whose sum (mod `2 pi`) is also valid.
pub fn cocycle_residual(phase: &PhaseFunction) -> Result<f64> {
    let valid = phase.valid_count();
    if valid < 3 {
        return Err(Error::InsufficientValidGrid { valid });
    }
    let g = phase.grid;
    let mut worst: f64 = 0.0;
    for i in (0..g).filter(|&i| phase.valid[i]) {
        for j in (i..g).filter(|&j| phase.valid[j]) {
            let s = (i + j) % g;
            if !phase.valid[s] {
                continue;
            }
            let r = phase.values[i] + phase.values[j] - phase.values[s];
            worst = worst.max(math::dist_to_pi_lattice(r));
        }
    }
    Ok(worst)
}

/// Constant phase offset removed before fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PhaseOffset {
    /// Fit `psi` directly (symmetric coefficients).
    Zero,
    /// Fit `psi - pi/2` (skew-symmetric coefficients).
    QuarterTurn,
}

impl PhaseOffset {
    pub fn radians(self) -> f64 {
        match self {
            PhaseOffset::Zero => 0.0,
            PhaseOffset::QuarterTurn => FRAC_PI_2,
        }
    }
}

/// `psi(w) = offset + (n / 2) w + pi * label(w)` up to `residual`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseDecomposition {
    pub n: i64,
    pub offset: PhaseOffset,
    /// `k(w) / pi` per grid point; `None` where the phase is masked.
    pub k_labels: Vec<Option<i64>>,
    pub residual: f64,
}

fn slope_residual(phase: &PhaseFunction, n: i64, offset: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (j, (&psi, &ok)) in phase.values.iter().zip(&phase.valid).enumerate() {
        if ok {
            let r = psi - offset - 0.5 * n as f64 * phase.frequency(j);
            worst = worst.max(math::dist_to_pi_lattice(r));
        }
    }
    worst
}

/// Exhaustive search over `n in [-n_max, n_max]` for `psi(w) - offset - (n/2) w in pi Z`.
///
/// Ties go to the smaller `|n|`, then to positive `n`.
pub fn fit_half_integer_slope_with_offset(
    phase: &PhaseFunction,
    n_max: u32,
    offset: PhaseOffset,
) -> PhaseDecomposition {
    let off = offset.radians();
    let candidates = core::iter::once(0i64).chain((1..=n_max as i64).flat_map(|m| [m, -m]));
    let mut best_n = 0i64;
    let mut best = f64::INFINITY;
    for n in candidates {
        let r = slope_residual(phase, n, off);
        if r < best - TIE_EPS {
            best = r;
            best_n = n;
        }
    }
    let k_labels = phase
        .values
        .iter()
        .zip(&phase.valid)
        .enumerate()
        .map(|(j, (&psi, &ok))| {
            ok.then(|| {
                let r = psi - off - 0.5 * best_n as f64 * phase.frequency(j);
                math::round(r / PI) as i64
            })
        })
        .collect();
    PhaseDecomposition {
        n: best_n,
        offset,
        k_labels,
        residual: best,
    }
}

/// [`fit_half_integer_slope_with_offset`] with no offset.
pub fn fit_half_integer_slope(phase: &PhaseFunction, n_max: u32) -> PhaseDecomposition {
    fit_half_integer_slope_with_offset(phase, n_max, PhaseOffset::Zero)
}

/// Fits both offsets and keeps the one with the smaller residual (zero offset
/// on ties).
pub fn fit_best_decomposition(phase: &PhaseFunction, n_max: u32) -> PhaseDecomposition {
    let plain = fit_half_integer_slope(phase, n_max);
    let skew = fit_half_integer_slope_with_offset(phase, n_max, PhaseOffset::QuarterTurn);
    if skew.residual < plain.residual - TIE_EPS {
        skew
    } else {
        plain
    }
}

/// Slope bound covering every symmetry centre a filter with this support can have.
pub fn slope_bound(filter: &FilterCoefficients) -> u32 {
    let reach = filter.k_min().abs().max(filter.k_max().abs());
    (2 * reach + 1).max(filter.width() as i64) as u32
}

/// Coefficient symmetry centre `s = -n` implied by an accepted decomposition.
pub fn symmetry_index_from_phase(decomp: &PhaseDecomposition, residual_tol: f64) -> Option<i64> {
    (decomp.residual <= residual_tol).then_some(-decomp.n)
}
