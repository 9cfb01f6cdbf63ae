//! Uniform-grid Fourier kernels.
//!
//! All grid evaluations reduce the integer phase `k * j mod G` before touching
//! a trigonometric function, so `omega_j = 2 pi j / G` never accumulates
//! rounding from large arguments and the table is exactly conjugate-symmetric.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::math;

/// Table of `exp(-2 pi i m / G)` for `m = 0..G`.
#[derive(Debug, Clone)]
pub struct Twiddles {
    table: Vec<Complex64>,
}

impl Twiddles {
    pub fn new(grid: usize) -> Self {
        assert!(grid > 0, "grid size must be positive");
        let mut table = alloc::vec![Complex64::new(0.0, 0.0); grid];
        for m in 0..=grid / 2 {
            let w = math::cis(-2.0 * PI * m as f64 / grid as f64);
            table[m] = w;
            if m != 0 {
                table[grid - m] = w.conj();
            }
        }
        // quarter points are exact
        if grid.is_multiple_of(4) {
            table[grid / 4] = Complex64::new(0.0, -1.0);
            table[3 * grid / 4] = Complex64::new(0.0, 1.0);
        }
        if grid.is_multiple_of(2) {
            table[grid / 2] = Complex64::new(-1.0, 0.0);
        }
        Twiddles { table }
    }

    #[inline]
    pub fn grid(&self) -> usize {
        self.table.len()
    }

    /// `exp(-i k omega_j)` for any integer `k`.
    #[inline]
    pub fn forward(&self, k: i64, j: usize) -> Complex64 {
        let g = self.table.len() as i64;
        let m = (k.rem_euclid(g) * (j as i64 % g)).rem_euclid(g);
        self.table[m as usize]
    }

    /// `exp(+i k omega_j)`.
    #[inline]
    pub fn inverse(&self, k: i64, j: usize) -> Complex64 {
        self.forward(k, j).conj()
    }

    /// Discrete Fourier transform `d_j = sum_t x_t exp(-i omega_j t)`.
    pub fn dft_real(&self, x: &[f64], out: &mut [Complex64]) {
        let g = self.table.len();
        assert_eq!(x.len(), g);
        assert_eq!(out.len(), g);
        for (j, slot) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut m = 0usize;
            for &v in x {
                acc += self.table[m] * v;
                m += j;
                if m >= g {
                    m -= g;
                }
            }
            *slot = acc;
        }
    }
}

/// Frequency of grid point `j` on a `grid`-point lattice over `[0, 2 pi)`.
#[inline]
pub fn grid_frequency(j: usize, grid: usize) -> f64 {
    2.0 * PI * j as f64 / grid as f64
}
