//! Scalar helpers backed by `libm` so results do not depend on `std`.

use core::f64::consts::PI;

use num_complex::Complex64;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn cis(theta: f64) -> Complex64 {
    let (s, c) = libm::sincos(theta);
    Complex64::new(c, s)
}

#[inline]
pub(crate) fn modulus(z: Complex64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// Principal argument in `[-pi, pi)`.
#[inline]
pub(crate) fn principal_arg(z: Complex64) -> f64 {
    let a = libm::atan2(z.im, z.re);
    if a >= PI {
        -PI
    } else {
        a
    }
}

/// Distance from `x` to the nearest integer multiple of `pi`.
#[inline]
pub(crate) fn dist_to_pi_lattice(x: f64) -> f64 {
    abs(x - PI * round(x / PI))
}
