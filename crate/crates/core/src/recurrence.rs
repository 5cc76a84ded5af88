//! Three-term recurrences `u[n+2] = c * u[n+1] + e * u[n]` shared by every
//! manifestation, plus the band classification of the real coefficient
//! `beta` and the sine-kernel closed form valid inside the band.

use std::f64::consts::PI;
use std::ops::{Add, Div, Mul, Sub};

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};

/// Below this value of `|sin(phi)|` the sine-kernel closed forms are
/// ill-conditioned and callers fall back to direct iteration.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

/// Scalar types the recurrence engine runs on (`f64` and `Complex64`).
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + From<f64>
{
}

impl Scalar for f64 {}
impl Scalar for Complex64 {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `|beta| < 2`: bounded, (quasi-)periodic.
    Oscillatory,
    /// `|beta| == 2`: band edge, at most linear growth.
    Marginal,
    /// `|beta| > 2`: exponential growth (or decay of one branch).
    Hyperbolic,
}

/// How the dimensionless coupling maps onto `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingConvention {
    /// `beta = 2 - xi` (classical and quantum particle).
    Mechanical,
    /// `beta = g_tilde + 2` (directed line).
    Polymer,
}

impl CouplingConvention {
    pub fn beta(self, coupling: f64) -> f64 {
        match self {
            CouplingConvention::Mechanical => 2.0 - coupling,
            CouplingConvention::Polymer => coupling + 2.0,
        }
    }

    pub fn coupling(self, beta: f64) -> f64 {
        match self {
            CouplingConvention::Mechanical => 2.0 - beta,
            CouplingConvention::Polymer => beta - 2.0,
        }
    }
}

/// A coupling together with its recurrence coefficient, band and angle.
///
/// `angle` is `phi` with `2 cos(phi) = beta` in the oscillatory band and
/// `theta` with `2 cosh(theta) = |beta|` in the hyperbolic regime. It is
/// `None` at the band edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseCoupling {
    pub coupling: f64,
    pub beta: f64,
    pub regime: Regime,
    pub angle: Option<f64>,
}

impl PulseCoupling {
    pub fn mechanical(xi: f64) -> Result<Self> {
        ensure_finite("xi", xi)?;
        classify(2.0 - xi, CouplingConvention::Mechanical)
    }

    pub fn polymer(g_tilde: f64) -> Result<Self> {
        ensure_finite("g_tilde", g_tilde)?;
        classify(g_tilde + 2.0, CouplingConvention::Polymer)
    }

    /// `phi` when oscillatory.
    pub fn phi(&self) -> Option<f64> {
        match self.regime {
            Regime::Oscillatory => self.angle,
            _ => None,
        }
    }
}

pub fn classify(beta: f64, convention: CouplingConvention) -> Result<PulseCoupling> {
    ensure_finite("beta", beta)?;
    let half = 0.5 * beta;
    let (regime, angle) = if beta.abs() < 2.0 {
        (Regime::Oscillatory, Some(half.acos()))
    } else if beta.abs() == 2.0 {
        (Regime::Marginal, None)
    } else {
        (Regime::Hyperbolic, Some(half.abs().acosh()))
    };
    Ok(PulseCoupling {
        coupling: convention.coupling(beta),
        beta,
        regime,
        angle,
    })
}

/// Initial data and coefficients of `u[n+2] = c * u[n+1] + e * u[n]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceSeed<T = Complex64> {
    pub u0: T,
    pub u1: T,
    pub c: T,
    pub e: T,
}

impl<T: Scalar> RecurrenceSeed<T> {
    pub fn new(u0: T, u1: T, c: T, e: T) -> Self {
        Self { u0, u1, c, e }
    }

    /// Seed with `c = beta`, `e = -1`, the form every closed solution uses.
    pub fn symmetric(u0: T, u1: T, beta: f64) -> Self {
        Self::new(u0, u1, T::from(beta), T::from(-1.0))
    }

    #[inline]
    pub fn advance(&self, prev: T, curr: T) -> T {
        // multiply-then-add, left to right; do not reorder (golden files)
        self.c * curr + self.e * prev
    }
}

/// Returns `u[0..=n]`.
pub fn iterate<T: Scalar>(seed: &RecurrenceSeed<T>, n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(seed.u0);
    if n == 0 {
        return out;
    }
    out.push(seed.u1);
    for k in 2..=n {
        let next = seed.advance(out[k - 2], out[k - 1]);
        out.push(next);
    }
    out
}

/// `u[n] = (u1 sin(n phi) - u0 sin((n-1) phi)) / sin(phi)` for the recurrence
/// with `c = beta`, `e = -1`, `|beta| <= 2`.
///
/// Falls back to [`iterate`] when `|sin(phi)|` is below
/// [`DEGENERACY_THRESHOLD`].
pub fn closed_form_oscillatory<T: Scalar>(u0: T, u1: T, beta: f64, n: usize) -> Result<T> {
    ensure_finite("beta", beta)?;
    if beta.abs() > 2.0 {
        return Err(Error::Regime { beta });
    }
    let phi = (0.5 * beta).acos();
    let s = phi.sin();
    if s.abs() < DEGENERACY_THRESHOLD {
        let seed = RecurrenceSeed::symmetric(u0, u1, beta);
        return Ok(*iterate(&seed, n).last().expect("non-empty"));
    }
    let nf = n as f64;
    Ok((u1 * (nf * phi).sin() - u0 * ((nf - 1.0) * phi).sin()) / s)
}

/// Roots of `z^2 - beta z + 1`, i.e. the poles of the generating function.
pub fn poles(beta: f64) -> [Complex64; 2] {
    let disc = Complex64::new(beta * beta - 4.0, 0.0).sqrt();
    let half = Complex64::new(0.5 * beta, 0.0);
    [half + 0.5 * disc, half - 0.5 * disc]
}

/// `(-i)^n` evaluated exactly.
pub fn neg_i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// `i^n` evaluated exactly.
pub fn i_pow(n: usize) -> Complex64 {
    neg_i_pow(n).conj()
}

/// Smallest `(n, m)` with `phi = m pi / n`, `2 <= n <= n_max`, if any.
///
/// Accepts a denominator when `|phi n / pi - round(phi n / pi)| < 1e-9 n`.
pub fn rational_angle(phi: f64, n_max: u32) -> Option<(u32, u32)> {
    (2..=n_max).find_map(|n| {
        let ratio = phi * n as f64 / PI;
        let m = ratio.round();
        if m >= 1.0 && (ratio - m).abs() < 1e-9 * n as f64 {
            Some((n, m as u32))
        } else {
            None
        }
    })
}
