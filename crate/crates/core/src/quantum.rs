//! Centered Gaussian wave packet under the pulsed harmonic potential, in
//! the linear (determinant) formulation.
//!
//! The whole dynamics is carried by the determinants `q_n` of the Gaussian
//! integral matrices, which obey `q[n+2] = -i beta q[n+1] + q[n]` with
//! `q_0 = 1`, `q_1 = eta - i`. Widths use the convention
//! `P(x) ~ exp(-x^2 / gamma^2)`, not a standard deviation.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::recurrence::{iterate, neg_i_pow, RecurrenceSeed, DEGENERACY_THRESHOLD};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumParams {
    pub hbar: f64,
    pub mass: f64,
    pub period: f64,
    pub strength: f64,
    pub xi: f64,
    /// Length scale `(hbar tau / m)^(1/2)`.
    pub b: f64,
}

impl QuantumParams {
    pub fn new(hbar: f64, mass: f64, period: f64, strength: f64) -> Result<Self> {
        ensure_positive("hbar", hbar)?;
        ensure_positive("mass", mass)?;
        ensure_positive("period", period)?;
        ensure_finite("strength", strength)?;
        Ok(Self {
            hbar,
            mass,
            period,
            strength,
            xi: strength * period / mass,
            b: (hbar * period / mass).sqrt(),
        })
    }

    /// `hbar = m = tau = 1`.
    pub fn unit(xi: f64) -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            period: 1.0,
            strength: xi,
            xi,
            b: 1.0,
        }
    }

    pub fn beta(&self) -> f64 {
        2.0 - self.xi
    }
}

/// Initial packet `psi(x, 0) ~ exp(-eta x^2 / 2 b^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialPacket {
    pub eta: Complex64,
    /// `b / sqrt(Re eta)`.
    pub gamma0: f64,
}

impl InitialPacket {
    pub fn new(eta: Complex64, params: &QuantumParams) -> Result<Self> {
        check_eta(eta)?;
        Ok(Self {
            eta,
            gamma0: params.b / eta.re.sqrt(),
        })
    }
}

pub(crate) fn check_eta(eta: Complex64) -> Result<()> {
    if eta.re.is_finite() && eta.im.is_finite() && eta.re > 0.0 {
        Ok(())
    } else {
        Err(Error::NonNormalizable(format!("Re(eta) must be positive, got {eta}")))
    }
}

/// `(q_n, q_{n-1})` at pulse index `n >= 1`.
///
/// `arg_prev` is the continuously tracked argument of `q_{n-1}`, used to fix
/// the branch of `q^(-1/2)` in the wave function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterminantPair {
    pub n: usize,
    pub q_n: Complex64,
    pub q_prev: Complex64,
    pub arg_prev: f64,
}

impl DeterminantPair {
    /// `(q_1, q_0) = (eta - i, 1)`.
    pub fn first(eta: Complex64) -> Self {
        Self {
            n: 1,
            q_n: eta - I,
            q_prev: Complex64::new(1.0, 0.0),
            arg_prev: 0.0,
        }
    }

    pub fn next(&self, beta: f64) -> Self {
        Self {
            n: self.n + 1,
            q_n: Complex64::new(0.0, -beta) * self.q_n + self.q_prev,
            q_prev: self.q_n,
            arg_prev: self.arg_n(),
        }
    }

    /// Continuous argument of `q_n`.
    ///
    /// Between pulses the bracket `theta q_n - i (1 - theta) q_{n-1}` moves on
    /// a straight segment that avoids the origin, so the swept angle is the
    /// principal argument of `i q_n / q_{n-1}`.
    pub fn arg_n(&self) -> f64 {
        self.arg_prev - FRAC_PI_2 + (I * self.q_n / self.q_prev).arg()
    }

    /// `Re(q_n conj(q_{n-1}))`, which equals `Re(eta)` along every orbit.
    pub fn bilinear(&self) -> f64 {
        (self.q_n * self.q_prev.conj()).re
    }

    /// `theta q_n - i (1 - theta) q_{n-1}`.
    pub fn bracket(&self, frac: f64) -> Complex64 {
        self.q_n * frac - I * self.q_prev * (1.0 - frac)
    }
}

/// Pairs for `n = 1..=count`.
pub fn q_sequence(eta: Complex64, xi: f64, count: usize) -> Result<Vec<DeterminantPair>> {
    check_eta(eta)?;
    ensure_finite("xi", xi)?;
    let beta = 2.0 - xi;
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return Ok(out);
    }
    let mut pair = DeterminantPair::first(eta);
    out.push(pair);
    for _ in 1..count {
        pair = pair.next(beta);
        out.push(pair);
    }
    Ok(out)
}

/// `q_0..=q_n` through the shared recurrence engine.
pub fn q_values(eta: Complex64, xi: f64, n: usize) -> Vec<Complex64> {
    let seed = RecurrenceSeed::new(
        Complex64::new(1.0, 0.0),
        eta - I,
        Complex64::new(0.0, -(2.0 - xi)),
        Complex64::new(1.0, 0.0),
    );
    iterate(&seed, n)
}

/// `q_n = ((-i)^n / sin phi) [i (eta - i) sin(n phi) - sin((n-1) phi)]`.
///
/// Defined on the closed band `0 <= xi <= 4`; at degenerate `phi` (band
/// edges) the recurrence is iterated instead.
pub fn q_closed_form(eta: Complex64, xi: f64, n: usize) -> Result<Complex64> {
    ensure_finite("xi", xi)?;
    if !(0.0..=4.0).contains(&xi) {
        return Err(Error::Regime { beta: 2.0 - xi });
    }
    let phi = (1.0 - 0.5 * xi).acos();
    let s = phi.sin();
    if s.abs() < DEGENERACY_THRESHOLD {
        return Ok(q_values(eta, xi, n)[n]);
    }
    let nf = n as f64;
    let inner = I * (eta - I) * (nf * phi).sin() - ((nf - 1.0) * phi).sin();
    Ok(neg_i_pow(n) * inner / s)
}

/// `gamma_n = |q_n| gamma_0`.
pub fn width(pair: &DeterminantPair, packet: &InitialPacket) -> f64 {
    pair.q_n.norm() * packet.gamma0
}

/// `E_n = hbar / (4 tau Re eta) |q_n + i q_{n-1}|^2`.
pub fn mean_energy(pair: &DeterminantPair, packet: &InitialPacket, params: &QuantumParams) -> f64 {
    let s = pair.q_n + I * pair.q_prev;
    params.hbar / (4.0 * params.period * packet.eta.re) * s.norm_sqr()
}

/// Wave function at `t = (n - 1 + frac) tau` for the pair at index `n`.
///
/// `frac = 1` is the pre-pulse state `psi_n`; `frac = 0` is the state right
/// after pulse `n - 1`. The global phase follows the continuous evolution of
/// `psi(0, t)` starting from a real positive value at `t = 0`.
pub fn wavefunction_at(
    pair: &DeterminantPair,
    frac: f64,
    x: f64,
    packet: &InitialPacket,
    params: &QuantumParams,
) -> Complex64 {
    let d = pair.bracket(frac);
    let modulus = (packet.eta.re / (PI * params.b * params.b)).powf(0.25) / d.norm().sqrt();
    let phase = origin_phase(pair, frac);
    let y2 = x * x / (params.b * params.b);
    let exponent = I * 0.5 * y2 * (pair.q_n + I * pair.q_prev) / d;
    Complex64::from_polar(modulus, phase) * exponent.exp()
}

/// Accumulated (unwrapped) phase of `psi(0, t)` at `t = (n - 1 + frac) tau`.
pub fn origin_phase(pair: &DeterminantPair, frac: f64) -> f64 {
    let d = pair.bracket(frac);
    let arg_d = pair.arg_prev - FRAC_PI_2 + (d / (-I * pair.q_prev)).arg();
    -FRAC_PI_4 * pair.n as f64 - 0.5 * arg_d
}

/// Normalized Gaussian density `amplitude * exp(-x^2 / width^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityProfile {
    pub amplitude: f64,
    pub width: f64,
}

impl DensityProfile {
    pub fn from_width(width: f64) -> Self {
        Self {
            amplitude: 1.0 / (width * PI.sqrt()),
            width,
        }
    }

    pub fn at(&self, x: f64) -> f64 {
        self.amplitude * (-(x * x) / (self.width * self.width)).exp()
    }
}

/// Density at `t = (n - 1 + frac) tau`; width `b |bracket| / sqrt(Re eta)`.
pub fn density_profile(
    pair: &DeterminantPair,
    frac: f64,
    packet: &InitialPacket,
    params: &QuantumParams,
) -> DensityProfile {
    let w = params.b * pair.bracket(frac).norm() / packet.eta.re.sqrt();
    DensityProfile::from_width(w)
}

/// The pulse multiplies the wave function by `exp(-i xi y^2 / 2)`, i.e.
/// shifts the inverse variance by `i xi`.
pub fn pulse_phase_jump(sigma: Complex64, xi: f64) -> Complex64 {
    sigma + I * xi
}
