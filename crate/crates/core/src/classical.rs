//! Classical particle kicked by the pulsed harmonic potential.
//!
//! State is sampled just before each pulse; momentum is carried in the
//! rescaled form `rho = (tau / m) p`, which has length units.

use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::recurrence::{self, rational_angle, RecurrenceSeed};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalParams {
    pub mass: f64,
    pub period: f64,
    pub strength: f64,
    pub xi: f64,
}

impl ClassicalParams {
    pub fn new(mass: f64, period: f64, strength: f64) -> Result<Self> {
        ensure_positive("mass", mass)?;
        ensure_positive("period", period)?;
        ensure_finite("strength", strength)?;
        Ok(Self {
            mass,
            period,
            strength,
            xi: strength * period / mass,
        })
    }

    /// `m = tau = 1`, so `strength = xi`.
    pub fn unit(xi: f64) -> Self {
        Self {
            mass: 1.0,
            period: 1.0,
            strength: xi,
            xi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState {
    pub n: usize,
    pub x: f64,
    pub rho: f64,
}

impl ClassicalState {
    pub fn new(n: usize, x: f64, rho: f64) -> Self {
        Self { n, x, rho }
    }

    pub fn momentum(&self, params: &ClassicalParams) -> f64 {
        self.rho * params.mass / params.period
    }
}

/// First pre-pulse state and the companion `rho_0` that seeds the
/// second-order momentum recurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialData {
    pub state: ClassicalState,
    pub rho0: f64,
}

/// `x_1 = x(0) + (tau/m) p(0)`, `rho_1 = (tau/m) p(0)`,
/// `rho_0 = rho_1 + xi (x_1 - rho_1)`.
pub fn initial_state(x0: f64, p0: f64, params: &ClassicalParams) -> InitialData {
    let rho1 = params.period / params.mass * p0;
    let x1 = x0 + rho1;
    InitialData {
        state: ClassicalState::new(1, x1, rho1),
        rho0: rho1 + params.xi * (x1 - rho1),
    }
}

/// One pulse followed by one drift.
pub fn step(state: ClassicalState, xi: f64) -> ClassicalState {
    let rho = state.rho - xi * state.x;
    ClassicalState {
        n: state.n + 1,
        x: state.x + rho,
        rho,
    }
}

/// `count + 1` states starting with `start`.
pub fn orbit(start: ClassicalState, xi: f64, count: usize) -> Vec<ClassicalState> {
    let mut out = Vec::with_capacity(count + 1);
    out.push(start);
    let mut s = start;
    for _ in 0..count {
        s = step(s, xi);
        out.push(s);
    }
    out
}

/// `rho_{n+1} = [rho_1 sin((n+1) phi) - rho_0 sin(n phi)] / sin(phi)`.
///
/// Outside `0 < xi < 4`, or where the closed form is degenerate, the value is
/// produced by iterating the momentum recurrence instead.
pub fn rho_closed_form(n: usize, rho0: f64, rho1: f64, xi: f64) -> f64 {
    let beta = 2.0 - xi;
    if xi > 0.0 && xi < 4.0 {
        if let Ok(v) = recurrence::closed_form_oscillatory(rho0, rho1, beta, n + 1) {
            return v;
        }
    }
    recurrence::iterate(&RecurrenceSeed::symmetric(rho0, rho1, beta), n + 1)[n + 1]
}

/// Like [`rho_closed_form`] but refuses to leave the open stability band.
pub fn rho_closed_form_strict(n: usize, rho0: f64, rho1: f64, xi: f64) -> Result<f64> {
    if !(xi > 0.0 && xi < 4.0) {
        return Err(Error::Regime { beta: 2.0 - xi });
    }
    recurrence::closed_form_oscillatory(rho0, rho1, 2.0 - xi, n + 1)
}

/// `E_n = (m/2) (rho_n / tau)^2`.
pub fn energy(state: &ClassicalState, params: &ClassicalParams) -> f64 {
    let v = state.rho / params.period;
    0.5 * params.mass * v * v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodicKind {
    /// Every observable repeats with period `n tau`.
    Pmi,
    /// Only the energy repeats with period `n tau`; the state flips sign.
    Pmii,
    QuasiPeriodic,
    /// `xi` exactly 0 or 4.
    Marginal,
    Unstable,
}

/// Result of rational-angle detection on `phi = arccos(1 - xi/2)`.
///
/// `n_period`/`m_index` are the reduced representation `phi = M pi / n`;
/// `n_period` is therefore the energy period. `state_period` is the period of
/// the full state `(x, rho)`: `n` for even `M`, `2n` for odd `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicityReport {
    pub kind: PeriodicKind,
    pub n_period: Option<u32>,
    pub m_index: Option<u32>,
    pub state_period: Option<u32>,
}

pub fn classify_periodicity(xi: f64, n_max: u32) -> PeriodicityReport {
    let none = |kind| PeriodicityReport {
        kind,
        n_period: None,
        m_index: None,
        state_period: None,
    };
    if !xi.is_finite() || !(0.0..=4.0).contains(&xi) {
        return none(PeriodicKind::Unstable);
    }
    if xi == 0.0 || xi == 4.0 {
        return none(PeriodicKind::Marginal);
    }
    let phi = (1.0 - 0.5 * xi).acos();
    match rational_angle(phi, n_max.max(2)) {
        Some((n, m)) => {
            let even = m % 2 == 0;
            PeriodicityReport {
                kind: if even {
                    PeriodicKind::Pmi
                } else {
                    PeriodicKind::Pmii
                },
                n_period: Some(n),
                m_index: Some(m),
                state_period: Some(if even { n } else { 2 * n }),
            }
        }
        None => none(PeriodicKind::QuasiPeriodic),
    }
}

/// The tuned period-2 motion at `xi = 4` with `rho_1 = 2 x_1`.
pub fn special_pmi2_condition(state: &ClassicalState, xi: f64) -> bool {
    (xi - 4.0).abs() <= 1e-12 && (state.rho - 2.0 * state.x).abs() <= 1e-12 * (1.0 + state.x.abs())
}
