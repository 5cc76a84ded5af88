//! Adaptive Dormand–Prince 5(4) integrator for small real systems.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-14,
        }
    }
}

const MAX_STEPS: usize = 10_000_000;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub y: Vec<f64>,
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrates `y' = f(t, y)` from `t0` to `t1 >= t0`.
pub fn integrate<F>(mut f: F, t0: f64, y0: &[f64], t1: f64, tol: Tolerance) -> Result<Solution>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if !(t1 >= t0) {
        return Err(Error::Domain(format!("integration interval [{t0}, {t1}]")));
    }
    let dim = y0.len();
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0; dim]; 7];
    let mut stage = vec![0.0; dim];
    let mut y5 = vec![0.0; dim];
    let mut t = t0;
    let span = t1 - t0;
    let mut h = if span > 0.0 { span.min(1e-3 * span.max(1.0)) } else { 0.0 };
    let (mut accepted, mut rejected) = (0, 0);

    f(t, &y, &mut k[0]);
    while t < t1 {
        if accepted + rejected >= MAX_STEPS {
            return Err(Error::ContractViolation("step budget exhausted".into()));
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += h * A[s][j] * kj[i];
                }
                stage[i] = acc;
            }
            let (_, rest) = k.split_at_mut(s);
            f(t + C[s] * h, &stage, &mut rest[0]);
        }
        let mut err = 0.0;
        for i in 0..dim {
            let mut hi = y[i];
            let mut lo = y[i];
            for s in 0..7 {
                hi += h * B5[s] * k[s][i];
                lo += h * B4[s] * k[s][i];
            }
            y5[i] = hi;
            let scale = tol.atol + tol.rtol * y[i].abs().max(hi.abs());
            err += ((hi - lo) / scale).powi(2);
        }
        let err = (err / dim.max(1) as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::ContractViolation(format!("non-finite state at t = {t}")));
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + h };
            y.copy_from_slice(&y5);
            // first-same-as-last: stage 7 was evaluated at the accepted point
            let (first, rest) = k.split_at_mut(6);
            first[0].copy_from_slice(&rest[0]);
            accepted += 1;
        } else {
            rejected += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h <= f64::EPSILON * t.abs().max(1.0) && t < t1 {
            return Err(Error::ContractViolation(format!("step size underflow at t = {t}")));
        }
    }
    Ok(Solution {
        y,
        accepted,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let s = integrate(|_, y, d| d[0] = -y[0], 0.0, &[1.0], 3.0, Tolerance::default()).unwrap();
        assert!((s.y[0] - (-3.0_f64).exp()).abs() < 1e-9 * (-3.0_f64).exp());
    }

    #[test]
    fn harmonic_oscillator_period() {
        let tau = std::f64::consts::TAU;
        let s = integrate(
            |_, y, d| {
                d[0] = y[1];
                d[1] = -y[0];
            },
            0.0,
            &[1.0, 0.0],
            10.0 * tau,
            Tolerance::default(),
        )
        .unwrap();
        assert!((s.y[0] - 1.0).abs() < 1e-8);
        assert!(s.y[1].abs() < 1e-8);
    }

    #[test]
    fn zero_span_is_identity() {
        let s = integrate(|_, _, d| d[0] = 1.0, 2.0, &[0.5], 2.0, Tolerance::default()).unwrap();
        assert_eq!(s.y, vec![0.5]);
        assert!(integrate(|_, _, d| d[0] = 1.0, 2.0, &[0.5], 1.0, Tolerance::default()).is_err());
    }

    #[test]
    fn polynomial_is_exact() {
        // fifth-order scheme integrates t^4 exactly
        let s = integrate(|t, _, d| d[0] = t.powi(4), 0.0, &[0.0], 2.0, Tolerance::default()).unwrap();
        assert!((s.y[0] - 32.0 / 5.0).abs() < 1e-12);
    }
}
