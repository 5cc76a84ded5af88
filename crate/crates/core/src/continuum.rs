//! Small-period limit: pulses of strength `lambda = kappa tau` become a
//! static spring `kappa`, and the packet shape `v(t)` (with
//! `psi ~ exp(-m v x^2 / 2 hbar)`) obeys `dv/dt = i (kappa/m - v^2)`.
//!
//! All closed forms are written with the angle `omega_s t`, which keeps them
//! finite where `tan` blows up.

use num_complex::Complex64;

use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::moebius::one_cycle;
use crate::ode::{integrate, Tolerance};
use crate::quantum::{origin_phase, q_sequence};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumParams {
    pub kappa: f64,
    pub mass: f64,
    pub hbar: f64,
    /// `sqrt(kappa / m)`.
    pub omega_s: f64,
    /// Initial width of the real starting packet.
    pub l0: f64,
    /// `hbar / (m l0^2)`.
    pub omega: f64,
    /// `omega / omega_s`.
    pub r: f64,
}

impl ContinuumParams {
    pub fn new(kappa: f64, mass: f64, hbar: f64, l0: f64) -> Result<Self> {
        ensure_positive("kappa", kappa)?;
        ensure_positive("mass", mass)?;
        ensure_positive("hbar", hbar)?;
        ensure_positive("l0", l0)?;
        let omega_s = (kappa / mass).sqrt();
        let omega = hbar / (mass * l0 * l0);
        Ok(Self {
            kappa,
            mass,
            hbar,
            omega_s,
            l0,
            omega,
            r: omega / omega_s,
        })
    }

    /// `hbar = m = kappa = 1` with the width chosen to give ratio `r`.
    pub fn with_ratio(r: f64) -> Result<Self> {
        ensure_positive("r", r)?;
        Self::new(1.0, 1.0, 1.0, 1.0 / r.sqrt())
    }

    /// Shape of the real initial packet, `v0 = omega`.
    pub fn initial_v(&self) -> Complex64 {
        Complex64::new(self.omega, 0.0)
    }

    pub fn period(&self) -> f64 {
        std::f64::consts::PI / self.omega_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumState {
    pub t: f64,
    pub v: Complex64,
}

fn check_start(v0: Complex64, t: f64) -> Result<()> {
    ensure_finite("t", t)?;
    if t < 0.0 {
        return Err(Error::Domain(format!("t must be non-negative, got {t}")));
    }
    if !(v0.re > 0.0 && v0.im.is_finite() && v0.re.is_finite()) {
        return Err(Error::NonNormalizable(format!("v0 = {v0}")));
    }
    Ok(())
}

/// Closed form: with `u = v / omega_s` and `s = omega_s t`,
/// `u(t) = (u0 cos s + i sin s) / (cos s + i u0 sin s)`.
pub fn evolve_v(params: &ContinuumParams, v0: Complex64, t: f64) -> Result<Complex64> {
    check_start(v0, t)?;
    let u0 = v0 / params.omega_s;
    let (sn, cs) = (params.omega_s * t).sin_cos();
    let u = (u0 * cs + I * sn) / (Complex64::new(cs, 0.0) + I * u0 * sn);
    Ok(u * params.omega_s)
}

/// Same evolution by adaptive Runge–Kutta integration.
pub fn integrate_v(params: &ContinuumParams, v0: Complex64, t: f64, tol: Tolerance) -> Result<Complex64> {
    check_start(v0, t)?;
    let w2 = params.omega_s * params.omega_s;
    let sol = integrate(
        |_, y, dy| {
            let (a, b) = (y[0], y[1]);
            dy[0] = 2.0 * a * b;
            dy[1] = w2 - a * a + b * b;
        },
        0.0,
        &[v0.re, v0.im],
        t,
        tol,
    )?;
    Ok(Complex64::new(sol.y[0], sol.y[1]))
}

/// `sqrt(hbar / (m Re v))`.
pub fn width_of_state(params: &ContinuumParams, v: Complex64) -> f64 {
    (params.hbar / (params.mass * v.re)).sqrt()
}

/// `l0 sqrt((1 + r^2 T^2) / (1 + T^2))` with `T = tan(angle)`, evaluated
/// as `l0 sqrt(cos^2 + r^2 sin^2)`.
pub fn width_with_angle(params: &ContinuumParams, angle: f64) -> f64 {
    let (sn, cs) = angle.sin_cos();
    params.l0 * (cs * cs + params.r * params.r * sn * sn).sqrt()
}

/// Width of the packet that starts real with width `l0`.
pub fn width_t(params: &ContinuumParams, t: f64) -> f64 {
    width_with_angle(params, params.omega_s * t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energies {
    pub kinetic: f64,
    pub potential: f64,
    pub total: f64,
}

/// `E_kin = hbar |v|^2 / (4 Re v)`, `E_pot = kappa hbar / (4 m Re v)`.
pub fn energies_of_state(params: &ContinuumParams, v: Complex64) -> Energies {
    let kinetic = params.hbar * v.norm_sqr() / (4.0 * v.re);
    let potential = params.kappa * params.hbar / (4.0 * params.mass * v.re);
    Energies {
        kinetic,
        potential,
        total: kinetic + potential,
    }
}

pub fn energies(params: &ContinuumParams, t: f64) -> Result<Energies> {
    Ok(energies_of_state(params, evolve_v(params, params.initial_v(), t)?))
}

/// `(hbar omega_s / 4)(r + 1/r)`.
pub fn total_energy(params: &ContinuumParams) -> f64 {
    0.25 * params.hbar * params.omega_s * (params.r + 1.0 / params.r)
}

/// `(hbar omega_s / 4)(r^2 + 1/r^2)`, kept for comparison against
/// [`total_energy`]; the two agree only at `r = 1`.
pub fn total_energy_squared_form(params: &ContinuumParams) -> f64 {
    let r2 = params.r * params.r;
    0.25 * params.hbar * params.omega_s * (r2 + 1.0 / r2)
}

/// Pulsed evolution over `[0, t]` with `steps` pulses of strength
/// `lambda = kappa tau`: `1/v' = 1/(v + i lambda/m) + i tau`.
pub fn discrete_v(params: &ContinuumParams, v0: Complex64, t: f64, steps: usize) -> Result<Complex64> {
    check_start(v0, t)?;
    if steps == 0 {
        return Err(Error::Domain("steps must be positive".into()));
    }
    let tau = t / steps as f64;
    let kick = params.kappa * tau / params.mass;
    let mut v = v0;
    for _ in 0..steps {
        v = ((v + I * kick).inv() + I * tau).inv();
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Convergence {
    pub steps: Vec<usize>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log error` against `log tau`.
    pub order: f64,
}

/// Error of [`discrete_v`] against [`evolve_v`] for each pulse count.
pub fn discrete_convergence(
    params: &ContinuumParams,
    v0: Complex64,
    t: f64,
    steps: &[usize],
) -> Result<Convergence> {
    let exact = evolve_v(params, v0, t)?;
    let errors = steps
        .iter()
        .map(|&n| discrete_v(params, v0, t, n).map(|v| (v - exact).norm()))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = steps.iter().map(|&n| (t / n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    Ok(Convergence {
        steps: steps.to_vec(),
        order: fit_slope(&xs, &ys),
        errors,
    })
}

pub(crate) fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Phase of `psi(0, t)` accumulated by the stationary pulsed packet,
/// compared with the static oscillator ground state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseReport {
    pub t: f64,
    pub pulses: usize,
    /// Unwrapped phase of the pulsed 1-cycle packet at the origin.
    pub pulsed: f64,
    /// `-omega_s t / 2`.
    pub static_reference: f64,
}

impl PhaseReport {
    /// Returns `(|pulsed - static|, |pulsed|)`.
    pub fn deviations(&self) -> (f64, f64) {
        ((self.pulsed - self.static_reference).abs(), self.pulsed.abs())
    }
}

/// Runs the pulsed problem at its 1-cycle (the discrete counterpart of
/// `v = omega_s`) for `pulses` periods spanning `[0, t]`.
pub fn fixed_point_phase(params: &ContinuumParams, t: f64, pulses: usize) -> Result<PhaseReport> {
    ensure_positive("t", t)?;
    if pulses == 0 {
        return Err(Error::Domain("pulses must be positive".into()));
    }
    let tau = t / pulses as f64;
    let xi = params.kappa * tau * tau / params.mass;
    let cycle = one_cycle(xi)?;
    if !cycle.normalizable {
        return Err(Error::NonNormalizable(format!("1-cycle at xi = {xi}")));
    }
    let pairs = q_sequence(cycle.eta, xi, pulses)?;
    let pulsed = origin_phase(&pairs[pulses - 1], 1.0);
    Ok(PhaseReport {
        t,
        pulses,
        pulsed,
        static_reference: -0.5 * params.omega_s * t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn params_invariants() {
        let p = ContinuumParams::new(4.0, 2.0, 1.5, 0.7).unwrap();
        assert!(rel(p.omega_s * p.omega_s * p.mass, p.kappa) < 1e-15);
        assert!(rel(p.r, p.omega / p.omega_s) < 1e-15);
        assert!(ContinuumParams::new(-1.0, 1.0, 1.0, 1.0).is_err());
        let q = ContinuumParams::with_ratio(2.0).unwrap();
        assert!(rel(q.r, 2.0) < 1e-15);
    }

    #[test]
    fn fixed_point_is_stationary() {
        let p = ContinuumParams::new(2.0, 0.5, 1.0, 1.0).unwrap();
        let w = Complex64::new(p.omega_s, 0.0);
        for k in 0..=400 {
            let t = 100.0 * p.period() * k as f64 / 400.0 + 0.013;
            let v = evolve_v(&p, w, t).unwrap();
            assert!((v - w).norm() <= 1e-12 * p.omega_s);
        }
    }

    #[test]
    fn tuned_width_stays_constant() {
        let p = ContinuumParams::with_ratio(1.0).unwrap();
        for k in 0..50 {
            let t = 0.37 * k as f64;
            assert!(rel(width_t(&p, t), p.l0) < 1e-15);
        }
    }

    #[test]
    fn width_examples() {
        let p = ContinuumParams::with_ratio(2.0).unwrap();
        assert_eq!(width_t(&p, 0.0), p.l0);
        let quarter = FRAC_PI_2 / p.omega_s;
        assert!(rel(width_t(&p, quarter), p.l0 * 2.0) < 1e-15);
        let v = integrate_v(&p, p.initial_v(), quarter, Tolerance::default()).unwrap();
        assert!(rel(width_of_state(&p, v), p.l0 * 2.0) < 1e-8);
        // period pi / omega_s
        for k in 0..20 {
            let t = 0.11 * k as f64;
            assert!((width_t(&p, t + p.period()) - width_t(&p, t)).abs() < 1e-12);
        }
    }

    #[test]
    fn width_matches_state() {
        for r in [0.3, 1.0, 2.0, 5.0] {
            let p = ContinuumParams::with_ratio(r).unwrap();
            for k in 0..60 {
                let t = 0.05 * k as f64;
                let v = evolve_v(&p, p.initial_v(), t).unwrap();
                let w = width_t(&p, t);
                assert!(rel(width_of_state(&p, v), w) < 1e-12);
                let (lo, hi) = (p.l0.min(p.l0 * r), p.l0.max(p.l0 * r));
                assert!(w >= lo * (1.0 - 1e-15) && w <= hi * (1.0 + 1e-15));
            }
        }
    }

    #[test]
    fn integrator_agrees_with_closed_form() {
        let p = ContinuumParams::new(3.0, 1.2, 0.8, 0.9).unwrap();
        let v0 = Complex64::new(1.1, -0.4);
        for t in [0.1, 1.0, 2.5, 7.0] {
            let a = evolve_v(&p, v0, t).unwrap();
            let b = integrate_v(&p, v0, t, Tolerance::default()).unwrap();
            assert!((a - b).norm() <= 1e-8 * a.norm(), "t {t}: {a} vs {b}");
        }
    }

    #[test]
    fn energy_examples() {
        let p = ContinuumParams::with_ratio(2.0).unwrap();
        let e = energies(&p, 0.0).unwrap();
        assert!(rel(e.kinetic, p.hbar * p.omega / 4.0) < 1e-15);
        assert!(rel(e.potential, p.hbar * p.omega / (4.0 * p.r * p.r)) < 1e-15);
        assert!(rel(total_energy(&p), 0.625 * p.hbar * p.omega_s) < 1e-15);
        let e0 = e.total;
        for k in 0..=500 {
            let t = p.period() * k as f64 / 500.0;
            let e = energies(&p, t).unwrap();
            assert!(rel(e.total, e0) <= 1e-10);
            assert!(rel(e.total, total_energy(&p)) <= 1e-10);
        }
        let g = ContinuumParams::with_ratio(1.0).unwrap();
        assert!(rel(total_energy(&g), 0.5 * g.hbar * g.omega_s) < 1e-15);
        assert!(rel(total_energy_squared_form(&g), total_energy(&g)) < 1e-15);
        assert!(rel(total_energy_squared_form(&p), total_energy(&p)) > 0.1);
    }

    #[test]
    fn tangent_forms_of_energies() {
        let p = ContinuumParams::with_ratio(0.6).unwrap();
        for t in [0.2, 0.9, 1.3] {
            let tt = (p.omega_s * t).tan();
            let e = energies(&p, t).unwrap();
            let r2 = p.r * p.r;
            let kin = p.hbar * p.omega / 4.0 * (1.0 + tt * tt / r2) / (1.0 + tt * tt);
            let pot = p.hbar * p.omega / (4.0 * r2) * (1.0 + r2 * tt * tt) / (1.0 + tt * tt);
            assert!(rel(e.kinetic, kin) < 1e-12);
            assert!(rel(e.potential, pot) < 1e-12);
        }
    }

    #[test]
    fn discrete_map_converges_at_first_order() {
        let p = ContinuumParams::with_ratio(2.0).unwrap();
        let c = discrete_convergence(&p, p.initial_v(), 2.0, &[100, 1000, 10_000]).unwrap();
        assert!((c.order - 1.0).abs() < 0.05, "{c:?}");
        assert!(c.errors.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn pulsed_phase_follows_static_oscillator() {
        let p = ContinuumParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let t = 3.0 * PI;
        let mut last = f64::INFINITY;
        for n in [100, 1000, 10_000] {
            let report = fixed_point_phase(&p, t, n).unwrap();
            let (to_static, to_zero) = report.deviations();
            assert!(to_static < last);
            assert!(to_zero > 1.0);
            last = to_static;
        }
        assert!(last < 1e-4);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = ContinuumParams::with_ratio(1.0).unwrap();
        assert!(evolve_v(&p, Complex64::new(-1.0, 0.0), 1.0).is_err());
        assert!(evolve_v(&p, p.initial_v(), -1.0).is_err());
        assert!(discrete_v(&p, p.initial_v(), 1.0, 0).is_err());
    }
}
