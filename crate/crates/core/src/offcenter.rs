//! Off-center packets `psi_n ~ exp(-sigma_n y^2 / 2 + d_n y)`, `y = x / b`.
//!
//! The linear coefficient does not feed back into `sigma_n`; it follows
//! `d_n = (-i)^n d0 / q_n`, and the first moments obey the classical map
//! exactly.

use num_complex::Complex64;

use crate::classical::{orbit as classical_orbit, ClassicalState};
use crate::error::{Error, Result};
use crate::moebius::{sigma_orbit, PacketShape};
use crate::quantum::{check_eta, mean_energy, DeterminantPair, InitialPacket, QuantumParams};
use crate::recurrence::{i_pow, neg_i_pow};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const RESIDUE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetAmplitude {
    pub d_n: Complex64,
    pub n: usize,
    pub d0: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationPair {
    pub x_bar: f64,
    pub p_bar: f64,
    pub n: usize,
}

/// `d_n = (-i)^n d0 / q_n` along a determinant orbit.
pub fn d_sequence(d0: Complex64, orbit: &[DeterminantPair]) -> Vec<OffsetAmplitude> {
    orbit
        .iter()
        .map(|p| OffsetAmplitude {
            d_n: neg_i_pow(p.n) * d0 / p.q_n,
            n: p.n,
            d0,
        })
        .collect()
}

/// Same orbit by stepping: `d_1 = d0 sigma_1 / eta`,
/// `d_{n+1} = d_n sigma_{n+1} / (sigma_n + i xi)`.
pub fn d_stepwise(d0: Complex64, eta: Complex64, xi: f64, count: usize) -> Result<Vec<OffsetAmplitude>> {
    check_eta(eta)?;
    let sigmas = sigma_orbit(eta, xi, count)?;
    let mut out: Vec<OffsetAmplitude> = Vec::with_capacity(count);
    let mut prev_sigma = eta;
    let mut d = d0;
    for (k, s) in sigmas.iter().enumerate() {
        let kicked = if k == 0 { prev_sigma } else { prev_sigma + I * xi };
        d = d * s.sigma / kicked;
        out.push(OffsetAmplitude { d_n: d, n: s.n, d0 });
        prev_sigma = s.sigma;
    }
    Ok(out)
}

fn real_part(name: &str, n: usize, z: Complex64, scale: f64) -> Result<f64> {
    if z.im.abs() > RESIDUE_TOLERANCE * scale.max(1.0) {
        return Err(Error::ContractViolation(format!(
            "{name} at n = {n} has imaginary residue {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// Moments written directly in `q_n`, `q_{n-1}` and `d0`.
pub fn expectations(
    pair: &DeterminantPair,
    offset: &OffsetAmplitude,
    packet: &InitialPacket,
    params: &QuantumParams,
) -> Result<ExpectationPair> {
    let n = pair.n;
    let d0 = offset.d0;
    let er = packet.eta.re;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let a = pair.q_n * d0.conj();
    let b_ = pair.q_n.conj() * d0 * sign;
    let c = I * pair.q_prev * d0.conj();
    let d = -I * pair.q_prev.conj() * d0 * sign;
    let x = i_pow(n) * params.b / (2.0 * er) * (a + b_);
    let p = i_pow(n) * params.hbar / (2.0 * params.b * er) * (a + b_ + c + d);
    let x_scale = params.b / er * pair.q_n.norm() * d0.norm();
    let p_scale = params.hbar / (params.b * er) * (pair.q_n.norm() + pair.q_prev.norm()) * d0.norm();
    Ok(ExpectationPair {
        x_bar: real_part("x_bar", n, x, x_scale)?,
        p_bar: real_part("p_bar", n, p, p_scale)?,
        n,
    })
}

/// Moments from the Gaussian parameters:
/// `x = b (d + d*) / (sigma + sigma*)`, `p = -(i hbar / b) (sigma* d - sigma d*) / (sigma + sigma*)`.
pub fn expectations_from_shape(
    shape: &PacketShape,
    d: Complex64,
    params: &QuantumParams,
) -> ExpectationPair {
    let s = shape.sigma;
    let denom = 2.0 * s.re;
    let x = params.b * 2.0 * d.re / denom;
    let cross = s.conj() * d - s * d.conj();
    let p = (-I * params.hbar / params.b * cross).re / denom;
    ExpectationPair {
        x_bar: x,
        p_bar: p,
        n: shape.n,
    }
}

/// Initial amplitude `d0` for a packet with inverse variance `eta` centered
/// at `x_bar` with mean momentum `p_bar` at `t = 0`.
pub fn d0_from_expectations(
    x_bar: f64,
    p_bar: f64,
    eta: Complex64,
    params: &QuantumParams,
) -> Result<Complex64> {
    check_eta(eta)?;
    let re = eta.re * x_bar / params.b;
    let im = (eta.re * params.b * p_bar / params.hbar + re * eta.im) / eta.re;
    Ok(Complex64::new(re, im))
}

pub fn expectation_orbit(
    orbit: &[DeterminantPair],
    d0: Complex64,
    packet: &InitialPacket,
    params: &QuantumParams,
) -> Result<Vec<ExpectationPair>> {
    orbit
        .iter()
        .zip(d_sequence(d0, orbit))
        .map(|(p, o)| expectations(p, &o, packet, params))
        .collect()
}

/// Largest violation of `x_{n+1} - x_n = (tau/m) p_{n+1}` and
/// `p_{n+1} - p_n = -lambda x_n`, each relative to the orbit's peak
/// magnitude of the corresponding quantity.
pub fn ehrenfest_residual(orbit: &[ExpectationPair], params: &QuantumParams) -> f64 {
    let x_scale = orbit.iter().map(|e| e.x_bar.abs()).fold(0.0, f64::max);
    let p_scale = orbit.iter().map(|e| e.p_bar.abs()).fold(0.0, f64::max);
    let lever = params.period / params.mass;
    let x_scale = x_scale.max(lever * p_scale);
    let p_scale = p_scale.max(params.strength.abs() * x_scale);
    if x_scale == 0.0 && p_scale == 0.0 {
        return 0.0;
    }
    orbit
        .windows(2)
        .map(|w| {
            let rx = (w[1].x_bar - w[0].x_bar - lever * w[1].p_bar).abs() / x_scale;
            let rp = (w[1].p_bar - w[0].p_bar + params.strength * w[0].x_bar).abs() / p_scale;
            rx.max(rp)
        })
        .fold(0.0, f64::max)
}

/// Largest relative deviation between the expectation orbit and the
/// classical map launched from its first point.
pub fn classical_deviation(orbit: &[ExpectationPair], params: &QuantumParams) -> f64 {
    let Some(first) = orbit.first() else {
        return 0.0;
    };
    let lever = params.period / params.mass;
    let start = ClassicalState::new(first.n, first.x_bar, lever * first.p_bar);
    let shadow = classical_orbit(start, params.xi, orbit.len() - 1);
    let x_scale = orbit.iter().map(|e| e.x_bar.abs()).fold(0.0, f64::max);
    let rho_scale = orbit.iter().map(|e| (lever * e.p_bar).abs()).fold(0.0, f64::max);
    let scale = x_scale.max(rho_scale);
    if scale == 0.0 {
        return 0.0;
    }
    orbit
        .iter()
        .zip(&shadow)
        .map(|(e, c)| {
            let dx = (e.x_bar - c.x).abs();
            let dr = (lever * e.p_bar - c.rho).abs();
            dx.max(dr) / scale
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySplit {
    /// Energy of the centered packet.
    pub quantum: f64,
    /// `p_bar^2 / 2m`.
    pub classical: f64,
    pub total: f64,
}

pub fn energy_split(
    pair: &DeterminantPair,
    offset: &OffsetAmplitude,
    packet: &InitialPacket,
    params: &QuantumParams,
) -> Result<EnergySplit> {
    let quantum = mean_energy(pair, packet, params);
    let e = expectations(pair, offset, packet, params)?;
    let classical = e.p_bar * e.p_bar / (2.0 * params.mass);
    Ok(EnergySplit {
        quantum,
        classical,
        total: quantum + classical,
    })
}

/// `(hbar / 2 tau) [|sigma|^2 / (sigma + sigma*) - (sigma* d - sigma d*)^2 / (sigma + sigma*)^2]`.
pub fn energy_direct(shape: &PacketShape, d: Complex64, params: &QuantumParams) -> f64 {
    let s = shape.sigma;
    let two_re = 2.0 * s.re;
    let cross = s.conj() * d - s * d.conj();
    let bracket = s.norm_sqr() / two_re - (cross * cross).re / (two_re * two_re);
    params.hbar / (2.0 * params.period) * bracket
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::{linearize, one_cycle};
    use crate::quantum::q_sequence;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn setup(eta: Complex64, xi: f64, count: usize) -> (QuantumParams, InitialPacket, Vec<DeterminantPair>) {
        let params = QuantumParams::unit(xi);
        let pk = InitialPacket::new(eta, &params).unwrap();
        let orbit = q_sequence(eta, xi, count).unwrap();
        (params, pk, orbit)
    }

    #[test]
    fn centered_stays_centered() {
        let (params, pk, orbit) = setup(c(1.0, 0.3), 1.2, 50);
        for (p, o) in orbit.iter().zip(d_sequence(c(0.0, 0.0), &orbit)) {
            assert_eq!(o.d_n, c(0.0, 0.0));
            let e = expectations(p, &o, &pk, &params).unwrap();
            assert_eq!((e.x_bar, e.p_bar), (0.0, 0.0));
            let s = energy_split(p, &o, &pk, &params).unwrap();
            assert_eq!(s.classical, 0.0);
            assert_eq!(s.total, mean_energy(p, &pk, &params));
        }
        let exps = expectation_orbit(&orbit, c(0.0, 0.0), &pk, &params).unwrap();
        assert_eq!(ehrenfest_residual(&exps, &params), 0.0);
    }

    #[test]
    fn one_cycle_amplitude_rotates() {
        let oc = one_cycle(2.0).unwrap();
        let (_, _, orbit) = setup(oc.eta, 2.0, 40);
        let d0 = c(0.6, -0.2);
        for o in d_sequence(d0, &orbit) {
            assert!((o.d_n - neg_i_pow(o.n) * d0).norm() < 1e-15);
        }
    }

    #[test]
    fn closed_form_matches_stepwise() {
        let eta = c(1.0, 0.0);
        let d0 = c(0.3, 0.1);
        let (_, _, orbit) = setup(eta, 1.0, 300);
        let closed = d_sequence(d0, &orbit);
        let stepped = d_stepwise(d0, eta, 1.0, 300).unwrap();
        for (a, b) in closed.iter().zip(&stepped) {
            assert_eq!(a.n, b.n);
            assert!((a.d_n - b.d_n).norm() < 1e-9);
        }
    }

    #[test]
    fn amplitude_bridge() {
        let (_, _, orbit) = setup(c(0.5, -0.7), 2.9, 200);
        let ds = d_sequence(c(1.0, 0.5), &orbit);
        for k in 0..ds.len() - 1 {
            let lhs = ds[k + 1].d_n * orbit[k + 1].q_n;
            let rhs = -I * ds[k].d_n * orbit[k].q_n;
            assert!((lhs - rhs).norm() < 1e-9);
        }
    }

    #[test]
    fn both_moment_forms_agree() {
        for xi in [0.0, 0.8, 2.0, 3.5, 4.0] {
            let params = QuantumParams::new(1.3, 0.7, 0.4, xi * 0.7 / 0.4).unwrap();
            let pk = InitialPacket::new(c(0.9, -0.4), &params).unwrap();
            let orbit = q_sequence(pk.eta, params.xi, 200).unwrap();
            let d0 = c(0.4, 1.1);
            for (p, o) in orbit.iter().zip(d_sequence(d0, &orbit)) {
                let a = expectations(p, &o, &pk, &params).unwrap();
                let b = expectations_from_shape(&linearize(p), o.d_n, &params);
                let sx = a.x_bar.abs().max(1.0);
                let sp = a.p_bar.abs().max(1.0);
                assert!((a.x_bar - b.x_bar).abs() < 1e-9 * sx, "xi {xi} n {}", p.n);
                assert!((a.p_bar - b.p_bar).abs() < 1e-9 * sp, "xi {xi} n {}", p.n);
            }
        }
    }

    #[test]
    fn first_step_matches_quadrature() {
        let params = QuantumParams::new(1.0, 1.0, 0.5, 1.0).unwrap();
        let pk = InitialPacket::new(c(0.8, 0.3), &params).unwrap();
        let orbit = q_sequence(pk.eta, params.xi, 1).unwrap();
        let o = d_sequence(c(0.5, -0.4), &orbit)[0];
        let e = expectations(&orbit[0], &o, &pk, &params).unwrap();
        let s = linearize(&orbit[0]).sigma;
        let psi = |x: f64| {
            let y = x / params.b;
            (-s * y * y / 2.0 + o.d_n * y).exp()
        };
        let (lo, hi, m) = (-25.0, 25.0, 40_000);
        let h = (hi - lo) / m as f64;
        let (mut norm, mut xm, mut pm) = (0.0, 0.0, 0.0);
        for k in 1..m {
            let x = lo + h * k as f64;
            let v = psi(x);
            let dv = (psi(x + h) - psi(x - h)) / (2.0 * h);
            norm += v.norm_sqr();
            xm += x * v.norm_sqr();
            pm += (v.conj() * (-I * params.hbar) * dv).re;
        }
        assert!((xm / norm - e.x_bar).abs() < 1e-6);
        assert!((pm / norm - e.p_bar).abs() < 1e-6);
    }

    #[test]
    fn inherits_classical_three_cycle() {
        let (params, pk, orbit) = setup(c(1.0, -0.5), 3.0, 60);
        let exps = expectation_orbit(&orbit, c(0.7, 0.2), &pk, &params).unwrap();
        for k in 0..exps.len() - 3 {
            assert!((exps[k + 3].x_bar - exps[k].x_bar).abs() < 1e-10);
            assert!((exps[k + 3].p_bar - exps[k].p_bar).abs() < 1e-10);
        }
    }

    #[test]
    fn ehrenfest_examples() {
        let (params, pk, orbit) = setup(c(1.0, -0.5), 1.7, 500);
        let exps = expectation_orbit(&orbit, c(1.0, 0.0), &pk, &params).unwrap();
        assert!(ehrenfest_residual(&exps, &params) <= 1e-9);
        assert!(classical_deviation(&exps, &params) <= 1e-9);

        let (params, pk, orbit) = setup(c(1.0, -0.5), 3.9, 500);
        let exps = expectation_orbit(&orbit, c(1.0, 0.0), &pk, &params).unwrap();
        assert!(ehrenfest_residual(&exps, &params) <= 1e-8);
    }

    #[test]
    fn split_on_one_cycle() {
        let oc = one_cycle(2.0).unwrap();
        let (params, pk, orbit) = setup(oc.eta, 2.0, 20);
        let exps = expectation_orbit(&orbit, c(1.0, 0.0), &pk, &params).unwrap();
        let ds = d_sequence(c(1.0, 0.0), &orbit);
        for ((p, o), e) in orbit.iter().zip(&ds).zip(&exps) {
            let s = energy_split(p, o, &pk, &params).unwrap();
            assert!((s.quantum - 0.5).abs() < 1e-14);
            assert!((s.classical - 0.5 * e.p_bar * e.p_bar).abs() < 1e-14);
            let direct = energy_direct(&linearize(p), o.d_n, &params);
            assert!((s.total - direct).abs() < 1e-12 * s.total);
        }
        // classical xi = 2: period-4 state orbit
        for k in 0..exps.len() - 4 {
            assert!((exps[k + 4].p_bar - exps[k].p_bar).abs() < 1e-12);
        }
    }

    #[test]
    fn converter_round_trips_at_origin() {
        let params = QuantumParams::new(1.5, 2.0, 0.3, 5.0).unwrap();
        let eta = c(0.7, -0.9);
        let d0 = d0_from_expectations(1.25, -0.4, eta, &params).unwrap();
        let e = expectations_from_shape(&PacketShape { sigma: eta, n: 0 }, d0, &params);
        assert!((e.x_bar - 1.25).abs() < 1e-14);
        assert!((e.p_bar + 0.4).abs() < 1e-14);
        assert!(d0_from_expectations(1.0, 0.0, c(0.0, 1.0), &params).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn expectation_orbit_shadows_classical_map(
                er in 0.1f64..3.0, ei in -2.0f64..2.0, xi in 0.0f64..=4.0,
                dr in -2.0f64..2.0, di in -2.0f64..2.0,
            ) {
                let (params, pk, orbit) = setup(c(er, ei), xi, 1000);
                let exps = expectation_orbit(&orbit, c(dr, di), &pk, &params).unwrap();
                prop_assert!(classical_deviation(&exps, &params) <= 1e-9);
            }

            #[test]
            fn split_is_additive_and_matches_direct_form(
                er in 0.1f64..3.0, ei in -2.0f64..2.0, xi in 0.0f64..=4.0,
                dr in -2.0f64..2.0, di in -2.0f64..2.0, n in 1usize..300,
            ) {
                let (params, pk, orbit) = setup(c(er, ei), xi, n);
                let o = d_sequence(c(dr, di), &orbit)[n - 1];
                let s = energy_split(&orbit[n - 1], &o, &pk, &params).unwrap();
                prop_assert!((s.total - s.quantum - s.classical).abs() <= 1e-12 * s.total);
                let direct = energy_direct(&linearize(&orbit[n - 1]), o.d_n, &params);
                prop_assert!((s.total - direct).abs() <= 1e-9 * s.total);
            }
        }
    }
}
