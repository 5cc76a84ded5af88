use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{edge_ratio, GridSpec, LEAK_THRESHOLD};
use crate::error::{Error, Result};
use crate::quantum::{check_eta, InitialPacket, QuantumParams};

/// Grid wave function in `y = x / b`, alternating the pulse phase
/// `exp(-i xi y^2 / 2)` with exact free flight `exp(-i k^2 / 2)` per period.
pub struct SplitStep {
    grid: GridSpec,
    params: QuantumParams,
    y: Vec<f64>,
    k: Vec<f64>,
    psi: Vec<Complex64>,
    n: usize,
    origin_phase: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitStepSample {
    pub n: usize,
    pub norm: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    /// `sqrt(2 var(x))`, matching the `exp(-x^2 / gamma^2)` convention.
    pub width: f64,
    /// `<p^2> / 2m`.
    pub energy: f64,
    /// Unwrapped phase of `psi(0)`.
    pub origin_phase: f64,
}

impl SplitStep {
    /// Starts from `exp(-eta y^2 / 2 + d0 y)`, normalized with a positive
    /// real constant.
    pub fn new(eta: Complex64, d0: Complex64, params: &QuantumParams, grid: GridSpec) -> Result<Self> {
        grid.validate()?;
        check_eta(eta)?;
        let y = grid.coordinates();
        let m = grid.points;
        let dk = TAU / (m as f64 * grid.spacing());
        let k = (0..m)
            .map(|j| if j < m / 2 { j as f64 } else { j as f64 - m as f64 } * dk)
            .collect();
        let psi: Vec<Complex64> = y.iter().map(|&v| (-eta * v * v / 2.0 + d0 * v).exp()).collect();
        let mut planner = FftPlanner::new();
        let mut s = Self {
            grid,
            params: *params,
            y,
            k,
            psi,
            n: 0,
            origin_phase: 0.0,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        };
        let norm = s.norm();
        for v in &mut s.psi {
            *v /= norm.sqrt();
        }
        s.check_leak()?;
        s.origin_phase = s.psi[m / 2].arg();
        Ok(s)
    }

    pub fn index(&self) -> usize {
        self.n
    }

    pub fn coordinates(&self) -> &[f64] {
        &self.y
    }

    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }

    fn free(&mut self, frac: f64) {
        let m = self.psi.len() as f64;
        let sub = frac / self.grid.dt_substeps as f64;
        for _ in 0..self.grid.dt_substeps {
            self.forward.process(&mut self.psi);
            for (v, &k) in self.psi.iter_mut().zip(&self.k) {
                *v *= Complex64::from_polar(1.0 / m, -0.5 * k * k * sub);
            }
            self.inverse.process(&mut self.psi);
        }
    }

    fn pulse(&mut self) {
        let xi = self.params.xi;
        for (v, &y) in self.psi.iter_mut().zip(&self.y) {
            *v *= Complex64::from_polar(1.0, -0.5 * xi * y * y);
        }
    }

    fn spectrum(&self) -> Vec<Complex64> {
        let mut buf = self.psi.clone();
        self.forward.process(&mut buf);
        buf
    }

    fn check_leak(&self) -> Result<()> {
        let density: Vec<f64> = self.psi.iter().map(|v| v.norm_sqr()).collect();
        let ratio = edge_ratio(&density);
        let spectrum: Vec<f64> = {
            // reorder so the highest |k| sit at both ends
            let s = self.spectrum();
            let half = s.len() / 2;
            s[half..].iter().chain(&s[..half]).map(|v| v.norm_sqr()).collect()
        };
        let k_ratio = edge_ratio(&spectrum);
        if ratio > LEAK_THRESHOLD || k_ratio > LEAK_THRESHOLD {
            return Err(Error::GridLeak {
                step: self.n,
                ratio: ratio.max(k_ratio),
                suggested_half_width: 2.0 * self.grid.half_width,
            });
        }
        Ok(())
    }

    /// Moves from `psi_n` to `psi_{n+1}` (the first call is free flight only).
    pub fn advance(&mut self) -> Result<()> {
        let before = self.psi[self.psi.len() / 2];
        if self.n > 0 {
            self.pulse();
        }
        self.free(1.0);
        self.n += 1;
        self.check_leak()?;
        let after = self.psi[self.psi.len() / 2];
        // one period turns psi(0) by less than pi
        self.origin_phase += (after / before).arg();
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        self.psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    pub fn sample(&self) -> SplitStepSample {
        let h = self.grid.spacing();
        let density: Vec<f64> = self.psi.iter().map(|v| v.norm_sqr()).collect();
        let norm: f64 = density.iter().sum::<f64>() * h;
        let mean_y = density.iter().zip(&self.y).map(|(p, y)| p * y).sum::<f64>() * h / norm;
        let var_y = density
            .iter()
            .zip(&self.y)
            .map(|(p, y)| p * (y - mean_y).powi(2))
            .sum::<f64>()
            * h
            / norm;
        let spectrum = self.spectrum();
        let weight: f64 = spectrum.iter().map(|v| v.norm_sqr()).sum();
        let (mut k1, mut k2) = (0.0, 0.0);
        for (v, &k) in spectrum.iter().zip(&self.k) {
            let w = v.norm_sqr();
            k1 += w * k;
            k2 += w * k * k;
        }
        k1 /= weight;
        k2 /= weight;
        let b = self.params.b;
        SplitStepSample {
            n: self.n,
            norm,
            mean_x: b * mean_y,
            mean_p: self.params.hbar / b * k1,
            width: b * (2.0 * var_y).sqrt(),
            energy: self.params.hbar / (2.0 * self.params.period) * k2,
            origin_phase: self.origin_phase,
        }
    }

    /// Density `|psi|^2` per unit `x`, on the grid.
    pub fn density(&self) -> Vec<f64> {
        let b = self.params.b;
        self.psi.iter().map(|v| v.norm_sqr() / b).collect()
    }

    /// Peak of `|psi|^2` per unit `x`.
    pub fn peak_density(&self) -> f64 {
        self.density().into_iter().fold(0.0, f64::max)
    }
}

/// Runs `n_pulses` periods and samples `psi_1..=psi_n`.
pub fn split_step_propagate(
    packet: &InitialPacket,
    params: &QuantumParams,
    d0: Complex64,
    n_pulses: usize,
    grid: GridSpec,
) -> Result<Vec<SplitStepSample>> {
    let mut s = SplitStep::new(packet.eta, d0, params, grid)?;
    let mut out = Vec::with_capacity(n_pulses);
    for _ in 0..n_pulses {
        s.advance()?;
        out.push(s.sample());
    }
    Ok(out)
}

/// `1 / (gamma sqrt(pi))`.
pub(crate) fn gaussian_peak(gamma: f64) -> f64 {
    1.0 / (gamma * PI.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::one_cycle;
    use crate::offcenter::{d_sequence, energy_split, expectation_orbit};
    use crate::quantum::{mean_energy, origin_phase, q_sequence, width};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn run(eta: Complex64, d0: Complex64, xi: f64, n: usize) -> (InitialPacket, QuantumParams, Vec<SplitStepSample>) {
        let params = QuantumParams::unit(xi);
        let pk = InitialPacket::new(eta, &params).unwrap();
        let samples = split_step_propagate(&pk, &params, d0, n, GridSpec::default()).unwrap();
        (pk, params, samples)
    }

    #[test]
    fn norm_is_conserved() {
        let (_, _, samples) = run(c(1.0, -0.5), c(0.5, 0.2), 1.3, 20);
        let mut last = 1.0;
        for s in samples {
            assert!((s.norm - last).abs() < 1e-10);
            last = s.norm;
        }
    }

    #[test]
    fn free_spreading() {
        let eta = c(1.0, 0.0);
        let (pk, _, samples) = run(eta, c(0.0, 0.0), 0.0, 5);
        for s in samples {
            let n = s.n as f64;
            let want = pk.gamma0 * (1.0 + n * n).sqrt();
            assert!((s.width - want).abs() < 1e-6 * want, "{} vs {want}", s.width);
        }
    }

    #[test]
    fn one_cycle_width_is_constant() {
        let oc = one_cycle(1.1).unwrap();
        let (pk, _, samples) = run(oc.eta, c(0.0, 0.0), 1.1, 10);
        for s in samples {
            assert!((s.width - pk.gamma0).abs() < 1e-6 * pk.gamma0);
        }
    }

    #[test]
    fn widths_and_energies_match_determinants() {
        let (pk, params, samples) = run(c(1.0, -0.5), c(0.0, 0.0), 1.3, 20);
        let pairs = q_sequence(pk.eta, 1.3, 20).unwrap();
        for (s, p) in samples.iter().zip(&pairs) {
            let w = width(p, &pk);
            let e = mean_energy(p, &pk, &params);
            assert!((s.width - w).abs() < 1e-6 * w);
            assert!((s.energy - e).abs() < 1e-6 * e);
            let phase = origin_phase(p, 1.0);
            assert!((s.origin_phase - phase).abs() < 1e-6, "n {} {} vs {phase}", s.n, s.origin_phase);
        }
    }

    #[test]
    fn off_center_moments_and_energy() {
        let d0 = c(1.0, 0.0);
        let (pk, params, samples) = run(c(1.0, -0.5), d0, 1.5, 20);
        let pairs = q_sequence(pk.eta, 1.5, 20).unwrap();
        let exps = expectation_orbit(&pairs, d0, &pk, &params).unwrap();
        let ds = d_sequence(d0, &pairs);
        for (((s, e), p), o) in samples.iter().zip(&exps).zip(&pairs).zip(&ds) {
            assert!((s.mean_x - e.x_bar).abs() < 1e-5);
            assert!((s.mean_p - e.p_bar).abs() < 1e-5);
            let split = energy_split(p, o, &pk, &params).unwrap();
            assert!((s.energy - split.total).abs() < 1e-6 * split.total);
        }
    }

    #[test]
    fn one_cycle_phase_per_pulse() {
        for xi in [0.01, 0.3, 2.0] {
            let oc = one_cycle(xi).unwrap();
            let phi = (1.0 - 0.5 * xi).acos();
            let (_, _, samples) = run(oc.eta, c(0.0, 0.0), xi, 8);
            for s in samples {
                assert!((s.origin_phase + 0.5 * phi * s.n as f64).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn peak_density_matches_width() {
        let params = QuantumParams::unit(0.9);
        let pk = InitialPacket::new(c(0.7, 0.3), &params).unwrap();
        let mut s = SplitStep::new(pk.eta, c(0.0, 0.0), &params, GridSpec::default()).unwrap();
        let pairs = q_sequence(pk.eta, 0.9, 6).unwrap();
        for p in &pairs {
            s.advance().unwrap();
            let want = gaussian_peak(width(p, &pk));
            assert!((s.peak_density() - want).abs() < 1e-8 * want);
        }
    }

    #[test]
    fn pulse_preserves_density() {
        let params = QuantumParams::unit(2.7);
        let mut s = SplitStep::new(c(0.8, 0.4), c(0.3, -0.1), &params, GridSpec::default()).unwrap();
        s.advance().unwrap();
        let before = s.density();
        s.pulse();
        for (a, b) in before.iter().zip(s.density()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn narrow_grid_is_reported() {
        let params = QuantumParams::unit(0.0);
        let grid = GridSpec {
            half_width: 4.0,
            points: 256,
            dt_substeps: 1,
        };
        let pk = InitialPacket::new(c(1.0, 0.0), &params).unwrap();
        match split_step_propagate(&pk, &params, c(0.0, 0.0), 5, grid) {
            Err(Error::GridLeak {
                suggested_half_width, ..
            }) => assert!(suggested_half_width > 4.0),
            other => panic!("expected leak, got {other:?}"),
        }
    }
}
