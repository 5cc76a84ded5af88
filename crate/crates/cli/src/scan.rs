//! Parameter scans over the pulse strength and single-trajectory dumps.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use pulsed_core::classical::{self, ClassicalParams};
use pulsed_core::continuum::{energies_of_state, evolve_v, total_energy, total_energy_squared_form, width_of_state, ContinuumParams};
use pulsed_core::moebius::{sigma_energy, sigma_orbit};
use pulsed_core::offcenter::{d_sequence, energy_split, expectations};
use pulsed_core::polymer::{max_length, q_polymer, width_saturation, PolymerSpec};
use pulsed_core::quantum::{mean_energy, q_sequence, width, InitialPacket, QuantumParams};

use crate::table::{Cell, Table};
use crate::CliError;

/// Largest number of scan points a single run may request.
pub const MAX_SCAN_POINTS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Manifestation {
    Classical,
    Quantum,
    Moebius,
    OffCenter,
    Continuum,
    Polymer,
}

impl FromStr for Manifestation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "classical" => Ok(Self::Classical),
            "quantum" => Ok(Self::Quantum),
            "moebius" | "mobius" => Ok(Self::Moebius),
            "offcenter" => Ok(Self::OffCenter),
            "continuum" => Ok(Self::Continuum),
            "polymer" => Ok(Self::Polymer),
            other => Err(format!(
                "unknown manifestation {other:?} (classical, quantum, moebius, offcenter, continuum, polymer)"
            )),
        }
    }
}

impl fmt::Display for Manifestation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Classical => "classical",
            Self::Quantum => "quantum",
            Self::Moebius => "moebius",
            Self::OffCenter => "offcenter",
            Self::Continuum => "continuum",
            Self::Polymer => "polymer",
        })
    }
}

/// `hbar`, `m` and `tau`; the pulse strength follows from `xi = lambda tau / m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Units {
    pub hbar: f64,
    pub mass: f64,
    pub period: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            period: 1.0,
        }
    }
}

impl Units {
    fn strength(&self, xi: f64) -> f64 {
        xi * self.mass / self.period
    }

    fn classical(&self, xi: f64) -> Result<ClassicalParams, CliError> {
        Ok(ClassicalParams::new(self.mass, self.period, self.strength(xi))?)
    }

    fn quantum(&self, xi: f64) -> Result<QuantumParams, CliError> {
        Ok(QuantumParams::new(self.hbar, self.mass, self.period, self.strength(xi))?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Initial {
    /// Position and momentum at `t = 0`.
    Particle { x0: f64, p0: f64 },
    /// Centered packet with shape parameter `eta`.
    Packet { eta: Complex64 },
    /// Packet displaced by the amplitude `d0`.
    Displaced { eta: Complex64, d0: Complex64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpec {
    pub manifestation: Manifestation,
    pub xi_min: f64,
    pub xi_max: f64,
    pub xi_step: f64,
    pub n_iterations: usize,
    pub initial: Initial,
    pub units: Units,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortraitRow {
    pub xi: f64,
    pub n: usize,
    pub energy: f64,
}

/// Rounds to 12 significant digits so grid values print as typed.
fn snap(v: f64) -> f64 {
    format!("{v:.11e}").parse().expect("formatted float parses")
}

impl ScanSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if !(self.xi_step > 0.0 && self.xi_step.is_finite()) {
            return usage(format!("xi step must be positive, got {}", self.xi_step));
        }
        if !(self.xi_min.is_finite() && self.xi_max.is_finite() && self.xi_min < self.xi_max) {
            return usage(format!("need xi min < xi max, got {} and {}", self.xi_min, self.xi_max));
        }
        if self.n_iterations == 0 {
            return usage("iterations must be at least 1".into());
        }
        let points = ((self.xi_max - self.xi_min) / self.xi_step).floor();
        if points >= MAX_SCAN_POINTS as f64 {
            return usage(format!("scan has more than {MAX_SCAN_POINTS} points"));
        }
        check_initial(self.manifestation, &self.initial)
    }

    /// `xi_min + k xi_step` up to and including `xi_max`.
    pub fn xi_values(&self) -> Vec<f64> {
        let span = (self.xi_max - self.xi_min) / self.xi_step;
        let count = (span + 1e-9).floor() as usize + 1;
        (0..count).map(|k| snap(self.xi_min + k as f64 * self.xi_step)).collect()
    }
}

fn check_initial(m: Manifestation, initial: &Initial) -> Result<(), CliError> {
    let ok = matches!(
        (m, initial),
        (Manifestation::Classical, Initial::Particle { .. })
            | (Manifestation::Quantum | Manifestation::Moebius, Initial::Packet { .. })
            | (Manifestation::OffCenter, Initial::Displaced { .. })
    );
    if ok {
        Ok(())
    } else if matches!(m, Manifestation::Continuum | Manifestation::Polymer) {
        Err(CliError::Usage(format!("{m} has its own subcommand")))
    } else {
        Err(CliError::Usage(format!("{m} needs {}", needed_block(m))))
    }
}

fn needed_block(m: Manifestation) -> &'static str {
    match m {
        Manifestation::Classical => "x0 and p0",
        Manifestation::Quantum | Manifestation::Moebius => "eta",
        Manifestation::OffCenter => "eta and d0",
        Manifestation::Continuum => "kappa, mass, hbar and l0",
        Manifestation::Polymer => "g-tilde and chi, or nu, spacing, g and a",
    }
}

/// Pre-pulse energies `E_1..E_N` at one `xi`.
pub fn portrait_point(spec: &ScanSpec, xi: f64) -> Result<Vec<PortraitRow>, CliError> {
    let n = spec.n_iterations;
    let energies: Vec<f64> = match spec.initial {
        Initial::Particle { x0, p0 } => {
            let params = spec.units.classical(xi)?;
            let start = classical::initial_state(x0, p0, &params).state;
            classical::orbit(start, params.xi, n - 1)
                .iter()
                .map(|s| classical::energy(s, &params))
                .collect()
        }
        Initial::Packet { eta } => {
            let params = spec.units.quantum(xi)?;
            if spec.manifestation == Manifestation::Moebius {
                sigma_orbit(eta, params.xi, n)?
                    .iter()
                    .map(|s| sigma_energy(s, &params))
                    .collect()
            } else {
                let packet = InitialPacket::new(eta, &params)?;
                q_sequence(eta, params.xi, n)?
                    .iter()
                    .map(|p| mean_energy(p, &packet, &params))
                    .collect()
            }
        }
        Initial::Displaced { eta, d0 } => {
            let params = spec.units.quantum(xi)?;
            let packet = InitialPacket::new(eta, &params)?;
            let pairs = q_sequence(eta, params.xi, n)?;
            pairs
                .iter()
                .zip(d_sequence(d0, &pairs))
                .map(|(p, d)| energy_split(p, &d, &packet, &params).map(|e| e.total))
                .collect::<Result<_, _>>()?
        }
    };
    Ok(energies
        .into_iter()
        .take(n)
        .enumerate()
        .map(|(k, energy)| PortraitRow { xi, n: k + 1, energy })
        .collect())
}

/// One row per `(xi, n)`, sorted by `xi` then `n`. Points are spread over
/// the current rayon pool; the order does not depend on the worker count.
pub fn run_portrait(spec: &ScanSpec) -> Result<Vec<PortraitRow>, CliError> {
    spec.validate()?;
    let chunks = spec
        .xi_values()
        .par_iter()
        .map(|&xi| portrait_point(spec, xi))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

pub fn portrait_table(rows: &[PortraitRow]) -> Table {
    let mut t = Table::new(vec!["xi", "n", "energy"]);
    for r in rows {
        t.push(vec![Cell::Real(r.xi), Cell::Int(r.n as u64), Cell::Real(r.energy)]);
    }
    t
}

/// Full trajectory at one `xi`; columns depend on the manifestation.
pub fn run_orbit(spec: &ScanSpec, xi: f64) -> Result<Table, CliError> {
    check_initial(spec.manifestation, &spec.initial)?;
    if spec.n_iterations == 0 {
        return Err(CliError::Usage("iterations must be at least 1".into()));
    }
    let n = spec.n_iterations;
    let real = Cell::Real;
    let table = match spec.initial {
        Initial::Particle { x0, p0 } => {
            let params = spec.units.classical(xi)?;
            let start = classical::initial_state(x0, p0, &params).state;
            let mut t = Table::new(vec!["n", "x", "p", "energy"]);
            for s in classical::orbit(start, params.xi, n - 1) {
                t.push(vec![
                    Cell::Int(s.n as u64),
                    real(s.x),
                    real(s.momentum(&params)),
                    real(classical::energy(&s, &params)),
                ]);
            }
            t
        }
        Initial::Packet { eta } => {
            let params = spec.units.quantum(xi)?;
            let packet = InitialPacket::new(eta, &params)?;
            if spec.manifestation == Manifestation::Moebius {
                let mut t = Table::new(vec!["n", "sigma_re", "sigma_im", "width", "energy"]);
                for s in sigma_orbit(eta, params.xi, n)? {
                    t.push(vec![
                        Cell::Int(s.n as u64),
                        real(s.sigma.re),
                        real(s.sigma.im),
                        real(s.width(params.b)),
                        real(sigma_energy(&s, &params)),
                    ]);
                }
                t
            } else {
                let mut t = Table::new(vec!["n", "q_re", "q_im", "width", "energy"]);
                for p in q_sequence(eta, params.xi, n)? {
                    t.push(vec![
                        Cell::Int(p.n as u64),
                        real(p.q_n.re),
                        real(p.q_n.im),
                        real(width(&p, &packet)),
                        real(mean_energy(&p, &packet, &params)),
                    ]);
                }
                t
            }
        }
        Initial::Displaced { eta, d0 } => {
            let params = spec.units.quantum(xi)?;
            let packet = InitialPacket::new(eta, &params)?;
            let pairs = q_sequence(eta, params.xi, n)?;
            let mut t = Table::new(vec!["n", "x_bar", "p_bar", "e_quantum", "e_classical", "e_total"]);
            for (p, d) in pairs.iter().zip(d_sequence(d0, &pairs)) {
                let e = expectations(p, &d, &packet, &params)?;
                let split = energy_split(p, &d, &packet, &params)?;
                t.push(vec![
                    Cell::Int(p.n as u64),
                    real(e.x_bar),
                    real(e.p_bar),
                    real(split.quantum),
                    real(split.classical),
                    real(split.total),
                ]);
            }
            t
        }
    };
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolymerParams {
    Dimensionless { g_tilde: f64, chi: f64 },
    Physical { nu: f64, spacing: f64, g: f64, a: f64 },
}

impl PolymerParams {
    pub fn spec(&self) -> Result<PolymerSpec, CliError> {
        Ok(match *self {
            Self::Dimensionless { g_tilde, chi } => PolymerSpec::dimensionless(g_tilde, chi)?,
            Self::Physical { nu, spacing, g, a } => PolymerSpec::new(nu, spacing, g, a)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolymerRow {
    pub n: usize,
    pub gamma: Option<f64>,
    pub alive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolymerSummary {
    /// Binding line; the width approaches `gamma_inf`.
    Saturating { gamma_inf: f64 },
    /// Unbinding line; the partition function dies after plane `n_star`.
    Dying { n_star: usize, w_star: f64 },
    /// Free line, no asymptote.
    Diffusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolymerRun {
    pub rows: Vec<PolymerRow>,
    pub summary: PolymerSummary,
}

pub fn run_polymer_profile(params: &PolymerParams, planes: usize) -> Result<PolymerRun, CliError> {
    if planes == 0 {
        return Err(CliError::Usage("planes must be at least 1".into()));
    }
    let spec = params.spec()?;
    let rows = q_polymer(&spec, planes)?
        .iter()
        .map(|p| PolymerRow {
            n: p.n,
            gamma: p.gamma,
            alive: p.alive,
        })
        .collect();
    let summary = if spec.g_tilde > 0.0 {
        PolymerSummary::Saturating {
            gamma_inf: width_saturation(&spec)?,
        }
    } else if spec.g_tilde < 0.0 {
        let ml = max_length(&spec)?;
        PolymerSummary::Dying {
            n_star: ml.n_star,
            w_star: ml.w_star,
        }
    } else {
        PolymerSummary::Diffusive
    };
    Ok(PolymerRun { rows, summary })
}

pub fn polymer_table(run: &PolymerRun) -> Table {
    let mut t = Table::new(vec!["n", "gamma", "alive"]);
    for r in &run.rows {
        let gamma = r.gamma.map_or(Cell::Missing, Cell::Real);
        t.push(vec![Cell::Int(r.n as u64), gamma, Cell::Flag(r.alive)]);
    }
    t.summary = match run.summary {
        PolymerSummary::Saturating { gamma_inf } => {
            vec![("regime", Cell::Text("binding")), ("gamma_inf", Cell::Real(gamma_inf))]
        }
        PolymerSummary::Dying { n_star, w_star } => vec![
            ("regime", Cell::Text("unbinding")),
            ("n_star", Cell::Int(n_star as u64)),
            ("w_star", Cell::Real(w_star)),
        ],
        PolymerSummary::Diffusive => vec![("regime", Cell::Text("free"))],
    };
    t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumRequest {
    pub kappa: f64,
    pub mass: f64,
    pub hbar: f64,
    pub l0: f64,
    pub t_max: f64,
    pub samples: usize,
}

/// Closed-form evolution of a real packet of width `l0` under the averaged
/// spring, sampled at `samples` evenly spaced times in `[0, t_max]`.
pub fn run_continuum(req: &ContinuumRequest) -> Result<Table, CliError> {
    if req.samples < 2 {
        return Err(CliError::Usage("samples must be at least 2".into()));
    }
    if !(req.t_max > 0.0 && req.t_max.is_finite()) {
        return Err(CliError::Usage(format!("t-max must be positive, got {}", req.t_max)));
    }
    let params = ContinuumParams::new(req.kappa, req.mass, req.hbar, req.l0)?;
    let v0 = params.initial_v();
    let last = (req.samples - 1) as f64;
    let rows = (0..req.samples)
        .into_par_iter()
        .map(|k| {
            let t = req.t_max * k as f64 / last;
            let v = evolve_v(&params, v0, t)?;
            let e = energies_of_state(&params, v);
            Ok(vec![
                Cell::Real(t),
                Cell::Real(v.re),
                Cell::Real(v.im),
                Cell::Real(width_of_state(&params, v)),
                Cell::Real(e.kinetic),
                Cell::Real(e.potential),
                Cell::Real(e.total),
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut t = Table::new(vec!["t", "v_re", "v_im", "width", "e_kin", "e_pot", "e_total"]);
    t.rows = rows;
    t.summary = vec![
        ("ratio", Cell::Real(params.r)),
        ("period", Cell::Real(params.period())),
        ("e_total_sum", Cell::Real(total_energy(&params))),
        ("e_total_squared_form", Cell::Real(total_energy_squared_form(&params))),
    ];
    Ok(t)
}
