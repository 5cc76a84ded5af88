//! First-order nonlinear form of the packet dynamics: the inverse variance
//! `sigma_n` (with `psi_n ~ exp(-sigma_n x^2 / 2 b^2)`) evolves by a Möbius
//! map, linearized by `sigma_n = -i (q_n + i q_{n-1}) / q_n`.

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};
use crate::quantum::{check_eta, DeterminantPair, QuantumParams};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketShape {
    pub sigma: Complex64,
    pub n: usize,
}

impl PacketShape {
    /// `b / sqrt(Re sigma)`.
    pub fn width(&self, b: f64) -> f64 {
        b / self.sigma.re.sqrt()
    }

    pub fn is_normalizable(&self) -> bool {
        self.sigma.re > 0.0
    }
}

fn check_shape(shape: &PacketShape) -> Result<()> {
    if shape.sigma.re > 0.0 && shape.sigma.im.is_finite() && shape.sigma.re.is_finite() {
        Ok(())
    } else {
        Err(Error::NonNormalizable(format!(
            "sigma_{} = {}",
            shape.n, shape.sigma
        )))
    }
}

/// `1/sigma' = 1/(sigma + i xi) + i`.
pub fn moebius_step(shape: &PacketShape, xi: f64) -> Result<PacketShape> {
    check_shape(shape)?;
    ensure_finite("xi", xi)?;
    let kicked = shape.sigma + I * xi;
    if kicked == Complex64::new(0.0, 0.0) {
        return Err(Error::ContractViolation("sigma + i xi vanished".into()));
    }
    let next = PacketShape {
        sigma: (kicked.inv() + I).inv(),
        n: shape.n + 1,
    };
    check_shape(&next)?;
    Ok(next)
}

/// `sigma_1 = eta / (1 + i eta)`.
pub fn initial_sigma(eta: Complex64) -> Result<PacketShape> {
    check_eta(eta)?;
    let shape = PacketShape {
        sigma: eta / (Complex64::new(1.0, 0.0) + I * eta),
        n: 1,
    };
    check_shape(&shape)?;
    Ok(shape)
}

/// `sigma_1..=sigma_count` by repeated Möbius steps.
pub fn sigma_orbit(eta: Complex64, xi: f64, count: usize) -> Result<Vec<PacketShape>> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return Ok(out);
    }
    let mut shape = initial_sigma(eta)?;
    out.push(shape);
    for _ in 1..count {
        shape = moebius_step(&shape, xi)?;
        out.push(shape);
    }
    Ok(out)
}

pub fn linearize(pair: &DeterminantPair) -> PacketShape {
    PacketShape {
        sigma: -I * (pair.q_n + I * pair.q_prev) / pair.q_n,
        n: pair.n,
    }
}

/// Initial datum whose orbit is a 1-cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneCycle {
    /// `2 sin(phi/2) exp(i phi/2)`.
    pub eta: Complex64,
    /// `sin(phi) - i (1 - cos(phi))`, equal to `sqrt(xi (4 - xi)) / 2 - i xi / 2`.
    pub sigma: Complex64,
    /// False at the band edges, where `Re(eta) = 0`.
    pub normalizable: bool,
}

/// Defined on the closed band `0 <= xi <= 4`; the edges come back flagged.
pub fn one_cycle(xi: f64) -> Result<OneCycle> {
    ensure_finite("xi", xi)?;
    if !(0.0..=4.0).contains(&xi) {
        return Err(Error::Regime { beta: 2.0 - xi });
    }
    let phi = (1.0 - 0.5 * xi).acos();
    let eta = Complex64::from_polar(2.0 * (0.5 * phi).sin(), 0.5 * phi);
    let sigma = Complex64::new(0.5 * (xi * (4.0 - xi)).sqrt(), -0.5 * xi);
    Ok(OneCycle {
        eta,
        sigma,
        normalizable: xi > 0.0 && xi < 4.0 && eta.re > 1e-12,
    })
}

pub fn one_cycle_eta(xi: f64) -> Result<Complex64> {
    one_cycle(xi).map(|c| c.eta)
}

/// `(hbar / 2 tau) |sigma|^2 / (sigma + sigma*)`.
pub fn sigma_energy(shape: &PacketShape, params: &QuantumParams) -> f64 {
    params.hbar / (2.0 * params.period) * shape.sigma.norm_sqr() / (2.0 * shape.sigma.re)
}
