//! Brute-force cross-checks that share no code with the recurrence engine.

mod determinant;
mod split_step;
mod transfer;

pub use determinant::{dense_determinant, MAX_DENSE_ORDER};
pub use split_step::{split_step_propagate, SplitStep, SplitStepSample};
pub use transfer::{transfer_integral, TransferRun};

use crate::error::{Error, Result};

/// Uniform grid on `[-half_width, half_width)`, in units of `b` (packets)
/// or `l` (lines).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub half_width: f64,
    /// Power of two, at least 256.
    pub points: usize,
    /// Free-propagation substeps per pulse interval.
    pub dt_substeps: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            half_width: 30.0,
            points: 4096,
            dt_substeps: 1,
        }
    }
}

/// Boundary-to-peak density ratio above which a grid is too narrow.
pub const LEAK_THRESHOLD: f64 = 1e-12;

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half_width = {}", self.half_width)));
        }
        if self.points < 256 || !self.points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points must be a power of two >= 256, got {}",
                self.points
            )));
        }
        if self.dt_substeps == 0 {
            return Err(Error::InvalidGrid("dt_substeps must be positive".into()));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    /// Sample positions; index `points / 2` is the origin.
    pub fn coordinates(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points)
            .map(|j| -self.half_width + h * j as f64)
            .collect()
    }
}

/// Largest of the outermost few samples relative to the peak.
pub(crate) fn edge_ratio(density: &[f64]) -> f64 {
    let peak = density.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let m = density.len();
    let edge = density[..4]
        .iter()
        .chain(&density[m - 4..])
        .cloned()
        .fold(0.0, f64::max);
    edge / peak
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::default().validate().is_ok());
        let bad = |half_width, points, dt_substeps| {
            GridSpec {
                half_width,
                points,
                dt_substeps,
            }
            .validate()
            .is_err()
        };
        assert!(bad(30.0, 128, 1));
        assert!(bad(30.0, 1000, 1));
        assert!(bad(0.0, 1024, 1));
        assert!(bad(30.0, 1024, 0));
    }

    #[test]
    fn origin_sits_mid_grid() {
        let g = GridSpec::default();
        let y = g.coordinates();
        assert_eq!(y[g.points / 2], 0.0);
        assert_eq!(y[0], -30.0);
    }
}
