use super::split_step::gaussian_peak;
use super::{edge_ratio, GridSpec, LEAK_THRESHOLD};
use crate::error::{Error, Result};
use crate::polymer::PolymerSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct TransferRun {
    /// Widths for planes `1..=widths.len()`.
    pub widths: Vec<f64>,
    /// Grid peak density over the Gaussian peak `1 / (gamma sqrt(pi))` of
    /// the grid width, per plane.
    pub peak_ratios: Vec<f64>,
    /// First plane whose end-point density could not be normalized.
    pub unnormalizable_at: Option<usize>,
}

/// Direct quadrature of the transfer integral in units of `l`: the density
/// before plane `n + 1` is the density before plane `n`, weighted by the
/// plane factor `exp(-g_tilde s^2)` and convolved with `exp(-(s - s')^2)`.
/// Starts from `exp(-s^2 chi)` (that is `exp(-x^2 / a^2)`).
pub fn transfer_integral(spec: &PolymerSpec, n_planes: usize, grid: GridSpec) -> Result<TransferRun> {
    grid.validate()?;
    if spec.g_tilde <= -2.0 {
        return Err(Error::ImmediateDeath {
            g_tilde: spec.g_tilde,
        });
    }
    let s = grid.coordinates();
    let h = grid.spacing();
    let m = s.len();
    // untruncated, so the far tails that decide normalizability stay exact
    let kernel: Vec<f64> = (0..m).map(|j| (-(h * j as f64).powi(2)).exp()).collect();
    let plane: Vec<f64> = s.iter().map(|v| (-spec.g_tilde * v * v).exp()).collect();

    let mut density: Vec<f64> = s.iter().map(|v| (-spec.chi * v * v).exp()).collect();
    let mut widths = Vec::with_capacity(n_planes);
    let mut peak_ratios = Vec::with_capacity(n_planes);
    let mut unnormalizable_at = None;
    let mut weighted = vec![0.0; m];
    for n in 1..=n_planes {
        if n == 1 {
            weighted.copy_from_slice(&density);
        } else {
            for ((w, p), f) in weighted.iter_mut().zip(&density).zip(&plane) {
                *w = p * f;
            }
            if !decays_outward(&weighted) {
                unnormalizable_at = Some(n);
                break;
            }
            let ratio = edge_ratio(&weighted);
            if ratio > LEAK_THRESHOLD {
                return Err(Error::GridLeak {
                    step: n,
                    ratio,
                    suggested_half_width: 2.0 * grid.half_width,
                });
            }
        }
        for (i, out) in density.iter_mut().enumerate() {
            let left: f64 = weighted[..=i].iter().rev().zip(&kernel[..=i]).map(|(w, k)| w * k).sum();
            let right: f64 = weighted[i + 1..].iter().zip(&kernel[1..m - i]).map(|(w, k)| w * k).sum();
            *out = left + right;
        }
        let ratio = edge_ratio(&density);
        if ratio > LEAK_THRESHOLD {
            return Err(Error::GridLeak {
                step: n,
                ratio,
                suggested_half_width: 2.0 * grid.half_width,
            });
        }
        let norm: f64 = density.iter().sum::<f64>() * h;
        for v in density.iter_mut() {
            *v /= norm;
        }
        let second: f64 = density.iter().zip(&s).map(|(p, v)| p * v * v).sum::<f64>() * h;
        let gamma = (2.0 * second).sqrt();
        let peak = density.iter().cloned().fold(0.0, f64::max);
        widths.push(spec.l * gamma);
        peak_ratios.push(peak / gaussian_peak(gamma));
    }
    Ok(TransferRun {
        widths,
        peak_ratios,
        unnormalizable_at,
    })
}

/// False when the weighted density fails to fall off between three
/// quarters of the half-width and the edge, i.e. it cannot be normalized.
fn decays_outward(weighted: &[f64]) -> bool {
    let m = weighted.len();
    let inner = weighted[m / 8].max(weighted[m - 1 - m / 8]);
    let edge = weighted[0].max(weighted[m - 1]);
    edge == 0.0 || edge < 0.5 * inner
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymer::{max_length, q_polymer, width_profile, width_saturation};

    fn spec(g: f64, chi: f64) -> PolymerSpec {
        PolymerSpec::dimensionless(g, chi).unwrap()
    }

    #[test]
    fn free_line_widths() {
        let s = spec(0.0, 1.0);
        let run = transfer_integral(&s, 20, GridSpec::default()).unwrap();
        for (k, w) in run.widths.iter().enumerate() {
            let want = s.a * s.a + (k + 1) as f64 * s.l * s.l;
            assert!((w * w - want).abs() < 1e-6 * want);
        }
        assert!(run.unnormalizable_at.is_none());
    }

    #[test]
    fn matches_recurrence_widths() {
        for (g, chi, planes) in [(1.0, 0.5, 20), (0.25, 2.0, 20), (4.0, 1.0, 20), (-0.05, 1.0, 5), (-0.2, 3.0, 20)] {
            let s = spec(g, chi);
            let run = transfer_integral(&s, planes, GridSpec::default()).unwrap();
            let normalizable = (1..=planes).take_while(|&n| width_profile(&s, n).is_ok()).count();
            assert_eq!(run.widths.len(), normalizable, "g {g} chi {chi}");
            for (k, w) in run.widths.iter().enumerate() {
                let want = width_profile(&s, k + 1).unwrap();
                assert!((w - want).abs() < 1e-4 * want, "g {g} chi {chi} n {}", k + 1);
            }
            for r in &run.peak_ratios {
                assert!((r - 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn wide_line_overflows_grid() {
        // gamma_6 is normalizable but far wider than the default grid allows
        let s = spec(-0.05, 1.0);
        assert!(width_profile(&s, 6).is_ok());
        match transfer_integral(&s, 6, GridSpec::default()) {
            Err(Error::GridLeak { step, .. }) => assert_eq!(step, 6),
            other => panic!("expected leak, got {other:?}"),
        }
    }

    #[test]
    fn binding_saturates() {
        let s = spec(1.0, 0.5);
        let run = transfer_integral(&s, 20, GridSpec::default()).unwrap();
        let sat = width_saturation(&s).unwrap();
        assert!((run.widths.last().unwrap() - sat).abs() < 1e-4 * sat);
    }

    #[test]
    fn unbinding_breakdown_tracks_recurrence() {
        let s = spec(-0.5, 1.0);
        let run = transfer_integral(&s, 20, GridSpec::default()).unwrap();
        let first_bad = q_polymer(&s, 20)
            .unwrap()
            .iter()
            .find(|p| p.gamma.is_none())
            .map(|p| p.n);
        assert_eq!(run.unnormalizable_at, first_bad, "{run:?}");
        assert!(run.unnormalizable_at.unwrap() <= max_length(&s).unwrap().n_star + 1);
    }
}
