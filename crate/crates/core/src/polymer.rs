//! Directed line crossing equally spaced planes that pull it toward (or, for
//! negative coupling, push it away from) the axis.
//!
//! The end-point density just before plane `n` is `exp(-x^2 / gamma_n^2)`
//! with `gamma_n = l sqrt(q_n / (q_n - q_{n-1}))`, where
//! `q[n+2] = (g_tilde + 2) q[n+1] - q[n]`, `q_0 = 1`, `q_1 = chi + 1`.

use std::f64::consts::FRAC_PI_2;

use crate::continuum::fit_slope;
use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::recurrence::{closed_form_oscillatory, iterate, RecurrenceSeed};

const RESCALE_ABOVE: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolymerSpec {
    /// Rigidity.
    pub nu: f64,
    /// Plane spacing `d`.
    pub spacing: f64,
    /// Plane coupling; negative values repel.
    pub g: f64,
    /// Initial transverse scale.
    pub a: f64,
    /// `2 nu d g`.
    pub g_tilde: f64,
    /// `(l / a)^2`.
    pub chi: f64,
    /// Thermal wandering between planes, `sqrt(4 nu d)`.
    pub l: f64,
}

impl PolymerSpec {
    pub fn new(nu: f64, spacing: f64, g: f64, a: f64) -> Result<Self> {
        ensure_positive("nu", nu)?;
        ensure_positive("spacing", spacing)?;
        ensure_positive("a", a)?;
        ensure_finite("g", g)?;
        let l = (4.0 * nu * spacing).sqrt();
        Ok(Self {
            nu,
            spacing,
            g,
            a,
            g_tilde: 2.0 * nu * spacing * g,
            chi: (l / a).powi(2),
            l,
        })
    }

    /// Unit wandering scale `l = 1` (so `a = chi^(-1/2)`).
    pub fn dimensionless(g_tilde: f64, chi: f64) -> Result<Self> {
        ensure_finite("g_tilde", g_tilde)?;
        ensure_positive("chi", chi)?;
        Self::new(0.25, 1.0, 2.0 * g_tilde, 1.0 / chi.sqrt())
    }

    pub fn beta(&self) -> f64 {
        self.g_tilde + 2.0
    }

    fn ensure_survivable(&self) -> Result<()> {
        if self.g_tilde <= -2.0 {
            Err(Error::ImmediateDeath {
                g_tilde: self.g_tilde,
            })
        } else {
            Ok(())
        }
    }

    /// `theta` with `cosh(theta) = 1 + g_tilde / 2` for binding lines.
    pub fn binding_angle(&self) -> Option<f64> {
        (self.g_tilde > 0.0).then(|| (1.0 + 0.5 * self.g_tilde).acosh())
    }

    /// `theta'` with `cos(theta') = 1 - |g_tilde| / 2` for unbinding lines.
    pub fn unbinding_angle(&self) -> Option<f64> {
        (self.g_tilde < 0.0 && self.g_tilde > -2.0).then(|| (1.0 + 0.5 * self.g_tilde).acos())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolymerProfile {
    pub n: usize,
    /// `q_n` and `q_{n-1}`, both divided by `exp(ln_scale)`.
    pub q_n: f64,
    pub q_prev: f64,
    pub ln_scale: f64,
    /// The partition function exists up to plane `n`.
    pub alive: bool,
    /// `None` when the line is dead or the density cannot be normalized.
    pub gamma: Option<f64>,
}

impl PolymerProfile {
    pub fn ln_q(&self) -> f64 {
        self.q_n.ln() + self.ln_scale
    }
}

/// Unscaled `q_0..=q_n` from the shared recurrence engine.
pub fn q_values(spec: &PolymerSpec, n: usize) -> Result<Vec<f64>> {
    spec.ensure_survivable()?;
    Ok(iterate(&RecurrenceSeed::symmetric(1.0, spec.chi + 1.0, spec.beta()), n))
}

/// Profiles for planes `1..=count`. Large values are rescaled so long
/// binding lines do not overflow; after death every profile is dead.
pub fn q_polymer(spec: &PolymerSpec, count: usize) -> Result<Vec<PolymerProfile>> {
    spec.ensure_survivable()?;
    let seed = RecurrenceSeed::symmetric(1.0, spec.chi + 1.0, spec.beta());
    let (mut prev, mut curr) = (seed.u0, seed.u1);
    let mut ln_scale = 0.0;
    let mut alive = true;
    let mut out = Vec::with_capacity(count);
    for n in 1..=count {
        if n > 1 {
            let next = seed.advance(prev, curr);
            prev = curr;
            curr = next;
            if curr.abs() > RESCALE_ABOVE {
                prev /= RESCALE_ABOVE;
                curr /= RESCALE_ABOVE;
                ln_scale += RESCALE_ABOVE.ln();
            }
        }
        alive = alive && curr > 0.0;
        let gamma = (alive && curr > prev).then(|| spec.l * (curr / (curr - prev)).sqrt());
        out.push(PolymerProfile {
            n,
            q_n: curr,
            q_prev: prev,
            ln_scale,
            alive,
            gamma,
        });
    }
    Ok(out)
}

/// `s_n = 2 sinh(theta) e^(-n theta) q_n` for a binding line; finite for all `n`.
fn binding_scaled(chi: f64, theta: f64, n: usize) -> f64 {
    let nf = n as f64;
    let e = (-theta).exp();
    (chi + 1.0) * (-(-2.0 * nf * theta).exp_m1()) + e * (-2.0 * (nf - 1.0) * theta).exp_m1()
}

/// `q_n` from the hyperbolic (binding), trigonometric (unbinding) or linear
/// (`g_tilde = 0`) closed forms.
pub fn q_closed_form(spec: &PolymerSpec, n: usize) -> Result<f64> {
    spec.ensure_survivable()?;
    if let Some(theta) = spec.binding_angle() {
        let s = binding_scaled(spec.chi, theta, n);
        return Ok(s * (n as f64 * theta).exp() / (2.0 * theta.sinh()));
    }
    if spec.g_tilde == 0.0 {
        return Ok(1.0 + n as f64 * spec.chi);
    }
    closed_form_oscillatory(1.0, spec.chi + 1.0, spec.beta(), n)
}

/// `ln q_n` for a binding line, valid far beyond the overflow of `q_n`.
pub fn ln_q_binding(spec: &PolymerSpec, n: usize) -> Result<f64> {
    let theta = spec
        .binding_angle()
        .ok_or_else(|| Error::Domain(format!("binding needs g_tilde > 0, got {}", spec.g_tilde)))?;
    Ok(binding_scaled(spec.chi, theta, n).ln() + n as f64 * theta - (2.0 * theta.sinh()).ln())
}

/// Width at plane `n >= 1` from the closed forms.
pub fn width_closed_form(spec: &PolymerSpec, n: usize) -> Result<f64> {
    spec.ensure_survivable()?;
    if n == 0 {
        return Err(Error::Domain("plane index starts at 1".into()));
    }
    if spec.unbinding_angle().is_some() {
        let ml = max_length(spec)?;
        if n > ml.n_star {
            return Err(Error::LineDead { n_star: ml.n_star });
        }
    }
    let ratio = if let Some(theta) = spec.binding_angle() {
        (-theta).exp() * binding_scaled(spec.chi, theta, n - 1) / binding_scaled(spec.chi, theta, n)
    } else {
        q_closed_form(spec, n - 1)? / q_closed_form(spec, n)?
    };
    if !(ratio < 1.0) || q_closed_form(spec, n)? <= 0.0 {
        return Err(Error::Unnormalizable { n });
    }
    Ok(spec.l / (1.0 - ratio).sqrt())
}

/// Width at plane `n >= 1` from the recurrence.
pub fn width_profile(spec: &PolymerSpec, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("plane index starts at 1".into()));
    }
    let profiles = q_polymer(spec, n)?;
    if let Some(first_dead) = profiles.iter().find(|p| !p.alive) {
        return Err(Error::LineDead {
            n_star: first_dead.n - 1,
        });
    }
    profiles[n - 1].gamma.ok_or(Error::Unnormalizable { n })
}

/// Which relation ties the binding angle to the coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleConvention {
    /// `cosh(theta) = 1 + g_tilde / 2`, consistent with `beta = g_tilde + 2`.
    HalfCoupling,
    /// `cosh(theta) = 1 + g_tilde`.
    FullCoupling,
}

/// `zeta = 1 - exp(-theta)`.
pub fn saturation_zeta(g_tilde: f64, convention: AngleConvention) -> Result<f64> {
    ensure_finite("g_tilde", g_tilde)?;
    if g_tilde <= 0.0 {
        return Err(Error::Domain(format!("saturation needs g_tilde > 0, got {g_tilde}")));
    }
    let c = match convention {
        AngleConvention::HalfCoupling => 1.0 + 0.5 * g_tilde,
        AngleConvention::FullCoupling => 1.0 + g_tilde,
    };
    // 1 - (c - sqrt(c^2 - 1)) without cancellation for small g_tilde
    let cm1 = c - 1.0;
    Ok((cm1 * (c + 1.0)).sqrt() - cm1)
}

/// `gamma_inf = l / sqrt(zeta)`; independent of `chi`.
pub fn width_saturation(spec: &PolymerSpec) -> Result<f64> {
    width_saturation_with(spec, AngleConvention::HalfCoupling)
}

pub fn width_saturation_with(spec: &PolymerSpec, convention: AngleConvention) -> Result<f64> {
    Ok(spec.l / saturation_zeta(spec.g_tilde, convention)?.sqrt())
}

/// `l (1 + coefficient / g_tilde)`, the leading strong-binding correction.
pub fn saturation_expansion(spec: &PolymerSpec, coefficient: f64) -> f64 {
    spec.l * (1.0 + coefficient / spec.g_tilde)
}

/// Coupling that holds the width at its initial value: `chi^2 / (1 - chi)`.
pub fn tuned_coupling(chi: f64) -> Result<f64> {
    if !(chi > 0.0 && chi < 1.0) {
        return Err(Error::NoCompensation { chi });
    }
    Ok(chi * chi / (1.0 - chi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxLength {
    /// Last plane at which the partition function exists.
    pub n_star: usize,
    /// First positive zero of the continued `q(w)`; `n_star < w_star <= n_star + 1`.
    pub w_star: f64,
}

/// `w* = (pi/2 + atan((chi + 1 - cos theta') / sin theta')) / theta'`.
pub fn max_length(spec: &PolymerSpec) -> Result<MaxLength> {
    spec.ensure_survivable()?;
    let theta = spec.unbinding_angle().ok_or_else(|| {
        Error::Domain(format!("maximum length needs -2 < g_tilde < 0, got {}", spec.g_tilde))
    })?;
    let w_star = (FRAC_PI_2 + ((spec.chi + 1.0 - theta.cos()) / theta.sin()).atan()) / theta;
    Ok(MaxLength {
        n_star: (w_star.ceil() as usize).saturating_sub(1),
        w_star,
    })
}

/// `pi / |g_tilde|^(1/2) - 1 / chi`.
pub fn max_length_asymptote(spec: &PolymerSpec) -> f64 {
    std::f64::consts::PI / spec.g_tilde.abs().sqrt() - 1.0 / spec.chi
}

/// Brute force: one less than the first `n` with `q_n <= 0`, searching up to `limit`.
pub fn sign_scan_n_star(spec: &PolymerSpec, limit: usize) -> Result<Option<usize>> {
    Ok(q_polymer(spec, limit)?
        .iter()
        .find(|p| !p.alive)
        .map(|p| p.n - 1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    /// Exponent of the excess width `sqrt(gamma^2 - a^2)` against `n` while
    /// `n theta' < 0.3`.
    pub early_exponent: Option<f64>,
    pub early_range: (usize, usize),
    /// First plane where the local log-log slope of `gamma` reaches 1.
    pub onset: Option<usize>,
    /// Log-log slope of `gamma` over `onset` +/- 5%.
    pub late_slope: Option<f64>,
    pub late_range: Option<(usize, usize)>,
    /// Last plane with a normalizable end-point density.
    pub last_normalizable: usize,
    pub n_star: Option<usize>,
}

/// Fits the diffusive and ballistic stages of a weakly repelled line.
/// A free line (`g_tilde = 0`) is followed for `free_planes` planes and has
/// no ballistic stage.
pub fn growth_regimes(spec: &PolymerSpec, free_planes: usize) -> Result<GrowthReport> {
    spec.ensure_survivable()?;
    if spec.g_tilde > 0.0 {
        return Err(Error::Domain("growth regimes need g_tilde <= 0".into()));
    }
    let (count, early_end, n_star) = match spec.unbinding_angle() {
        Some(theta) => {
            let ml = max_length(spec)?;
            (ml.n_star, (0.3 / theta).floor() as usize, Some(ml.n_star))
        }
        None => (free_planes, free_planes, None),
    };
    let profiles = q_polymer(spec, count.max(1))?;
    let widths: Vec<f64> = profiles.iter().map_while(|p| p.gamma).collect();
    let last_normalizable = widths.len();

    let early_hi = early_end.min(last_normalizable);
    let early_exponent = (early_hi >= 3).then(|| {
        let (xs, ys): (Vec<f64>, Vec<f64>) = (1..=early_hi)
            .map(|n| {
                let g = widths[n - 1];
                ((n as f64).ln(), 0.5 * (g * g - spec.a * spec.a).ln())
            })
            .unzip();
        fit_slope(&xs, &ys)
    });

    let mut onset = None;
    if n_star.is_some() {
        for n in 2..last_normalizable {
            let slope = (widths[n] / widths[n - 2]).ln() / ((n + 1) as f64 / (n - 1) as f64).ln();
            if slope >= 1.0 {
                onset = Some(n);
                break;
            }
        }
    }
    let late_range = onset.and_then(|c| {
        let lo = ((c as f64) * 0.95).floor() as usize;
        let hi = (((c as f64) * 1.05).ceil() as usize).min(last_normalizable);
        (hi > lo + 1 && lo >= 1).then_some((lo, hi))
    });
    let late_slope = late_range.map(|(lo, hi)| {
        let (xs, ys): (Vec<f64>, Vec<f64>) =
            (lo..=hi).map(|n| ((n as f64).ln(), widths[n - 1].ln())).unzip();
        fit_slope(&xs, &ys)
    });

    Ok(GrowthReport {
        early_exponent,
        early_range: (1, early_hi),
        onset,
        late_slope,
        late_range,
        last_normalizable,
        n_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec(g: f64, chi: f64) -> PolymerSpec {
        PolymerSpec::dimensionless(g, chi).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn spec_invariants() {
        let s = PolymerSpec::new(0.3, 2.0, -0.4, 0.8).unwrap();
        assert!(rel(s.g_tilde, 2.0 * 0.3 * 2.0 * -0.4) < 1e-15);
        assert!(rel(s.l * s.l, 4.0 * 0.3 * 2.0) < 1e-15);
        assert!(rel(s.chi, (s.l / s.a).powi(2)) < 1e-15);
        let d = spec(0.7, 2.5);
        assert!(rel(d.g_tilde, 0.7) < 1e-15 && rel(d.chi, 2.5) < 1e-15 && d.l == 1.0);
        assert!(PolymerSpec::new(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn immediate_death() {
        assert!(matches!(q_polymer(&spec(-2.0, 1.0), 3), Err(Error::ImmediateDeath { .. })));
        assert!(matches!(q_values(&spec(-3.0, 1.0), 3), Err(Error::ImmediateDeath { .. })));
    }

    #[test]
    fn first_plane() {
        for (g, chi) in [(0.0, 1.0), (1.0, 0.5), (-0.5, 3.0)] {
            let s = spec(g, chi);
            let p = q_polymer(&s, 1).unwrap()[0];
            assert_eq!(p.q_n, s.chi + 1.0);
            let g1 = p.gamma.unwrap();
            assert!(rel(g1 * g1, s.a * s.a + s.l * s.l) < 1e-14);
        }
    }

    #[test]
    fn free_line_diffuses() {
        let s = spec(0.0, 0.7);
        let q = q_values(&s, 100).unwrap();
        for (n, qn) in q.iter().enumerate() {
            assert!(rel(*qn, 1.0 + n as f64 * 0.7) < 1e-14);
        }
        for p in q_polymer(&s, 100).unwrap() {
            let g = p.gamma.unwrap();
            assert!(rel(g * g, s.a * s.a + p.n as f64 * s.l * s.l) < 1e-12);
        }
        let r = growth_regimes(&s, 400).unwrap();
        assert!((r.early_exponent.unwrap() - 0.5).abs() < 1e-9);
        assert!(r.onset.is_none() && r.late_slope.is_none() && r.n_star.is_none());
    }

    #[test]
    fn binding_closed_form_example() {
        let s = spec(1.0, 0.5);
        let q = q_values(&s, 10).unwrap();
        assert!(rel(q_closed_form(&s, 10).unwrap(), q[10]) < 1e-10);
    }

    #[test]
    fn closed_forms_match_recurrence() {
        for g in [-1.9, -1.0, -0.3, -0.01, 0.0, 0.01, 0.25, 1.0, 4.0] {
            for chi in [0.2, 1.0, 3.0] {
                let s = spec(g, chi);
                let q = q_values(&s, 1000).unwrap();
                let profiles = q_polymer(&s, 1000).unwrap();
                for n in 0..=1000 {
                    if g > 0.0 {
                        if n >= 1 {
                            let lq = ln_q_binding(&s, n).unwrap();
                            assert!((lq - profiles[n - 1].ln_q()).abs() < 1e-10, "g {g} chi {chi} n {n}");
                        }
                    } else {
                        let cf = q_closed_form(&s, n).unwrap();
                        let scale = q[..=n].iter().fold(1.0_f64, |m, v| m.max(v.abs()));
                        assert!((cf - q[n]).abs() <= 1e-10 * scale, "g {g} chi {chi} n {n}");
                    }
                }
            }
        }
    }

    #[test]
    fn widths_match_closed_forms() {
        for (g, chi) in [(1.0, 0.5), (0.25, 2.0), (4.0, 1.0), (-0.05, 1.0), (0.0, 0.3)] {
            let s = spec(g, chi);
            for p in q_polymer(&s, 200).unwrap() {
                match p.gamma {
                    Some(w) => assert!(rel(width_closed_form(&s, p.n).unwrap(), w) < 1e-9),
                    None => assert!(width_closed_form(&s, p.n).is_err()),
                }
            }
        }
    }

    #[test]
    fn long_binding_lines_do_not_overflow() {
        let s = spec(4.0, 1.0);
        let profiles = q_polymer(&s, 5000).unwrap();
        assert!(profiles.iter().all(|p| p.alive && p.q_n.is_finite()));
        let last = profiles.last().unwrap();
        assert!(rel(last.gamma.unwrap(), width_saturation(&s).unwrap()) < 1e-12);
        assert!(rel(last.ln_q(), ln_q_binding(&s, 5000).unwrap()) < 1e-12);
    }

    #[test]
    fn saturation_examples() {
        let s = spec(1.0, 0.5);
        let want = 1.0 / (1.0 - (1.5 - (1.25_f64).sqrt())).sqrt();
        let got = width_saturation(&s).unwrap();
        assert!(rel(got, want) < 1e-14);
        assert!((got - 1.2720).abs() < 1e-4);
        assert!(rel(width_profile(&s, 50).unwrap(), got) < 1e-6);
        assert!(rel(width_saturation(&spec(1e8, 0.5)).unwrap(), 1.0) < 1e-4);
        assert!(width_saturation(&spec(0.0, 0.5)).is_err());
        assert!(width_saturation(&spec(-0.5, 0.5)).is_err());
    }

    #[test]
    fn saturation_is_independent_of_initial_width() {
        for g in [0.25, 1.0, 4.0] {
            let a = width_profile(&spec(g, 0.2), 200).unwrap();
            let b = width_profile(&spec(g, 5.0), 200).unwrap();
            assert!(rel(a, b) < 1e-6);
            assert!(rel(a, width_saturation(&spec(g, 1.0)).unwrap()) < 1e-6);
        }
    }

    #[test]
    fn strong_binding_correction_is_half_over_coupling() {
        let g = 400.0;
        let s = spec(g, 1.0);
        let exact = width_profile(&s, 50).unwrap();
        let half = saturation_expansion(&s, 0.5);
        let quarter = saturation_expansion(&s, 0.25);
        assert!((exact - half).abs() < (exact - quarter).abs());
        assert!((exact - half).abs() < 10.0 / (g * g));
    }

    #[test]
    fn tuned_examples() {
        assert!(rel(tuned_coupling(0.5).unwrap(), 0.5) < 1e-15);
        assert!(tuned_coupling(1e-6).unwrap() < 1.1e-12);
        assert!(matches!(tuned_coupling(1.0), Err(Error::NoCompensation { .. })));
        assert!(tuned_coupling(0.0).is_err());
        for chi in [0.3, 0.5, 0.9] {
            let g = tuned_coupling(chi).unwrap();
            assert!(rel(saturation_zeta(g, AngleConvention::HalfCoupling).unwrap(), chi) < 1e-12);
            let s = spec(g, chi);
            assert!(rel(width_saturation(&s).unwrap(), s.a) < 1e-9);
            assert!(rel(width_profile(&s, 200).unwrap(), s.a) < 1e-6);
            // the other convention misses the compensation
            assert!(rel(width_saturation_with(&s, AngleConvention::FullCoupling).unwrap(), s.a) > 1e-2);
        }
        assert!(rel(tuned_coupling(0.9).unwrap(), 8.1) < 1e-12);
    }

    #[test]
    fn max_length_examples() {
        let ml = max_length(&spec(-(2.0 - 1e-9), 1.0)).unwrap();
        assert!(ml.w_star > 1.5 && ml.w_star < 2.0);
        assert_eq!(ml.n_star, 1);

        let s = spec(-0.01, 1.0);
        let ml = max_length(&s).unwrap();
        assert!((ml.w_star - (PI / 0.1 - 1.0)).abs() < 0.1);
        assert_eq!(ml.n_star, 30);
        assert_eq!(sign_scan_n_star(&s, 100).unwrap(), Some(30));

        let s = spec(-1.0, 0.5);
        let ml = max_length(&s).unwrap();
        let want = 3.0 / PI * (PI / 2.0 + (1.0 / (3.0_f64.sqrt() / 2.0)).atan());
        assert!(rel(ml.w_star, want) < 1e-14);
        assert_eq!(Some(ml.n_star), sign_scan_n_star(&s, 100).unwrap());
        assert!(ml.w_star > ml.n_star as f64 && ml.w_star <= ml.n_star as f64 + 1.0);

        assert!(max_length(&spec(0.5, 1.0)).is_err());
        assert!(max_length(&spec(0.0, 1.0)).is_err());
    }

    #[test]
    fn dead_lines_report_n_star() {
        let s = spec(-1.0, 0.5);
        let ml = max_length(&s).unwrap();
        assert_eq!(
            width_profile(&s, ml.n_star + 1),
            Err(Error::LineDead { n_star: ml.n_star })
        );
        let profiles = q_polymer(&s, 20).unwrap();
        assert!(profiles[ml.n_star..].iter().all(|p| !p.alive && p.gamma.is_none()));
    }

    #[test]
    fn shrinking_q_is_unnormalizable() {
        let s = spec(-0.01, 1.0);
        let profiles = q_polymer(&s, 30).unwrap();
        let first = profiles.iter().find(|p| p.gamma.is_none()).unwrap();
        assert!(first.alive && first.q_n <= first.q_prev);
        assert_eq!(width_profile(&s, first.n), Err(Error::Unnormalizable { n: first.n }));
    }

    #[test]
    fn growth_regime_examples() {
        let s = spec(-1e-4, 1.0);
        let r = growth_regimes(&s, 0).unwrap();
        assert!((r.early_exponent.unwrap() - 0.5).abs() < 0.05, "{r:?}");
        assert!((r.late_slope.unwrap() - 1.0).abs() < 0.1, "{r:?}");
        assert!(r.onset.unwrap() < r.last_normalizable);
        assert!(r.last_normalizable < r.n_star.unwrap());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn analytic_n_star_matches_sign_scan(g in -1.999f64..-1e-3, chi in 0.1f64..5.0) {
                let s = spec(g, chi);
                let ml = max_length(&s).unwrap();
                prop_assert_eq!(Some(ml.n_star), sign_scan_n_star(&s, ml.n_star + 10).unwrap());
            }

            #[test]
            fn alive_widths_are_positive(g in -1.99f64..10.0, chi in 0.05f64..10.0) {
                for p in q_polymer(&spec(g, chi), 300).unwrap() {
                    if let Some(w) = p.gamma {
                        prop_assert!(w > 0.0 && w.is_finite());
                        prop_assert!(p.alive);
                    }
                }
            }
        }
    }
}
