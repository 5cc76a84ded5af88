//! Each oracle against its analytic counterpart over a spread of parameters.

use num_complex::Complex64;
use pulsed_core::oracles::{dense_determinant, split_step_propagate, transfer_integral, GridSpec};
use pulsed_core::polymer::{width_profile, PolymerSpec};
use pulsed_core::quantum::{mean_energy, q_sequence, q_values, width, InitialPacket, QuantumParams};

fn packet_points() -> Vec<(Complex64, f64)> {
    let etas = [
        Complex64::new(1.0, -0.5),
        Complex64::new(0.6, 0.3),
        Complex64::new(1.5, 0.0),
        Complex64::new(0.8, 1.0),
    ];
    let xis = [0.4, 1.0, 2.0, 2.9, 3.7];
    etas.iter()
        .flat_map(|&e| xis.iter().map(move |&x| (e, x)))
        .collect()
}

#[test]
fn determinants_match_dense_elimination() {
    let points = packet_points();
    assert!(points.len() >= 20);
    for (eta, xi) in points {
        let q = q_values(eta, xi, 12);
        for n in 1..=12 {
            let d = dense_determinant(eta, 2.0 - xi, n).unwrap();
            assert!((d - q[n]).norm() <= 1e-10 * (1.0 + q[n].norm()), "eta {eta} xi {xi} n {n}");
        }
    }
}

#[test]
fn grid_propagation_matches_determinants() {
    for (eta, xi) in packet_points() {
        let params = QuantumParams::unit(xi);
        let pk = InitialPacket::new(eta, &params).unwrap();
        let samples =
            split_step_propagate(&pk, &params, Complex64::new(0.0, 0.0), 12, GridSpec::default()).unwrap();
        let pairs = q_sequence(eta, xi, 12).unwrap();
        for (s, p) in samples.iter().zip(&pairs) {
            let w = width(p, &pk);
            let e = mean_energy(p, &pk, &params);
            assert!((s.width - w).abs() <= 1e-6 * w, "eta {eta} xi {xi} n {}", s.n);
            assert!((s.energy - e).abs() <= 1e-6 * e, "eta {eta} xi {xi} n {}", s.n);
            assert!((s.norm - 1.0).abs() <= 1e-10);
        }
    }
}

#[test]
fn transfer_quadrature_matches_recurrence() {
    // the line kernel has unit width, so a quarter of the default resolution suffices
    let coarse = GridSpec {
        points: 1024,
        ..GridSpec::default()
    };
    let mut checked = 0;
    for g in [0.0, 0.1, 0.5, 1.0, 3.0] {
        for chi in [0.3, 1.0, 2.0, 4.0] {
            let spec = PolymerSpec::dimensionless(g, chi).unwrap();
            let run = transfer_integral(&spec, 20, coarse).unwrap();
            assert_eq!(run.widths.len(), 20);
            for (k, w) in run.widths.iter().enumerate() {
                let want = width_profile(&spec, k + 1).unwrap();
                assert!((w - want).abs() <= 1e-4 * want, "g {g} chi {chi} n {}", k + 1);
            }
            checked += 1;
        }
    }
    assert!(checked >= 20);
}
