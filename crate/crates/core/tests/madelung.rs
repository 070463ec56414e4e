mod common;

use common::*;
use fluidclock_core::madelung::{
    cross_term_relation, decompose, momentum_fields, momentum_identity_residual, osmotic_form_consistency, recompose,
    HydroOptions,
};
use fluidclock_core::ops::integrate_with;
use fluidclock_core::states;
use fluidclock_core::{Backend, Complex64, ComplexField, Wavefunction};
use proptest::prelude::*;
use std::f64::consts::PI;

fn benchmark_states() -> Vec<(&'static str, Wavefunction)> {
    let c = units();
    let g = grid1(40.0, 512);
    let k = 2.0 * PI * 32.0 / 40.0; // 32 periods across the box
    vec![
        ("plane wave", states::plane_wave(&g, &c, &[k]).unwrap()),
        ("rest gaussian", states::gaussian(&g, &c, &[0.0], 1.0, &[0.0]).unwrap()),
        ("boosted gaussian", states::gaussian(&g, &c, &[0.0], 1.0, &[2.0]).unwrap()),
        ("ho ground", states::ho_ground(&g, &c, 1.0).unwrap()),
        (
            "two-gaussian superposition",
            states::superposition(&[
                (Complex64::new(1.0, 0.0), states::gaussian(&g, &c, &[-3.0], 1.0, &[1.0]).unwrap()),
                (Complex64::new(0.0, 1.0), states::gaussian(&g, &c, &[3.0], 1.0, &[-1.0]).unwrap()),
            ])
            .unwrap(),
        ),
    ]
}

/// Roundoff scale of a log-derivative at point `k`: the spectral derivative
/// carries absolute error `~u·k_max·max R`, divided here by the local `R`.
fn log_derivative_roundoff(wf: &Wavefunction, k: usize) -> f64 {
    let g = wf.grid();
    let kmax = PI / g.spacing(0);
    let rmax = wf.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    1e-14 * (1.0 + kmax * rmax / wf.values()[k].norm())
}

/// `min_φ max|a − e^{iφ}b|` with `φ` fitted by the overlap phase.
fn phase_aligned_error(a: &Wavefunction, b: &Wavefunction, mask: &[bool]) -> f64 {
    let overlap: Complex64 = a.values().iter().zip(b.values()).map(|(x, y)| y.conj() * x).sum();
    let phase = Complex64::from_polar(1.0, overlap.arg());
    max_abs(a.values().iter().zip(b.values()).zip(mask).filter(|(_, m)| !**m).map(|((x, y), _)| (x - y * phase).norm()))
}

#[test]
fn round_trips_are_global_phase_equivalent() {
    let c = units();
    let g = grid1(40.0, 512);
    let k = 8.0 * PI / 40.0;
    for wf in [
        states::plane_wave(&g, &c, &[k]).unwrap(),
        states::ho_coherent(&g, &c, 1.0, &[2.0]).unwrap().with_global_phase(2.5),
        benchmark_states().pop().unwrap().1,
    ] {
        let polar = decompose(&wf, 1e-6).unwrap();
        let back = recompose(&polar, &c).unwrap();
        let err = phase_aligned_error(&back, &wf, &polar.node_mask);
        assert!(err < 1e-10, "{err}");
    }
}

#[test]
fn plane_wave_phase_is_hbar_k_x() {
    let c = units();
    let g = grid1(40.0, 512);
    let k = 8.0 * PI / 40.0;
    let polar = decompose(&states::plane_wave(&g, &c, &[k]).unwrap(), 1e-6).unwrap();
    let s0 = polar.phase.values()[polar.gauge_ref] - k * g.position(polar.gauge_ref)[0];
    for (j, s) in polar.phase.values().iter().enumerate() {
        assert!((s - s0 - k * g.position(j)[0]).abs() < 1e-10);
    }
    assert!(polar.node_mask.iter().all(|m| !m));
}

#[test]
fn identity_residual_is_small_on_every_benchmark_state() {
    for (name, wf) in benchmark_states() {
        for backend in [Backend::Spectral, Backend::CentralDifference] {
            let r = momentum_identity_residual(&wf, &HydroOptions::with_backend(backend)).unwrap();
            assert!(r.max_residual < 1e-8, "{name} {backend:?}: {}", r.max_residual);
        }
    }
    let (_, pw) = &benchmark_states()[0];
    assert!(momentum_identity_residual(pw, &HydroOptions::default()).unwrap().max_residual < 1e-12);
}

#[test]
fn osmotic_forms_agree_away_from_the_tails() {
    for (name, wf) in benchmark_states() {
        let rel = osmotic_form_consistency(&wf, Backend::Spectral, 1e-3).unwrap();
        assert!(rel < 1e-8, "{name}: {rel}");
    }
}

#[test]
fn cross_term_identity_and_vanishing_cases() {
    for (name, wf) in benchmark_states() {
        let r = cross_term_relation(&wf, &HydroOptions::default()).unwrap();
        let scale = r.cross_term.abs().max(1.0);
        assert!(r.relation_residual / scale < 1e-8, "{name}: {r:?}");
    }
    let c = units();
    let g = grid1(40.0, 512);
    for wf in [
        states::plane_wave(&g, &c, &[2.0 * PI * 10.0 / 40.0]).unwrap(),
        states::ho_coherent(&g, &c, 1.0, &[2.0]).unwrap(),
    ] {
        let r = cross_term_relation(&wf, &HydroOptions::default()).unwrap();
        assert!(r.cross_term.abs() < 1e-9 && r.mean_energy_fluctuation.abs() < 1e-9, "{r:?}");
    }
}

#[test]
fn quadratic_phase_cross_term_matches_quadrature() {
    let c = units();
    let g = grid1(40.0, 512);
    let alpha = 0.3;
    let sigma: f64 = 1.0;
    let psi = ComplexField::from_fn(g, |x, _| {
        Complex64::from_polar((-x * x / (4.0 * sigma * sigma)).exp(), alpha * x * x / 2.0)
    });
    let wf = Wavefunction::normalized(psi, c, 0.0).unwrap();
    let r = cross_term_relation(&wf, &HydroOptions::default()).unwrap();
    // quadrature with the analytic fields k = αx, k_u = −∇R/R = x/2σ², ∇·v = α
    let norm = (2.0 * PI).sqrt() * sigma;
    let p = |x: f64| (-x * x / (2.0 * sigma * sigma)).exp() / norm;
    let x_oracle = integrate_with(&g, |j| {
        let x = g.position(j)[0];
        p(x) * (alpha * x) * (x / (2.0 * sigma * sigma))
    });
    let de_oracle = integrate_with(&g, |j| p(g.position(j)[0]) * 0.5 * alpha);
    assert!((r.cross_term - x_oracle).abs() / x_oracle.abs() < 1e-8, "{} vs {x_oracle}", r.cross_term);
    assert!((r.mean_energy_fluctuation - de_oracle).abs() / de_oracle < 1e-8);
    assert!(r.relation_residual / x_oracle.abs() < 1e-8);
    assert!(x_oracle.abs() > 0.1 && de_oracle > 0.1);
}

#[test]
fn ground_state_energy_is_purely_osmotic() {
    let c = units();
    let g = grid1(40.0, 512);
    let wf = states::ho_ground(&g, &c, 1.0).unwrap();
    let v = harmonic(&g, 1.0);
    let m = momentum_fields(&wf, &HydroOptions::default()).unwrap();
    let p = wf.density();
    let osmotic =
        integrate_with(
            &g,
            |k| {
                if m.node_mask[k] {
                    0.0
                } else {
                    p.values()[k] * m.osmotic.component(0)[k].powi(2) / 2.0
                }
            },
        );
    let potential = integrate_with(&g, |k| p.values()[k] * v.values.values()[k]);
    assert!((osmotic + potential - 0.5).abs() < 1e-8, "{osmotic} + {potential}");
    for k in (0..g.len()).filter(|&k| !m.node_mask[k]) {
        assert!(m.convective.component(0)[k].abs() < log_derivative_roundoff(&wf, k));
    }
}

#[test]
fn gaussian_mask_matches_its_definition() {
    let c = units();
    let g = grid1(40.0, 512);
    let wf = states::gaussian(&g, &c, &[0.0], 1.0, &[0.0]).unwrap();
    let polar = decompose(&wf, 1e-6).unwrap();
    let rmax = polar.amplitude.values().iter().cloned().fold(0.0, f64::max);
    for (r, m) in polar.amplitude.values().iter().zip(&polar.node_mask) {
        assert_eq!(*m, *r < 1e-6 * rmax);
    }
    // the tails beyond |x| ≈ 7.43 fall below the threshold
    assert!(polar.masked_fraction() > 0.5);
    assert!(polar.phase.values().iter().all(|s| s.abs() < 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauge_invariance(phi in -PI..PI, k0 in -2.0f64..2.0, x0 in -3.0f64..3.0) {
        let c = units();
        let g = grid1(40.0, 256);
        let wf = states::gaussian(&g, &c, &[x0], 1.2, &[k0]).unwrap();
        let rotated = wf.with_global_phase(phi);
        let opts = HydroOptions::default();
        let a = momentum_fields(&wf, &opts).unwrap();
        let b = momentum_fields(&rotated, &opts).unwrap();
        prop_assert_eq!(&a.node_mask, &b.node_mask);
        for k in (0..g.len()).filter(|&k| !a.node_mask[k]) {
            let tol = log_derivative_roundoff(&wf, k);
            prop_assert!((a.convective.component(0)[k] - b.convective.component(0)[k]).abs() < tol);
            prop_assert!((a.osmotic.component(0)[k] - b.osmotic.component(0)[k]).abs() < tol);
        }
        let pa = decompose(&wf, 1e-6).unwrap();
        let pb = decompose(&rotated, 1e-6).unwrap();
        let shift = pb.phase.values()[0] - pa.phase.values()[0];
        for (sa, sb) in pa.phase.values().iter().zip(pb.phase.values()) {
            prop_assert!((sb - sa - shift).abs() < 1e-9);
        }
    }

    #[test]
    fn density_is_squared_amplitude_and_normalised(
        amps in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3),
        centres in proptest::collection::vec(-5.0f64..5.0, 3),
    ) {
        let c = units();
        let g = grid1(40.0, 256);
        let terms: Vec<(Complex64, Wavefunction)> = amps
            .iter()
            .zip(&centres)
            .map(|((re, im), x0)| (Complex64::new(*re + 1.5, *im), states::gaussian(&g, &c, &[*x0], 1.0, &[*x0 / 2.0]).unwrap()))
            .collect();
        let wf = states::superposition(&terms).unwrap();
        let polar = decompose(&wf, 1e-6).unwrap();
        for (r, p) in polar.amplitude.values().iter().zip(polar.density.values()) {
            prop_assert!(*r >= 0.0);
            prop_assert!((r * r - p).abs() <= 1e-15 * p.max(1e-300));
        }
        prop_assert!((fluidclock_core::ops::integrate(&polar.density) - 1.0).abs() < 1e-9);
    }
}
