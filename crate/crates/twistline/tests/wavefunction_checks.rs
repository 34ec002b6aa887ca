//! Quadrature oracles for the Landau basis and the propagated state:
//! normalization, orthogonality, moments, ring radii, unitarity of the
//! width-rescaling transform, and the exact phase structure in the matched
//! uniform-field case.

use num_complex::Complex64;
use twistline::{
    compute_scales, integrate_ermakov, intensity_grid, landau_state, propagated_spinor,
    radial_moment, BeamSpec, Element, EnvelopeTrace, FieldLattice, GridSpec,
    IntegrationTolerances, ScaledSystem, Species, Spin, TwistedMode,
};

/// Composite Simpson rule on [0, r_max]; n must be even.
fn simpson<F: Fn(f64) -> f64>(f: F, r_max: f64, n: usize) -> f64 {
    assert!(n % 2 == 0);
    let h = r_max / n as f64;
    let mut acc = f(0.0) + f(r_max);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(k as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn landau_states_are_normalized() {
    use std::f64::consts::PI;
    for n in 0..=4u32 {
        for l in [-6i32, -3, 0, 1, 4, 6] {
            let mode = TwistedMode::new(n, l, Spin::Up);
            let r_max = (2.0 * mode.kappa()).sqrt() + 9.0;
            let norm = 2.0
                * PI
                * simpson(
                    |rho| landau_state(&mode, rho, 0.0, 0.0).norm_sqr() * rho,
                    r_max,
                    4000,
                );
            assert!(
                (norm - 1.0).abs() <= 1e-8,
                "n={n} l={l}: norm = {norm}"
            );
        }
    }
}

#[test]
fn landau_states_are_orthogonal_in_n() {
    use std::f64::consts::PI;
    for l in [0i32, 2, -3] {
        for n1 in 0..=3u32 {
            for n2 in 0..=3u32 {
                let m1 = TwistedMode::new(n1, l, Spin::Up);
                let m2 = TwistedMode::new(n2, l, Spin::Up);
                let r_max = 14.0;
                let overlap = 2.0
                    * PI
                    * simpson(
                        |rho| {
                            let a = landau_state(&m1, rho, 0.0, 0.0);
                            let b = landau_state(&m2, rho, 0.0, 0.0);
                            (a.conj() * b).re * rho
                        },
                        r_max,
                        4000,
                    );
                let expect = if n1 == n2 { 1.0 } else { 0.0 };
                assert!(
                    (overlap - expect).abs() <= 1e-7,
                    "l={l} n1={n1} n2={n2}: overlap = {overlap}"
                );
            }
        }
    }
}

#[test]
fn radial_moment_matches_quadrature() {
    use std::f64::consts::PI;
    // <rho^2> of the width-rescaled mode equals kappa b^2.
    for (n, l, b) in [(0u32, 0i32, 1.0f64), (0, 3, 2.0), (2, -1, 0.7)] {
        let mode = TwistedMode::new(n, l, Spin::Up);
        let r_max = b * ((2.0 * mode.kappa()).sqrt() + 9.0);
        let quad = 2.0
            * PI
            * simpson(
                |rho| {
                    let psi = landau_state(&mode, rho / b, 0.0, 0.0) / b;
                    rho * rho * psi.norm_sqr() * rho
                },
                r_max,
                6000,
            );
        let formula = radial_moment(&mode, b);
        assert!(
            (quad - formula).abs() / formula <= 1e-7,
            "n={n} l={l} b={b}: {quad} vs {formula}"
        );
    }
}

fn demo_scenario() -> (ScaledSystem, EnvelopeTrace) {
    let beam = BeamSpec::new(Species::Electron, 2.0, 0, 3, Spin::Up, 2.0, -1.0).unwrap();
    let lattice = FieldLattice::from_elements(vec![
        Element::Solenoid {
            length_m: 0.35,
            bz_tesla: 0.5,
        },
        Element::Cavity {
            length_m: 0.215,
            ez_mv_per_m: -10.0,
        },
        Element::Solenoid {
            length_m: 0.4,
            bz_tesla: 0.4,
        },
    ])
    .unwrap();
    let sys = compute_scales(&lattice, &beam, None).unwrap();
    let end = sys.z_tilde(lattice.end_m());
    let tol = IntegrationTolerances::default();
    let trace = integrate_ermakov(&sys, (0.0, end), 2.0, -1.0, &tol).unwrap();
    (sys, trace)
}

#[test]
fn propagated_state_reduces_to_initial_data_at_injection() {
    let (sys, trace) = demo_scenario();
    let mode = TwistedMode::new(0, 3, Spin::Up);
    let (b0, db0) = (2.0, -1.0);
    let f0_quarter = sys.longitudinal_amplitude(0.0).unwrap();
    for (rho, phi) in [(0.5, 0.0), (2.1, 1.3), (4.0, -2.0), (0.0, 0.4)] {
        let sample = propagated_spinor(&mode, &trace, rho, phi, 0.0).unwrap();
        // Full spinor = transverse-normalized amplitude times the separately
        // reported longitudinal factor.
        let full = sample.amplitude * f0_quarter;
        let chirp = Complex64::from_polar(1.0, (db0 / b0) * rho * rho / 2.0);
        let expect = landau_state(&mode, rho / b0, phi, 0.0) / b0 * chirp * f0_quarter;
        assert!(
            (full - expect).norm() <= 1e-12 * expect.norm().max(1e-6),
            "mismatch at rho={rho}, phi={phi}: {full} vs {expect}"
        );
    }
}

#[test]
fn transverse_norm_is_preserved_along_the_lattice() {
    use std::f64::consts::PI;
    let (sys, trace) = demo_scenario();
    let mode = TwistedMode::new(1, 2, Spin::Up);
    let end = trace.span().1;
    for frac in [0.0, 0.21, 0.5, 0.77, 1.0] {
        let z = end * frac;
        let b = trace.state_at(z).unwrap().b;
        let r_max = b * ((2.0 * mode.kappa()).sqrt() + 9.0);
        let norm = 2.0
            * PI
            * simpson(
                |rho| {
                    propagated_spinor(&mode, &trace, rho, 0.0, z)
                        .unwrap()
                        .intensity
                        * rho
                },
                r_max,
                4000,
            );
        assert!(
            (norm - 1.0).abs() <= 1e-6,
            "z~ = {z} (b = {b}): transverse norm = {norm}"
        );
    }
    let _ = sys;
}

#[test]
fn ring_radius_tracks_the_envelope() {
    let (_sys, trace) = demo_scenario();
    let end = trace.span().1;
    let z = 0.63 * end;
    let b = trace.state_at(z).unwrap().b;
    for l in [1i32, 3, 10] {
        let mode = TwistedMode::new(0, l, Spin::Up);
        let expect = b * (l.abs() as f64).sqrt();
        let grid = GridSpec {
            n_r: 600,
            n_phi: 4,
            r_max: 3.0 * expect.max(b),
        };
        let samples = intensity_grid(&mode, &trace, z, &grid).unwrap();
        let peak = samples
            .iter()
            .max_by(|a, b| a.intensity.total_cmp(&b.intensity))
            .unwrap();
        let cell = grid.r_max / grid.n_r as f64;
        assert!(
            (peak.rho - expect).abs() <= cell,
            "l={l}: peak at {} vs {expect} (cell {cell})",
            peak.rho
        );
    }
}

#[test]
fn matched_uniform_solenoid_has_pure_eigenphase_evolution() {
    // Omega = 1, f = p0^2, b = 1: the propagated state is the stationary
    // Landau mode times exp(i(-kappa + sign(q) l) z~) times the
    // quasiclassical residual.
    let beam = BeamSpec::new(Species::Electron, 2.0, 1, -2, Spin::Down, 1.0, 0.0).unwrap();
    let lattice = FieldLattice::from_elements(vec![Element::Solenoid {
        length_m: 0.5,
        bz_tesla: 0.5,
    }])
    .unwrap();
    let sys = compute_scales(&lattice, &beam, None).unwrap();
    let end = sys.z_tilde(0.5);
    let tol = IntegrationTolerances::default();
    let trace = integrate_ermakov(&sys, (0.0, end), 1.0, 0.0, &tol).unwrap();
    let mode = TwistedMode::new(1, -2, Spin::Down);
    let sign_q = sys.beam().charge_sign();
    for frac in [0.13, 0.5, 0.99] {
        let z = end * frac;
        let st = trace.state_at(z).unwrap();
        assert!((st.b - 1.0).abs() < 1e-10);
        for (rho, phi) in [(0.8, 0.3), (1.7, -1.1)] {
            let sample = propagated_spinor(&mode, &trace, rho, phi, z).unwrap();
            let stationary = landau_state(&mode, rho, phi, 0.0);
            let phase = -mode.kappa() * z
                + sign_q * mode.l as f64 * z
                + st.phi_wkb.residual_rad;
            let expect = stationary * Complex64::from_polar(1.0, phase);
            assert!(
                (sample.amplitude - expect).norm() <= 1e-8 * expect.norm().max(1e-8),
                "z~={z} rho={rho}: {} vs {expect}",
                sample.amplitude
            );
        }
    }
}

#[test]
fn charge_conjugate_mode_symmetry() {
    // l -> -l with sign(q) fixed: identical intensities; the amplitude ratio
    // is the pure phase exp(-2il(phi + phi_rot)).
    let (_sys, trace) = demo_scenario();
    let z = 0.4 * trace.span().1;
    let st = trace.state_at(z).unwrap();
    let plus = TwistedMode::new(0, 3, Spin::Up);
    let minus = TwistedMode::new(0, -3, Spin::Up);
    for (rho, phi) in [(1.0, 0.7), (2.5, -0.2), (3.3, 2.9)] {
        let a = propagated_spinor(&plus, &trace, rho, phi, z).unwrap();
        let b = propagated_spinor(&minus, &trace, rho, phi, z).unwrap();
        assert!((a.intensity - b.intensity).abs() <= 1e-12 * a.intensity.max(1e-12));
        let ratio = b.amplitude / a.amplitude;
        let expect = Complex64::from_polar(1.0, -2.0 * 3.0 * (phi + st.phi_rot));
        assert!(
            (ratio - expect).norm() <= 1e-9,
            "ratio {ratio} vs {expect}"
        );
    }
}

#[test]
fn grid_quadrature_weight_captures_unit_probability() {
    let (_sys, trace) = demo_scenario();
    let z = 0.8 * trace.span().1;
    let b = trace.state_at(z).unwrap().b;
    let mode = TwistedMode::new(1, 2, Spin::Up);
    let grid = GridSpec {
        n_r: 400,
        n_phi: 32,
        r_max: b * (mode.kappa().sqrt() + 5.0),
    };
    let samples = intensity_grid(&mode, &trace, z, &grid).unwrap();
    let total: f64 = samples
        .iter()
        .map(|s| grid.cell_weight(s.rho) * s.intensity)
        .sum();
    assert!(
        (total - 1.0).abs() <= 1e-4,
        "grid weight = {total} (b = {b})"
    );
}

#[test]
fn grid_rows_are_rho_major_and_deterministic() {
    let (_sys, trace) = demo_scenario();
    let mode = TwistedMode::new(0, 1, Spin::Up);
    let grid = GridSpec {
        n_r: 5,
        n_phi: 4,
        r_max: 2.0,
    };
    let a = intensity_grid(&mode, &trace, 0.5, &grid).unwrap();
    let b = intensity_grid(&mode, &trace, 0.5, &grid).unwrap();
    assert_eq!(a.len(), 20);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.amplitude, y.amplitude);
    }
    let dr = grid.r_max / grid.n_r as f64;
    let dphi = 2.0 * std::f64::consts::PI / grid.n_phi as f64;
    for (i, s) in a.iter().enumerate() {
        let ri = i / 4;
        let pj = i % 4;
        assert_eq!(s.rho, (ri as f64 + 0.5) * dr);
        assert_eq!(s.phi_rad, pj as f64 * dphi);
    }
}

#[test]
fn azimuthal_symmetry_of_intensity() {
    let (_sys, trace) = demo_scenario();
    let mode = TwistedMode::new(0, 2, Spin::Up);
    let z = 0.3 * trace.span().1;
    for k in 0..6 {
        let phi = k as f64 * std::f64::consts::PI / 3.0;
        let a = propagated_spinor(&mode, &trace, 1.5, 0.1, z).unwrap();
        let b = propagated_spinor(&mode, &trace, 1.5, 0.1 + phi, z).unwrap();
        assert!((a.intensity - b.intensity).abs() <= 1e-13);
    }
}
