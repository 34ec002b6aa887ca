//! End-to-end checks of the command layer: parsing, outputs, exit codes,
//! determinism, and the closed-form behavior of the emitted tables.

use std::fs;
use std::path::{Path, PathBuf};

use proptest::prelude::*;
use twistline::{compute_scales, fields::cosine_ramp_factor, BeamSpec, Element, FieldLattice, Species, Spin};
use twistline_cli::{
    parse_lattice, parse_profile_csv, run, serialize_lattice, serialize_profile_csv, CommandKind,
    LatticeFile, ParseError, RunConfig, RunError, EXIT_PARSE, EXIT_TURNING_POINT,
    EXIT_VALIDITY_FAIL,
};

fn repo_lattice(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../lattices")
        .join(name)
}

fn tempdir() -> tempfile::TempDir {
    tempfile::tempdir().expect("temp dir")
}

#[test]
fn envelope_free_space_matches_diffraction_law() {
    let dir = tempdir();
    let out = dir.path().join("envelope.csv");
    let mut config = RunConfig::new(CommandKind::Envelope, repo_lattice("free_space.lat"));
    config.output_path = Some(out.clone());
    config.dz_tilde = 0.25;
    run(&config).unwrap();

    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "z_m,z_dimless,b,db,w_m,energy_mev,f_mev2,gamma_tilde,omega_tilde,phase_wkb_turns,phase_wkb_residual_rad,phase_gouy_per_kappa,phase_rot_per_l"
    );
    let mut checked = 0;
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let (z, b, gouy, rot) = (cols[1], cols[2], cols[11], cols[12]);
        let exact = (1.0 + z * z).sqrt();
        assert!(
            (b - exact).abs() <= 1e-8,
            "b column off at z~ = {z}: {b} vs {exact}"
        );
        assert!((gouy - z.atan()).abs() <= 1e-7);
        assert_eq!(rot, 0.0);
        checked += 1;
    }
    assert!(checked > 300);
    // Sidecar metadata exists and data file carries no timestamps.
    assert!(dir.path().join("envelope.csv.meta.txt").exists());
}

#[test]
fn envelope_demo_lattice_reaches_full_energy() {
    let dir = tempdir();
    let out = dir.path().join("envelope.csv");
    let mut config = RunConfig::new(
        CommandKind::Envelope,
        repo_lattice("accel_width_recovery.lat"),
    );
    config.output_path = Some(out.clone());
    config.dz_tilde = 0.5;
    run(&config).unwrap();
    let text = fs::read_to_string(&out).unwrap();
    let last = text.lines().last().unwrap();
    let cols: Vec<f64> = last.split(',').map(|c| c.parse().unwrap()).collect();
    assert!((cols[5] - 8.45).abs() <= 1e-12, "final energy {}", cols[5]);
}

#[test]
fn crosscheck_uniform_cavity_is_at_machine_precision() {
    for name in ["uniform_cavity_1p4.lat", "uniform_cavity_3p0.lat"] {
        let dir = tempdir();
        let out = dir.path().join("crosscheck.txt");
        let mut config = RunConfig::new(CommandKind::Crosscheck, repo_lattice(name));
        config.output_path = Some(out.clone());
        run(&config).unwrap();
        let text = fs::read_to_string(&out).unwrap();
        let get = |key: &str| -> f64 {
            text.lines()
                .find_map(|l| l.strip_prefix(&format!("{key}=")))
                .unwrap()
                .parse()
                .unwrap()
        };
        assert!(get("max_rel_dev_closed_vs_silenko") <= 1e-10, "{name}");
        assert!(get("max_rel_dev_closed_vs_ode") <= 1e-7, "{name}");
        assert!(get("max_rel_dev_silenko_vs_ode") <= 1e-7, "{name}");
    }
}

#[test]
fn hill_command_reports_small_deviations() {
    let dir = tempdir();
    let out = dir.path().join("hill.txt");
    let mut config = RunConfig::new(
        CommandKind::Hill,
        repo_lattice("accel_width_recovery.lat"),
    );
    config.output_path = Some(out.clone());
    run(&config).unwrap();
    let text = fs::read_to_string(&out).unwrap();
    let b_dev: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("max_abs_dev_b="))
        .unwrap()
        .parse()
        .unwrap();
    let w_dev: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("max_rel_dev_wronskian="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(b_dev <= 1e-6, "b deviation {b_dev}");
    assert!(w_dev <= 1e-8, "wronskian deviation {w_dev}");
}

#[test]
fn check_passes_for_relativistic_beam() {
    let dir = tempdir();
    let lat = dir.path().join("linac.lat");
    fs::write(
        &lat,
        "beam particle=electron energy_total_mev=2.01099895 n=0 l=0 spin=up b0=1.0 db0=0.0\n\
         reference bz_tesla=0.5\n\
         element kind=cavity length_m=0.5 ez_mv_per_m=-10\n",
    )
    .unwrap();
    let out = dir.path().join("check.csv");
    let mut config = RunConfig::new(CommandKind::Check, &lat);
    config.output_path = Some(out.clone());
    config.strict = true;
    run(&config).unwrap();
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "z_m,criterion,value,threshold,status");
    let mut rows = 0;
    for line in lines {
        assert!(line.ends_with(",PASS"), "non-PASS row: {line}");
        rows += 1;
    }
    // 17 points per element + final boundary, times three criteria.
    assert_eq!(rows, 18 * 3);
}

#[test]
fn strict_check_fails_with_exit_code_4() {
    let dir = tempdir();
    let lat = dir.path().join("slow.lat");
    // 500 eV kinetic energy electron in a strong gradient: quasiclassical
    // criteria cannot clear two decades.
    fs::write(
        &lat,
        "beam particle=electron energy_total_mev=0.5115 n=0 l=0 spin=up b0=1.0 db0=0.0\n\
         reference bz_tesla=0.5\n\
         element kind=cavity length_m=0.0001 ez_mv_per_m=-10\n",
    )
    .unwrap();
    let mut config = RunConfig::new(CommandKind::Check, &lat);
    config.output_path = Some(dir.path().join("check.csv"));
    config.strict = true;
    let err = run(&config).unwrap_err();
    assert_eq!(err.exit_code(), EXIT_VALIDITY_FAIL);
    // Without --strict the same run succeeds and still writes the report.
    config.strict = false;
    run(&config).unwrap();
}

#[test]
fn parse_errors_exit_with_code_2() {
    let dir = tempdir();
    let lat = dir.path().join("bad.lat");
    fs::write(&lat, "element kind=drift length_m=1\n").unwrap();
    let config = RunConfig::new(CommandKind::Envelope, &lat);
    let err = run(&config).unwrap_err();
    assert_eq!(err.exit_code(), EXIT_PARSE);
    assert!(matches!(err, RunError::Parse { .. }));
}

#[test]
fn turning_point_exits_with_code_3() {
    let dir = tempdir();
    let lat = dir.path().join("decel.lat");
    fs::write(
        &lat,
        "beam particle=electron energy_total_mev=2.0 n=0 l=0 spin=up b0=1.0 db0=0.0\n\
         reference bz_tesla=0.5\n\
         element kind=cavity length_m=0.2 ez_mv_per_m=10\n",
    )
    .unwrap();
    let mut config = RunConfig::new(CommandKind::Envelope, &lat);
    config.output_path = Some(dir.path().join("env.csv"));
    let err = run(&config).unwrap_err();
    assert_eq!(err.exit_code(), EXIT_TURNING_POINT);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempdir();
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    for out in [&out1, &out2] {
        let mut config = RunConfig::new(
            CommandKind::Wavefunction,
            repo_lattice("uniform_solenoid.lat"),
        );
        config.output_path = Some(out.clone());
        config.z_tilde_eval = 5.0;
        config.n_r = 32;
        config.n_phi = 16;
        config.r_max = 6.0;
        run(&config).unwrap();
    }
    let a = fs::read(&out1).unwrap();
    let b = fs::read(&out2).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next().unwrap(), "rho_dimless,phi_rad,re,im,intensity");
    assert_eq!(text.lines().count(), 1 + 32 * 16);
    // intensity column is |amplitude|^2
    for line in text.lines().skip(1).take(20) {
        let c: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!((c[4] - (c[2] * c[2] + c[3] * c[3])).abs() <= 1e-15 * c[4].max(1e-30));
    }
}

#[test]
fn sampled_profile_reproduces_cosine_ramped_solenoid() {
    // Densely sample a solenoid with raised-cosine fringes, run it through
    // the CSV path, and compare Omega against the analytic ramp.
    let elements = vec![Element::Solenoid {
        length_m: 0.4,
        bz_tesla: 0.5,
    }];
    let lattice = FieldLattice::from_elements(elements).unwrap();
    let ramp = 0.05;
    let sampled = lattice.sampled_with_cosine_ramps(ramp, 5e-4).unwrap();
    let csv = serialize_profile_csv(&sampled).unwrap();
    let parsed = parse_profile_csv(&csv).unwrap();

    let beam = BeamSpec::new(Species::Electron, 2.0, 0, 1, Spin::Up, 1.0, 0.0).unwrap();
    let sys = compute_scales(&parsed, &beam, None).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..4000 {
        let z = 0.4 * (k as f64 + 0.31) / 4000.0;
        let omega = sys.omega(sys.z_tilde(z));
        let analytic = cosine_ramp_factor(z, 0.0, 0.4, ramp);
        worst = worst.max((omega - analytic).abs());
    }
    assert!(worst <= 1e-3, "Omega interpolation error {worst}");
}

#[test]
fn profile_flag_substitutes_the_element_list() {
    let dir = tempdir();
    let lat = dir.path().join("beam_only.lat");
    fs::write(
        &lat,
        "beam particle=electron energy_total_mev=2.0 n=0 l=0 spin=up b0=1.0 db0=0.0\n",
    )
    .unwrap();
    let profile = dir.path().join("fields.csv");
    fs::write(
        &profile,
        "z_m,bz_tesla,ez_mv_per_m\n0.0,0.5,0\n0.5,0.5,0\n",
    )
    .unwrap();
    let out = dir.path().join("env.csv");
    let mut config = RunConfig::new(CommandKind::Envelope, &lat);
    config.profile_path = Some(profile);
    config.output_path = Some(out.clone());
    run(&config).unwrap();
    // Matched beam in the uniform solenoid: b stays 1.
    let text = fs::read_to_string(&out).unwrap();
    for line in text.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!((cols[2] - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn all_repo_lattices_parse() {
    for name in [
        "accel_width_recovery.lat",
        "free_space.lat",
        "uniform_solenoid.lat",
        "uniform_cavity_1p4.lat",
        "uniform_cavity_3p0.lat",
    ] {
        let text = fs::read_to_string(repo_lattice(name)).unwrap();
        parse_lattice(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

fn species_strategy() -> impl Strategy<Value = Species> {
    prop_oneof![
        Just(Species::Electron),
        Just(Species::Proton),
        (1.0f64..2000.0, prop::bool::ANY).prop_map(|(m, neg)| Species::Custom {
            mass_mev: m,
            charge_sign: if neg { -1 } else { 1 },
        }),
    ]
}

fn element_vec_strategy() -> impl Strategy<Value = Vec<Element>> {
    prop::collection::vec(
        prop_oneof![
            (0.01f64..2.0).prop_map(|length_m| Element::Drift { length_m }),
            (0.01f64..2.0, -0.5f64..0.5).prop_map(|(length_m, bz_tesla)| Element::Solenoid {
                length_m,
                bz_tesla
            }),
            (0.01f64..2.0, -10.0f64..10.0).prop_map(|(length_m, ez_mv_per_m)| Element::Cavity {
                length_m,
                ez_mv_per_m
            }),
        ],
        0..7,
    )
}

proptest! {
    /// parse(serialize(file)) is the identity on the semantic content.
    #[test]
    fn lattice_round_trip(
        species in species_strategy(),
        energy_over_mass in 1.001f64..100.0,
        n in 0u32..5,
        l in -50i32..50,
        up in prop::bool::ANY,
        b0 in 0.1f64..5.0,
        db0 in -3.0f64..3.0,
        bz_ref in prop::option::of(0.01f64..2.0),
        elements in element_vec_strategy(),
    ) {
        let beam = BeamSpec::new(
            species,
            species.mass_mev() * energy_over_mass,
            n,
            l,
            if up { Spin::Up } else { Spin::Down },
            b0,
            db0,
        ).unwrap();
        let file = LatticeFile {
            beam,
            lattice: FieldLattice::from_elements(elements).unwrap(),
            bz_ref_override: bz_ref,
        };
        let text = serialize_lattice(&file);
        let parsed = parse_lattice(&text).unwrap();
        prop_assert_eq!(&parsed.beam, &file.beam);
        prop_assert_eq!(parsed.bz_ref_override, file.bz_ref_override);
        prop_assert_eq!(parsed.lattice.elements(), file.lattice.elements());
        // Serialization is itself stable.
        prop_assert_eq!(serialize_lattice(&parsed), text);
    }
}

#[test]
fn parse_error_messages_carry_line_numbers() {
    let text = "beam particle=electron energy_total_mev=2 n=0 l=0 spin=up b0=1 db0=0\n\
                element kind=solenoid length_m=0.5 bz_tesla=0.5\n\
                element kind=cavity length_m=0.1 ez_mv_per_m=oops\n";
    match parse_lattice(text) {
        Err(ParseError::Syntax { line, .. }) => assert_eq!(line, 3),
        other => panic!("unexpected: {other:?}"),
    }
}
