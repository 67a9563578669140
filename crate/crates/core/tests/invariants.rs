use approx::assert_relative_eq;
use num_complex::Complex;
use proptest::prelude::*;

use nfext::estimators::range_profile;
use nfext::geometry::{build_layout, spherical_view, LayoutSpec, TargetSurface};
use nfext::oracle::grid_specular;
use nfext::physics::Physics;
use nfext::scenario::{ScenarioConfig, TargetKind};
use nfext::signal::{synthesize, TimeGrid, Waveform};
use nfext::spa::{pair_response, solve_stationary, solve_stationary_with, spa_coefficient, SolverOptions};
use nfext::{Mat3, Placement, Surface, Vec3d};

fn table_surfaces() -> [Surface; 3] {
    [
        TargetSurface::plate(0.8, 1.75).unwrap(),
        TargetSurface::sphere(1.24).unwrap(),
        TargetSurface::cylinder(1.24, 1.75).unwrap(),
    ]
}

fn antenna() -> impl Strategy<Value = Vec3d> {
    (-6.0..-2.0f64, -0.3..0.3f64, -0.5..0.5f64).prop_map(|(x, y, z)| Vec3d::new(x, y, z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shape_jet_matches_finite_differences(kind in 0usize..3, u in -0.9..0.9f64, w in -0.9..0.9f64) {
        let s = &table_surfaces()[kind];
        let (y, z) = (0.3 * u, 0.6 * w);
        let step = 1e-6 * 1.24f64.max(1.0);
        let h = |dy: f64, dz: f64| s.height(y + dy, z + dz).unwrap();
        let j = s.shape_jet(y, z).unwrap();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-5 * a.abs().max(1e-3);
        prop_assert!(close(j.hy, (h(step, 0.0) - h(-step, 0.0)) / (2.0 * step)));
        prop_assert!(close(j.hz, (h(0.0, step) - h(0.0, -step)) / (2.0 * step)));
        // second differences of h lose digits near h = 0; use the gradient instead
        let g = |dy: f64, dz: f64| s.shape_jet(y + dy, z + dz).unwrap();
        prop_assert!(close(j.hyy, (g(step, 0.0).hy - g(-step, 0.0).hy) / (2.0 * step)));
        prop_assert!(close(j.hzz, (g(0.0, step).hz - g(0.0, -step).hz) / (2.0 * step)));
        prop_assert!(close(j.hyz, (g(0.0, step).hy - g(0.0, -step).hy) / (2.0 * step)));
    }

    #[test]
    fn closed_form_plate_point_matches_fermat(tx in antenna(), rx in antenna()) {
        let plate = TargetSurface::plate(2.0, 2.0).unwrap();
        let numeric = SolverOptions { force_numeric: true, ..SolverOptions::default() };
        let a = solve_stationary(&plate, tx, rx, 1.0).unwrap()[0];
        let b = solve_stationary_with(&plate, tx, rx, 1.0, &numeric).unwrap()[0];
        prop_assert!(a.point.distance(b.point) <= 1e-8);
    }

    #[test]
    fn stationary_points_are_specular(kind in 0usize..3, tx in antenna(), rx in antenna()) {
        let s = &table_surfaces()[kind];
        for sp in solve_stationary(s, tx, rx, 1.0).unwrap() {
            let n = s.shape_jet(sp.param[0], sp.param[1]).unwrap().normal();
            let sum = (tx - sp.point).normalized() + (rx - sp.point).normalized();
            let tangential = sum - n * sum.dot(n);
            prop_assert!(tangential.norm() <= 1e-8, "{}", tangential.norm());
            // distance minimiser: psi = -k d has a negative definite Hessian
            prop_assert!(sp.det > 0.0 && sp.hess_psi.trace() < 0.0);
        }
    }

    #[test]
    fn lattice_never_beats_the_solver(kind in 0usize..3, tx in antenna(), rx in antenna()) {
        let s = &table_surfaces()[kind];
        let sp = solve_stationary(s, tx, rx, 1.0).unwrap()[0];
        let g = grid_specular(s, tx, rx, 64).unwrap();
        prop_assert!(g.total_distance >= sp.total_distance - 1e-9);
    }

    #[test]
    fn config_round_trip(
        spacing in 0.01..1.0f64,
        standoff in 0.5..20.0f64,
        carrier in 1e9..2e11f64,
        elements in 1usize..40,
        seed in any::<u64>(),
        kind in 0usize..3,
    ) {
        let cfg = ScenarioConfig {
            spacing,
            standoff,
            carrier,
            elements,
            seed,
            target: TargetKind::ALL[kind],
            ..ScenarioConfig::default()
        };
        let again = ScenarioConfig::parse(&cfg.to_text()).unwrap();
        prop_assert_eq!(&again, &cfg);
        prop_assert_eq!(ScenarioConfig::parse(&again.to_text()).unwrap(), again);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn complex_scaling_keeps_profile_argmax(re in -3.0..3.0f64, im in -3.0..3.0f64) {
        prop_assume!(re.hypot(im) > 1e-2);
        let mut cfg = ScenarioConfig { target: TargetKind::Plate, elements: 3, range_min: 3.95, range_max: 4.05, ..ScenarioConfig::default() };
        let axis = cfg.range_axis::<f64>();
        let reference = range_profile(&cfg.observe::<f64>(3.95, 4.05).unwrap(), &cfg.target_model(), &axis).unwrap();
        cfg.xi_re = re;
        cfg.xi_im = im;
        let scaled = range_profile(&cfg.observe::<f64>(3.95, 4.05).unwrap(), &cfg.target_model(), &axis).unwrap();
        prop_assert_eq!(reference.argmax, scaled.argmax);
        for (a, b) in reference.values_db.iter().zip(&scaled.values_db) {
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }
}

#[test]
fn sphere_monostatic_response_is_rotation_invariant() {
    let phys = Physics::new(77e9, 100e6).unwrap();
    let sphere = TargetSurface::sphere(1.24).unwrap();
    let centre = Vec3d::new(1.24, 0.0, 0.0);
    let reference = {
        let a = Vec3d::new(-4.0, 0.0, 0.0);
        let sp = solve_stationary(&sphere, a, a, phys.wavenumber()).unwrap()[0];
        spa_coefficient(&sphere, a, a, &sp, &phys).unwrap().norm()
    };
    for angle in [0.1, 0.7, 1.9, -2.5] {
        // rotating antenna and sphere about the x axis through the centre leaves the
        // sphere in place, so only the antenna moves
        let rot = Mat3::rotation_x(angle);
        let base = Vec3d::new(-4.0, 0.2, -0.1) - centre;
        let a = centre + rot.mul_vec(base);
        let a0 = centre + base;
        let mag = |p: Vec3d| {
            let sp = solve_stationary(&sphere, p, p, phys.wavenumber()).unwrap()[0];
            spa_coefficient(&sphere, p, p, &sp, &phys).unwrap().norm()
        };
        assert_relative_eq!(mag(a), mag(a0), max_relative = 1e-10);
    }
    let turned = sphere.with_placement(Placement { rotation: Mat3::rotation_x(0.8), translation: Vec3d::zero() });
    let a = Vec3d::new(-4.0, 0.0, 0.0);
    let sp = solve_stationary(&turned, a, a, phys.wavenumber()).unwrap()[0];
    assert_relative_eq!(spa_coefficient(&turned, a, a, &sp, &phys).unwrap().norm(), reference, max_relative = 1e-10);
}

#[test]
fn spherical_basis_is_orthonormal() {
    for (a, p) in [
        (Vec3d::new(-4.0, 0.0, 0.0), Vec3d::new(0.0, 0.1, 0.3)),
        (Vec3d::new(-2.0, 1.0, -0.5), Vec3d::new(0.2, -0.4, 0.6)),
    ] {
        let v = spherical_view(a, p).unwrap();
        let e_r = (p - a).normalized();
        assert!(e_r.dot(v.e_theta).abs() < 1e-12 && e_r.dot(v.e_phi).abs() < 1e-12);
        assert!(v.e_theta.dot(v.e_phi).abs() < 1e-12);
        assert!((e_r.cross(v.e_theta).norm() - 1.0).abs() < 1e-12);
        assert!((e_r.cross(v.e_theta) - v.e_phi).norm() < 1e-12 || (e_r.cross(v.e_theta) + v.e_phi).norm() < 1e-12);
    }
}

#[test]
fn synthesized_energy_matches_term_energy() {
    let phys = Physics::new(77e9, 100e6).unwrap();
    let layout = build_layout(&LayoutSpec::Linear { count: 5, spacing: 0.125, standoff: 4.0 }).unwrap();
    let sphere = TargetSurface::sphere(1.24).unwrap();
    let wf = Waveform::new(phys.bandwidth).unwrap();
    let responses: Vec<_> = [(0, 4), (2, 2), (4, 0)]
        .iter()
        .map(|&(l, m)| pair_response(&sphere, &layout, l, m, &phys).unwrap())
        .collect();
    let grid = TimeGrid::covering(2.0e-8, 3.2e-8, &wf, 8, 8.0).unwrap();
    let out = synthesize(&responses, &wf, &grid, Complex::new(1.0, 0.0), None).unwrap();
    for (resp, sig) in responses.iter().zip(&out) {
        let expected: f64 = resp.terms.iter().map(|t| t.amplitude.norm_sqr()).sum::<f64>() / phys.bandwidth;
        assert_relative_eq!(sig.energy(), expected, max_relative = 0.02);
    }
    // reciprocal pair: identical envelope
    for (a, b) in out[0].samples.iter().zip(&out[2].samples) {
        assert!((a.norm() - b.norm()).abs() <= 1e-9 * out[0].samples.iter().map(|s| s.norm()).fold(0.0, f64::max));
    }
}
