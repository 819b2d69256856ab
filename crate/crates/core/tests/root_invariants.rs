use bandedge::volterra::{solve_full_system, solve_perturbative, SolverConfig};
use bandedge::{build_root_system, KernelSpec, SystemParams, TimeGrid};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = SystemParams> {
    (
        0.2f64..3.0,
        0.0f64..6.0,
        -2.0f64..2.0,
        -2.0f64..2.0,
        1e-4f64..0.1,
    )
        .prop_map(|(beta, gamma, delta, delta_g, omega_rabi)| SystemParams {
            beta,
            gamma,
            delta,
            delta_g,
            omega_rabi,
            chi_prefactor: 1.0,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn weights_cancel_at_origin(p in params()) {
        let rs = match build_root_system(&p) {
            Ok(rs) => rs,
            Err(bandedge::Error::DegenerateRoots { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(rs.initial_value_defect().norm() <= 1e-12 * p.omega_rabi);
        prop_assert!(rs.residuals.iter().all(|r| *r < 1e-10));
        let sum: num_complex::Complex64 = rs.x.iter().sum();
        let scale = rs.x.iter().map(|x| x.norm()).fold(0.0, f64::max);
        prop_assert!(sum.norm() <= 1e-10 * scale);
    }
}

#[test]
fn full_system_confirms_weak_probe() {
    let p = SystemParams::default();
    let spec = KernelSpec::from_params(&p);
    let grid = TimeGrid::new(50.0, 10000).unwrap();
    let full = solve_full_system(&p, &spec, &SolverConfig::full_system(grid)).unwrap();
    let pert = solve_perturbative(&p, &spec, &SolverConfig::perturbative(grid)).unwrap();
    assert!(full.max_ground_depletion() < 1e-3);
    assert!(full.max_abs_diff(&pert) <= 1e-3 * pert.max_abs_b1());
}

#[test]
fn perturbative_solver_is_linear_in_probe() {
    let p1 = SystemParams {
        gamma: 0.5,
        delta: 0.2,
        ..Default::default()
    };
    let p2 = SystemParams {
        omega_rabi: 3.0 * p1.omega_rabi,
        ..p1
    };
    let spec = KernelSpec::from_params(&p1);
    let cfg = SolverConfig::perturbative(TimeGrid::new(10.0, 1000).unwrap());
    let a = solve_perturbative(&p1, &spec, &cfg).unwrap();
    let b = solve_perturbative(&p2, &spec, &cfg).unwrap();
    let scale = b.max_abs_b1();
    for (x, y) in a.b1.iter().zip(&b.b1) {
        assert!((3.0 * x - y).norm() <= 1e-14 * scale);
    }
}
