use bandedge::analysis::{
    count_local_maxima, count_local_minima, envelope, max, min, settling_time,
};
use bandedge::{
    eval_susceptibility, solve_closed_form, steady_state_value, SystemParams, TimeGrid,
};

const FAMILY: [f64; 4] = [5.0, 1.0, 0.5, 0.2];

fn trace(
    gamma: f64,
    t_max: f64,
    n: usize,
) -> (
    TimeGrid,
    bandedge::AmplitudeTrace,
    bandedge::SusceptibilityTrace,
) {
    let p = SystemParams {
        gamma,
        ..Default::default()
    };
    let grid = TimeGrid::new(t_max, n).unwrap();
    let amp = solve_closed_form(&p, &grid).unwrap();
    let chi = eval_susceptibility(&p, &amp);
    (grid, amp, chi)
}

#[test]
fn transparency_at_gap_resonance() {
    for gamma in FAMILY {
        for d in [0.0, 0.7] {
            let p = SystemParams {
                gamma,
                delta: d,
                delta_g: d,
                ..Default::default()
            };
            assert_eq!(steady_state_value(&p).unwrap().norm(), 0.0);
            let grid = TimeGrid::new(210.0, 21000).unwrap();
            let amp = solve_closed_form(&p, &grid).unwrap();
            let a: Vec<f64> = amp.b1.iter().map(|b| b.norm()).collect();
            let early = envelope(&grid, &a, 20.0, 10.0).unwrap();
            let late = envelope(&grid, &a, 200.0, 10.0).unwrap();
            assert!(
                early >= 3.0 * late,
                "gamma = {gamma}, delta = {d}: {early} vs {late}"
            );
        }
    }
}

#[test]
fn strong_decay_only_absorbs() {
    let (_, _, chi) = trace(5.0, 50.0, 5000);
    let top = max(&chi.neg_im_chi);
    assert!(min(&chi.neg_im_chi) >= -1e-6 * top);
}

#[test]
fn weak_decay_shows_transient_gain() {
    let (_, amp, chi) = trace(0.2, 50.0, 5000);
    let k = chi
        .neg_im_chi
        .iter()
        .position(|&v| v < 0.0)
        .expect("no gain window");
    // no population inversion at the time of gain
    assert!(amp.b1[k].norm_sqr() < amp.b0[k].norm_sqr());
}

#[test]
fn intermediate_decay_wiggles_without_gain() {
    let (_, _, chi) = trace(1.0, 50.0, 5000);
    let top = max(&chi.neg_im_chi);
    assert!(min(&chi.neg_im_chi) >= -1e-6 * top);
    assert!(count_local_minima(&chi.neg_im_chi) >= 1);
}

#[test]
fn upper_population_oscillations() {
    let pop = |g| {
        let (_, _, chi) = trace(g, 50.0, 5000);
        count_local_maxima(&chi.population1)
    };
    assert_eq!(pop(5.0), 1);
    assert!(pop(0.2) >= 2);
}

#[test]
fn settling_slows_as_decay_weakens() {
    let times: Vec<f64> = FAMILY
        .iter()
        .map(|&g| {
            let p = SystemParams {
                gamma: g,
                ..Default::default()
            };
            let (grid, amp, _) = trace(g, 200.0, 20000);
            let ss = steady_state_value(&p).unwrap();
            let dist: Vec<f64> = amp.b1.iter().map(|b| (b - ss).norm()).collect();
            settling_time(&grid, &dist)
        })
        .collect();
    assert!(times.windows(2).all(|w| w[0] < w[1]), "{times:?}");
}

#[test]
fn detuned_gap_is_more_transparent() {
    let long_time = |delta| {
        let p = SystemParams {
            delta,
            delta_g: 0.5,
            ..Default::default()
        };
        let amp = solve_closed_form(&p, &TimeGrid::new(400.0, 8000).unwrap()).unwrap();
        amp.b1.last().unwrap().norm()
    };
    assert!(long_time(0.5) < long_time(0.0));
}

#[test]
fn susceptibility_is_probe_independent() {
    for gamma in FAMILY {
        let p1 = SystemParams {
            gamma,
            ..Default::default()
        };
        let p2 = SystemParams {
            omega_rabi: 2.0 * p1.omega_rabi,
            ..p1
        };
        let grid = TimeGrid::new(50.0, 2000).unwrap();
        let a1 = solve_closed_form(&p1, &grid).unwrap();
        let a2 = solve_closed_form(&p2, &grid).unwrap();
        let c1 = eval_susceptibility(&p1, &a1);
        let c2 = eval_susceptibility(&p2, &a2);
        let scale = a1.max_abs_b1();
        for k in 0..grid.len() {
            assert!((a2.b1[k] - 2.0 * a1.b1[k]).norm() <= 1e-14 * scale);
            assert!((c2.chi[k] - c1.chi[k]).norm() <= 1e-13 * c1.chi[k].norm().max(1e-300) + 1e-13);
        }
    }
}

#[test]
fn long_horizon_stays_finite() {
    for gamma in FAMILY {
        let (_, amp, chi) = trace(gamma, 1000.0, 20000);
        assert!(amp.b1.iter().all(|b| b.is_finite()));
        assert!(chi.chi.iter().all(|c| c.is_finite()));
    }
}
