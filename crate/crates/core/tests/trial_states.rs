mod common;

use rotgp_core::grid::Grid;
use rotgp_core::testfn::{optimal_upper_bound, trial_energy, TrialParams, DEFAULT_M};
use rotgp_core::townes::{interp_to_grid, lambda_param};
use rotgp_core::{DomainSpec, PotentialSpec};
use std::sync::Arc;

use common::{disk, profile};

#[test]
fn townes_profile_on_a_grid_keeps_its_mass() {
    let g = Arc::new(Grid::new(DomainSpec::rectangle(-12.0, 12.0, -12.0, 12.0), 241, 241).unwrap());
    let w = interp_to_grid(profile(), &g, 1.0, [0.0, 0.0]);
    let a_star = profile().a_star;
    assert!(
        (w.mass() - a_star).abs() < 5e-3 * a_star,
        "{} vs {a_star}",
        w.mass()
    );
}

#[test]
fn critical_trial_energy_approaches_the_potential_minimum() {
    let p = profile();
    // at a = a* the kinetic and interaction terms cancel to leading order,
    // so the lattice error of each must be well below the O(tau^-2) rest:
    // tau h = 0.12 here, and the cut-off ball 2 R_20 = 1.2 fits
    let g = disk(1.5, 513);
    let pot = PotentialSpec::new(2.0, 1.0).unwrap();
    let t = TrialParams {
        tau: 20.0,
        x_tau: [0.0, 0.0],
        m: DEFAULT_M,
        profile: p,
    };
    let e = trial_energy(&t, &g, p.a_star, &pot).unwrap();
    assert!(e.total <= 0.05 && e.total > -0.05, "{}", e.total);
}

#[test]
fn trial_energy_at_the_predicted_scale() {
    let p = profile();
    let g = disk(4.0, 257);
    let pot = PotentialSpec::new(2.0, 1.0).unwrap();
    let a = 0.99 * p.a_star;
    let lam = lambda_param(p, 2.0).unwrap();
    let gap = p.a_star - a;
    let t = TrialParams {
        tau: lam * gap.powf(-0.25),
        x_tau: [0.0, 0.0],
        m: DEFAULT_M,
        profile: p,
    };
    let e = trial_energy(&t, &g, a, &pot).unwrap().total;
    let want = 2.0 * lam * lam / p.a_star * gap.sqrt();
    assert!((e - want).abs() <= 0.1 * want, "{e} vs {want}");
}

#[test]
fn supercritical_trial_energy_is_unbounded_below() {
    let p = profile();
    let g = disk(3.0, 257);
    let pot = PotentialSpec::new(2.0, 1.0).unwrap();
    let e = |tau: f64| {
        let t = TrialParams {
            tau,
            x_tau: [0.0, 0.0],
            m: DEFAULT_M,
            profile: p,
        };
        trial_energy(&t, &g, 1.1 * p.a_star, &pot).unwrap().total
    };
    assert!(e(20.0) < e(10.0));
}

#[test]
fn best_scale_is_near_the_prediction() {
    let p = profile();
    let g = disk(4.0, 257);
    let pot = PotentialSpec::new(2.0, 1.0).unwrap();
    let a = 0.99 * p.a_star;
    let ub = optimal_upper_bound(&g, p, a, &pot).unwrap();
    let tau_c = lambda_param(p, 2.0).unwrap() * (p.a_star - a).powf(-0.25);
    let ratio = ub.tau / tau_c;
    assert!((1.0 / 1.5..=1.5).contains(&ratio), "{ratio}");
    assert!(ub.scan.iter().all(|&(_, e)| e >= ub.energy.total));
}

#[test]
fn best_center_is_the_potential_minimum() {
    let p = profile();
    let g = disk(4.0, 129);
    let h = g.h_max();
    let pot = PotentialSpec::new(2.0, 1.0).unwrap();
    let a = 0.9 * p.a_star;
    let mut best = (f64::INFINITY, [f64::NAN; 2]);
    for i in -3..=3 {
        for j in -3..=3 {
            let c = [i as f64 * h, j as f64 * h];
            let t = TrialParams {
                tau: 3.0,
                x_tau: c,
                m: DEFAULT_M,
                profile: p,
            };
            let e = trial_energy(&t, &g, a, &pot).unwrap().total;
            if e < best.0 {
                best = (e, c);
            }
        }
    }
    assert!(best.1[0].hypot(best.1[1]) <= 2.0 * h, "{:?}", best.1);
}
