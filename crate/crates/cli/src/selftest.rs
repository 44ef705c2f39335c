//! Quick exact-answer checks of every module, runnable without a config.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;

use num_complex::Complex64;
use rotgp_core::asymptotics::phase_align;
use rotgp_core::energy::{diamagnetic_check, gn_check, gp_energy, lagrange_multiplier};
use rotgp_core::field_io::{read_field, write_field, FieldDump};
use rotgp_core::grid::{gradient_apply, laplacian_apply};
use rotgp_core::minimize::{continuation_sweep, initial_field, predicted_scale};
use rotgp_core::testfn::{build_trial, TrialParams, DEFAULT_M};
use rotgp_core::townes::{interp_to_grid, lambda_param, solve_townes};
use rotgp_core::{
    ComplexField, DomainSpec, Error, Grid, PotentialSpec, SolverConfig, TownesProfile,
};

type Check = (&'static str, Box<dyn Fn(&TownesProfile) -> bool>);

fn disk(r: f64, n: usize) -> Arc<Grid> {
    Arc::new(Grid::new(DomainSpec::disk(r), n, n).unwrap())
}

fn bump(g: &Arc<Grid>) -> ComplexField {
    let mut u = ComplexField::from_fn(g.clone(), |x, y| {
        Complex64::from_polar(
            (-(x * x + 2.0 * y * y)).exp() * (1.0 + 0.3 * x),
            0.7 * x - 0.4 * y * y,
        )
    });
    u.normalize().unwrap();
    u
}

fn checks() -> Vec<Check> {
    vec![
        (
            "grid: rectangle membership",
            Box::new(|_| {
                let g = Grid::new(DomainSpec::rectangle(-1.0, 1.0, -1.0, 1.0), 11, 11).unwrap();
                (0..g.len()).all(|n| {
                    let (x, y) = g.coords(n);
                    g.is_interior(n) == (x.abs() < 1.0 && y.abs() < 1.0)
                })
            }),
        ),
        (
            "grid: nx = 2 rejected",
            Box::new(|_| {
                Grid::new(DomainSpec::disk(1.0), 2, 9)
                    .map_err(|e| e.kind())
                    .err()
                    == Some("invalid-resolution")
            }),
        ),
        (
            "grid: operators map zero to zero",
            Box::new(|_| {
                let z = ComplexField::zeros(disk(1.0, 17));
                let (gx, gy) = gradient_apply(&z);
                laplacian_apply(&z).max_abs() == 0.0
                    && gx.max_abs() == 0.0
                    && gy.max_abs() == 0.0
                    && z.grid().integrate(&vec![0.0; z.grid().len()]) == 0.0
            }),
        ),
        (
            "townes: lambda at Lambda = 1 and 3",
            Box::new(|p| {
                let l1 = lambda_param(p, 1.0).unwrap().powi(4);
                let l3 = lambda_param(p, 3.0).unwrap().powi(4);
                (l1 - p.i2).abs() < 1e-12 * p.i2 && (l3 - 2.0 * p.i2).abs() < 1e-12 * p.i2
            }),
        ),
        (
            "townes: tail below 1e-7 at r = 20",
            Box::new(|p| p.eval(20.0) < 1e-7 && p.eval(20.0) > 0.0),
        ),
        (
            "townes: grid profile vanishes outside",
            Box::new(|p| {
                let g = disk(1.0, 17);
                let w = interp_to_grid(p, &g, 1.0, [0.0, 0.0]);
                (0..g.len()).all(|n| g.is_interior(n) || w.values()[n] == Complex64::new(0.0, 0.0))
            }),
        ),
        (
            "energy: real fields carry no rotation",
            Box::new(|_| {
                let g = disk(2.0, 33);
                let u = ComplexField::from_fn(g, |x, y| {
                    Complex64::new((-(x * x + y * y)).exp() * (1.0 + x), 0.0)
                });
                gp_energy(&u, 3.0, &PotentialSpec::new(2.0, 1.5).unwrap())
                    .unwrap()
                    .rotation
                    == 0.0
            }),
        ),
        (
            "energy: mu = e at a = 0",
            Box::new(|_| {
                let u = bump(&disk(2.0, 33));
                let e = gp_energy(&u, 0.0, &PotentialSpec::new(2.0, 1.0).unwrap())
                    .unwrap()
                    .total;
                lagrange_multiplier(e, &u, 0.0).unwrap() == e
            }),
        ),
        (
            "energy: residual of a non-minimizer is positive",
            Box::new(|_| {
                let u = bump(&disk(2.0, 33));
                let pot = PotentialSpec::new(2.0, 1.0).unwrap();
                let e = gp_energy(&u, 1.0, &pot).unwrap().total;
                let mu = lagrange_multiplier(e, &u, 1.0).unwrap();
                rotgp_core::energy::el_residual(&u, 1.0, mu, &pot) > 0.0
            }),
        ),
        (
            "energy: diamagnetic margin of a real field",
            Box::new(|_| {
                let g = disk(2.0, 33);
                let u =
                    ComplexField::from_fn(g, |x, y| Complex64::new((-(x * x + y * y)).exp(), 0.0));
                diamagnetic_check(&u, 1.0) >= -1e-8 * u.max_abs().powi(2)
            }),
        ),
        (
            "energy: narrow bump far below the GN constant",
            Box::new(|p| {
                let g = disk(1.0, 33);
                let u = ComplexField::from_fn(g, |x, y| {
                    Complex64::new(if x.hypot(y) < 0.1 { 1.0 } else { 0.0 }, 0.0)
                });
                gn_check(&u).unwrap() < 0.5 * 2.0 / p.a_star
            }),
        ),
        (
            "minimize: initial bump normalized",
            Box::new(|p| {
                let g = disk(4.0, 33);
                initial_field(&g, p, 0.0, &PotentialSpec::free(0.0).unwrap(), 0, 0.0)
                    .map(|u| (u.mass() - 1.0).abs() < 1e-10)
                    .unwrap_or(false)
            }),
        ),
        (
            "minimize: predicted scale",
            Box::new(|p| {
                let a = 0.99 * p.a_star;
                let want = lambda_param(p, 2.0).unwrap() * (p.a_star - a).powf(-0.25);
                (predicted_scale(p, a, &PotentialSpec::new(2.0, 1.0).unwrap()).unwrap() - want)
                    .abs()
                    < 1e-12 * want
            }),
        ),
        (
            "minimize: seeded start is reproducible",
            Box::new(|p| {
                let g = disk(4.0, 33);
                let pot = PotentialSpec::new(2.0, 1.0).unwrap();
                initial_field(&g, p, 3.0, &pot, 9, 1e-2).unwrap()
                    == initial_field(&g, p, 3.0, &pot, 9, 1e-2).unwrap()
            }),
        ),
        (
            "minimize: empty sweep",
            Box::new(|p| {
                let g = disk(4.0, 17);
                continuation_sweep(
                    &g,
                    p,
                    &[],
                    &PotentialSpec::new(2.0, 1.0).unwrap(),
                    &SolverConfig::default(),
                )
                .map(|r| r.is_empty())
                .unwrap_or(false)
            }),
        ),
        (
            "minimize: supercritical sweep rejected",
            Box::new(|p| {
                let g = disk(4.0, 17);
                matches!(
                    continuation_sweep(
                        &g,
                        p,
                        &[0.5 * p.a_star, 1.2 * p.a_star],
                        &PotentialSpec::new(2.0, 1.0).unwrap(),
                        &SolverConfig::default()
                    ),
                    Err(Error::Supercritical { .. })
                )
            }),
        ),
        (
            "testfn: support and reality",
            Box::new(|p| {
                let g = disk(3.0, 65);
                let t = TrialParams {
                    tau: 5.0,
                    x_tau: [0.0, 0.0],
                    m: DEFAULT_M,
                    profile: p,
                };
                let u = build_trial(&t, &g, 0.0).unwrap();
                let r2 = 2.0 * t.r_tau();
                (u.mass() - 1.0).abs() < 1e-10
                    && u.values().iter().all(|z| z.im == 0.0 && z.re >= 0.0)
                    && (0..g.len()).all(|n| {
                        let (x, y) = g.coords(n);
                        x.hypot(y) < r2 || u.values()[n] == Complex64::new(0.0, 0.0)
                    })
            }),
        ),
        (
            "asymptotics: phase alignment",
            Box::new(|_| {
                let w: Vec<f64> = (0..40).map(|k| (-(k as f64) / 10.0).exp()).collect();
                let v: Vec<Complex64> = w.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                let turned: Vec<Complex64> = v
                    .iter()
                    .map(|z| z * Complex64::from_polar(1.0, PI / 3.0))
                    .collect();
                let (t0, _) = phase_align(&v, &w).unwrap();
                let (t1, al) = phase_align(&turned, &w).unwrap();
                t0 == 0.0
                    && (t1 - (2.0 * PI - PI / 3.0)).abs() < 1e-12
                    && al.iter().zip(&v).all(|(a, b)| (a - b).norm() < 1e-12)
            }),
        ),
        (
            "io: GPF1 round trip, version and truncation",
            Box::new(|_| {
                let g = disk(2.0, 17);
                let u = bump(&g);
                let mut bytes = Vec::new();
                write_field(&mut bytes, &u).unwrap();
                let same = read_field(&bytes[..], &g).map(|v| v == u).unwrap_or(false);
                let mut other = FieldDump::from_field(&u).encode();
                other[3] = b'2';
                let version = matches!(read_field(&other[..], &g), Err(Error::FormatVersion(_)));
                let truncated = matches!(
                    read_field(&bytes[..bytes.len() - 3], &g),
                    Err(Error::Truncated { .. })
                );
                same && version && truncated
            }),
        ),
    ]
}

pub fn run() -> ExitCode {
    let p = match solve_townes(1e-12, 20.0) {
        Ok(p) => p,
        Err(e) => {
            println!("FAIL townes: {e}");
            return ExitCode::from(1);
        }
    };
    let mut failed = 0;
    for (name, check) in checks() {
        let ok = check(&p);
        println!("{} {name}", if ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} self-test checks failed");
        ExitCode::from(1)
    }
}
