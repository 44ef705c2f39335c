#![allow(dead_code)]

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotgp_core::townes::solve_townes;
use rotgp_core::{ComplexField, DomainSpec, Grid, TownesProfile};

pub fn profile() -> &'static TownesProfile {
    static P: OnceLock<TownesProfile> = OnceLock::new();
    P.get_or_init(|| solve_townes(1e-12, 20.0).unwrap())
}

pub fn disk(radius: f64, n: usize) -> Arc<Grid> {
    Arc::new(Grid::new(DomainSpec::disk(radius), n, n).unwrap())
}

/// A normalized smooth random field: a few Gaussian bumps with random
/// centers, widths, plane-wave phases and complex weights. With `real` the
/// weights are real and the phases are dropped.
pub fn random_field(grid: &Arc<Grid>, seed: u64, real: bool) -> ComplexField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let [cx, cy] = grid.spec.center();
    let (x_lo, x_hi, y_lo, y_hi) = grid.spec.bounding_box();
    let size = (x_hi - x_lo).min(y_hi - y_lo);
    let bumps: Vec<_> = (0..rng.gen_range(1..=5))
        .map(|_| {
            let p = [
                cx + size * rng.gen_range(-0.25..0.25),
                cy + size * rng.gen_range(-0.25..0.25),
            ];
            let s = size * rng.gen_range(0.05..0.3);
            let q = if real {
                [0.0, 0.0]
            } else {
                [rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)]
            };
            let c = if real {
                Complex64::new(rng.gen_range(-1.0..1.0), 0.0)
            } else {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            };
            (p, s, q, c)
        })
        .collect();
    let mut u = ComplexField::from_fn(grid.clone(), |x, y| {
        bumps
            .iter()
            .map(|(p, s, q, c)| {
                let r2 = (x - p[0]).powi(2) + (y - p[1]).powi(2);
                c * Complex64::from_polar((-r2 / (s * s)).exp(), q[0] * x + q[1] * y)
            })
            .sum()
    });
    u.normalize().unwrap();
    u
}
