//! The rotating GP energy, its Euler-Lagrange operator and the pointwise
//! inequality checks.
//!
//! Discretization. The kinetic energy is a weighted sum over lattice bonds,
//! `4/3 |u_{n+1} - u_n|^2 / h^2` for nearest neighbours and
//! `-1/12 |u_{n+2} - u_n|^2 / h^2` for next-nearest neighbours along each
//! axis, whose gradient is the fourth-order Laplacian (the form stays
//! positive definite since `|u_{n+2} - u_n|^2 <= 2 (|u_{n+2} - u_{n+1}|^2 +
//! |u_{n+1} - u_n|^2)`). The second-order five-point form shifts the
//! discrete critical mass by a relative `O(h^2 / eps^2)`, which near the
//! critical mass is amplified by `1 / (a* - a)` and swamps the asymptotic
//! regime on practical grids.
//!
//! The momentum density `Im(conj(u) grad u)` uses the matching centered
//! difference `4/3 D_h - 1/3 D_2h`. The magnetic kinetic energy uses the
//! same bonds, each term `|e^{-i theta} u_m - u_n|^2` carrying a link phase
//! with `sin(theta) = A . (x_m - x_n)`, `A = (Omega/2) x_perp`. Expanding
//! the square,
//!
//! ```text
//! |e^{-i theta} u_m - u_n|^2 = |u_m - u_n|^2 - 2 sin(theta) Im(conj(u_n) u_m)
//!                              + 2 (1 - cos theta) Re(conj(u_n) u_m)
//! ```
//!
//! and summation by parts turns the middle terms into exactly the
//! centered-difference rotation energy. The last terms are the discrete
//! `int |A|^2 |u|^2`, so both forms of the energy agree to rounding.
//!
//! The diamagnetic check uses the nearest-neighbour bonds only: there each
//! term is the modulus of a difference of two complex numbers and the
//! inequality holds bond by bond, with no discretization slack.

use std::ops::Add;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid};

/// Mass tolerance for operations that require a normalized field.
pub const MASS_TOL: f64 = 1e-10;

/// Harmonic trap `V = x^2 + Lambda y^2` rotating at angular velocity
/// `Omega`. In validation mode the trap is switched off (`V = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    #[serde(rename = "Lambda", alias = "lambda")]
    pub lambda: f64,
    #[serde(rename = "Omega", alias = "omega")]
    pub omega: f64,
    #[serde(default)]
    pub validation_mode: bool,
}

impl PotentialSpec {
    pub fn new(lambda: f64, omega: f64) -> Result<Self> {
        let p = PotentialSpec {
            lambda,
            omega,
            validation_mode: false,
        };
        p.validate()?;
        Ok(p)
    }

    /// Trap switched off; rotation is kept as given.
    pub fn free(omega: f64) -> Result<Self> {
        let p = PotentialSpec {
            lambda: 1.0,
            omega,
            validation_mode: true,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Lambda must be positive, got {}",
                self.lambda
            )));
        }
        if !(self.omega >= 0.0) || !self.omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Omega must be non-negative, got {}",
                self.omega
            )));
        }
        Ok(())
    }

    /// `Lambda > 1` and `Omega <= 2` with the trap on: the regime where the
    /// blow-up asymptotics apply.
    pub fn blowup_regime(&self) -> bool {
        !self.validation_mode && self.lambda > 1.0 && self.omega <= 2.0
    }

    #[inline]
    pub fn v(&self, x: f64, y: f64) -> f64 {
        if self.validation_mode {
            0.0
        } else {
            x * x + self.lambda * y * y
        }
    }

    #[inline]
    pub fn v_omega(&self, x: f64, y: f64) -> f64 {
        self.v(x, y) - 0.25 * self.omega * self.omega * (x * x + y * y)
    }

    /// Gauge potential `A = (Omega / 2) (-y, x)`.
    #[inline]
    pub fn gauge(&self, x: f64, y: f64) -> [f64; 2] {
        let half = 0.5 * self.omega;
        [-half * y, half * x]
    }

    /// A minimizer of `V_Omega` over the closed domain, approximated on the
    /// grid. When `V_Omega` is a non-negative form the origin is returned
    /// (if inside); otherwise the best interior node, ties going to the node
    /// nearest the domain center.
    pub fn v_omega_minimizer(&self, grid: &Grid) -> [f64; 2] {
        let w2 = 0.25 * self.omega * self.omega;
        let (cx, cy) = if self.validation_mode {
            (-w2, -w2)
        } else {
            (1.0 - w2, self.lambda - w2)
        };
        let flat = cx == 0.0 && cy == 0.0;
        if !flat && cx >= 0.0 && cy >= 0.0 && grid.spec.contains(0.0, 0.0) {
            return [0.0, 0.0];
        }
        let c = grid.spec.center();
        let dist = |idx: usize| {
            let (x, y) = grid.coords(idx);
            (x - c[0]).hypot(y - c[1])
        };
        let mut best: Option<(usize, f64)> = None;
        for &idx in grid.interior() {
            let (x, y) = grid.coords(idx);
            let v = self.v_omega(x, y);
            best = match best {
                None => Some((idx, v)),
                Some((b, bv)) => {
                    let tie = (v - bv).abs() <= 1e-12 * (1.0 + bv.abs());
                    if (!tie && v < bv) || (tie && dist(idx) < dist(b)) {
                        Some((idx, v))
                    } else {
                        Some((b, bv))
                    }
                }
            };
        }
        match best {
            Some((idx, _)) => {
                let (x, y) = grid.coords(idx);
                [x, y]
            }
            None => c,
        }
    }
}

/// Every term of the energy in both of its forms.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub potential: f64,
    pub interaction: f64,
    pub rotation: f64,
    pub total: f64,
    pub magnetic_kinetic: f64,
    pub v_omega_potential: f64,
}

impl EnergyBreakdown {
    /// The magnetic form `magnetic_kinetic + v_omega_potential - interaction`.
    pub fn magnetic_total(&self) -> f64 {
        self.magnetic_kinetic + self.v_omega_potential - self.interaction
    }
}

#[derive(Clone, Copy, Default)]
struct Sums([f64; 6]);

impl Add for Sums {
    type Output = Sums;
    fn add(mut self, o: Sums) -> Sums {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a += b;
        }
        self
    }
}

/// `(e^{-i theta}, 2 (1 - cos theta))` for a bond with `sin(theta) = s`.
#[inline]
fn link(s: f64) -> (Complex64, f64) {
    let s = s.clamp(-1.0, 1.0);
    let c = (1.0 - s * s).sqrt();
    // 1 - cos computed without cancellation
    let one_minus_c = s * s / (1.0 + c);
    (Complex64::new(c, -s), 2.0 * one_minus_c)
}

/// Bond contributions `(kinetic, magnetic, |A|^2 term)` of the bond from
/// `un` to `um`, scaled by `1/h^2`.
#[inline]
fn bond(un: Complex64, um: Complex64, s: f64, c: f64) -> (f64, f64, f64) {
    let (phase, g) = link(s);
    let kin = (um - un).norm_sqr();
    let mag = (phase * um - un).norm_sqr();
    let cross = (un.conj() * um).re;
    (kin * c, mag * c, g * cross * c)
}

/// Bond families `(step, weight)` of the kinetic form: the kinetic energy
/// is `sum_families weight * sum_bonds |u_m - u_n|^2 / h^2` over bonds of
/// the given step along each axis. The weights make the associated
/// operator the fourth-order five-point-per-axis Laplacian.
const FAMILIES: [(usize, f64); 2] = [(1, 4.0 / 3.0), (2, -1.0 / 12.0)];

/// Value `k` nodes away from `n = j * nx + i` along an axis, zero off the
/// array, and whether that node is interior.
#[inline]
fn neighbour(
    g: &Grid,
    v: &[Complex64],
    i: usize,
    j: usize,
    di: isize,
    dj: isize,
) -> (Complex64, bool) {
    let (ii, jj) = (i as isize + di, j as isize + dj);
    if ii < 0 || jj < 0 || ii >= g.nx as isize || jj >= g.ny as isize {
        return (Complex64::new(0.0, 0.0), false);
    }
    let m = jj as usize * g.nx + ii as usize;
    (v[m], g.is_interior(m))
}

/// Evaluates the energy at interaction strength `a`. The field need not be
/// normalized.
pub fn gp_energy(u: &ComplexField, a: f64, pot: &PotentialSpec) -> Result<EnergyBreakdown> {
    u.validate()?;
    pot.validate()?;
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "a must be non-negative, got {a}"
        )));
    }
    let g = u.grid();
    let v = u.values();
    let nx = g.nx;
    let (hx, hy) = (g.hx, g.hy);

    let s = g.sum_interior(|n| {
        let (i, j) = (n % nx, n / nx);
        let (x, y) = (g.x(i), g.y(j));
        let [ax, ay] = pot.gauge(x, y);
        let un = v[n];
        let rho = un.norm_sqr();
        let (mut kin, mut mag, mut gterm) = (0.0, 0.0, 0.0);
        let (mut dx, mut dy) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for (k, w) in FAMILIES {
            let ki = k as isize;
            for (di, dj, a_d, h) in [(ki, 0, ax, hx), (0, ki, ay, hy)] {
                let c = w / (h * h);
                let (fwd, _) = neighbour(g, v, i, j, di, dj);
                let (bwd, bwd_in) = neighbour(g, v, i, j, -di, -dj);
                // forward bond, plus the backward one when its far end is exterior
                let (bk, bm, bg) = bond(un, fwd, a_d * k as f64 * h, c);
                kin += bk;
                mag += bm;
                gterm += bg;
                if !bwd_in {
                    kin += rho * c;
                    mag += rho * c;
                }
                let dcoef = w * k as f64 / (2.0 * h);
                if di != 0 {
                    dx += (fwd - bwd) * dcoef;
                } else {
                    dy += (fwd - bwd) * dcoef;
                }
            }
        }
        let rot = 2.0 * (ax * (un.conj() * dx).im + ay * (un.conj() * dy).im);
        Sums([kin, mag, gterm, rot, pot.v(x, y) * rho, rho * rho])
    });
    let da = g.cell_area();
    let [kin, mag, gterm, rot, potential, quart] = s.0.map(|t| t * da);
    let interaction = 0.5 * a * quart;
    Ok(EnergyBreakdown {
        kinetic: kin,
        potential,
        interaction,
        rotation: rot,
        total: kin + potential - interaction - rot,
        magnetic_kinetic: mag,
        v_omega_potential: potential - gterm,
    })
}

/// Kinetic energy `int |grad u|^2` alone.
pub fn kinetic_energy(u: &ComplexField) -> f64 {
    let g = u.grid();
    let v = u.values();
    let nx = g.nx;
    let s = g.sum_interior(|n| {
        let (i, j) = (n % nx, n / nx);
        let un = v[n];
        let mut kin = 0.0;
        for (k, w) in FAMILIES {
            let ki = k as isize;
            for (di, dj, h) in [(ki, 0, g.hx), (0, ki, g.hy)] {
                let c = w / (h * h);
                let (fwd, _) = neighbour(g, v, i, j, di, dj);
                kin += (fwd - un).norm_sqr() * c;
                if !neighbour(g, v, i, j, -di, -dj).1 {
                    kin += un.norm_sqr() * c;
                }
            }
        }
        kin
    });
    s * g.cell_area()
}

/// `int |u|^4`.
pub fn quartic(u: &ComplexField) -> f64 {
    let v = u.values();
    u.grid().sum_interior(|n| v[n].norm_sqr().powi(2)) * u.grid().cell_area()
}

fn require_normalized(u: &ComplexField) -> Result<()> {
    let mass = u.mass();
    if (mass - 1.0).abs() > MASS_TOL {
        return Err(Error::NotNormalized { mass });
    }
    Ok(())
}

/// `mu = e - (a/2) int |u|^4` for a normalized field.
pub fn lagrange_multiplier(e_value: f64, u: &ComplexField, a: f64) -> Result<f64> {
    require_normalized(u)?;
    if a == 0.0 {
        return Ok(e_value);
    }
    Ok(e_value - 0.5 * a * quartic(u))
}

/// Applies the linear part of the Euler-Lagrange operator,
/// `-Lap u + V u + i Omega x_perp . grad u`, writing into `out`.
pub(crate) fn linear_operator_into(
    grid: &Grid,
    pot: &PotentialSpec,
    u: &[Complex64],
    out: &mut [Complex64],
) {
    let nx = grid.nx;
    let mask = grid.mask();
    out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        let y = grid.y(j);
        for (i, o) in row.iter_mut().enumerate() {
            let n = j * nx + i;
            if !mask[n] {
                *o = Complex64::new(0.0, 0.0);
                continue;
            }
            let x = grid.x(i);
            let c = u[n];
            let [ax, ay] = pot.gauge(x, y);
            let mut acc = c * pot.v(x, y);
            for (k, w) in FAMILIES {
                let ki = k as isize;
                for (di, dj, a_d, h) in [(ki, 0, ax, grid.hx), (0, ki, ay, grid.hy)] {
                    let (f, _) = neighbour(grid, u, i, j, di, dj);
                    let (b, _) = neighbour(grid, u, i, j, -di, -dj);
                    // -Lap and i 2 A . grad with the matching centered difference
                    acc += (c * 2.0 - f - b) * (w / (h * h));
                    acc += Complex64::i() * (f - b) * (2.0 * a_d * w * k as f64 / (2.0 * h));
                }
            }
            *o = acc;
        }
    });
}

/// The full Euler-Lagrange operator `H u = -Lap u + V u + i Omega x_perp .
/// grad u - a |u|^2 u`, the gradient of the energy with respect to
/// `conj(u)`.
pub fn el_operator_apply(u: &ComplexField, a: f64, pot: &PotentialSpec) -> ComplexField {
    let g = u.grid();
    let mut out = vec![Complex64::new(0.0, 0.0); g.len()];
    linear_operator_into(g, pot, u.values(), &mut out);
    let v = u.values();
    out.par_iter_mut().zip(v.par_iter()).for_each(|(o, &c)| {
        *o -= c * (a * c.norm_sqr());
    });
    ComplexField::from_raw(g.clone(), out)
}

/// L2 norm of `H u - mu u` over the interior.
pub fn el_residual(u: &ComplexField, a: f64, mu: f64, pot: &PotentialSpec) -> f64 {
    let hu = el_operator_apply(u, a, pot);
    let g = u.grid();
    let (h, v) = (hu.values(), u.values());
    (g.sum_interior(|n| (h[n] - v[n] * mu).norm_sqr()) * g.cell_area()).sqrt()
}

/// Worst interior-node margin of the diamagnetic inequality
/// `|(grad - i A) u|^2 >= |grad |u||^2`. Both sides are averages over the
/// four bonds at the node of the same one-sided differences.
pub fn diamagnetic_check(u: &ComplexField, omega: f64) -> f64 {
    let g = u.grid();
    let v = u.values();
    let nx = g.nx;
    let half = 0.5 * omega;
    let (ihx2, ihy2) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
    g.interior()
        .par_iter()
        .map(|&n| {
            let (x, y) = g.coords(n);
            let (sx, sy) = (-half * y * g.hx, half * x * g.hy);
            let un = v[n];
            let mut lhs = 0.0;
            let mut rhs = 0.0;
            // bonds to the east/north carry phase theta, to the west/south -theta
            for (m, s, ih2) in [
                (n + 1, sx, ihx2),
                (n - 1, -sx, ihx2),
                (n + nx, sy, ihy2),
                (n - nx, -sy, ihy2),
            ] {
                let (phase, _) = link(s);
                lhs += (phase * v[m] - un).norm_sqr() * ih2;
                rhs += (v[m].norm() - un.norm()).powi(2) * ih2;
            }
            0.5 * (lhs - rhs)
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// Gagliardo-Nirenberg quotient `int u^4 / (int |grad u|^2 int u^2)` of a
/// real field.
pub fn gn_check(u: &ComplexField) -> Result<f64> {
    u.validate()?;
    if !u.is_real() {
        return Err(Error::InvalidParameter(
            "GN quotient needs a real-valued field".into(),
        ));
    }
    let mass = u.mass();
    let kin = kinetic_energy(u);
    if mass == 0.0 || kin == 0.0 {
        return Err(Error::Degenerate("zero field".into()));
    }
    Ok(quartic(u) / (kin * mass))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{laplacian_apply, DomainSpec};
    use std::sync::Arc;

    fn disk(n: usize) -> Arc<Grid> {
        Arc::new(Grid::new(DomainSpec::disk(1.0), n, n).unwrap())
    }

    fn wavy(g: &Arc<Grid>) -> ComplexField {
        ComplexField::from_fn(g.clone(), |x, y| {
            let b = 1.0 - x * x - y * y;
            Complex64::new(b * (1.0 + x), b * (0.5 * y + x * y))
        })
    }

    #[test]
    fn potential_validation() {
        assert!(PotentialSpec::new(0.0, 1.0).is_err());
        assert!(PotentialSpec::new(2.0, -1.0).is_err());
        let p = PotentialSpec::new(2.0, 1.0).unwrap();
        assert!(p.blowup_regime());
        assert!(!PotentialSpec::new(1.0, 1.0).unwrap().blowup_regime());
        assert!(!PotentialSpec::new(2.0, 2.5).unwrap().blowup_regime());
        assert!(!PotentialSpec::free(0.0).unwrap().blowup_regime());
        assert_eq!(p.v_omega(1.0, 1.0), 1.0 + 2.0 - 0.5);
    }

    #[test]
    fn v_omega_minimizer_cases() {
        let g = Grid::new(DomainSpec::disk(2.0), 41, 41).unwrap();
        assert_eq!(
            PotentialSpec::new(2.0, 1.0).unwrap().v_omega_minimizer(&g),
            [0.0, 0.0]
        );
        // V_Omega = 0 everywhere: the center
        let c = PotentialSpec::free(0.0).unwrap().v_omega_minimizer(&g);
        assert!(c[0].hypot(c[1]) < g.hx);
        // strongly rotating: pushed to the boundary along x
        let m = PotentialSpec::new(2.0, 2.5).unwrap().v_omega_minimizer(&g);
        assert!(m[0].abs() > 1.8 && m[1].abs() < 0.2, "{m:?}");
    }

    #[test]
    fn kinetic_quadratic_form() {
        let g = disk(33);
        let u = wavy(&g);
        // H at a = 0, V = 0, Omega = 0 is the fourth-order Laplacian
        let pot = PotentialSpec::free(0.0).unwrap();
        let form = u.inner(&el_operator_apply(&u, 0.0, &pot)).re;
        assert!((kinetic_energy(&u) - form).abs() < 1e-12 * form);
        let e = gp_energy(&u, 0.0, &PotentialSpec::new(2.0, 0.0).unwrap()).unwrap();
        assert!((e.kinetic - form).abs() < 1e-12 * form);
        // close to the five-point form for a field vanishing smoothly at
        // the boundary
        let smooth = ComplexField::from_fn(g.clone(), |x, y| {
            Complex64::new((1.0 - x * x - y * y).powi(2) * (1.0 + x), 0.0)
        });
        let five = -smooth.inner(&laplacian_apply(&smooth)).re;
        let four = kinetic_energy(&smooth);
        assert!((four - five).abs() < 0.01 * four, "{four} {five}");
        // away from the boundary, -d2/dx2 sin(x) = sin(x) up to O(h^4); the
        // profile is constant in y
        let gr = Arc::new(Grid::new(DomainSpec::rectangle(0.0, 3.0, 0.0, 1.0), 61, 23).unwrap());
        let s = ComplexField::from_fn(gr.clone(), |x, _| Complex64::new(x.sin(), 0.0));
        let h = el_operator_apply(&s, 0.0, &pot);
        let mut worst: f64 = 0.0;
        for &n in gr.interior() {
            let (i, j) = (n % gr.nx, n / gr.nx);
            if i >= 4 && i + 4 < gr.nx && j >= 4 && j + 4 < gr.ny {
                worst = worst.max((h.values()[n].re - gr.x(i).sin()).abs());
            }
        }
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn both_forms_agree() {
        let g = disk(41);
        let u = wavy(&g);
        for omega in [0.0, 0.7, 1.5, 2.0] {
            let e = gp_energy(&u, 3.0, &PotentialSpec::new(2.0, omega).unwrap()).unwrap();
            assert!((e.total - e.magnetic_total()).abs() <= 1e-12 * e.total.abs().max(1.0));
        }
    }

    #[test]
    fn real_fields_do_not_rotate() {
        let g = disk(33);
        let u = ComplexField::from_fn(g.clone(), |x, y| {
            Complex64::new((1.0 - x * x - y * y) * (1.0 + x * y), 0.0)
        });
        let e = gp_energy(&u, 1.0, &PotentialSpec::new(3.0, 1.7).unwrap()).unwrap();
        assert_eq!(e.rotation, 0.0);
    }

    #[test]
    fn el_operator_is_the_energy_gradient() {
        let g = disk(33);
        let u = wavy(&g);
        let d = ComplexField::from_fn(g.clone(), |x, y| {
            let b = 1.0 - x * x - y * y;
            Complex64::new(b * (3.0 * x + 1.0).sin(), b * (2.0 * y - x).cos())
        });
        let (a, pot) = (4.0, PotentialSpec::new(2.0, 1.3).unwrap());
        let e = |s: f64| {
            let w = ComplexField::from_values(
                g.clone(),
                u.values()
                    .iter()
                    .zip(d.values())
                    .map(|(p, q)| p + *q * s)
                    .collect(),
            )
            .unwrap();
            gp_energy(&w, a, &pot).unwrap().total
        };
        let s = 1e-5;
        let fd = (e(s) - e(-s)) / (2.0 * s);
        let an = 2.0 * d.inner(&el_operator_apply(&u, a, &pot)).re;
        assert!((fd - an).abs() < 1e-6 * an.abs(), "{fd} {an}");
    }

    #[test]
    fn multiplier_is_the_rayleigh_quotient() {
        let g = disk(33);
        let mut u = wavy(&g);
        u.normalize().unwrap();
        let (a, pot) = (5.0, PotentialSpec::new(2.0, 1.0).unwrap());
        let e = gp_energy(&u, a, &pot).unwrap();
        let mu = lagrange_multiplier(e.total, &u, a).unwrap();
        let rq = u.inner(&el_operator_apply(&u, a, &pot)).re;
        assert!((mu - rq).abs() < 1e-10 * rq.abs());
        assert_eq!(lagrange_multiplier(e.total, &u, 0.0).unwrap(), e.total);
        let v = u.scaled(Complex64::new(1.1, 0.0));
        assert!(matches!(
            lagrange_multiplier(e.total, &v, a),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn diamagnetic_examples() {
        let g = disk(41);
        let r = ComplexField::from_fn(g.clone(), |x, y| Complex64::new(1.0 - x * x - y * y, 0.0));
        assert!(diamagnetic_check(&r, 1.0) >= -1e-8);
        // constant modulus with a winding phase
        let c = ComplexField::from_fn(g.clone(), |x, y| Complex64::from_polar(1.0, 3.0 * x + y));
        assert!(diamagnetic_check(&c, 2.0) >= -1e-8);
    }

    #[test]
    fn gn_examples() {
        let g = disk(41);
        let bump = ComplexField::from_fn(g.clone(), |x, y| {
            Complex64::new((1.0 - x * x - y * y).max(0.0), 0.0)
        });
        let q = gn_check(&bump).unwrap();
        assert!(q > 0.0 && q < 2.0 / 11.7);
        assert!(matches!(
            gn_check(&ComplexField::zeros(g.clone())),
            Err(Error::Degenerate(_))
        ));
        assert!(gn_check(&wavy(&g)).is_err());
    }

    #[test]
    fn invalid_field_rejected() {
        let g = disk(17);
        let mut vals = vec![Complex64::new(0.0, 0.0); g.len()];
        vals[g.interior()[3]] = Complex64::new(f64::NAN, 0.0);
        let u = ComplexField::from_values_masked(g, vals);
        assert!(matches!(
            gp_energy(&u, 1.0, &PotentialSpec::new(2.0, 1.0).unwrap()),
            Err(Error::InvalidField)
        ));
    }
}
