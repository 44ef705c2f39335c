//! Conjugate gradients for the shifted Helmholtz-type operator
//! `A x = x + dt (-Lap x + q x)` on the interior nodes of a grid, with
//! `q >= 0` a node-wise potential. `A` is real symmetric positive definite,
//! so plain CG applies to complex right-hand sides component-wise.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{laplacian_into, Grid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgStats {
    pub iterations: usize,
    /// Final residual norm relative to the right-hand side.
    pub residual: f64,
}

/// The operator `x + dt (-Lap x + q x)`.
pub struct ShiftedOperator<'a> {
    grid: &'a Grid,
    q: &'a [f64],
    dt: f64,
    diag: Vec<f64>,
}

impl<'a> ShiftedOperator<'a> {
    pub fn new(grid: &'a Grid, q: &'a [f64], dt: f64) -> Self {
        assert_eq!(q.len(), grid.len());
        let c = 2.0 / (grid.hx * grid.hx) + 2.0 / (grid.hy * grid.hy);
        let diag = q.iter().map(|&qi| 1.0 + dt * (c + qi)).collect();
        ShiftedOperator { grid, q, dt, diag }
    }

    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        laplacian_into(self.grid, x, out);
        let (dt, q) = (self.dt, self.q);
        let mask = self.grid.mask();
        out.par_iter_mut().enumerate().for_each(|(n, o)| {
            *o = if mask[n] {
                x[n] + (x[n] * q[n] - *o) * dt
            } else {
                Complex64::new(0.0, 0.0)
            };
        });
    }

    /// Jacobi-preconditioned CG from the initial guess in `x`.
    pub fn solve(
        &self,
        b: &[Complex64],
        x: &mut [Complex64],
        tol: f64,
        max_iter: usize,
    ) -> Result<CgStats> {
        let g = self.grid;
        let dot = |u: &[Complex64], v: &[Complex64]| g.sum_interior(|n| (u[n].conj() * v[n]).re);
        let len = g.len();
        let b_norm = dot(b, b).sqrt();
        if b_norm == 0.0 {
            x.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            return Ok(CgStats {
                iterations: 0,
                residual: 0.0,
            });
        }
        let mut r = vec![Complex64::new(0.0, 0.0); len];
        let mut ap = vec![Complex64::new(0.0, 0.0); len];
        self.apply(x, &mut ap);
        r.par_iter_mut()
            .enumerate()
            .for_each(|(n, rn)| *rn = b[n] - ap[n]);
        let mut z: Vec<Complex64> = r.par_iter().zip(&self.diag).map(|(v, d)| v / d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut res = dot(&r, &r).sqrt() / b_norm;
        for it in 0..max_iter {
            if res <= tol {
                return Ok(CgStats {
                    iterations: it,
                    residual: res,
                });
            }
            self.apply(&p, &mut ap);
            let alpha = rz / dot(&p, &ap);
            x.par_iter_mut()
                .zip(&p)
                .for_each(|(xi, pi)| *xi += pi * alpha);
            r.par_iter_mut()
                .zip(&ap)
                .for_each(|(ri, api)| *ri -= api * alpha);
            z.par_iter_mut()
                .zip(&r)
                .zip(&self.diag)
                .for_each(|((zi, ri), d)| *zi = ri / d);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            p.par_iter_mut()
                .zip(&z)
                .for_each(|(pi, zi)| *pi = zi + *pi * beta);
            res = dot(&r, &r).sqrt() / b_norm;
        }
        if res <= tol {
            return Ok(CgStats {
                iterations: max_iter,
                residual: res,
            });
        }
        Err(Error::LinearSolve {
            iterations: max_iter,
            residual: res,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DomainSpec;

    #[test]
    fn solves_against_the_forward_operator() {
        let g = Grid::new(DomainSpec::disk(1.0), 47, 47).unwrap();
        let q: Vec<f64> = (0..g.len())
            .map(|n| {
                if g.is_interior(n) {
                    3.0 + (n % 7) as f64
                } else {
                    0.0
                }
            })
            .collect();
        let op = ShiftedOperator::new(&g, &q, 0.3);
        let truth: Vec<Complex64> = (0..g.len())
            .map(|n| {
                if g.is_interior(n) {
                    Complex64::new((n as f64 * 0.37).sin(), (n as f64 * 0.11).cos())
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        let mut b = vec![Complex64::new(0.0, 0.0); g.len()];
        op.apply(&truth, &mut b);
        let mut x = vec![Complex64::new(0.0, 0.0); g.len()];
        let stats = op.solve(&b, &mut x, 1e-12, 2000).unwrap();
        assert!(stats.residual <= 1e-12);
        let err = x
            .iter()
            .zip(&truth)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn reports_non_convergence() {
        let g = Grid::new(DomainSpec::disk(1.0), 65, 65).unwrap();
        let q = vec![0.0; g.len()];
        let op = ShiftedOperator::new(&g, &q, 10.0);
        let b: Vec<Complex64> = (0..g.len())
            .map(|n| {
                if g.is_interior(n) {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        let mut x = vec![Complex64::new(0.0, 0.0); g.len()];
        assert!(matches!(
            op.solve(&b, &mut x, 1e-14, 3),
            Err(Error::LinearSolve { iterations: 3, .. })
        ));
    }
}
