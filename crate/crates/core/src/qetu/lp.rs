//! Dense primal-dual interior-point solver for minimax fitting LPs.
//!
//! Variables are a coefficient vector `x ∈ R^K` and a bound `t`. Every
//! constraint has the form `s·φ_p·x + τ t ≤ h` where `φ_p` is a basis row
//! shared by all constraints on sample point `p`, `s = ±1` and `τ ∈ {0, −1}`.
//! The objective is `min t`. Constraints on the same point share `φ_p`, so
//! the normal matrix needs one rank-one update per point.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::sqrt;

pub(crate) const MAX_ITERATIONS: usize = 120;
const STALL_TOL: f64 = 1e-12;
const STALL_ROUNDS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Constraint {
    pub point: usize,
    pub sign: f64,
    pub bounded: bool,
    pub rhs: f64,
}

impl Constraint {
    fn tau(&self) -> f64 {
        if self.bounded {
            -1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub x: Vec<f64>,
    pub t: f64,
}

/// `basis` holds one row of length `k` per point; `constraints` must be
/// sorted by point.
pub(crate) fn solve(
    basis: &[f64],
    k: usize,
    constraints: &[Constraint],
    tol: f64,
) -> Result<Solution> {
    let m = constraints.len();
    let n = k + 1;
    let row = |p: usize| &basis[p * k..(p + 1) * k];
    let dot = |p: usize, x: &[f64]| row(p).iter().zip(x).map(|(a, b)| a * b).sum::<f64>();

    // g_i·(x, t)
    let apply = |x: &[f64], t: f64, out: &mut [f64]| {
        let mut i = 0;
        while i < m {
            let p = constraints[i].point;
            let f = dot(p, x);
            while i < m && constraints[i].point == p {
                out[i] = constraints[i].sign * f + constraints[i].tau() * t;
                i += 1;
            }
        }
    };
    // G^T v
    let apply_t = |v: &[f64], out: &mut [f64]| {
        out.iter_mut().for_each(|o| *o = 0.0);
        let mut i = 0;
        while i < m {
            let p = constraints[i].point;
            let mut w = 0.0;
            while i < m && constraints[i].point == p {
                w += constraints[i].sign * v[i];
                out[k] += constraints[i].tau() * v[i];
                i += 1;
            }
            for (o, a) in out[..k].iter_mut().zip(row(p)) {
                *o += w * a;
            }
        }
    };

    let h: Vec<f64> = constraints.iter().map(|c| c.rhs).collect();
    let hnorm = h.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let mut x = vec![0.0; k];
    let mut t = 1.0 + hnorm;
    let mut gx = vec![0.0; m];
    apply(&x, t, &mut gx);
    let mut s: Vec<f64> = h.iter().zip(&gx).map(|(h, g)| (h - g).max(1.0)).collect();
    let mut z = vec![1.0; m];

    let mut rp = vec![0.0; m];
    let mut rd = vec![0.0; n];
    let mut hmat = vec![0.0; n * n];
    let mut tmp = vec![0.0; m];
    let mut rhs = vec![0.0; n];
    let mut ds_aff = vec![0.0; m];
    let mut dz_aff = vec![0.0; m];
    let mut dx = vec![0.0; n];
    let mut ds = vec![0.0; m];
    let mut dz = vec![0.0; m];
    let mut rc = vec![0.0; m];
    let mut t_prev = f64::INFINITY;
    let mut stalled = 0;

    for _ in 0..MAX_ITERATIONS {
        apply(&x, t, &mut gx);
        for i in 0..m {
            rp[i] = gx[i] + s[i] - h[i];
        }
        apply_t(&z, &mut rd);
        rd[k] += 1.0;
        let mu = s.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>() / m as f64;
        let pinf = rp.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let dinf = rd.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let dual_obj = -h.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>();
        let gap = (t - dual_obj).abs();
        let primal_ok = pinf <= tol * (1.0 + hnorm);
        if primal_ok && dinf <= tol && gap <= tol * (1.0 + t.abs()) {
            return Ok(Solution { x, t });
        }
        // Near the optimum the normal matrix loses all precision and the
        // dual residual can stall; a primal point whose objective has stopped
        // moving with vanishing complementarity is accepted.
        if primal_ok && mu <= tol * tol && (t - t_prev).abs() <= STALL_TOL * (1.0 + t.abs()) {
            stalled += 1;
            if stalled >= STALL_ROUNDS {
                return Ok(Solution { x, t });
            }
        } else {
            stalled = 0;
        }
        t_prev = t;

        build_normal(basis, k, constraints, &s, &z, &mut hmat);
        let chol = cholesky(&mut hmat, n);
        if !chol {
            return Err(Error::SolverFailure {
                iterations: MAX_ITERATIONS,
            });
        }

        // affine direction
        for i in 0..m {
            rc[i] = s[i] * z[i];
        }
        newton(
            &hmat,
            n,
            &rp,
            &rd,
            &rc,
            &s,
            &z,
            &apply,
            &apply_t,
            &mut tmp,
            &mut rhs,
            &mut dx,
            &mut ds_aff,
            &mut dz_aff,
        );
        let ap = max_step(&s, &ds_aff);
        let ad = max_step(&z, &dz_aff);
        let mu_aff = (0..m)
            .map(|i| (s[i] + ap * ds_aff[i]) * (z[i] + ad * dz_aff[i]))
            .sum::<f64>()
            / m as f64;
        let r = mu_aff / mu;
        let sigma = r * r * r;

        // combined predictor-corrector direction
        for i in 0..m {
            rc[i] = s[i] * z[i] + ds_aff[i] * dz_aff[i] - sigma * mu;
        }
        newton(
            &hmat, n, &rp, &rd, &rc, &s, &z, &apply, &apply_t, &mut tmp, &mut rhs, &mut dx,
            &mut ds, &mut dz,
        );
        let ap = (0.99 * max_step(&s, &ds)).min(1.0);
        let ad = (0.99 * max_step(&z, &dz)).min(1.0);
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += ap * d;
        }
        t += ap * dx[k];
        for i in 0..m {
            s[i] += ap * ds[i];
            z[i] += ad * dz[i];
        }
    }
    Err(Error::SolverFailure {
        iterations: MAX_ITERATIONS,
    })
}

/// Solves the reduced system and recovers the slack and dual steps:
/// `(G^T W G) Δx = −r_d − G^T S^{-1}(Z r_p − r_c)`,
/// `Δs = −r_p − G Δx`, `Δz = −S^{-1}(r_c + Z Δs)`.
#[allow(clippy::too_many_arguments)]
fn newton(
    chol: &[f64],
    n: usize,
    rp: &[f64],
    rd: &[f64],
    rc: &[f64],
    s: &[f64],
    z: &[f64],
    apply: &impl Fn(&[f64], f64, &mut [f64]),
    apply_t: &impl Fn(&[f64], &mut [f64]),
    tmp: &mut [f64],
    rhs: &mut [f64],
    dx: &mut [f64],
    ds: &mut [f64],
    dz: &mut [f64],
) {
    let m = s.len();
    for i in 0..m {
        tmp[i] = (z[i] * rp[i] - rc[i]) / s[i];
    }
    apply_t(tmp, rhs);
    for (r, d) in rhs.iter_mut().zip(rd) {
        *r = -d - *r;
    }
    dx.copy_from_slice(rhs);
    cholesky_solve(chol, n, dx);
    apply(&dx[..n - 1], dx[n - 1], ds);
    for i in 0..m {
        ds[i] = -rp[i] - ds[i];
        dz[i] = -(rc[i] + z[i] * ds[i]) / s[i];
    }
}

fn max_step(v: &[f64], dv: &[f64]) -> f64 {
    v.iter()
        .zip(dv)
        .filter(|(_, d)| **d < 0.0)
        .map(|(a, d)| -a / d)
        .fold(f64::INFINITY, f64::min)
}

/// Lower triangle of `G^T W G`, `W = Z/S`.
fn build_normal(
    basis: &[f64],
    k: usize,
    constraints: &[Constraint],
    s: &[f64],
    z: &[f64],
    out: &mut [f64],
) {
    let n = k + 1;
    out.iter_mut().for_each(|o| *o = 0.0);
    let m = constraints.len();
    let mut i = 0;
    while i < m {
        let p = constraints[i].point;
        let (mut wxx, mut wxt, mut wtt) = (0.0, 0.0, 0.0);
        while i < m && constraints[i].point == p {
            let w = z[i] / s[i];
            let c = &constraints[i];
            wxx += w;
            wxt += w * c.sign * c.tau();
            wtt += w * c.tau() * c.tau();
            i += 1;
        }
        let phi = &basis[p * k..(p + 1) * k];
        for a in 0..k {
            let fa = wxx * phi[a];
            let dst = &mut out[a * n..a * n + a + 1];
            for (d, pb) in dst.iter_mut().zip(phi) {
                *d += fa * pb;
            }
        }
        let last = &mut out[k * n..k * n + n];
        for (d, pa) in last[..k].iter_mut().zip(phi) {
            *d += wxt * pa;
        }
        last[k] += wtt;
    }
}

/// In-place lower Cholesky with a tiny diagonal shift for near-singular
/// normal matrices.
fn cholesky(a: &mut [f64], n: usize) -> bool {
    let scale = (0..n).map(|i| a[i * n + i]).fold(0.0f64, f64::max);
    let shift = scale * 1e-14;
    for j in 0..n {
        let mut d = a[j * n + j] + shift;
        for p in 0..j {
            d -= a[j * n + p] * a[j * n + p];
        }
        if !(d > 0.0) {
            return false;
        }
        let d = sqrt(d);
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut v = a[i * n + j];
            let (ri, rj) = (i * n, j * n);
            for p in 0..j {
                v -= a[ri + p] * a[rj + p];
            }
            a[i * n + j] = v / d;
        }
    }
    true
}

fn cholesky_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut v = b[i];
        for p in 0..i {
            v -= l[i * n + p] * b[p];
        }
        b[i] = v / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut v = b[i];
        for p in i + 1..n {
            v -= l[p * n + i] * b[p];
        }
        b[i] = v / l[i * n + i];
    }
}
