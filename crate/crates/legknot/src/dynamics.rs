//! Projection maps between the unit three-sphere and spacetime slices, the
//! explicit inverse of the field-line flow, the normalised Poynting field,
//! and numerical forward evolution of electromagnetic knots.
//!
//! The flow map Φ_t carries a set of closed field lines at time 0 to the
//! field lines at time t; it is the same for every Bateman field of Hopf
//! type. Its inverse has an explicit rational expression, so the forward
//! map is computed by damped Newton iteration with continuation in t.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::legendrify::S3Curve;
use crate::tangency::alpha_beta;

/// Projection of S³ ⊂ ℂ² to ℝ³ from the point (1, 0): stereographic
/// projection followed by a mirror reflection along the y = 0 plane.
/// The input is (Re α, Im α, Re β, Im β); the image is
/// (Re β, −Im β, Im α)/(1 − Re α).
pub fn phi0(p: [f64; 4]) -> Result<[f64; 3]> {
    let den = 1.0 - p[0];
    if den.abs() < 1e-13 {
        return Err(Error::AtInfinity);
    }
    Ok([p[2] / den, -p[3] / den, p[1] / den])
}

/// The explicit rational form of Φ_t⁻¹ = φ₀ ∘ (α, β)|_t. The denominator
/// x² + y² + z² + t² + 1 − 2tz = (z − t)² + x² + y² + 1 is always positive.
pub fn phi_t_inverse(q: [f64; 3], t: f64) -> [f64; 3] {
    let [x, y, z] = q;
    let r3 = x * x + y * y + z * z;
    let den = r3 + t * t + 1.0 - 2.0 * t * z;
    let s = r3 - t * t + 1.0;
    [
        (-2.0 * t * y + x * s) / den,
        (2.0 * t * x + y * s) / den,
        (-t * (r3 - t * t - 1.0) + z * s) / den,
    ]
}

/// The normalised Poynting vector field V = Re(∇α×∇β) × Im(∇α×∇β) of any
/// Bateman field of Hopf type, as an explicit rational vector of unit norm.
/// Every point of a field-line link moves along V at the speed of light.
pub fn poynting_v(x: f64, y: f64, z: f64, t: f64) -> [f64; 3] {
    let den = x * x + y * y + z * z + t * t + 1.0 - 2.0 * t * z;
    [
        2.0 * (x * (t - z) + y) / den,
        2.0 * (y * (t - z) - x) / den,
        (x * x + y * y - z * z - t * t - 1.0 + 2.0 * t * z) / den,
    ]
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// One damped-Newton solve of Φ_t⁻¹(q) = p starting from `q0`.
fn newton_solve(p: [f64; 3], t: f64, q0: [f64; 3], tol: f64) -> Result<[f64; 3]> {
    let mut q = q0;
    let mut res = norm3(sub3(phi_t_inverse(q, t), p));
    for _ in 0..100 {
        if res <= tol {
            return Ok(q);
        }
        // Central-difference Jacobian, scaled to the magnitude of q.
        let mut jac = [[0.0f64; 3]; 3];
        for k in 0..3 {
            let h = 1e-7 * (1.0 + q[k].abs());
            let mut qp = q;
            let mut qm = q;
            qp[k] += h;
            qm[k] -= h;
            let fp = phi_t_inverse(qp, t);
            let fm = phi_t_inverse(qm, t);
            for r in 0..3 {
                jac[r][k] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        let f = sub3(phi_t_inverse(q, t), p);
        let step = match solve3(jac, f) {
            Some(s) => s,
            None => break,
        };
        // Backtracking line search: halve the step until the residual drops.
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let qn = [q[0] - lambda * step[0], q[1] - lambda * step[1], q[2] - lambda * step[2]];
            let rn = norm3(sub3(phi_t_inverse(qn, t), p));
            if rn < res {
                q = qn;
                res = rn;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if res <= tol {
        Ok(q)
    } else {
        Err(Error::NoConvergence { t, residual: res })
    }
}

/// Solve a 3×3 linear system by Gaussian elimination with partial pivoting.
fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0f64; 4]; 3];
    for r in 0..3 {
        m[r][..3].copy_from_slice(&a[r]);
        m[r][3] = b[r];
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        for r in 0..3 {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..4 {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

/// Forward flow map: find q with Φ_t⁻¹(q) = p by damped Newton iteration,
/// seeded by `seed` if given, otherwise by continuation from t = 0 with
/// step halving whenever a stage fails to converge.
pub fn phi_t_forward(p: [f64; 3], t: f64, seed: Option<[f64; 3]>) -> Result<[f64; 3]> {
    const TOL: f64 = 1e-10;
    if t == 0.0 {
        return Ok(p);
    }
    if let Some(s) = seed {
        if let Ok(q) = newton_solve(p, t, s, TOL) {
            return Ok(q);
        }
    }
    // Continuation from 0 toward t: additive steps up to 0.5 near the
    // origin, then multiplicative doubling, halving the step on failure.
    let sign = t.signum();
    let mut cur = 0.0f64;
    let mut q = p;
    while cur != t {
        let mut next = if cur.abs() < 0.5 {
            sign * (cur.abs() + 0.5)
        } else {
            cur * 2.0
        };
        if next.abs() >= t.abs() {
            next = t;
        }
        loop {
            match newton_solve(p, next, q, TOL) {
                Ok(qn) => {
                    q = qn;
                    cur = next;
                    break;
                }
                Err(e) => {
                    let mid = cur + (next - cur) / 2.0;
                    if (mid - cur).abs() < 1e-9 * t.abs().max(1.0) {
                        return Err(e);
                    }
                    next = mid;
                }
            }
        }
    }
    Ok(q)
}

/// One snapshot of an evolved field-line link.
#[derive(Debug, Clone)]
pub struct EvolutionFrame {
    pub t: f64,
    pub points: Vec<[f64; 3]>,
    /// Per-point Newton convergence flags; a frame is still produced when
    /// individual points fail.
    pub converged: Vec<bool>,
}

/// Evolve the projected curve φ₀(c) through the given times. Frames are
/// computed in order of increasing |t| within each sign so that each frame
/// seeds the Newton solves of the next; the output order matches `times`.
pub fn evolve_frames(c: &S3Curve, times: &[f64], samples: usize) -> Result<Vec<EvolutionFrame>> {
    let mut base = Vec::with_capacity(samples);
    for i in 0..samples {
        let t = i as f64 * TAU / samples as f64;
        base.push(phi0(c.evaluate(t))?);
    }
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&i, &j| times[i].abs().total_cmp(&times[j].abs()));
    let mut frames: Vec<Option<EvolutionFrame>> = vec![None; times.len()];
    // Separate continuation chains for positive and negative times.
    let mut seed_pos = base.clone();
    let mut seed_neg = base.clone();
    for idx in order {
        let t = times[idx];
        let seeds = if t >= 0.0 { &mut seed_pos } else { &mut seed_neg };
        let mut points = Vec::with_capacity(samples);
        let mut converged = Vec::with_capacity(samples);
        for (i, p) in base.iter().enumerate() {
            match phi_t_forward(*p, t, Some(seeds[i])) {
                Ok(q) => {
                    seeds[i] = q;
                    points.push(q);
                    converged.push(true);
                }
                Err(_) => {
                    points.push(seeds[i]);
                    converged.push(false);
                }
            }
        }
        frames[idx] = Some(EvolutionFrame { t, points, converged });
    }
    Ok(frames.into_iter().map(|f| f.expect("all frames filled")).collect())
}

/// Escape diagnostic: smallest grid times T₊ (forward) and T₋ (backward,
/// returned as a magnitude) past which the evolved link stays outside the
/// ball of the given radius for every larger |t| on the grid. `t_grid`
/// holds positive magnitudes, scanned in increasing order for both signs.
pub fn escape_time(
    c: &S3Curve,
    radius: f64,
    t_grid: &[f64],
    samples: usize,
) -> Result<(f64, f64)> {
    let mut grid: Vec<f64> = t_grid.iter().copied().filter(|&t| t > 0.0).collect();
    grid.sort_by(|a, b| a.total_cmp(b));
    let mut out = [0.0f64; 2];
    for (slot, sign) in [(0usize, 1.0f64), (1usize, -1.0f64)] {
        let mut base = Vec::with_capacity(samples);
        for i in 0..samples {
            let t = i as f64 * TAU / samples as f64;
            base.push(phi0(c.evaluate(t))?);
        }
        let min0 = base.iter().map(|p| norm3(*p)).fold(f64::INFINITY, f64::min);
        let mut escape: Option<f64> = if min0 > radius { Some(0.0) } else { None };
        let mut seeds = base.clone();
        let mut last_min = min0;
        for &tm in &grid {
            let t = sign * tm;
            let mut min_dist = f64::INFINITY;
            for (i, p) in base.iter().enumerate() {
                let q = phi_t_forward(*p, t, Some(seeds[i]))?;
                seeds[i] = q;
                min_dist = min_dist.min(norm3(q));
            }
            last_min = min_dist;
            if min_dist > radius {
                if escape.is_none() {
                    escape = Some(tm);
                }
            } else {
                escape = None;
            }
        }
        out[slot] = escape.ok_or(Error::NotEscapedInGrid { radius, last_min })?;
    }
    Ok((out[0], out[1]))
}

/// Consistency helper used by verification reports: φ₀ ∘ (α, β) evaluated
/// directly, for cross-checking the printed rational form of Φ_t⁻¹.
pub fn phi_t_inverse_via_maps(q: [f64; 3], t: f64) -> Result<[f64; 3]> {
    let (a, b) = alpha_beta(q[0], q[1], q[2], t);
    phi0([a.re, a.im, b.re, b.im])
}
