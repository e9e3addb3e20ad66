//! Knot-diagram handling: parametrized diagrams, crossing detection,
//! crossing-sign classification against the area integral, and planning of
//! tangent correction circles.

use std::collections::{HashMap, HashSet};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::knot::{GaussCode, GaussEntry};
use crate::trigpoly::{AreaIntegral, TrigPoly};

/// Parametrized knot diagram: a planar closed curve plus the over/under data
/// the final knot must realize, as a signed Gauss code in traversal order.
#[derive(Debug, Clone)]
pub struct DiagramCurve {
    pub x: TrigPoly,
    pub y: TrigPoly,
    pub target: GaussCode,
}

/// A transverse double point of a planar curve.
#[derive(Debug, Clone)]
pub struct Crossing {
    pub t_lo: f64,
    pub t_hi: f64,
    pub pos: [f64; 2],
    pub tan_lo: [f64; 2],
    pub tan_hi: [f64; 2],
    /// Whether the strand through `t_lo` must end up over, per the target
    /// code; `None` until targets are attached.
    pub desired_over_lo: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Ccw,
    Cw,
}

/// A planned tangent circle; the side determines the traversal direction
/// (left touch must run counter-clockwise, right touch clockwise) and hence
/// the sign of the area added per traversal: clockwise raises Z by 2πr².
#[derive(Debug, Clone)]
pub struct CircleInsertion {
    pub tau: f64,
    pub center: [f64; 2],
    pub radius: f64,
    pub side: Side,
    pub orientation: Orientation,
    pub traversals: usize,
    /// Half-width of the replaced diagram parameter interval [τ−h, τ+h].
    pub arc_half_width: f64,
    /// The |ΔZ| this circle must supply (before any safety margin).
    pub required_gain: f64,
}

impl CircleInsertion {
    pub fn z_gain_per_traversal(&self) -> f64 {
        let a = TAU * self.radius * self.radius;
        match self.orientation {
            Orientation::Cw => a,
            Orientation::Ccw => -a,
        }
    }
}

pub fn rot90(v: [f64; 2]) -> [f64; 2] {
    [-v[1], v[0]]
}

fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm2(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

/// Cyclic distance on the parameter circle [0, 2π).
pub fn cyclic_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Proper segment-intersection predicate.
fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let d1 = cross2([p2[0] - p1[0], p2[1] - p1[1]], [q1[0] - p1[0], q1[1] - p1[1]]);
    let d2 = cross2([p2[0] - p1[0], p2[1] - p1[1]], [q2[0] - p1[0], q2[1] - p1[1]]);
    let d3 = cross2([q2[0] - q1[0], q2[1] - q1[1]], [p1[0] - q1[0], p1[1] - q1[1]]);
    let d4 = cross2([q2[0] - q1[0], q2[1] - q1[1]], [p2[0] - q1[0], p2[1] - q1[1]]);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// All transverse double points of the closed curve `f` on [0, 2π).
///
/// Screening: uniform sampling, spatial-hashed segment-pair intersection
/// tests; each hit is refined by damped 2D Newton on
/// (f(t) − f(s)) and deduplicated by parameter distance.
pub fn detect_crossings<F, G>(f: F, df: G, samples: usize) -> Result<Vec<Crossing>>
where
    F: Fn(f64) -> [f64; 2],
    G: Fn(f64) -> [f64; 2],
{
    let n = samples;
    let pts: Vec<[f64; 2]> = (0..n).map(|i| f(i as f64 * TAU / n as f64)).collect();
    let mut seg_lens = Vec::with_capacity(n);
    let mut diameter = 0.0f64;
    for i in 0..n {
        let j = (i + 1) % n;
        seg_lens.push(norm2([pts[j][0] - pts[i][0], pts[j][1] - pts[i][1]]));
        diameter = diameter.max(norm2(pts[i]));
    }
    // median-based cell size: one long outlier segment must not inflate the
    // cells (it just spans several of them), or dense regions get grouped
    // into quadratically expensive buckets
    let median_seg = {
        let mut s = seg_lens.clone();
        let mid = s.len() / 2;
        *s.select_nth_unstable_by(mid, f64::total_cmp).1
    };
    let cell = (2.0 * median_seg).max(1e-12);
    let key = |p: [f64; 2]| ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
    for i in 0..n {
        let j = (i + 1) % n;
        let (kx0, ky0) = key(pts[i]);
        let (kx1, ky1) = key(pts[j]);
        for kx in kx0.min(kx1)..=kx0.max(kx1) {
            for ky in ky0.min(ky1)..=ky0.max(ky1) {
                grid.entry((kx, ky)).or_default().push(i as u32);
            }
        }
    }
    // Pair tests are cheap, so only a budget bounds them (a pair sharing
    // several cells is simply tested again); intersecting pairs are kept in
    // a set so each seed appears once.  A curve the grid cannot resolve
    // produces quadratically many intersecting pairs; bail out before the
    // refinement stage drowns.
    let test_budget = 4096 * n;
    let seed_cap = 4 * n;
    let mut tests = 0usize;
    let mut seed_pairs: HashSet<(u32, u32)> = HashSet::new();
    for segs in grid.values() {
        for a in 0..segs.len() {
            for b in a + 1..segs.len() {
                let (i, j) = (segs[a].min(segs[b]), segs[a].max(segs[b]));
                let gap = (j - i).min(n as u32 - (j - i));
                if gap <= 1 {
                    continue;
                }
                tests += 1;
                if tests > test_budget || seed_pairs.len() > seed_cap {
                    return Err(Error::SeedGridTooCoarse { grid: samples });
                }
                let (iu, ju) = (i as usize, j as usize);
                if segments_intersect(pts[iu], pts[(iu + 1) % n], pts[ju], pts[(ju + 1) % n]) {
                    seed_pairs.insert((i, j));
                }
            }
        }
    }
    let dt = TAU / n as f64;
    let mut seeds: Vec<(f64, f64)> = seed_pairs
        .into_iter()
        .map(|(i, j)| ((i as f64 + 0.5) * dt, (j as f64 + 0.5) * dt))
        .collect();
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let tol = 1e-12 * (1.0 + diameter);
    let mut found: Vec<Crossing> = Vec::new();
    for &(t0, s0) in &seeds {
        let (mut t, mut s) = (t0, s0);
        let mut converged = false;
        let res = |t: f64, s: f64| {
            let (a, b) = (f(t), f(s));
            [a[0] - b[0], a[1] - b[1]]
        };
        let mut r = res(t, s);
        for _ in 0..60 {
            if norm2(r) <= tol {
                converged = true;
                break;
            }
            let (dt_, ds_) = (df(t), df(s));
            let det = -dt_[0] * ds_[1] + dt_[1] * ds_[0];
            if det.abs() < 1e-300 {
                break;
            }
            // solve [f'(t), -f'(s)] * step = -r by Cramer's rule
            let step_t = (r[0] * ds_[1] - ds_[0] * r[1]) / det;
            let step_s = (r[0] * dt_[1] - dt_[0] * r[1]) / det;
            let mut lambda = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let (tn, sn) = (t + lambda * step_t, s + lambda * step_s);
                let rn = res(tn, sn);
                if norm2(rn) < norm2(r) {
                    t = tn;
                    s = sn;
                    r = rn;
                    improved = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if !converged || norm2(r) > tol {
            // A stall close to a double point with parallel tangents is a
            // degenerate (tangential) crossing, not a sampling problem.
            let (a, b) = (df(t), df(s));
            if cross2(a, b).abs() <= 1e-6 * norm2(a) * norm2(b) {
                return Err(Error::TangentialCrossing { t, s });
            }
            return Err(Error::SeedGridTooCoarse { grid: samples });
        }
        let (t, s) = (t.rem_euclid(TAU), s.rem_euclid(TAU));
        if cyclic_dist(t, s) < 1e-4 {
            continue; // collapsed onto the diagonal
        }
        let (t_lo, t_hi) = if t < s { (t, s) } else { (s, t) };
        if found
            .iter()
            .any(|c| cyclic_dist(c.t_lo, t_lo) < 1e-6 && cyclic_dist(c.t_hi, t_hi) < 1e-6)
        {
            continue;
        }
        let tan_lo = df(t_lo);
        let tan_hi = df(t_hi);
        if cross2(tan_lo, tan_hi).abs() <= 1e-8 * norm2(tan_lo) * norm2(tan_hi) {
            return Err(Error::TangentialCrossing { t: t_lo, s: t_hi });
        }
        found.push(Crossing {
            t_lo,
            t_hi,
            pos: f(t_lo),
            tan_lo,
            tan_hi,
            desired_over_lo: None,
        });
    }
    found.sort_by(|a, b| a.t_lo.total_cmp(&b.t_lo));
    Ok(found)
}

/// All 2c incidences of the crossing list, ordered by parameter.
/// Each item is (parameter, crossing index, is_lo).
pub fn incidences(crossings: &[Crossing]) -> Vec<(f64, usize, bool)> {
    let mut v: Vec<(f64, usize, bool)> = Vec::with_capacity(2 * crossings.len());
    for (i, c) in crossings.iter().enumerate() {
        v.push((c.t_lo, i, true));
        v.push((c.t_hi, i, false));
    }
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}

/// Fill `desired_over_lo` from a target code aligned by traversal order.
pub fn attach_targets(crossings: &mut [Crossing], target: &GaussCode) -> Result<()> {
    let inc = incidences(crossings);
    if inc.len() != target.len() {
        return Err(Error::MalformedCode(format!(
            "target code has {} incidences, diagram has {}",
            target.len(),
            inc.len()
        )));
    }
    for (k, &(_, i, is_lo)) in inc.iter().enumerate() {
        let over_here = target[k].over;
        let desired = if is_lo { over_here } else { !over_here };
        match crossings[i].desired_over_lo {
            None => crossings[i].desired_over_lo = Some(desired),
            Some(prev) if prev != desired => {
                return Err(Error::MalformedCode(format!(
                    "target code inconsistent at crossing {i}"
                )))
            }
            _ => {}
        }
    }
    Ok(())
}

/// For each crossing: does the Z-induced over/under match the target?
/// The overpassing strand is the one with the greater Z-coordinate.
pub fn classify_signs(crossings: &[Crossing], z: &AreaIntegral, tol: f64) -> Result<Vec<bool>> {
    crossings
        .iter()
        .map(|c| {
            let dz = z.evaluate(c.t_lo) - z.evaluate(c.t_hi);
            if dz.abs() < tol {
                return Err(Error::ZTie {
                    t_lo: c.t_lo,
                    t_hi: c.t_hi,
                });
            }
            let desired = c.desired_over_lo.ok_or_else(|| {
                Error::MalformedCode("crossing has no target assignment".into())
            })?;
            Ok((dz > 0.0) == desired)
        })
        .collect()
}

/// The signed Gauss code induced by (x, y, z-values): over/under from Z,
/// crossing sign from the tangent cross product ordered over-then-under.
pub fn induced_gauss_code(
    crossings: &[Crossing],
    z_at: impl Fn(f64) -> f64,
    tol: f64,
) -> Result<GaussCode> {
    let inc = incidences(crossings);
    let mut code = Vec::with_capacity(inc.len());
    for &(_, i, is_lo) in &inc {
        let c = &crossings[i];
        let dz = z_at(c.t_lo) - z_at(c.t_hi);
        if dz.abs() < tol {
            return Err(Error::ZTie {
                t_lo: c.t_lo,
                t_hi: c.t_hi,
            });
        }
        let lo_over = dz > 0.0;
        let (tan_over, tan_under) = if lo_over {
            (c.tan_lo, c.tan_hi)
        } else {
            (c.tan_hi, c.tan_lo)
        };
        code.push(GaussEntry {
            id: i,
            over: is_lo == lo_over,
            sign: if cross2(tan_over, tan_under) > 0.0 { 1 } else { -1 },
        });
    }
    Ok(code)
}

/// Options controlling circle planning.
#[derive(Debug, Clone)]
pub struct PlanOptions {
    /// Force this radius instead of the automatic clearance-based choice.
    pub radius_override: Option<f64>,
    pub min_radius: f64,
    /// Samples used for clearance/disjointness scans.
    pub scan_samples: usize,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            radius_override: None,
            min_radius: 1e-3,
            scan_samples: 4096,
        }
    }
}

struct CurveLocal {
    point: [f64; 2],
    tangent: [f64; 2],
    speed: f64,
    /// signed curvature (x'y'' − y'x'')/v³; positive = curving left
    kappa: f64,
}

fn local_data(x: &TrigPoly, y: &TrigPoly, t: f64) -> CurveLocal {
    let (dx, dy) = (x.derivative(), y.derivative());
    let (ddx, ddy) = (dx.derivative(), dy.derivative());
    let tangent = [dx.evaluate(t), dy.evaluate(t)];
    let speed = norm2(tangent);
    let kappa = (tangent[0] * ddy.evaluate(t) - tangent[1] * ddx.evaluate(t)) / speed.powi(3);
    CurveLocal {
        point: [x.evaluate(t), y.evaluate(t)],
        tangent,
        speed,
        kappa,
    }
}

/// Place a tangent circle of the given side at τ, shrinking the radius until
/// the closed disk is disjoint from the diagram outside the replaced arc.
fn place_circle(
    x: &TrigPoly,
    y: &TrigPoly,
    tau: f64,
    side: Side,
    opts: &PlanOptions,
) -> Result<(CircleInsertion, f64)> {
    let loc = local_data(x, y, tau);
    let u = [loc.tangent[0] / loc.speed, loc.tangent[1] / loc.speed];
    let normal = match side {
        Side::Left => rot90(u),
        Side::Right => [-rot90(u)[0], -rot90(u)[1]],
    };
    // clearance: nearest diagram point outside a local window around τ
    let window = 0.3;
    let mut clearance = f64::INFINITY;
    let m = opts.scan_samples;
    for i in 0..m {
        let t = i as f64 * TAU / m as f64;
        if cyclic_dist(t, tau) <= window {
            continue;
        }
        let p = [x.evaluate(t), y.evaluate(t)];
        clearance = clearance
            .min(norm2([p[0] - loc.point[0], p[1] - loc.point[1]]));
    }
    let mut r = opts
        .radius_override
        .unwrap_or_else(|| (1.0f64).min(0.4 * clearance));
    // curvature cap: the diagram must curve away from the circle's disk
    let signed_toward = match side {
        Side::Left => loc.kappa,
        Side::Right => -loc.kappa,
    };
    if opts.radius_override.is_none() && signed_toward > 0.0 {
        r = r.min(0.5 / signed_toward);
    }
    loop {
        if r < opts.min_radius {
            return Err(Error::NoRoomForCircle {
                tau,
                min_radius: opts.min_radius,
            });
        }
        let center = [loc.point[0] + r * normal[0], loc.point[1] + r * normal[1]];
        let h = 0.2 * r / loc.speed;
        let mut ok = true;
        for i in 0..m {
            let t = i as f64 * TAU / m as f64;
            if cyclic_dist(t, tau) <= h {
                continue;
            }
            let p = [x.evaluate(t), y.evaluate(t)];
            if norm2([p[0] - center[0], p[1] - center[1]]) <= r * 1.002 {
                ok = false;
                break;
            }
        }
        if ok {
            let orientation = match side {
                Side::Left => Orientation::Ccw,
                Side::Right => Orientation::Cw,
            };
            return Ok((
                CircleInsertion {
                    tau,
                    center,
                    radius: r,
                    side,
                    orientation,
                    traversals: 0,
                    arc_half_width: h,
                    required_gain: 0.0,
                },
                loc.speed,
            ));
        }
        if opts.radius_override.is_some() {
            return Err(Error::NoRoomForCircle {
                tau,
                min_radius: r,
            });
        }
        r *= 0.7;
    }
}

/// Midpoint of the cyclic interval (a, b) taken forward from a.
fn cyclic_midpoint(a: f64, b: f64) -> f64 {
    let len = (b - a).rem_euclid(TAU);
    (a + 0.5 * len).rem_euclid(TAU)
}

/// Plan the paired correction circles for every incorrectly signed crossing.
///
/// For each wrong crossing the strand that must become over receives a
/// winding circle just before its incidence (raising Z by 2πr² per clockwise
/// traversal) and an unwinding circle of the opposite side/orientation just
/// after it; both use m = ⌊|ΔZ|/(2πr²)⌋ + 1 traversals.
pub fn plan_insertions(
    x: &TrigPoly,
    y: &TrigPoly,
    z: &AreaIntegral,
    crossings: &[Crossing],
    correct: &[bool],
    opts: &PlanOptions,
) -> Result<Vec<CircleInsertion>> {
    let inc = incidences(crossings);
    let mut plan = Vec::new();
    for (i, c) in crossings.iter().enumerate() {
        if correct[i] {
            continue;
        }
        let desired_lo = c.desired_over_lo.expect("classified crossing has target");
        // parameter of the strand whose Z must be raised
        let t_fix = if desired_lo { c.t_lo } else { c.t_hi };
        let dz_need = (z.evaluate(c.t_lo) - z.evaluate(c.t_hi)).abs();
        let pos = inc
            .iter()
            .position(|&(t, _, _)| (t - t_fix).abs() < 1e-12)
            .expect("incidence present");
        let prev = inc[(pos + inc.len() - 1) % inc.len()].0;
        let next = inc[(pos + 1) % inc.len()].0;
        let tau1 = cyclic_midpoint(prev, t_fix);
        let tau2 = cyclic_midpoint(t_fix, next);
        // equal radii within the pair: place both, then shrink to the min
        let (c1, _) = place_circle(x, y, tau1, Side::Right, opts)?;
        let (c2, _) = place_circle(x, y, tau2, Side::Left, opts)?;
        let r = c1.radius.min(c2.radius);
        let shared = PlanOptions {
            radius_override: Some(r),
            ..opts.clone()
        };
        let (mut c1, _) = place_circle(x, y, tau1, Side::Right, &shared)?;
        let (mut c2, _) = place_circle(x, y, tau2, Side::Left, &shared)?;
        let m = (dz_need / (TAU * r * r)).floor() as usize + 1;
        c1.traversals = m;
        c2.traversals = m;
        c1.required_gain = dz_need;
        c2.required_gain = dz_need;
        plan.push(c1);
        plan.push(c2);
    }
    Ok(plan)
}

/// Plan the closing circle that makes Z periodic, if Z(0) ≠ Z(2π).
pub fn plan_closure(
    x: &TrigPoly,
    y: &TrigPoly,
    z: &AreaIntegral,
    crossings: &[Crossing],
    opts: &PlanOptions,
    tol: f64,
) -> Result<Option<CircleInsertion>> {
    let gain_needed = -z.defect(); // Z(0) − Z(2π)
    if gain_needed.abs() <= tol {
        return Ok(None);
    }
    let inc = incidences(crossings);
    let last = inc.last().map(|&(t, _, _)| t).unwrap_or(0.0);
    let tau = 0.5 * (last + TAU);
    let side = if gain_needed > 0.0 { Side::Right } else { Side::Left };
    let (probe, _) = place_circle(x, y, tau, side, opts)?;
    let r_max = probe.radius;
    // radius tuned so |ΔZ|/(2πr²) is exactly integral
    let m = (gain_needed.abs() / (TAU * r_max * r_max)).ceil().max(1.0);
    let r = (gain_needed.abs() / (TAU * m)).sqrt();
    let fixed = PlanOptions {
        radius_override: Some(r),
        ..opts.clone()
    };
    let (mut circle, _) = place_circle(x, y, tau, side, &fixed)?;
    circle.traversals = m as usize;
    circle.required_gain = gain_needed.abs();
    Ok(Some(circle))
}
