//! Assembly of the corrected piecewise C¹ curve: diagram arcs joined with
//! multiply-traversed tangent "circles".
//!
//! Each planned circle is realized as a C¹ spiral nested inside the circle's
//! disk: the radius dips inward following a smoothed triangular profile, so
//! consecutive traversals are geometrically separated and all induced
//! self-crossings are transverse kinks removable by Reidemeister-I moves,
//! while the disk-disjointness from the rest of the diagram is preserved.
//! The last spiral's dip amplitude is tuned by bisection so the assembled
//! curve's area integral is exactly periodic.

use std::f64::consts::{PI, TAU};

use crate::diagram::{cyclic_dist, CircleInsertion, Crossing, Orientation};
use crate::error::{Error, Result};
use crate::numeric::integrate_gl;
use crate::trigpoly::{AreaIntegral, TrigPoly};

/// Quintic smoothstep: h(0)=0, h(1)=1 with zero first and second derivatives
/// at both ends. Returns (h, h', h'') in the unit variable.
fn smoothstep(u: f64) -> (f64, f64, f64) {
    let u = u.clamp(0.0, 1.0);
    let u2 = u * u;
    (
        u2 * u * (10.0 - 15.0 * u + 6.0 * u2),
        30.0 * u2 * (1.0 - u) * (1.0 - u),
        60.0 * u * (1.0 - u) * (1.0 - 2.0 * u),
    )
}

/// ∫₀ᵘ of the quintic smoothstep.
fn smoothstep_int(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    let u4 = u * u * u * u;
    u4 * (2.5 - 3.0 * u + u * u)
}

/// 2·∫₀^{1/2} of the quintic smoothstep, used by the apex-cap area budget.
const CAP_INT: f64 = 0.15625;

/// One multiply-traversed tangent spiral, parametrized by sweep angle.
#[derive(Debug, Clone)]
pub struct Spiral {
    pub center: [f64; 2],
    pub r: f64,
    pub amp: f64,
    /// +1 counter-clockwise, −1 clockwise.
    pub o: f64,
    pub theta_a: f64,
    /// Total sweep S = 2π·m_eff + angular gap.
    pub sweep: f64,
    pub m_eff: usize,
    rho_a: f64,
    mu_a: f64,
    mu_b: f64,
    /// Monotone radius profile: slope-transition window lengths at entry and
    /// exit, apex-cap half-width, dive and climb slopes, and the radius at
    /// the four interior breakpoints. ρ decreases until the apex cap and
    /// increases after it, so strand pairs cross at most once and every
    /// induced crossing is a Reidemeister-I kink.
    la: f64,
    lb: f64,
    w_cap: f64,
    k_in: f64,
    k_out: f64,
    s_brk: [f64; 4],
    rho_brk: [f64; 4],
    /// Smooth speed profile σ(s) = |dγ/dτ|: junction speeds, local slope
    /// corrections matching the diagram's tangential acceleration, and the
    /// correction support length. The sweep rate is then σ/|dγ/ds|.
    sigma0: f64,
    sigma1: f64,
    slope_a: f64,
    slope_b: f64,
    speed_corr_len: f64,
    /// Cumulative natural time at uniform sweep nodes, for inverting τ(s).
    tau_nodes: Vec<f64>,
    /// Natural-parameter duration.
    pub duration: f64,
}

impl Spiral {
    pub fn build(
        x: &TrigPoly,
        y: &TrigPoly,
        ins: &CircleInsertion,
        amp: f64,
        m_eff: usize,
    ) -> Result<Spiral> {
        let (dx, dy) = (x.derivative(), y.derivative());
        let (ddx, ddy) = (dx.derivative(), dy.derivative());
        let c = ins.center;
        let h = ins.arc_half_width;
        let ends: Vec<([f64; 2], [f64; 2], [f64; 2])> = [ins.tau - h, ins.tau + h]
            .iter()
            .map(|&t| {
                (
                    [x.evaluate(t), y.evaluate(t)],
                    [dx.evaluate(t), dy.evaluate(t)],
                    [ddx.evaluate(t), ddy.evaluate(t)],
                )
            })
            .collect();
        let (a, ta, dda) = ends[0];
        let (b, tb, ddb) = ends[1];
        let o = match ins.orientation {
            Orientation::Ccw => 1.0,
            Orientation::Cw => -1.0,
        };
        let polar = |p: [f64; 2]| {
            let v = [p[0] - c[0], p[1] - c[1]];
            (v[0].hypot(v[1]), v[1].atan2(v[0]))
        };
        let (rho_a, theta_a) = polar(a);
        let (rho_b, theta_b) = polar(b);
        let radial_slope = |rho: f64, theta: f64, tangent: [f64; 2]| -> Result<f64> {
            let e_r = [theta.cos(), theta.sin()];
            let e_th = [-e_r[1], e_r[0]];
            let tr = tangent[0] * e_r[0] + tangent[1] * e_r[1];
            let tth = tangent[0] * e_th[0] + tangent[1] * e_th[1];
            if o * tth <= 0.0 {
                return Err(Error::DegenerateField(
                    "spiral junction tangent opposes traversal direction".into(),
                ));
            }
            Ok(rho * o * tr / tth)
        };
        let mu_a = radial_slope(rho_a, theta_a, ta)?;
        let mu_b = radial_slope(rho_b, theta_b, tb)?;
        // the curve must enter the disk inward and leave it outward, up to
        // roundoff, for the monotone dive/climb profile to exist
        if mu_a > 1e-6 * ins.radius || mu_b < -1e-6 * ins.radius {
            return Err(Error::DegenerateField(
                "spiral junction tangents do not point into/out of the disk".into(),
            ));
        }
        let mu_a = mu_a.min(0.0);
        let mu_b = mu_b.max(0.0);
        let gap = (o * (theta_b - theta_a)).rem_euclid(TAU);
        let sweep = TAU * m_eff as f64 + gap;
        // dive and climb slopes from the depth condition ρ(S/2) = r(1−amp)
        // and the endpoint condition ρ(S) = ρ_b (each integral of ρ' is
        // linear in k_in, k_out)
        let half = sweep / 2.0;
        let w_cap = (4.0 * PI).min(sweep / 8.0);
        let mut la = (4.0 * PI).min(sweep / 8.0);
        let mut lb = la;
        let depth = ins.radius * (1.0 - amp);
        // window sizing uses the smallest amplitude the periodicity tuning
        // may probe, so the windows (and with them the defect as a function
        // of the amplitude) do not jump during the bisection
        let depth_worst = ins.radius * (1.0 - 0.005);
        let solve = |la: f64, lb: f64, depth: f64| -> (f64, f64) {
            let a11 = half - la / 2.0 - CAP_INT * w_cap;
            let a12 = -CAP_INT * w_cap;
            let a21 = -CAP_INT * w_cap;
            let a22 = half - lb / 2.0 - CAP_INT * w_cap;
            let b1 = rho_a - depth + la * mu_a / 2.0;
            let b2 = rho_b - depth - lb * mu_b / 2.0;
            let det = a11 * a22 - a12 * a21;
            (
                (b1 * a22 - a12 * b2) / det,
                (a11 * b2 - a21 * b1) / det,
            )
        };
        let mut feasible = false;
        for _ in 0..40 {
            let (ki, ko) = solve(la, lb, depth_worst);
            if ki > 0.0 && ko > 0.0 {
                feasible = true;
                break;
            }
            // steep junction slopes can eat the whole depth budget inside
            // the transition window; shrink the windows until they do not
            la *= 0.5;
            lb *= 0.5;
        }
        if !feasible {
            return Err(Error::DegenerateField(
                "monotone spiral radius profile is infeasible".into(),
            ));
        }
        let (k_in, k_out) = solve(la, lb, depth);
        // a near-tangential junction (|μ| ≪ k) makes consecutive passes
        // almost coincident through a slow slope transition; shorten the
        // window (continuously in amp) so the first-turn separation stays a
        // healthy fraction of the asymptotic turn spacing
        la = la.min((4.0 * PI * (mu_a.abs() / k_in).clamp(0.125, 1.0)).min(sweep / 8.0));
        lb = lb.min((4.0 * PI * (mu_b.abs() / k_out).clamp(0.125, 1.0)).min(sweep / 8.0));
        let (k_in, k_out) = solve(la, lb, depth);
        let s1 = la;
        let s2 = half - w_cap;
        let s3 = half + w_cap;
        let s4 = sweep - lb;
        let r1 = rho_a + la * (mu_a - k_in) / 2.0;
        let r2 = r1 - k_in * (s2 - s1);
        let r3 = r2 + w_cap * (k_out - k_in);
        let r4 = r3 + k_out * (s4 - s3);
        let mut sp = Spiral {
            center: c,
            r: ins.radius,
            amp,
            o,
            theta_a,
            sweep,
            m_eff,
            rho_a,
            mu_a,
            mu_b,
            la,
            lb,
            w_cap,
            k_in,
            k_out,
            s_brk: [s1, s2, s3, s4],
            rho_brk: [r1, r2, r3, r4],
            sigma0: 1.0,
            sigma1: 1.0,
            slope_a: 0.0,
            slope_b: 0.0,
            speed_corr_len: (4.0 * PI).min(sweep / 8.0),
            tau_nodes: Vec::new(),
            duration: 1.0,
        };
        // speed profile: junction speeds, with local slope corrections so
        // the tangential acceleration dσ/dτ = σ' · (dS/dτ) matches the
        // diagram at both ends
        let va = ta[0].hypot(ta[1]);
        let vb = tb[0].hypot(tb[1]);
        let at_a = (ta[0] * dda[0] + ta[1] * dda[1]) / va;
        let at_b = (tb[0] * ddb[0] + tb[1] * ddb[1]) / vb;
        let g0 = (mu_a * mu_a + rho_a * rho_a).sqrt();
        let g1 = (mu_b * mu_b + rho_b * rho_b).sqrt();
        sp.sigma0 = va;
        sp.sigma1 = vb;
        sp.slope_a = at_a * g0 / va;
        sp.slope_b = at_b * g1 / vb;
        let nodes = 32 * (m_eff + 2);
        let mut tau_nodes = Vec::with_capacity(nodes + 1);
        tau_nodes.push(0.0);
        let mut acc = 0.0;
        for i in 0..nodes {
            let (s0, s1) = (
                i as f64 * sweep / nodes as f64,
                (i + 1) as f64 * sweep / nodes as f64,
            );
            let wmin = (0..8)
                .map(|k| sp.rate(s0 + (s1 - s0) * k as f64 / 7.0))
                .fold(f64::INFINITY, f64::min);
            if wmin <= 0.05 * (va / g0).min(vb / g1) {
                return Err(Error::DegenerateField(
                    "spiral sweep-rate profile is not positive".into(),
                ));
            }
            acc += integrate_gl(|s| 1.0 / sp.rate(s), s0, s1, 1);
            tau_nodes.push(acc);
        }
        sp.tau_nodes = tau_nodes;
        sp.duration = acc;
        Ok(sp)
    }

    /// Speed |dγ/dτ| at sweep s: quintic smoothstep blend between the
    /// junction speeds plus local slope corrections at both ends.
    fn speed(&self, s: f64) -> f64 {
        let u = (s / self.sweep).clamp(0.0, 1.0);
        let blend = self.sigma0 + (self.sigma1 - self.sigma0) * u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
        let l = self.speed_corr_len;
        let mut sigma = blend;
        if s < l {
            let q = 1.0 - s / l;
            sigma += self.slope_a * s * q * q;
        }
        let sb = self.sweep - s;
        if sb < l {
            let q = 1.0 - sb / l;
            sigma -= self.slope_b * sb * q * q;
        }
        sigma
    }

    /// Sweep rate dS/dτ at sweep s.
    fn rate(&self, s: f64) -> f64 {
        let (rho, drho, _) = self.rho(s);
        self.speed(s) / drho.hypot(rho)
    }

    /// Radius and its first two sweep-derivatives at sweep s: entry slope
    /// transition, constant-slope dive, apex cap, constant-slope climb, exit
    /// slope transition. Monotone decreasing until the slope changes sign
    /// inside the cap, increasing after.
    fn rho(&self, s: f64) -> (f64, f64, f64) {
        let s = s.clamp(0.0, self.sweep);
        let [s1, s2, s3, s4] = self.s_brk;
        let [r1, r2, r3, r4] = self.rho_brk;
        if s < s1 {
            let u = s / self.la;
            let (h, hp, _) = smoothstep(u);
            let a = -self.k_in - self.mu_a;
            (
                self.rho_a + self.mu_a * s + a * self.la * smoothstep_int(u),
                self.mu_a + a * h,
                a * hp / self.la,
            )
        } else if s < s2 {
            (r1 - self.k_in * (s - s1), -self.k_in, 0.0)
        } else if s < s3 {
            let u = (s - s2) / (2.0 * self.w_cap);
            let (h, hp, _) = smoothstep(u);
            let a = self.k_in + self.k_out;
            (
                r2 - self.k_in * (s - s2) + a * 2.0 * self.w_cap * smoothstep_int(u),
                -self.k_in + a * h,
                a * hp / (2.0 * self.w_cap),
            )
        } else if s < s4 {
            (r3 + self.k_out * (s - s3), self.k_out, 0.0)
        } else {
            let u = (s - s4) / self.lb;
            let (h, hp, _) = smoothstep(u);
            let a = self.mu_b - self.k_out;
            (
                r4 + self.k_out * (s - s4) + a * self.lb * smoothstep_int(u),
                self.k_out + a * h,
                a * hp / self.lb,
            )
        }
    }

    pub fn position_sweep(&self, s: f64) -> [f64; 2] {
        let (rho, _, _) = self.rho(s);
        let th = self.theta_a + self.o * s;
        [
            self.center[0] + rho * th.cos(),
            self.center[1] + rho * th.sin(),
        ]
    }

    /// d(position)/d(sweep).
    pub fn velocity_sweep(&self, s: f64) -> [f64; 2] {
        let (rho, drho, _) = self.rho(s);
        let th = self.theta_a + self.o * s;
        let (sin, cos) = th.sin_cos();
        [
            drho * cos - rho * self.o * sin,
            drho * sin + rho * self.o * cos,
        ]
    }

    /// Sweep as a function of natural time τ ∈ [0, duration], by inverting
    /// the tabulated τ(s) with Newton refinement.
    pub(crate) fn sweep_at(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        if tau >= self.duration {
            return self.sweep;
        }
        let idx = match self.tau_nodes.binary_search_by(|v| v.total_cmp(&tau)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        let n = self.tau_nodes.len() - 1;
        let step = self.sweep / n as f64;
        let s_lo = idx as f64 * step;
        let mut s = s_lo + step * (tau - self.tau_nodes[idx]).max(0.0) * self.rate(s_lo) / step;
        s = s.clamp(s_lo, s_lo + step);
        for _ in 0..6 {
            let t_here = self.tau_nodes[idx] + integrate_gl(|q| 1.0 / self.rate(q), s_lo, s, 1);
            let delta = (tau - t_here) * self.rate(s);
            s = (s + delta).clamp(0.0, self.sweep);
            if delta.abs() < 1e-14 * self.sweep {
                break;
            }
        }
        s
    }

    pub fn position(&self, tau: f64) -> [f64; 2] {
        self.position_sweep(self.sweep_at(tau))
    }

    /// d(position)/dτ.
    pub fn velocity(&self, tau: f64) -> [f64; 2] {
        let s = self.sweep_at(tau);
        let rate = self.rate(s);
        let v = self.velocity_sweep(s);
        [v[0] * rate, v[1] * rate]
    }

    /// ∫ (Y X' − X Y') over sweep [0, s] (parametrization invariant).
    pub fn area_integral_to(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let panels = (8.0 * s / TAU).ceil() as usize + 4;
        integrate_gl(
            |t| {
                let p = self.position_sweep(t);
                let v = self.velocity_sweep(t);
                p[1] * v[0] - p[0] * v[1]
            },
            0.0,
            s,
            panels,
        )
    }

    pub fn area_total(&self) -> f64 {
        self.area_integral_to(self.sweep)
    }
}

#[derive(Debug, Clone)]
pub enum Arc {
    /// Diagram parameter interval [t0, t1] traversed at natural speed.
    Diagram { t0: f64, t1: f64 },
    Spiral(Spiral),
}

impl Arc {
    fn duration(&self) -> f64 {
        match self {
            Arc::Diagram { t0, t1 } => t1 - t0,
            Arc::Spiral(sp) => sp.duration,
        }
    }
}

/// The assembled closed curve, reparametrized to [0, 2π].
#[derive(Debug, Clone)]
pub struct PiecewiseCurve {
    pub arcs: Vec<Arc>,
    /// Cumulative natural start time of each arc.
    starts: Vec<f64>,
    pub total: f64,
    x: TrigPoly,
    y: TrigPoly,
    /// Area integral of the diagram pair, for exact diagram-arc increments.
    z: AreaIntegral,
    /// Prefix sums of per-arc area integrals.
    area_prefix: Vec<f64>,
}

/// Options for [`assemble`].
#[derive(Debug, Clone)]
pub struct AssembleOptions {
    /// Nominal inward dip amplitude (fraction of the radius).
    pub amp: f64,
    /// Extra Z margin per insertion in units of 2πr².
    pub margin: f64,
    /// Required |Z̃(2π) − Z̃(0)| after tuning.
    pub periodicity_tol: f64,
    /// Samples for the embeddedness scan (0 disables).
    pub embed_samples: usize,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions {
            amp: 0.3,
            margin: 0.5,
            periodicity_tol: 1e-10,
            embed_samples: 4096,
        }
    }
}

fn build_arcs(
    x: &TrigPoly,
    y: &TrigPoly,
    insertions: &[CircleInsertion],
    amps: &[f64],
    m_effs: &[usize],
) -> Result<Vec<Arc>> {
    let mut arcs = Vec::new();
    let mut cursor = 0.0;
    for ((ins, &amp), &m_eff) in insertions.iter().zip(amps).zip(m_effs) {
        let lo = ins.tau - ins.arc_half_width;
        let hi = ins.tau + ins.arc_half_width;
        if lo < cursor {
            return Err(Error::Parse(
                "insertion windows overlap or straddle t = 0".into(),
            ));
        }
        if lo > cursor {
            arcs.push(Arc::Diagram { t0: cursor, t1: lo });
        }
        arcs.push(Arc::Spiral(Spiral::build(x, y, ins, amp, m_eff)?));
        cursor = hi;
    }
    if cursor > TAU {
        return Err(Error::Parse("insertion window extends past 2π".into()));
    }
    arcs.push(Arc::Diagram {
        t0: cursor,
        t1: TAU,
    });
    Ok(arcs)
}

fn arc_area(arc: &Arc, z: &AreaIntegral) -> f64 {
    match arc {
        Arc::Diagram { t0, t1 } => z.evaluate(*t1) - z.evaluate(*t0),
        Arc::Spiral(sp) => sp.area_total(),
    }
}

/// Assemble the corrected curve from the diagram and the insertion plan.
///
/// The amplitude of the last spiral is tuned by bisection until the total
/// area integral is periodic to `opts.periodicity_tol`; crossing signs are
/// re-verified against the targets afterwards.
pub fn assemble(
    x: &TrigPoly,
    y: &TrigPoly,
    crossings: &[Crossing],
    insertions: &[CircleInsertion],
    opts: &AssembleOptions,
) -> Result<PiecewiseCurve> {
    let z = crate::trigpoly::area_integral(x, y);
    let mut insertions: Vec<CircleInsertion> = insertions.to_vec();
    insertions.sort_by(|a, b| a.tau.total_cmp(&b.tau));
    // no incidence may fall inside a replaced window
    for ins in &insertions {
        for c in crossings {
            for t in [c.t_lo, c.t_hi] {
                if cyclic_dist(t, ins.tau) <= ins.arc_half_width {
                    return Err(Error::NoRoomForCircle {
                        tau: ins.tau,
                        min_radius: ins.radius,
                    });
                }
            }
        }
    }
    // paired spiral disks must not collide
    for i in 0..insertions.len() {
        for j in i + 1..insertions.len() {
            let (a, b) = (&insertions[i], &insertions[j]);
            let d = (a.center[0] - b.center[0]).hypot(a.center[1] - b.center[1]);
            if d <= a.radius + b.radius {
                return Err(Error::NoRoomForCircle {
                    tau: b.tau,
                    min_radius: b.radius,
                });
            }
        }
    }
    let amp0 = opts.amp;
    // traversal count with dip-area deficit and a safety margin folded in
    let mut m_effs: Vec<usize> = insertions
        .iter()
        .map(|ins| {
            let cap = TAU * ins.radius * ins.radius;
            let needed = ins.required_gain / cap + opts.margin;
            (ins.traversals).max((needed / (1.0 - amp0)).ceil() as usize)
        })
        .collect();
    let mut amps = vec![amp0; insertions.len()];
    if !insertions.is_empty() {
        // bisection on the last spiral's amplitude to zero the total defect
        let last = insertions.len() - 1;
        let defect_for = |amp_last: f64, m_effs: &[usize]| -> Result<f64> {
            let mut a = amps.clone();
            a[last] = amp_last;
            let arcs = build_arcs(x, y, &insertions, &a, m_effs)?;
            Ok(arcs.iter().map(|arc| arc_area(arc, &z)).sum())
        };
        let (mut lo, mut hi) = (0.005, 0.45);
        let mut flo = defect_for(lo, &m_effs)?;
        let mut fhi = defect_for(hi, &m_effs)?;
        if flo * fhi > 0.0 {
            // the amplitude range alone cannot zero the defect: move the last
            // spiral's turn count one step at a time in the direction that
            // brings a sign change into the bracket
            let mut probe = m_effs.clone();
            probe[last] += 1;
            let slope = defect_for(hi, &probe)? - fhi;
            let min_turns = insertions[last].traversals.max(2);
            for _ in 0..200 {
                if flo * fhi <= 0.0 {
                    break;
                }
                if fhi * slope < 0.0 {
                    m_effs[last] += 1;
                } else if m_effs[last] > min_turns {
                    m_effs[last] -= 1;
                } else {
                    break;
                }
                flo = defect_for(lo, &m_effs)?;
                fhi = defect_for(hi, &m_effs)?;
            }
        }
        if flo * fhi > 0.0 {
            return Err(Error::DegenerateField(format!(
                "periodicity tuning does not bracket zero: defect({lo}) = {flo:.6}, defect({hi}) = {fhi:.6}"
            )));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = defect_for(mid, &m_effs)?;
            if fm.abs() <= 0.5 * opts.periodicity_tol {
                lo = mid;
                break;
            }
            if flo * fm <= 0.0 {
                hi = mid;
                fhi = fm;
            } else {
                lo = mid;
                flo = fm;
            }
            let _ = fhi;
        }
        amps[last] = lo;
    }
    let arcs = build_arcs(x, y, &insertions, &amps, &m_effs)?;
    let mut starts = Vec::with_capacity(arcs.len());
    let mut area_prefix = Vec::with_capacity(arcs.len() + 1);
    let mut t_acc = 0.0;
    let mut a_acc = 0.0;
    area_prefix.push(0.0);
    for arc in &arcs {
        starts.push(t_acc);
        t_acc += arc.duration();
        a_acc += arc_area(arc, &z);
        area_prefix.push(a_acc);
    }
    let pc = PiecewiseCurve {
        arcs,
        starts,
        total: t_acc,
        x: x.clone(),
        y: y.clone(),
        z,
        area_prefix,
    };
    if !insertions.is_empty() && pc.defect().abs() > opts.periodicity_tol {
        return Err(Error::DegenerateField(format!(
            "assembled defect {} exceeds tolerance",
            pc.defect()
        )));
    }
    // re-verify the crossing signs on the assembled curve
    for c in crossings {
        if let Some(desired_lo) = c.desired_over_lo {
            let zl = pc.z_tilde(pc.map_diagram_param(c.t_lo).expect("incidence outside windows"));
            let zh = pc.z_tilde(pc.map_diagram_param(c.t_hi).expect("incidence outside windows"));
            if (zl > zh) != desired_lo {
                return Err(Error::DegenerateField(format!(
                    "crossing at t = {:.6} still has the wrong sign after assembly",
                    c.t_lo
                )));
            }
        }
    }
    if opts.embed_samples > 0 {
        pc.check_embedded(opts.embed_samples, 0.05, 0.02)?;
    }
    Ok(pc)
}

impl PiecewiseCurve {
    /// Natural time for a global parameter u ∈ [0, 2π].
    fn natural(&self, u: f64) -> f64 {
        u.rem_euclid(TAU) / TAU * self.total
    }

    fn arc_at(&self, t_nat: f64) -> (usize, f64) {
        let idx = match self
            .starts
            .binary_search_by(|s| s.total_cmp(&t_nat))
        {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        (idx, t_nat - self.starts[idx])
    }

    pub fn position(&self, u: f64) -> [f64; 2] {
        let (i, local) = self.arc_at(self.natural(u));
        match &self.arcs[i] {
            Arc::Diagram { t0, .. } => {
                let t = t0 + local;
                [self.x.evaluate(t), self.y.evaluate(t)]
            }
            Arc::Spiral(sp) => sp.position(local),
        }
    }

    /// d(position)/du with the global rescale folded in.
    pub fn velocity(&self, u: f64) -> [f64; 2] {
        let (i, local) = self.arc_at(self.natural(u));
        let scale = self.total / TAU;
        let v = match &self.arcs[i] {
            Arc::Diagram { t0, .. } => {
                let t = t0 + local;
                [
                    self.x.derivative().evaluate(t),
                    self.y.derivative().evaluate(t),
                ]
            }
            Arc::Spiral(sp) => sp.velocity(local),
        };
        [v[0] * scale, v[1] * scale]
    }

    /// Global parameters of the arc junctions.
    pub fn junction_params(&self) -> Vec<f64> {
        self.starts.iter().map(|s| s / self.total * TAU).collect()
    }

    /// Z̃(u) = ∫₀ᵘ (Ỹ X̃' − X̃ Ỹ'), with Z̃(0) = 0.
    pub fn z_tilde(&self, u: f64) -> f64 {
        let (i, local) = self.arc_at(self.natural(u));
        let partial = match &self.arcs[i] {
            Arc::Diagram { t0, .. } => self.z.evaluate(t0 + local) - self.z.evaluate(*t0),
            Arc::Spiral(sp) => {
                let s = sp.sweep_at(local.min(sp.duration));
                sp.area_integral_to(s)
            }
        };
        self.area_prefix[i] + partial
    }

    /// Z̃(2π) − Z̃(0).
    pub fn defect(&self) -> f64 {
        *self.area_prefix.last().unwrap()
    }

    /// Global parameter at which diagram parameter t is traversed, if t is
    /// not inside a replaced window.
    pub fn map_diagram_param(&self, t: f64) -> Option<f64> {
        let t = t.rem_euclid(TAU);
        for (i, arc) in self.arcs.iter().enumerate() {
            if let Arc::Diagram { t0, t1 } = arc {
                if t >= *t0 && t <= *t1 {
                    return Some((self.starts[i] + (t - t0)) / self.total * TAU);
                }
            }
        }
        None
    }

    /// Sampled embeddedness surrogate for the spatial lift (X̃, Ỹ, Z̃):
    /// samples at parameter distance > δ must be at spatial distance > ε₀.
    pub fn check_embedded(&self, samples: usize, delta: f64, eps0: f64) -> Result<()> {
        let pts: Vec<[f64; 3]> = (0..samples)
            .map(|i| {
                let u = i as f64 * TAU / samples as f64;
                let p = self.position(u);
                [p[0], p[1], self.z_tilde(u)]
            })
            .collect();
        for i in 0..samples {
            for j in i + 1..samples {
                let du = cyclic_dist(i as f64 * TAU / samples as f64, j as f64 * TAU / samples as f64);
                if du <= delta {
                    continue;
                }
                let d = ((pts[i][0] - pts[j][0]).powi(2)
                    + (pts[i][1] - pts[j][1]).powi(2)
                    + (pts[i][2] - pts[j][2]).powi(2))
                .sqrt();
                if d <= eps0 {
                    return Err(Error::SelfIntersection {
                        t: i as f64 * TAU / samples as f64,
                        s: j as f64 * TAU / samples as f64,
                    });
                }
            }
        }
        Ok(())
    }
}
