//! Contact-geometric maps and residual checks: the two ℝ³ models of the
//! standard contact structure, the S³ tangency residual, the front-projection
//! lift and the radial projection between S³ and its tangent space.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::legendrify::S3Curve;
use crate::trigpoly::{fourier_project_samples, TrigPoly};

/// Which ℝ³ contact model a space curve lives in: ξ₁ is the kernel of
/// dz + x dy, ξ₂ the kernel of dZ + X dY − Y dX.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactModel {
    Xi1,
    Xi2,
}

/// A closed space curve with trigonometric-polynomial coordinates, tagged by
/// the contact model its coordinates refer to.
#[derive(Debug, Clone)]
pub struct SpaceCurveR3 {
    pub x: TrigPoly,
    pub y: TrigPoly,
    pub z: TrigPoly,
    pub model: ContactModel,
}

impl SpaceCurveR3 {
    pub fn evaluate(&self, t: f64) -> [f64; 3] {
        [self.x.evaluate(t), self.y.evaluate(t), self.z.evaluate(t)]
    }
}

/// Sup over samples of the Legendrian residual: |z' + x y'| in the ξ₁ model,
/// |Z' + X Y' − Y X'| in the ξ₂ model.
pub fn legendrian_residual_r3(c: &SpaceCurveR3, samples: usize) -> f64 {
    let (dx, dy, dz) = (c.x.derivative(), c.y.derivative(), c.z.derivative());
    let mut worst = 0.0f64;
    for i in 0..samples {
        let t = i as f64 * TAU / samples as f64;
        let r = match c.model {
            ContactModel::Xi1 => dz.evaluate(t) + c.x.evaluate(t) * dy.evaluate(t),
            ContactModel::Xi2 => {
                dz.evaluate(t) + c.x.evaluate(t) * dy.evaluate(t)
                    - c.y.evaluate(t) * dx.evaluate(t)
            }
        };
        worst = worst.max(r.abs());
    }
    worst
}

/// Sup over samples of the real and imaginary parts of z̄₁z₁' + z̄₂z₂'.
/// The real part measures drift off the unit sphere, the imaginary part the
/// failure of tangency to the standard contact structure.
pub fn legendrian_residual_s3(c: &S3Curve, samples: usize) -> (f64, f64) {
    let mut re = 0.0f64;
    let mut im = 0.0f64;
    for i in 0..samples {
        let t = i as f64 * TAU / samples as f64;
        let p = c.evaluate(t);
        let d = c.derivative_at(t);
        // z1 = p0 + i p1, z2 = p2 + i p3
        let r = p[0] * d[0] + p[1] * d[1] + p[2] * d[2] + p[3] * d[3];
        let m = p[0] * d[1] - p[1] * d[0] + p[2] * d[3] - p[3] * d[2];
        re = re.max(r.abs());
        im = im.max(m.abs());
    }
    (re, im)
}

/// Pointwise contactomorphism from the ξ₁ model to the ξ₂ model:
/// (x, y, z) ↦ ((x+y)/2, (y−x)/2, z + xy/2).
pub fn xi1_to_xi2(p: [f64; 3]) -> [f64; 3] {
    let [x, y, z] = p;
    [(x + y) / 2.0, (y - x) / 2.0, z + x * y / 2.0]
}

/// Apply the contactomorphism to a whole curve, exactly at the coefficient
/// level (the image coordinates are again trigonometric polynomials).
pub fn xi1_curve_to_xi2(c: &SpaceCurveR3) -> SpaceCurveR3 {
    assert_eq!(c.model, ContactModel::Xi1, "input must be a xi1 curve");
    let xy = c.x.multiply(&c.y);
    SpaceCurveR3 {
        x: c.x.add(&c.y).scale(0.5),
        y: c.y.sub(&c.x).scale(0.5),
        z: c.z.add(&xy.scale(0.5)),
        model: ContactModel::Xi2,
    }
}

/// A front projection (y(t), z(t)): a knot-diagram curve without vertical
/// tangencies, whose vertical-tangent candidates are replaced by semicubical
/// cusps at the listed parameters (y' = z' = 0 there).
#[derive(Debug, Clone)]
pub struct FrontCurve {
    pub y: TrigPoly,
    pub z: TrigPoly,
    /// Parameters where y' = z' = 0 and the slope −z'/y' extends by limits.
    pub cusps: Vec<f64>,
}

fn cyclic_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Lift a front to a ξ₁-Legendrian space curve: x(t) = −z'(t)/y'(t) away from
/// cusps, with the limit value (ratio of second derivatives) at each cusp and
/// a small interpolation guard band around it.
///
/// The x-samples are projected back onto a trigonometric polynomial of the
/// requested degree, so the output is only approximately Legendrian; the
/// slope formula is numerically delicate near cusps by nature.
pub fn front_lift(f: &FrontCurve, degree: usize) -> Result<SpaceCurveR3> {
    const GUARD: f64 = 1e-3;
    let dy = f.y.derivative();
    let dz = f.z.derivative();
    let ddy = dy.derivative();
    let ddz = dz.derivative();
    let scale = 1.0 + f.y.coeff_norm() + f.z.coeff_norm();

    // slope limit at each cusp by l'Hôpital on the second derivatives
    let mut cusp_x = Vec::with_capacity(f.cusps.len());
    for &tc in &f.cusps {
        let (dyc, dzc) = (dy.evaluate(tc), dz.evaluate(tc));
        let (ddyc, ddzc) = (ddy.evaluate(tc), ddz.evaluate(tc));
        if dyc.abs() > 1e-6 * scale || dzc.abs() > 1e-6 * scale {
            return Err(Error::CuspIllConditioned {
                t: tc,
                dy: dyc.abs(),
                dz: dzc.abs(),
            });
        }
        if ddyc.abs() <= 1e-8 * scale {
            // y vanishes to higher order than z: the slope blows up
            return Err(Error::CuspIllConditioned {
                t: tc,
                dy: ddyc.abs(),
                dz: ddzc.abs(),
            });
        }
        cusp_x.push(-ddzc / ddyc);
    }

    let n = ((4 * (2 * degree + 1)).next_power_of_two()).max(1024);
    let slope_at = |t: f64| -> Result<f64> {
        let d = dy.evaluate(t);
        if d.abs() <= 1e-8 * scale {
            return Err(Error::CuspIllConditioned {
                t,
                dy: d.abs(),
                dz: dz.evaluate(t).abs(),
            });
        }
        Ok(-dz.evaluate(t) / d)
    };
    let mut xs = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 * TAU / n as f64;
        let near = f
            .cusps
            .iter()
            .enumerate()
            .map(|(k, &tc)| (k, cyclic_dist(t, tc)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let x = match near {
            Some((k, d)) if d < GUARD => {
                // blend the limit value with the slope at the band edge
                let tc = f.cusps[k];
                let side = if (t - tc).rem_euclid(TAU) < TAU / 2.0 {
                    1.0
                } else {
                    -1.0
                };
                let edge = slope_at(tc + side * GUARD)?;
                let u = d / GUARD;
                (1.0 - u) * cusp_x[k] + u * edge
            }
            _ => slope_at(t)?,
        };
        xs.push(x);
    }
    let x = fourier_project_samples(&xs, degree, 1.0).poly;
    Ok(SpaceCurveR3 {
        x,
        y: f.y.clone(),
        z: f.z.clone(),
        model: ContactModel::Xi1,
    })
}

/// Front-projection crossing convention for the ξ₁ model (contact form
/// dz + x dy): the overpassing strand has the smaller slope. Returns whether
/// the claimed over/under assignment is consistent with the slopes.
pub fn crossing_sign_front(slope_over: f64, slope_under: f64) -> Result<bool> {
    if slope_over == slope_under {
        return Err(Error::EqualSlopes);
    }
    Ok(slope_over < slope_under)
}

/// Radial projection from S³₊ (the x₁ > 0 half-sphere) to the tangent space
/// at (1, 0, 0, 0), identified with the ξ₂ model of ℝ³:
/// (X, Y, Z) = (x₂/x₁, y₂/x₁, y₁/x₁). Inverse of `project_to_s3`.
pub fn tangent_space_project(c: &S3Curve, samples: usize) -> Result<SpaceCurveR3> {
    for i in 0..samples.max(16) {
        let t = i as f64 * TAU / samples.max(16) as f64;
        let x1 = c.num[0].evaluate(t) / c.rho.evaluate(t).sqrt();
        if x1 <= 0.0 {
            return Err(Error::NotInRightHalfSphere { t, x1 });
        }
    }
    // ratios of numerators; exact when the x1-numerator is constant
    let n0 = &c.num[0];
    if n0.degree() == 0 && n0.a0 != 0.0 {
        let s = 1.0 / n0.a0;
        return Ok(SpaceCurveR3 {
            x: c.num[2].scale(s),
            y: c.num[3].scale(s),
            z: c.num[1].scale(s),
            model: ContactModel::Xi2,
        });
    }
    // general position: sample the ratios and re-project
    let deg = 2 * (c.num.iter().map(|p| p.degree()).max().unwrap() + c.rho.degree()).max(8);
    let n = (4 * (2 * deg + 1)).next_power_of_two();
    let mut cs = [const { Vec::new() }; 3];
    for i in 0..n {
        let t = i as f64 * TAU / n as f64;
        let d = c.num[0].evaluate(t);
        cs[0].push(c.num[2].evaluate(t) / d);
        cs[1].push(c.num[3].evaluate(t) / d);
        cs[2].push(c.num[1].evaluate(t) / d);
    }
    Ok(SpaceCurveR3 {
        x: fourier_project_samples(&cs[0], deg, 1.0).poly,
        y: fourier_project_samples(&cs[1], deg, 1.0).poly,
        z: fourier_project_samples(&cs[2], deg, 1.0).poly,
        model: ContactModel::Xi2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::legendrify::{legendrian_lift, project_to_s3};

    #[test]
    fn xi1_example_curve_is_legendrian() {
        // (x, y, z) = (−cos t, cos t, cos(2t)/4): z' + x y' ≡ 0
        let c = SpaceCurveR3 {
            x: TrigPoly::cos(1).scale(-1.0),
            y: TrigPoly::cos(1),
            z: TrigPoly::cos(2).scale(0.25),
            model: ContactModel::Xi1,
        };
        assert!(legendrian_residual_r3(&c, 512) < 1e-12);
    }

    #[test]
    fn xi2_circle_is_not_legendrian() {
        let c = SpaceCurveR3 {
            x: TrigPoly::cos(1),
            y: TrigPoly::sin(1),
            z: TrigPoly::zero(),
            model: ContactModel::Xi2,
        };
        let r = legendrian_residual_r3(&c, 512);
        assert!((r - 1.0).abs() < 1e-12, "residual {r}");
    }

    #[test]
    fn s3_residual_constant_and_torus_and_hopf() {
        let constant = S3Curve {
            num: [
                TrigPoly::constant(1.0),
                TrigPoly::zero(),
                TrigPoly::zero(),
                TrigPoly::zero(),
            ],
            rho: TrigPoly::constant(1.0),
        };
        let (re, im) = legendrian_residual_s3(&constant, 64);
        assert_eq!((re, im), (0.0, 0.0));

        let torus = fixtures::torus_23_s3curve();
        let (re, im) = legendrian_residual_s3(&torus, 512);
        assert!(re < 1e-12 && im < 1e-12, "torus residual ({re}, {im})");

        // Hopf fiber z1 = z2 = e^{it}/√2 is transverse: Im residual 1
        let s = 0.5f64.sqrt();
        let hopf = S3Curve {
            num: [
                TrigPoly::cos(1).scale(s),
                TrigPoly::sin(1).scale(s),
                TrigPoly::cos(1).scale(s),
                TrigPoly::sin(1).scale(s),
            ],
            rho: TrigPoly::constant(1.0),
        };
        let (re, im) = legendrian_residual_s3(&hopf, 512);
        assert!(re < 1e-12);
        assert!((im - 1.0).abs() < 1e-12, "hopf Im residual {im}");
    }

    #[test]
    fn xi1_to_xi2_point_values() {
        assert_eq!(xi1_to_xi2([0.0, 0.0, 0.0]), [0.0, 0.0, 0.0]);
        assert_eq!(xi1_to_xi2([1.0, 2.0, 3.0]), [1.5, 0.5, 4.0]);
    }

    #[test]
    fn contactomorphism_preserves_legendrian_residual() {
        let c = SpaceCurveR3 {
            x: TrigPoly::cos(1).scale(-1.0),
            y: TrigPoly::cos(1),
            z: TrigPoly::cos(2).scale(0.25),
            model: ContactModel::Xi1,
        };
        let im = xi1_curve_to_xi2(&c);
        assert!(legendrian_residual_r3(&im, 512) < 1e-10);
    }

    #[test]
    fn front_lift_recovers_slope() {
        // y = cos t, z = cos(2t)/4 → x = −z'/y' = −cos t, cusps at 0 and π
        let f = FrontCurve {
            y: TrigPoly::cos(1),
            z: TrigPoly::cos(2).scale(0.25),
            cusps: vec![0.0, std::f64::consts::PI],
        };
        let c = front_lift(&f, 8).unwrap();
        for i in 0..64 {
            let t = i as f64 * TAU / 64.0;
            assert!(
                (c.x.evaluate(t) + t.cos()).abs() < 1e-3,
                "x({t}) = {}",
                c.x.evaluate(t)
            );
        }
        assert!(legendrian_residual_r3(&c, 2048) < 1e-2);
    }

    #[test]
    fn front_lift_flat_z_gives_zero_x() {
        let f = FrontCurve {
            y: TrigPoly::cos(1),
            z: TrigPoly::zero(),
            cusps: vec![0.0, std::f64::consts::PI],
        };
        let c = front_lift(&f, 8).unwrap();
        for i in 0..64 {
            let t = i as f64 * TAU / 64.0;
            assert!(c.x.evaluate(t).abs() < 1e-9);
        }
    }

    #[test]
    fn front_lift_rejects_undeclared_vertical_tangent() {
        let f = FrontCurve {
            y: TrigPoly::cos(1),
            z: TrigPoly::sin(1),
            cusps: vec![],
        };
        assert!(matches!(
            front_lift(&f, 8),
            Err(Error::CuspIllConditioned { .. })
        ));
    }

    #[test]
    fn front_crossing_convention() {
        assert!(crossing_sign_front(-1.0, 1.0).unwrap());
        assert!(!crossing_sign_front(1.0, -1.0).unwrap());
        assert!(matches!(
            crossing_sign_front(0.5, 0.5),
            Err(Error::EqualSlopes)
        ));
    }

    #[test]
    fn tangent_space_roundtrip() {
        let (x, y, z) = fixtures::best_fig8();
        let lifted = legendrian_lift(&x, &y).unwrap();
        let _ = z;
        let s3 = project_to_s3(&lifted);
        let back = tangent_space_project(&s3, 512).unwrap();
        for i in 0..128 {
            let t = i as f64 * TAU / 128.0;
            let a = lifted.evaluate(t);
            let b = back.evaluate(t);
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() < 1e-12);
            }
        }
        assert_eq!(back.model, ContactModel::Xi2);
    }

    #[test]
    fn tangent_space_project_rejects_sign_change() {
        // x1-numerator cos t changes sign
        let bad = S3Curve {
            num: [
                TrigPoly::cos(1),
                TrigPoly::sin(1),
                TrigPoly::zero(),
                TrigPoly::zero(),
            ],
            rho: TrigPoly::constant(1.0),
        };
        assert!(matches!(
            tangent_space_project(&bad, 256),
            Err(Error::NotInRightHalfSphere { .. })
        ));
    }

    #[test]
    fn pipeline_lift_residuals_are_tiny() {
        let (x, y, _) = fixtures::best_fig8();
        let c = legendrian_lift(&x, &y).unwrap();
        let sc = SpaceCurveR3 {
            x: c.x.clone(),
            y: c.y.clone(),
            z: c.z.clone(),
            model: ContactModel::Xi2,
        };
        assert!(legendrian_residual_r3(&sc, 2048) < 1e-10);
        let (re, im) = legendrian_residual_s3(&project_to_s3(&c), 2048);
        assert!(re < 1e-9 && im < 1e-9, "s3 residuals ({re}, {im})");
    }
}
