//! Reference curves used across tests and as CLI demo inputs.

use crate::diagram::{detect_crossings, induced_gauss_code, DiagramCurve};
use crate::knot::GaussCode;
use crate::trigpoly::{area_integral, TrigPoly};

/// Round unknot diagram (no crossings).
pub fn unknot_diagram() -> DiagramCurve {
    DiagramCurve {
        x: TrigPoly::cos(1),
        y: TrigPoly::sin(1),
        target: vec![],
    }
}

/// Planar figure-eight diagram curve X = cos(3t)(2 + cos 2t),
/// Y = sin 4t + sin(2t)/4.
pub fn figure_eight_xy() -> (TrigPoly, TrigPoly) {
    let x = TrigPoly::cos(3).multiply(&TrigPoly::constant(2.0).add(&TrigPoly::cos(2)));
    let y = TrigPoly::sin(4).add(&TrigPoly::sin(2).scale(0.25));
    (x, y)
}

/// Figure-eight diagram with its target code: the code induced by the area
/// integral with the crossing at the origin flipped (that is the single
/// incorrectly signed crossing of this parametrization).
pub fn figure_eight_diagram() -> DiagramCurve {
    let (x, y) = figure_eight_xy();
    let z = area_integral(&x, &y);
    let (f, df) = pair_closures(&x, &y);
    let crossings = detect_crossings(f, df, 4096).expect("fixture crossings");
    let induced = induced_gauss_code(&crossings, |t| z.evaluate(t), 1e-9).expect("fixture code");
    let origin_idx = crossings
        .iter()
        .position(|c| c.pos[0].abs() < 1e-8 && c.pos[1].abs() < 1e-8)
        .expect("crossing at the origin");
    let target: GaussCode = induced
        .into_iter()
        .map(|mut e| {
            if e.id == origin_idx {
                e.over = !e.over;
            }
            e
        })
        .collect();
    DiagramCurve { x, y, target }
}

/// Standard trefoil projection X = sin t + 2 sin 2t, Y = cos t − 2 cos 2t
/// with the alternating over/under assignment as target.
pub fn trefoil_diagram() -> DiagramCurve {
    let x = TrigPoly::sin(1).add(&TrigPoly::sin(2).scale(2.0));
    let y = TrigPoly::cos(1).add(&TrigPoly::cos(2).scale(-2.0));
    let (f, df) = pair_closures(&x, &y);
    let crossings = detect_crossings(f, df, 4096).expect("fixture crossings");
    let z = area_integral(&x, &y);
    let induced = induced_gauss_code(&crossings, |t| z.evaluate(t), 1e-9).expect("fixture code");
    // alternating assignment over the incidence sequence
    let target: GaussCode = induced
        .into_iter()
        .enumerate()
        .map(|(k, mut e)| {
            e.over = k % 2 == 0;
            e
        })
        .collect();
    DiagramCurve { x, y, target }
}

/// Minimal figure-eight diagram X = cos t + 2 cos 3t, Y = sin t + 2 sin 3t
/// with the alternating over/under assignment as target.
///
/// The projection has exactly four transverse crossings and no kinks, so the
/// alternating assignment is the reduced alternating four-crossing diagram:
/// the figure-eight knot (determinant 5).
pub fn figure_eight_minimal_diagram() -> DiagramCurve {
    let x = TrigPoly::cos(1).add(&TrigPoly::cos(3).scale(2.0));
    let y = TrigPoly::sin(1).add(&TrigPoly::sin(3).scale(2.0));
    let (f, df) = pair_closures(&x, &y);
    let crossings = detect_crossings(f, df, 4096).expect("fixture crossings");
    let z = area_integral(&x, &y);
    let induced = induced_gauss_code(&crossings, |t| z.evaluate(t), 1e-9).expect("fixture code");
    let target: GaussCode = induced
        .into_iter()
        .enumerate()
        .map(|(k, mut e)| {
            e.over = k % 2 == 0;
            e
        })
        .collect();
    DiagramCurve { x, y, target }
}

/// The printed degree-11 Legendrian figure-eight curve (X, Y) and its
/// printed, rounded Z coefficients.
pub fn best_fig8() -> (TrigPoly, TrigPoly, TrigPoly) {
    let x = TrigPoly::cos(3).scale(2.4).add(&TrigPoly::cos(1));
    // (1.5 cos²t + (2/3) sin²t)(1.5 cos(6t − 1) + sin 6t)
    let envelope = TrigPoly::cos(1)
        .square()
        .scale(1.5)
        .add(&TrigPoly::sin(1).square().scale(2.0 / 3.0));
    let carrier = TrigPoly::cos(6)
        .scale(1.5 * 1.0f64.cos())
        .add(&TrigPoly::sin(6).scale(1.5 * 1.0f64.sin() + 1.0));
    let y = envelope.multiply(&carrier);
    let mut zc = vec![0.0; 11];
    let mut zs = vec![0.0; 11];
    for (j, (c, s)) in [
        (1usize, (-1.4183, -3.9589)),
        (3, (-3.3015, -9.2153)),
        (5, (-1.1110, -3.1011)),
        (7, (-0.4511, -1.2590)),
        (9, (-0.4169, -1.1636)),
        (11, (-0.0921, -0.2571)),
    ] {
        zc[j - 1] = c;
        zs[j - 1] = s;
    }
    (x, y, TrigPoly::new(0.0, zc, zs))
}

/// Closed-form Legendrian (2,3)-torus curve on S³:
/// z₁ = √(2/5)·e^{3it}, z₂ = √(3/5)·e^{−2it}. Satisfies z̄₁z₁' + z̄₂z₂' ≡ 0
/// exactly (amplitudes balance the winding rates: 3·2/5 − 2·3/5 = 0), so it
/// is Legendrian, and ρ ≡ 1 so every power of the sphere radius is trivial.
pub fn torus_23_s3curve() -> crate::legendrify::S3Curve {
    let a = (2.0f64 / 5.0).sqrt();
    let b = (3.0f64 / 5.0).sqrt();
    crate::legendrify::S3Curve {
        num: [
            TrigPoly::cos(3).scale(a),
            TrigPoly::sin(3).scale(a),
            TrigPoly::cos(2).scale(b),
            TrigPoly::sin(2).scale(-b),
        ],
        rho: TrigPoly::constant(1.0),
    }
}

/// Closure pair (position, derivative) for a TrigPoly coordinate pair.
pub fn pair_closures<'a>(
    x: &'a TrigPoly,
    y: &'a TrigPoly,
) -> (
    impl Fn(f64) -> [f64; 2] + 'a,
    impl Fn(f64) -> [f64; 2] + 'a,
) {
    let dx = x.derivative();
    let dy = y.derivative();
    let (xc, yc) = (x.clone(), y.clone());
    (
        move |t: f64| [xc.evaluate(t), yc.evaluate(t)],
        move |t: f64| [dx.evaluate(t), dy.evaluate(t)],
    )
}
