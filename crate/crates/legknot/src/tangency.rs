//! Linear tangency systems for complex plane curves meeting the three-sphere
//! in a given Legendrian link.
//!
//! For a curve (z₁, z₂) = (n₁ + i·n₂, n₃ + i·n₄)/√ρ on S³ with trigonometric
//! numerators, the rescaled restriction of a polynomial
//! G(z₁, z₂) = Σ c_{ij} z₁ⁱ z₂ʲ is
//! G̃(t) = ρⁿ G = Σ c_{ij} N₁ⁱ N₂ʲ ρ^{(2n−i−j)/2} with N₁ = n₁ + i·n₂,
//! N₂ = n₃ + i·n₄. When the coefficients are supported on even i + j, every
//! ρ power is integral and G̃ is a trigonometric polynomial, so "G vanishes
//! on the curve" becomes a finite homogeneous linear system A·c = 0 on the
//! Fourier modes. The inhomogeneous counterpart A·c = y targets the section
//! H whose extensions define Bateman fields with the curve as a field line.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::legendrian_residual_s3;
use crate::legendrify::S3Curve;
use crate::trigpoly::{ComplexTrigPoly, TrigPoly};

/// Polynomial on ℂ² with complex coefficients c_{ij}, 0 ≤ i, j ≤ n.
#[derive(Debug, Clone)]
pub struct PolyC2 {
    pub n: usize,
    /// Sparse coefficient list (i, j, c_{ij}); zero entries omitted.
    pub coeffs: Vec<(usize, usize, Complex64)>,
}

impl PolyC2 {
    pub fn zero(n: usize) -> Self {
        PolyC2 { n, coeffs: Vec::new() }
    }

    pub fn evaluate(&self, z1: Complex64, z2: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|&(i, j, c)| c * z1.powu(i as u32) * z2.powu(j as u32))
            .sum()
    }

    /// (∂G/∂z₁, ∂G/∂z₂) at a point.
    pub fn gradient(&self, z1: Complex64, z2: Complex64) -> (Complex64, Complex64) {
        let mut g1 = Complex64::new(0.0, 0.0);
        let mut g2 = Complex64::new(0.0, 0.0);
        for &(i, j, c) in &self.coeffs {
            if i > 0 {
                g1 += c * (i as f64) * z1.powu(i as u32 - 1) * z2.powu(j as u32);
            }
            if j > 0 {
                g2 += c * (j as f64) * z1.powu(i as u32) * z2.powu(j as u32 - 1);
            }
        }
        (g1, g2)
    }

    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|&(_, _, c)| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Which monomials (i, j) enter the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// Even i + j only when ρ ≢ 1, otherwise all monomials.
    Auto,
    /// Restrict to even i + j (required for ρ ≢ 1, where odd powers of √ρ
    /// are not trigonometric polynomials).
    EvenOnly,
    /// All (n+1)² monomials; only valid when ρ ≡ 1.
    All,
}

/// The assembled linear system: rows are exponential Fourier modes
/// k ∈ [−D, D], columns are monomials (i, j).
#[derive(Debug, Clone)]
pub struct TangencySystem {
    /// Column order: the monomial (i, j) of each column.
    pub index: Vec<(usize, usize)>,
    pub a: DMatrix<Complex64>,
    pub y: Option<DVector<Complex64>>,
    /// Maximum Fourier degree over all basis columns.
    pub d: usize,
    pub n: usize,
    pub even_only: bool,
}

fn rho_is_one(rho: &TrigPoly) -> bool {
    rho.degree() == 0 && (rho.evaluate(0.0) - 1.0).abs() < 1e-12
}

/// Basis function for column (i, j): N₁ⁱ N₂ʲ ρ^{(2n−i−j)/2} as an exact
/// complex trigonometric polynomial (coefficient-level convolution).
fn basis_column(
    pow1: &[ComplexTrigPoly],
    pow2: &[ComplexTrigPoly],
    powr: &[ComplexTrigPoly],
    trivial_rho: bool,
    n: usize,
    i: usize,
    j: usize,
) -> ComplexTrigPoly {
    let e = 2 * n - i - j;
    debug_assert!(trivial_rho || e % 2 == 0, "odd rho exponent requires even-only parity");
    pow1[i].multiply(&pow2[j]).multiply(&powr[e / 2])
}

/// Build the homogeneous system whose nullspace vectors are candidate
/// polynomials vanishing on the curve.
pub fn assemble_a(c: &S3Curve, n: usize, parity: Parity) -> TangencySystem {
    let trivial_rho = rho_is_one(&c.rho);
    let even_only = match parity {
        Parity::Auto => !trivial_rho,
        Parity::EvenOnly => true,
        Parity::All => {
            assert!(trivial_rho, "all-monomial mode requires rho = 1");
            false
        }
    };
    let n1 = ComplexTrigPoly::from_real_pair(&c.num[0], &c.num[1]);
    let n2 = ComplexTrigPoly::from_real_pair(&c.num[2], &c.num[3]);
    let rho = ComplexTrigPoly::from_real(&c.rho);

    // Incremental power tables: pow[k] = base^k by one extra convolution each.
    let pow_table = |base: &ComplexTrigPoly, top: usize| -> Vec<ComplexTrigPoly> {
        let mut v = Vec::with_capacity(top + 1);
        v.push(ComplexTrigPoly::constant(Complex64::new(1.0, 0.0)));
        for k in 1..=top {
            let prev: &ComplexTrigPoly = &v[k - 1];
            v.push(prev.multiply(base));
        }
        v
    };
    let pow1 = pow_table(&n1, n);
    let pow2 = pow_table(&n2, n);
    let powr = pow_table(&rho, n);

    let mut index = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            if !even_only || (i + j) % 2 == 0 {
                index.push((i, j));
            }
        }
    }
    let cols: Vec<ComplexTrigPoly> = index
        .iter()
        .map(|&(i, j)| basis_column(&pow1, &pow2, &powr, trivial_rho, n, i, j))
        .collect();
    let d = cols.iter().map(|p| p.degree()).max().unwrap_or(0);
    let rows = 2 * d + 1;
    let mut a = DMatrix::<Complex64>::zeros(rows, index.len());
    for (col, p) in cols.iter().enumerate() {
        for k in -(d as i64)..=(d as i64) {
            a[((k + d as i64) as usize, col)] = p.coeff(k);
        }
    }
    TangencySystem { index, a, y: None, d, n, even_only }
}

/// Repackage a solution vector as a polynomial.
fn vector_to_poly(sys: &TangencySystem, x: &DVector<Complex64>) -> PolyC2 {
    let coeffs = sys
        .index
        .iter()
        .zip(x.iter())
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(&(i, j), &c)| (i, j, c))
        .collect();
    PolyC2 { n: sys.n, coeffs }
}

/// Nullspace candidates: right singular vectors whose singular value is at
/// most tol·σ_max, in increasing singular-value order. A wide matrix is
/// padded with zero rows so the factorization exposes the full nullspace.
pub fn nullspace(sys: &TangencySystem, tol: f64) -> Vec<PolyC2> {
    let (rows, cols) = (sys.a.nrows(), sys.a.ncols());
    let m = if rows >= cols {
        sys.a.clone()
    } else {
        let mut padded = DMatrix::<Complex64>::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(&sys.a);
        padded
    };
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let mut hits: Vec<(f64, usize)> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol * sigma_max.max(1e-300))
        .map(|(k, &s)| (s, k))
        .collect();
    hits.sort_by(|a, b| a.0.total_cmp(&b.0));
    hits.iter()
        .map(|&(_, k)| {
            let x = DVector::from_iterator(cols, v_t.row(k).iter().map(|c| c.conj()));
            vector_to_poly(sys, &x)
        })
        .collect()
}

/// The section data: P = ρ²·H(t) where H = X·v₂ + i X·v₁ is the tangency
/// section along the curve (X the parametrization derivative, v₁, v₂ the
/// standard orthonormal frame of the contact planes).
#[derive(Debug, Clone)]
pub struct TangentSectionData {
    pub p: ComplexTrigPoly,
    /// Minimum polynomial degree parameter for a trig-polynomial right-hand
    /// side ρ^{n−2}·P.
    pub n_min: usize,
}

/// Compute P = ρ²H exactly at the coefficient level. With
/// Mᵢ := nᵢ'·ρ − nᵢ·ρ'/2 (so xᵢ' = Mᵢ/ρ^{3/2}), the half powers cancel:
/// ρ²(X·v₂) = −n₄M₁ − n₃M₂ + n₂M₃ + n₁M₄ and
/// ρ²(X·v₁) = −n₃M₁ + n₄M₂ + n₁M₃ − n₂M₄.
pub fn tangent_section(c: &S3Curve) -> Result<TangentSectionData> {
    let (re, im) = legendrian_residual_s3(c, 1024);
    let residual = re.max(im);
    if residual > 1e-8 {
        return Err(Error::NotLegendrian { residual, tol: 1e-8 });
    }
    let drho_half = c.rho.derivative().scale(0.5);
    let m: Vec<TrigPoly> = (0..4)
        .map(|k| c.num[k].derivative().multiply(&c.rho).sub(&c.num[k].multiply(&drho_half)))
        .collect();
    let [n1, n2, n3, n4] = &c.num;
    let s2 = n4.multiply(&m[0]).scale(-1.0).sub(&n3.multiply(&m[1])).add(&n2.multiply(&m[2])).add(&n1.multiply(&m[3]));
    let s1 = n3.multiply(&m[0]).scale(-1.0).add(&n4.multiply(&m[1])).add(&n1.multiply(&m[2])).sub(&n2.multiply(&m[3]));
    Ok(TangentSectionData { p: ComplexTrigPoly::from_real_pair(&s2, &s1), n_min: 2 })
}

/// Attach the inhomogeneous right-hand side: y holds the Fourier modes of
/// h̃ = ρⁿH = ρ^{n−2}·P in the row basis of the assembled matrix.
pub fn assemble_y(c: &S3Curve, n: usize, sys: &mut TangencySystem) -> Result<()> {
    if n < 2 {
        return Err(Error::DegreeTooSmall { n });
    }
    let section = tangent_section(c)?;
    let rho = ComplexTrigPoly::from_real(&c.rho);
    let mut h = section.p;
    for _ in 0..(n - 2) {
        h = h.multiply(&rho);
    }
    assert!(h.degree() <= sys.d, "right-hand side exceeds the row mode range");
    let d = sys.d as i64;
    sys.y = Some(DVector::from_iterator(
        2 * sys.d + 1,
        (-d..=d).map(|k| h.coeff(k)),
    ));
    Ok(())
}

/// Minimum-norm least-squares solution of A·x = y via the singular value
/// decomposition; returns the polynomial and the relative residual
/// ‖Ax − y‖/‖y‖ (zero right-hand side gives the zero polynomial).
pub fn least_squares(sys: &TangencySystem) -> (PolyC2, f64) {
    let y = sys.y.as_ref().expect("right-hand side assembled");
    let ynorm = y.norm();
    if ynorm == 0.0 {
        return (PolyC2::zero(sys.n), 0.0);
    }
    let (rows, cols) = (sys.a.nrows(), sys.a.ncols());
    let (m, yv) = if rows >= cols {
        (sys.a.clone(), y.clone())
    } else {
        let mut padded = DMatrix::<Complex64>::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(&sys.a);
        let mut ypad = DVector::<Complex64>::zeros(cols);
        ypad.rows_mut(0, rows).copy_from(y);
        (padded, ypad)
    };
    let svd = m.svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = 1e-12 * sigma_max;
    // x = V Σ⁺ Uᴴ y restricted to singular values above the cutoff.
    let uty = u.adjoint() * &yv;
    let mut scaled = DVector::<Complex64>::zeros(uty.len());
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            scaled[k] = uty[k] / s;
        }
    }
    let x = v_t.adjoint() * scaled;
    let residual = (&sys.a * &x - y).norm() / ynorm;
    (vector_to_poly(sys, &x), residual)
}

/// The conformal map (α, β) carrying a spacetime point to the unit
/// sphere in ℂ²: with d = x² + y² + z² − (t − i)²,
/// α = (x² + y² + z² − t² − 1 + 2iz)/d and β = 2(x − iy)/d.
pub fn alpha_beta(x: f64, y: f64, z: f64, t: f64) -> (Complex64, Complex64) {
    let r3 = x * x + y * y + z * z;
    let d = Complex64::new(r3 - t * t + 1.0, 2.0 * t);
    let alpha = Complex64::new(r3 - t * t - 1.0, 2.0 * z) / d;
    let beta = Complex64::new(2.0 * x, -2.0 * y) / d;
    (alpha, beta)
}

/// Spacetime gradients of α and β in closed form:
/// (∂x, ∂y, ∂z, ∂t) of each, with d as above, u = 1 + i(t − z), w = x − iy.
pub fn alpha_beta_gradients(
    x: f64,
    y: f64,
    z: f64,
    t: f64,
) -> ([Complex64; 4], [Complex64; 4]) {
    let r3 = x * x + y * y + z * z;
    let d = Complex64::new(r3 - t * t + 1.0, 2.0 * t);
    let d2 = d * d;
    let u = Complex64::new(1.0, t - z);
    let w = Complex64::new(x, -y);
    let i = Complex64::new(0.0, 1.0);
    let ga = [
        4.0 * x * u / d2,
        4.0 * y * u / d2,
        (2.0 * i * d + 4.0 * z * u) / d2,
        (-2.0 * i * d - 4.0 * Complex64::new(t, -1.0) * u) / d2,
    ];
    let gb = [
        (2.0 * d - 4.0 * x * w) / d2,
        (-2.0 * i * d - 4.0 * y * w) / d2,
        -4.0 * z * w / d2,
        4.0 * Complex64::new(t, -1.0) * w / d2,
    ];
    (ga, gb)
}

fn cross_c(a: [Complex64; 3], b: [Complex64; 3]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Bateman field F = h(α, β) ∇α × ∇β at a spacetime point; E = Re F,
/// B = Im F. The field is null and solves the vacuum Maxwell equations for
/// any holomorphic h.
pub fn bateman_field(h: &PolyC2, x: f64, y: f64, z: f64, t: f64) -> [Complex64; 3] {
    let (alpha, beta) = alpha_beta(x, y, z, t);
    let (ga, gb) = alpha_beta_gradients(x, y, z, t);
    let w = cross_c([ga[0], ga[1], ga[2]], [gb[0], gb[1], gb[2]]);
    let hv = h.evaluate(alpha, beta);
    [hv * w[0], hv * w[1], hv * w[2]]
}

/// Heuristic verification report for a homogeneous candidate G.
#[derive(Debug, Clone)]
pub struct CandidateGReport {
    /// max over curve samples of |G(z₁(t), z₂(t))|.
    pub max_on_curve: f64,
    /// min over curve samples of |∇G| (regularity of the zero set).
    pub min_grad_on_curve: f64,
    /// Monte-Carlo min |G| over the open unit 4-ball (heuristic only).
    pub mc_min_interior: f64,
    /// Monte-Carlo min |G| over S³ points away from the curve (heuristic).
    pub mc_min_off_curve: f64,
    pub trivial: bool,
}

/// Sample-based checks of a candidate against the curve; interior and
/// off-curve minima use seeded Monte-Carlo sampling and are heuristic.
pub fn verify_candidate_g(g: &PolyC2, c: &S3Curve, samples: usize) -> CandidateGReport {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    if g.coeffs.is_empty() {
        return CandidateGReport {
            max_on_curve: 0.0,
            min_grad_on_curve: 0.0,
            mc_min_interior: 0.0,
            mc_min_off_curve: 0.0,
            trivial: true,
        };
    }
    let mut curve_pts = Vec::with_capacity(samples);
    let mut max_on = 0.0f64;
    let mut min_grad = f64::INFINITY;
    for k in 0..samples {
        let t = k as f64 * TAU / samples as f64;
        let p = c.evaluate(t);
        let z1 = Complex64::new(p[0], p[1]);
        let z2 = Complex64::new(p[2], p[3]);
        curve_pts.push(p);
        max_on = max_on.max(g.evaluate(z1, z2).norm());
        let (g1, g2) = g.gradient(z1, z2);
        min_grad = min_grad.min((g1.norm_sqr() + g2.norm_sqr()).sqrt());
    }
    let unit4 = |rng: &mut rand_chacha::ChaCha8Rng| -> [f64; 4] {
        loop {
            let v = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let n2: f64 = v.iter().map(|a| a * a).sum();
            if n2 > 1e-6 && n2 < 1.0 {
                return v;
            }
        }
    };
    let mut mc_interior = f64::INFINITY;
    let mut mc_off = f64::INFINITY;
    for _ in 0..samples {
        let v = unit4(&mut rng);
        mc_interior = mc_interior
            .min(g.evaluate(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])).norm());
        // Sphere point: normalize, then skip points close to the curve.
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let s = [v[0] / n, v[1] / n, v[2] / n, v[3] / n];
        let near_curve = curve_pts.iter().any(|p| {
            (0..4).map(|k| (p[k] - s[k]).powi(2)).sum::<f64>() < 0.01
        });
        if !near_curve {
            mc_off = mc_off
                .min(g.evaluate(Complex64::new(s[0], s[1]), Complex64::new(s[2], s[3])).norm());
        }
    }
    CandidateGReport {
        max_on_curve: max_on,
        min_grad_on_curve: min_grad,
        mc_min_interior: mc_interior,
        mc_min_off_curve: mc_off,
        trivial: false,
    }
}

/// Verification report for an inhomogeneous candidate h.
#[derive(Debug, Clone)]
pub struct CandidateHReport {
    /// max over samples of ‖B × T‖/(‖B‖·‖T‖) with B the magnetic part of
    /// the Bateman field at t = 0 and T the projected curve tangent.
    pub max_nonparallelism: f64,
    /// max over samples of |h(z₁(t), z₂(t)) − H(t)|.
    pub max_section_mismatch: f64,
}

/// Check that the curve projects to a field line of the Bateman field of h:
/// B = Im F must be parallel to the projected tangent at every sample.
pub fn verify_candidate_h(h: &PolyC2, c: &S3Curve, samples: usize) -> Result<CandidateHReport> {
    if h.coeffs.is_empty() {
        return Err(Error::DegenerateField("candidate h is identically zero".into()));
    }
    let section = tangent_section(c)?;
    let mut max_np = 0.0f64;
    let mut max_mismatch = 0.0f64;
    for k in 0..samples {
        let t = k as f64 * TAU / samples as f64;
        let p = c.evaluate(t);
        let q = crate::dynamics::phi0(p)?;
        let f = bateman_field(h, q[0], q[1], q[2], 0.0);
        let b = [f[0].im, f[1].im, f[2].im];
        // Projected tangent by a symmetric difference of the projection.
        let dt = 1e-6;
        let qp = crate::dynamics::phi0(c.evaluate(t + dt))?;
        let qm = crate::dynamics::phi0(c.evaluate(t - dt))?;
        let tangent = [
            (qp[0] - qm[0]) / (2.0 * dt),
            (qp[1] - qm[1]) / (2.0 * dt),
            (qp[2] - qm[2]) / (2.0 * dt),
        ];
        let nb = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
        let nt = (tangent[0] * tangent[0] + tangent[1] * tangent[1] + tangent[2] * tangent[2]).sqrt();
        if nb < 1e-14 {
            return Err(Error::DegenerateField(format!(
                "magnetic field vanishes on the curve at parameter {t:.6}"
            )));
        }
        let cx = [
            b[1] * tangent[2] - b[2] * tangent[1],
            b[2] * tangent[0] - b[0] * tangent[2],
            b[0] * tangent[1] - b[1] * tangent[0],
        ];
        let ncx = (cx[0] * cx[0] + cx[1] * cx[1] + cx[2] * cx[2]).sqrt();
        max_np = max_np.max(ncx / (nb * nt));
        // Section mismatch: H = P/ρ² on the curve.
        let rho2 = c.rho.evaluate(t).powi(2);
        let hval = h.evaluate(Complex64::new(p[0], p[1]), Complex64::new(p[2], p[3]));
        let hsec = section.p.evaluate(t) / rho2;
        max_mismatch = max_mismatch.max((hval - hsec).norm());
    }
    Ok(CandidateHReport { max_nonparallelism: max_np, max_section_mismatch: max_mismatch })
}
