//! Real and complex trigonometric polynomials: arithmetic, calculus,
//! Fourier projection and Hermite-style interpolation.
//!
//! A real trigonometric polynomial is stored in the cosine/sine basis,
//! `a0 + sum_j (a_j cos(jt) + b_j sin(jt))`; complex ones use the
//! exponential basis `sum_k c_k e^{ikt}` with `k` running over `[-d, d]`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Real trigonometric polynomial `a0 + sum (a_j cos jt + b_j sin jt)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub a0: f64,
    #[serde(rename = "cos")]
    pub cos_coeffs: Vec<f64>,
    #[serde(rename = "sin")]
    pub sin_coeffs: Vec<f64>,
}

impl TrigPoly {
    pub fn new(a0: f64, cos_coeffs: Vec<f64>, sin_coeffs: Vec<f64>) -> Self {
        let mut p = TrigPoly {
            a0,
            cos_coeffs,
            sin_coeffs,
        };
        p.pad();
        p.normalize();
        p
    }

    pub fn constant(c: f64) -> Self {
        TrigPoly {
            a0: c,
            cos_coeffs: vec![],
            sin_coeffs: vec![],
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// `cos(j t)`.
    pub fn cos(j: usize) -> Self {
        if j == 0 {
            return Self::constant(1.0);
        }
        let mut c = vec![0.0; j];
        c[j - 1] = 1.0;
        TrigPoly::new(0.0, c, vec![0.0; j])
    }

    /// `sin(j t)`.
    pub fn sin(j: usize) -> Self {
        if j == 0 {
            return Self::zero();
        }
        let mut s = vec![0.0; j];
        s[j - 1] = 1.0;
        TrigPoly::new(0.0, vec![0.0; j], s)
    }

    fn pad(&mut self) {
        let d = self.cos_coeffs.len().max(self.sin_coeffs.len());
        self.cos_coeffs.resize(d, 0.0);
        self.sin_coeffs.resize(d, 0.0);
    }

    /// Drop trailing coefficient pairs that are exactly zero.
    fn normalize(&mut self) {
        while let (Some(&a), Some(&b)) = (self.cos_coeffs.last(), self.sin_coeffs.last()) {
            if a == 0.0 && b == 0.0 {
                self.cos_coeffs.pop();
                self.sin_coeffs.pop();
            } else {
                break;
            }
        }
    }

    /// Drop trailing coefficient pairs below `eps` in absolute value.
    pub fn trim(&self, eps: f64) -> Self {
        let mut p = self.clone();
        while let (Some(&a), Some(&b)) = (p.cos_coeffs.last(), p.sin_coeffs.last()) {
            if a.abs() <= eps && b.abs() <= eps {
                p.cos_coeffs.pop();
                p.sin_coeffs.pop();
            } else {
                break;
            }
        }
        p
    }

    pub fn degree(&self) -> usize {
        self.cos_coeffs.len()
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        // cos(kt), sin(kt) by the angle-addition recurrence.
        let (st, ct) = t.sin_cos();
        let mut ck = ct;
        let mut sk = st;
        let mut acc = self.a0;
        for j in 0..self.degree() {
            acc += self.cos_coeffs[j] * ck + self.sin_coeffs[j] * sk;
            let c_next = ck * ct - sk * st;
            let s_next = sk * ct + ck * st;
            ck = c_next;
            sk = s_next;
        }
        acc
    }

    /// Term-wise derivative; `(a_j, b_j) -> j (b_j, -a_j)`.
    pub fn derivative(&self) -> Self {
        let d = self.degree();
        let mut cos_d = vec![0.0; d];
        let mut sin_d = vec![0.0; d];
        for j in 0..d {
            let k = (j + 1) as f64;
            cos_d[j] = k * self.sin_coeffs[j];
            sin_d[j] = -k * self.cos_coeffs[j];
        }
        TrigPoly::new(0.0, cos_d, sin_d)
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = self.degree().max(other.degree());
        let get = |v: &Vec<f64>, j: usize| v.get(j).copied().unwrap_or(0.0);
        TrigPoly::new(
            self.a0 + other.a0,
            (0..d)
                .map(|j| get(&self.cos_coeffs, j) + get(&other.cos_coeffs, j))
                .collect(),
            (0..d)
                .map(|j| get(&self.sin_coeffs, j) + get(&other.sin_coeffs, j))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        TrigPoly::new(
            self.a0 * s,
            self.cos_coeffs.iter().map(|c| c * s).collect(),
            self.sin_coeffs.iter().map(|c| c * s).collect(),
        )
    }

    /// Product via convolution in the exponential basis; degrees add.
    pub fn multiply(&self, other: &Self) -> Self {
        ComplexTrigPoly::from_real(self)
            .multiply(&ComplexTrigPoly::from_real(other))
            .into_real()
    }

    pub fn square(&self) -> Self {
        self.multiply(self)
    }

    /// Maximum absolute coefficient; a cheap sup-norm bound.
    pub fn coeff_norm(&self) -> f64 {
        let mut m = self.a0.abs();
        for j in 0..self.degree() {
            m = m.max(self.cos_coeffs[j].abs()).max(self.sin_coeffs[j].abs());
        }
        m
    }
}

/// Area integral `Z(t) = int_0^t (Y X' - X Y') ds`, stored as a periodic
/// trigonometric part plus a linear drift so unbalanced pairs stay exactly
/// representable.
#[derive(Debug, Clone)]
pub struct AreaIntegral {
    pub trig: TrigPoly,
    /// Coefficient of the `t` term; `2 pi * drift` is the balance defect.
    pub drift: f64,
}

impl AreaIntegral {
    pub fn evaluate(&self, t: f64) -> f64 {
        self.trig.evaluate(t) + self.drift * t
    }

    pub fn defect(&self) -> f64 {
        self.drift * TAU
    }

    pub fn is_periodic(&self, tol: f64) -> bool {
        self.defect().abs() <= tol
    }

    /// The periodic part, valid as `Z` only when the drift vanishes.
    pub fn into_trig(self) -> TrigPoly {
        self.trig
    }
}

/// `Z(t) = int_0^t Y X' - X Y' ds` with `Z(0) = 0`.
pub fn area_integral(x: &TrigPoly, y: &TrigPoly) -> AreaIntegral {
    let integrand = y.multiply(&x.derivative()).sub(&x.multiply(&y.derivative()));
    let d = integrand.degree();
    let mut cos_i = vec![0.0; d];
    let mut sin_i = vec![0.0; d];
    for j in 0..d {
        let k = (j + 1) as f64;
        // int a cos(kt) = a sin(kt)/k, int b sin(kt) = -b cos(kt)/k
        sin_i[j] = integrand.cos_coeffs[j] / k;
        cos_i[j] = -integrand.sin_coeffs[j] / k;
    }
    let a0 = -cos_i.iter().sum::<f64>(); // Z(0) = 0
    AreaIntegral {
        trig: TrigPoly::new(a0, cos_i, sin_i),
        drift: integrand.a0,
    }
}

/// Closed-form `Z(2 pi) = 2 pi sum_j j (b_j c_j - a_j d_j)` for
/// `X = a0 + sum a_j cos + b_j sin`, `Y = c0 + sum c_j cos + d_j sin`.
pub fn balance_defect(x: &TrigPoly, y: &TrigPoly) -> f64 {
    let d = x.degree().max(y.degree());
    let get = |v: &Vec<f64>, j: usize| v.get(j).copied().unwrap_or(0.0);
    let mut sum = 0.0;
    for j in 0..d {
        let k = (j + 1) as f64;
        let (a, b) = (get(&x.cos_coeffs, j), get(&x.sin_coeffs, j));
        let (c, dd) = (get(&y.cos_coeffs, j), get(&y.sin_coeffs, j));
        sum += k * (b * c - a * dd);
    }
    TAU * sum
}

/// Which scalar coefficient a rebalance touched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffSlot {
    /// `a_j` of X
    XCos,
    /// `b_j` of X
    XSin,
    /// `c_j` of Y
    YCos,
    /// `d_j` of Y
    YSin,
}

#[derive(Debug, Clone, Copy)]
pub struct CoeffChange {
    pub freq: usize,
    pub slot: CoeffSlot,
    pub delta: f64,
}

#[derive(Debug, Clone)]
pub struct Rebalanced {
    pub x: TrigPoly,
    pub y: TrigPoly,
    pub change: Option<CoeffChange>,
}

/// Zero the balance defect by moving exactly one coefficient.
///
/// The frequency is chosen by the largest `|a_j|` (then `b_j`, `c_j`, `d_j`),
/// and the partner coefficient of the pairing in the defect formula is moved.
pub fn rebalance(x: &TrigPoly, y: &TrigPoly) -> Result<Rebalanced> {
    let defect = balance_defect(x, y);
    if defect == 0.0 {
        return Ok(Rebalanced {
            x: x.clone(),
            y: y.clone(),
            change: None,
        });
    }
    let d = x.degree().max(y.degree());
    if d == 0 {
        return Err(Error::AllCoefficientsZero);
    }
    let get = |v: &Vec<f64>, j: usize| v.get(j).copied().unwrap_or(0.0);
    let argmax = |slot: CoeffSlot| -> (usize, f64) {
        let mut best = (0usize, 0.0f64);
        for j in 0..d {
            let v = match slot {
                CoeffSlot::XCos => get(&x.cos_coeffs, j),
                CoeffSlot::XSin => get(&x.sin_coeffs, j),
                CoeffSlot::YCos => get(&y.cos_coeffs, j),
                CoeffSlot::YSin => get(&y.sin_coeffs, j),
            };
            if v.abs() > best.1.abs() {
                best = (j, v);
            }
        }
        best
    };
    for anchor in [CoeffSlot::XCos, CoeffSlot::XSin, CoeffSlot::YCos, CoeffSlot::YSin] {
        let (j, v) = argmax(anchor);
        if v == 0.0 {
            continue;
        }
        let k = (j + 1) as f64;
        // defect = 2 pi sum j (b c - a d); move the partner of the anchor.
        let (slot, delta) = match anchor {
            CoeffSlot::XCos => (CoeffSlot::YSin, defect / (TAU * k * v)),
            CoeffSlot::XSin => (CoeffSlot::YCos, -defect / (TAU * k * v)),
            CoeffSlot::YCos => (CoeffSlot::XSin, -defect / (TAU * k * v)),
            CoeffSlot::YSin => (CoeffSlot::XCos, defect / (TAU * k * v)),
        };
        let mut nx = x.clone();
        let mut ny = y.clone();
        {
            let (poly, coeffs): (&mut TrigPoly, fn(&mut TrigPoly) -> &mut Vec<f64>) = match slot {
                CoeffSlot::XCos => (&mut nx, |p| &mut p.cos_coeffs),
                CoeffSlot::XSin => (&mut nx, |p| &mut p.sin_coeffs),
                CoeffSlot::YCos => (&mut ny, |p| &mut p.cos_coeffs),
                CoeffSlot::YSin => (&mut ny, |p| &mut p.sin_coeffs),
            };
            if poly.degree() <= j {
                poly.cos_coeffs.resize(j + 1, 0.0);
                poly.sin_coeffs.resize(j + 1, 0.0);
            }
            coeffs(poly)[j] += delta;
        }
        nx.normalize();
        ny.normalize();
        return Ok(Rebalanced {
            x: nx,
            y: ny,
            change: Some(CoeffChange {
                freq: j + 1,
                slot,
                delta,
            }),
        });
    }
    Err(Error::AllCoefficientsZero)
}

/// Result of a truncated Fourier projection.
#[derive(Debug, Clone)]
pub struct FourierProjection {
    pub poly: TrigPoly,
    /// Fraction of signal energy above the requested degree.
    pub tail_energy_ratio: f64,
    /// Set when the tail energy exceeds the tolerance (warning channel).
    pub degree_too_low: bool,
}

pub const DEFAULT_TAIL_TOL: f64 = 1e-8;
pub const DEFAULT_OVERSAMPLE: usize = 8;

/// Truncated Fourier series of a 2pi-periodic function, by uniform sampling
/// with the given oversampling factor.
pub fn fourier_project<F: Fn(f64) -> f64>(
    f: F,
    degree: usize,
    oversample: usize,
    tail_tol: f64,
) -> FourierProjection {
    let n = (oversample.max(2) * (2 * degree + 1)).next_power_of_two();
    let samples: Vec<f64> = (0..n).map(|i| f(i as f64 * TAU / n as f64)).collect();
    fourier_project_samples(&samples, degree, tail_tol)
}

/// Same as [`fourier_project`] but from uniform samples over `[0, 2pi)`.
pub fn fourier_project_samples(samples: &[f64], degree: usize, tail_tol: f64) -> FourierProjection {
    let n = samples.len();
    assert!(n > 2 * degree, "need more than 2*degree samples");
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let coeff = |k: usize| buf[k] * scale; // c_k for k in 0..n, c_{-k} = c_{n-k}
    let mut cosv = vec![0.0; degree];
    let mut sinv = vec![0.0; degree];
    for k in 1..=degree {
        let c = coeff(k);
        cosv[k - 1] = 2.0 * c.re;
        sinv[k - 1] = -2.0 * c.im;
    }
    let mut total = coeff(0).norm_sqr();
    let mut tail = 0.0;
    for k in 1..=n / 2 {
        let e = coeff(k).norm_sqr() + coeff(n - k).norm_sqr();
        total += e;
        if k > degree {
            tail += e;
        }
    }
    let ratio = if total > 0.0 { (tail / total).sqrt() } else { 0.0 };
    FourierProjection {
        poly: TrigPoly::new(coeff(0).re, cosv, sinv),
        tail_energy_ratio: ratio,
        degree_too_low: ratio > tail_tol,
    }
}

/// One interpolation constraint: value of the `order`-th derivative at `t`.
#[derive(Debug, Clone, Copy)]
pub struct HermiteConstraint {
    pub t: f64,
    pub order: usize,
    pub value: f64,
}

/// Minimal-degree trigonometric polynomial matching all derivative constraints.
pub fn trig_hermite_interpolate(constraints: &[HermiteConstraint]) -> Result<TrigPoly> {
    assert!(!constraints.is_empty());
    let n = constraints.len();
    let m0 = n / 2; // 2*m0 + 1 >= n
    for m in m0..=m0 + 3 {
        let cols = 2 * m + 1;
        let mut mat = nalgebra::DMatrix::<f64>::zeros(n, cols);
        let mut rhs = nalgebra::DVector::<f64>::zeros(n);
        for (r, c) in constraints.iter().enumerate() {
            rhs[r] = c.value;
            // d^p/dt^p cos(kt) = k^p cos(kt + p pi/2), same shift for sin.
            mat[(r, 0)] = if c.order == 0 { 1.0 } else { 0.0 };
            for k in 1..=m {
                let kf = k as f64;
                let shift = c.order as f64 * std::f64::consts::FRAC_PI_2;
                let scale = kf.powi(c.order as i32);
                mat[(r, 2 * k - 1)] = scale * (kf * c.t + shift).cos();
                mat[(r, 2 * k)] = scale * (kf * c.t + shift).sin();
            }
        }
        let svd = mat.clone().svd(true, true);
        if let Ok(sol) = svd.solve(&rhs, 1e-12) {
            let residual = (&mat * &sol - &rhs).norm();
            if residual <= 1e-9 * (1.0 + rhs.norm()) {
                let cosv = (1..=m).map(|k| sol[2 * k - 1]).collect();
                let sinv = (1..=m).map(|k| sol[2 * k]).collect();
                return Ok(TrigPoly::new(sol[0], cosv, sinv).trim(1e-13));
            }
        }
    }
    let residual = f64::NAN;
    Err(Error::SingularSystem {
        residual: if residual.is_nan() { f64::INFINITY } else { residual },
    })
}

/// Complex trigonometric polynomial `sum_{k=-d}^{d} c_k e^{ikt}`.
#[derive(Debug, Clone)]
pub struct ComplexTrigPoly {
    /// Coefficients for `k = -d ..= d`; index `i` holds frequency `i - d`.
    coeffs: Vec<Complex64>,
}

impl ComplexTrigPoly {
    pub fn zero() -> Self {
        ComplexTrigPoly {
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        ComplexTrigPoly { coeffs: vec![c] }
    }

    pub fn degree(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        let d = self.degree() as i64;
        if k.abs() > d {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + d) as usize]
        }
    }

    /// Embed a real polynomial: `c_k = (a_k - i b_k)/2`, `c_{-k} = conj(c_k)`.
    pub fn from_real(p: &TrigPoly) -> Self {
        let d = p.degree();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * d + 1];
        coeffs[d] = Complex64::new(p.a0, 0.0);
        for j in 0..d {
            let c = Complex64::new(p.cos_coeffs[j] / 2.0, -p.sin_coeffs[j] / 2.0);
            coeffs[d + j + 1] = c;
            coeffs[d - j - 1] = c.conj();
        }
        ComplexTrigPoly { coeffs }
    }

    /// `re + i im` for two real polynomials.
    pub fn from_real_pair(re: &TrigPoly, im: &TrigPoly) -> Self {
        let a = Self::from_real(re);
        let b = Self::from_real(im);
        a.add(&b.scale(Complex64::new(0.0, 1.0)))
    }

    /// Real part extraction assuming conjugate symmetry holds numerically.
    pub fn into_real(self) -> TrigPoly {
        let d = self.degree();
        let mut cosv = vec![0.0; d];
        let mut sinv = vec![0.0; d];
        for k in 1..=d {
            let c = self.coeffs[d + k];
            let cm = self.coeffs[d - k];
            cosv[k - 1] = (c + cm).re;
            sinv[k - 1] = (cm - c).im;
        }
        TrigPoly::new(self.coeffs[d].re, cosv, sinv)
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = self.degree().max(other.degree());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * d + 1];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let k = i as i64 - d as i64;
            *c = self.coeff(k) + other.coeff(k);
        }
        ComplexTrigPoly { coeffs }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexTrigPoly {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Convolution product; degrees add.
    pub fn multiply(&self, other: &Self) -> Self {
        let da = self.degree();
        let db = other.degree();
        let d = da + db;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * d + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        ComplexTrigPoly { coeffs }
    }

    /// Binary exponentiation.
    pub fn pow(&self, n: usize) -> Self {
        let mut result = Self::constant(Complex64::new(1.0, 0.0));
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.multiply(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.multiply(&base);
            }
        }
        result
    }

    pub fn evaluate(&self, t: f64) -> Complex64 {
        let d = self.degree() as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &c) in self.coeffs.iter().enumerate() {
            let k = (i as i64 - d) as f64;
            acc += c * Complex64::from_polar(1.0, k * t);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let d = self.degree() as i64;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c * Complex64::new(0.0, (i as i64 - d) as f64))
            .collect();
        ComplexTrigPoly { coeffs }
    }

    /// Drop leading/trailing frequencies with magnitude below `eps`.
    pub fn trim(&self, eps: f64) -> Self {
        let d = self.degree();
        let mut dd = d;
        while dd > 0
            && self.coeffs[d + dd].norm() <= eps
            && self.coeffs[d - dd].norm() <= eps
        {
            dd -= 1;
        }
        let coeffs = self.coeffs[d - dd..=d + dd].to_vec();
        ComplexTrigPoly { coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{integrate_adaptive, trapezoid_periodic};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn random_poly(rng: &mut StdRng, degree: usize, amp: f64) -> TrigPoly {
        TrigPoly::new(
            rng.gen_range(-amp..amp),
            (0..degree).map(|_| rng.gen_range(-amp..amp)).collect(),
            (0..degree).map(|_| rng.gen_range(-amp..amp)).collect(),
        )
    }

    /// Direct-summation oracle, deliberately naive.
    fn eval_oracle(p: &TrigPoly, t: f64) -> f64 {
        let mut acc = p.a0;
        for j in 0..p.degree() {
            let k = (j + 1) as f64;
            acc += p.cos_coeffs[j] * (k * t).cos() + p.sin_coeffs[j] * (k * t).sin();
        }
        acc
    }

    #[test]
    fn evaluate_identity_cases() {
        let p = TrigPoly::cos(1);
        assert!((p.evaluate(PI) + 1.0).abs() < 1e-15);
        // X of the figure-eight diagram curve at t = 0: cos(0)(2 + cos 0) = 3
        let x = TrigPoly::cos(3).multiply(&TrigPoly::constant(2.0).add(&TrigPoly::cos(2)));
        assert!((x.evaluate(0.0) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn evaluate_matches_direct_summation() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let p = random_poly(&mut rng, 20, 2.0);
            let t = rng.gen_range(-10.0..10.0);
            let scale: f64 = 1.0
                + p.a0.abs()
                + p.cos_coeffs.iter().chain(&p.sin_coeffs).map(|c| c.abs()).sum::<f64>();
            assert!((p.evaluate(t) - eval_oracle(&p, t)).abs() < 1e-14 * scale);
            // periodicity
            assert!((p.evaluate(t) - p.evaluate(t + TAU)).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_simple() {
        let d = TrigPoly::cos(1).derivative();
        assert_eq!(d, TrigPoly::sin(1).scale(-1.0));
        assert_eq!(TrigPoly::constant(4.2).derivative(), TrigPoly::zero());
    }

    #[test]
    fn derivative_matches_central_difference() {
        let mut rng = StdRng::seed_from_u64(8);
        let p = random_poly(&mut rng, 10, 1.0);
        let dp = p.derivative();
        let h = 1e-6;
        for _ in 0..100 {
            let t = rng.gen_range(0.0..TAU);
            let fd = (p.evaluate(t + h) - p.evaluate(t - h)) / (2.0 * h);
            assert!((dp.evaluate(t) - fd).abs() < 1e-6);
        }
    }

    #[test]
    fn multiply_product_to_sum() {
        let p = TrigPoly::cos(1).multiply(&TrigPoly::cos(1));
        let expected = TrigPoly::new(0.5, vec![0.0, 0.5], vec![0.0, 0.0]);
        assert!(p.sub(&expected).coeff_norm() < 1e-15);
        let q = random_q();
        assert!(q.multiply(&TrigPoly::constant(1.0)).sub(&q).coeff_norm() < 1e-15);
    }

    fn random_q() -> TrigPoly {
        TrigPoly::new(0.3, vec![1.0, -0.5], vec![0.2, 0.7])
    }

    #[test]
    fn multiply_degree_adds() {
        // Y of the degree-11 figure-eight curve: (1.5 cos^2 + 2/3 sin^2)(...)
        let envelope = TrigPoly::cos(1)
            .square()
            .scale(1.5)
            .add(&TrigPoly::sin(1).square().scale(2.0 / 3.0));
        let carrier = {
            // 1.5 cos(6t - 1) + sin(6t)
            let c = TrigPoly::cos(6).scale(1.5 * (1.0f64).cos());
            let s = TrigPoly::sin(6).scale(1.5 * (1.0f64).sin() + 1.0 / 1.5 * 1.5);
            c.add(&s)
        };
        let y = envelope.multiply(&carrier);
        assert_eq!(y.degree(), 8);
    }

    #[test]
    fn leibniz_property() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let p = random_poly(&mut rng, 8, 1.0);
            let q = random_poly(&mut rng, 8, 1.0);
            let lhs = p.multiply(&q).derivative();
            let rhs = p.derivative().multiply(&q).add(&p.multiply(&q.derivative()));
            for _ in 0..10 {
                let t = rng.gen_range(0.0..TAU);
                assert!((lhs.evaluate(t) - rhs.evaluate(t)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn area_integral_circle() {
        // X = r cos t + x0, Y = r sin t + y0 -> Z(2pi) = -2 pi r^2
        for (r, x0, y0) in [(1.0, 0.0, 0.0), (0.25, 1.3, -0.4), (2.0, -5.0, 2.0)] {
            let x = TrigPoly::cos(1).scale(r).add(&TrigPoly::constant(x0));
            let y = TrigPoly::sin(1).scale(r).add(&TrigPoly::constant(y0));
            let z = area_integral(&x, &y);
            assert!((z.evaluate(TAU) + TAU * r * r).abs() < 1e-12);
            assert!(z.evaluate(0.0).abs() < 1e-14);
        }
        // constants -> Z = 0
        let z = area_integral(&TrigPoly::constant(1.0), &TrigPoly::constant(-2.0));
        assert!(z.evaluate(3.7).abs() < 1e-15);
    }

    #[test]
    fn area_integral_figure_eight_value() {
        // Z(pi/6) = -7493/1260 for the figure-eight diagram curve.
        let x = TrigPoly::cos(3).multiply(&TrigPoly::constant(2.0).add(&TrigPoly::cos(2)));
        let y = TrigPoly::sin(4).add(&TrigPoly::sin(2).scale(0.25));
        let z = area_integral(&x, &y);
        assert!((z.evaluate(PI / 6.0) + 7493.0 / 1260.0).abs() < 1e-12);
    }

    #[test]
    fn balance_defect_closed_form_vs_quadrature() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..1000 {
            let deg = rng.gen_range(1..=20);
            let x = random_poly(&mut rng, deg, 2.0);
            let y = random_poly(&mut rng, deg, 2.0);
            let closed = balance_defect(&x, &y);
            // quadrature oracle: periodic trapezoid, exact beyond 2*deg modes
            let xd = x.derivative();
            let yd = y.derivative();
            let quad = trapezoid_periodic(
                |t| y.evaluate(t) * xd.evaluate(t) - x.evaluate(t) * yd.evaluate(t),
                8 * deg + 16,
            );
            assert!(
                (closed - quad).abs() < 1e-10 * (1.0 + quad.abs()),
                "closed {closed} vs quadrature {quad}"
            );
            // and against the antiderivative route
            assert!((closed - area_integral(&x, &y).evaluate(TAU)).abs() < 1e-10);
        }
    }

    #[test]
    fn balance_defect_examples() {
        // counter-clockwise unit circle -> -2 pi (sign matches the circle rule)
        let d = balance_defect(&TrigPoly::cos(1), &TrigPoly::sin(1));
        assert!((d + TAU).abs() < 1e-14);
        // symmetric case
        assert_eq!(balance_defect(&TrigPoly::cos(1), &TrigPoly::cos(1)), 0.0);
    }

    #[test]
    fn rebalance_circle() {
        let x = TrigPoly::cos(1);
        let y = TrigPoly::sin(1);
        let r = rebalance(&x, &y).unwrap();
        let change = r.change.unwrap();
        assert_eq!(change.freq, 1);
        assert_eq!(change.slot, CoeffSlot::YSin);
        assert!((change.delta.abs() - 1.0).abs() < 1e-14);
        assert!(balance_defect(&r.x, &r.y).abs() < 1e-12);
        // quadrature verification after substitution
        let xd = r.x.derivative();
        let yd = r.y.derivative();
        let quad = integrate_adaptive(
            &|t| r.y.evaluate(t) * xd.evaluate(t) - r.x.evaluate(t) * yd.evaluate(t),
            0.0,
            TAU,
            1e-12,
        );
        assert!(quad.abs() < 1e-10);
    }

    #[test]
    fn rebalance_balanced_input_unchanged() {
        let x = TrigPoly::cos(1);
        let y = TrigPoly::cos(2);
        let r = rebalance(&x, &y).unwrap();
        assert!(r.change.is_none());
        assert_eq!(r.x, x);
        assert_eq!(r.y, y);
    }

    #[test]
    fn rebalance_changes_exactly_one_coefficient() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..50 {
            let deg = rng.gen_range(1..=8);
            let x = random_poly(&mut rng, deg, 1.5);
            let y = random_poly(&mut rng, deg, 1.5);
            let r = rebalance(&x, &y).unwrap();
            assert!(balance_defect(&r.x, &r.y).abs() < 1e-10);
            let mut diffs = 0;
            let dmax = x.degree().max(r.x.degree()).max(y.degree()).max(r.y.degree());
            let get = |v: &Vec<f64>, j: usize| v.get(j).copied().unwrap_or(0.0);
            for j in 0..dmax {
                for (old, new) in [
                    (get(&x.cos_coeffs, j), get(&r.x.cos_coeffs, j)),
                    (get(&x.sin_coeffs, j), get(&r.x.sin_coeffs, j)),
                    (get(&y.cos_coeffs, j), get(&r.y.cos_coeffs, j)),
                    (get(&y.sin_coeffs, j), get(&r.y.sin_coeffs, j)),
                ] {
                    if old != new {
                        diffs += 1;
                    }
                }
            }
            assert_eq!(diffs, 1);
        }
    }

    #[test]
    fn fourier_project_identity_on_subspace() {
        let proj = fourier_project(|t| (3.0 * t).cos(), 5, 8, DEFAULT_TAIL_TOL);
        assert!(proj.poly.sub(&TrigPoly::cos(3)).coeff_norm() < 1e-12);
        assert!(!proj.degree_too_low);
        assert!(proj.tail_energy_ratio < 1e-12);
    }

    #[test]
    fn fourier_project_square_wave_leading_coefficient() {
        let square = |t: f64| if t.rem_euclid(TAU) < PI { 1.0 } else { -1.0 };
        let proj = fourier_project(square, 1, 64, DEFAULT_TAIL_TOL);
        // analytic Fourier coefficient: (4/pi) sin t
        assert!((proj.poly.sin_coeffs[0] - 4.0 / PI).abs() < 1e-3);
        assert!(proj.degree_too_low);
    }

    #[test]
    fn fourier_project_idempotent_on_image() {
        let mut rng = StdRng::seed_from_u64(9);
        let p = random_poly(&mut rng, 6, 1.0);
        let once = fourier_project(|t| p.evaluate(t), 10, 8, DEFAULT_TAIL_TOL).poly;
        let twice = fourier_project(|t| once.evaluate(t), 10, 8, DEFAULT_TAIL_TOL).poly;
        assert!(once.sub(&twice).coeff_norm() < 1e-12);
        assert!(once.sub(&p).coeff_norm() < 1e-12);
    }

    #[test]
    fn hermite_constant() {
        let p = trig_hermite_interpolate(&[HermiteConstraint {
            t: 0.0,
            order: 0,
            value: 1.0,
        }])
        .unwrap();
        assert!((p.evaluate(2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hermite_mixed_orders() {
        let p = trig_hermite_interpolate(&[
            HermiteConstraint { t: 0.0, order: 0, value: 0.0 },
            HermiteConstraint { t: 0.0, order: 1, value: 0.0 },
            HermiteConstraint { t: PI, order: 0, value: 1.0 },
        ])
        .unwrap();
        let dp = p.derivative();
        assert!(p.evaluate(0.0).abs() < 1e-9);
        assert!(dp.evaluate(0.0).abs() < 1e-9);
        assert!((p.evaluate(PI) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hermite_inconsistent_errors() {
        let r = trig_hermite_interpolate(&[
            HermiteConstraint { t: 1.0, order: 0, value: 0.0 },
            HermiteConstraint { t: 1.0, order: 0, value: 1.0 },
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn complex_poly_roundtrip_and_product() {
        let mut rng = StdRng::seed_from_u64(13);
        let p = random_poly(&mut rng, 7, 1.0);
        let cp = ComplexTrigPoly::from_real(&p);
        assert!(cp.clone().into_real().sub(&p).coeff_norm() < 1e-15);
        let q = random_poly(&mut rng, 5, 1.0);
        let cq = ComplexTrigPoly::from_real(&q);
        let prod = cp.multiply(&cq);
        assert_eq!(prod.degree(), 12);
        for _ in 0..20 {
            let t = rng.gen_range(0.0..TAU);
            let direct = p.evaluate(t) * q.evaluate(t);
            assert!((prod.evaluate(t).re - direct).abs() < 1e-12);
            assert!(prod.evaluate(t).im.abs() < 1e-12);
        }
    }

    #[test]
    fn complex_pow_binary_exponentiation() {
        let p = ComplexTrigPoly::from_real(&TrigPoly::cos(1));
        let p8 = p.pow(8);
        assert_eq!(p8.degree(), 8);
        let t = 0.9;
        assert!((p8.evaluate(t).re - t.cos().powi(8)).abs() < 1e-12);
    }
}
