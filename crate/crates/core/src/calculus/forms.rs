//! Differential forms on ℝⁿ (`n ≤ 4`) with complex coefficients, stored on
//! the increasing-multi-index basis. A multi-index is a bitmask: bit `i` is
//! `dxᵢ`. On ℝ⁴ the basis is `(dx₁, dy₁, dx₂, dy₂)` for `z = x₁ + iy₁`,
//! `w = x₂ + iy₂`.

use std::ops::{Add, Mul, Sub};

use super::{
    fit_step, gradient_step, richardson_derivative, wirtinger_gradient_real, HermitianForm2, Linear, Point4,
    MIN_GRADIENT_STEP, STEP_FRACTION,
};
use crate::error::{Error, Result};
use crate::moebius::{BidiskPoint, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormValue {
    dim: u8,
    degree: u8,
    c: [C64; 16],
}

/// `(−1)^{#{(i, j) : i ∈ a, j ∈ b, i > j}}`, the sign of `dx_a ∧ dx_b`
/// relative to `dx_{a∪b}`.
fn shuffle_sign(a: usize, b: usize) -> f64 {
    let mut inversions = 0;
    for i in 0..4 {
        if a & (1 << i) != 0 {
            inversions += (b & ((1 << i) - 1)).count_ones();
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl FormValue {
    pub fn zero(dim: usize, degree: usize) -> Self {
        assert!(dim <= 4 && degree <= dim, "form of degree {degree} on R^{dim}");
        Self { dim: dim as u8, degree: degree as u8, c: [ZERO; 16] }
    }

    pub fn scalar(dim: usize, value: C64) -> Self {
        let mut f = Self::zero(dim, 0);
        f.c[0] = value;
        f
    }

    /// `dx_{i₁} ∧ … ∧ dx_{i_k}` for the increasing multi-index `mask`.
    pub fn basis(dim: usize, mask: usize) -> Self {
        let mut f = Self::zero(dim, mask.count_ones() as usize);
        f.c[mask] = C64::new(1.0, 0.0);
        f
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    /// Multi-indices of this degree.
    pub fn masks(&self) -> impl Iterator<Item = usize> {
        let degree = self.degree as u32;
        (0..(1usize << self.dim)).filter(move |m| m.count_ones() == degree)
    }

    pub fn coeff(&self, mask: usize) -> C64 {
        self.c[mask]
    }

    pub fn set(&mut self, mask: usize, value: C64) {
        assert_eq!(mask.count_ones() as u8, self.degree);
        assert!(mask < (1 << self.dim));
        self.c[mask] = value;
    }

    /// Coefficient of `dx₁∧…∧dxₙ`.
    pub fn top(&self) -> C64 {
        self.c[(1 << self.dim) - 1]
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim(), self.degree() + other.degree());
        for a in self.masks() {
            if self.c[a] == ZERO {
                continue;
            }
            for b in other.masks() {
                if a & b == 0 {
                    out.c[a | b] += self.c[a] * other.c[b] * shuffle_sign(a, b);
                }
            }
        }
        out
    }

    pub fn scale_c(&self, k: C64) -> Self {
        let mut out = *self;
        out.c.iter_mut().for_each(|x| *x *= k);
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = *self;
        out.c.iter_mut().for_each(|x| *x = x.conj());
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    fn nan(dim: usize, degree: usize) -> Self {
        let mut f = Self::zero(dim, degree);
        f.c.iter_mut().for_each(|x| *x = C64::new(f64::NAN, f64::NAN));
        f
    }

    /// `dζ_j = dx_j + i dy_j` on ℝ⁴.
    pub fn dzeta(j: usize) -> Self {
        let mut f = Self::zero(4, 1);
        f.c[1 << (2 * j)] = C64::new(1.0, 0.0);
        f.c[1 << (2 * j + 1)] = I;
        f
    }

    /// `dζ̄_j = dx_j − i dy_j` on ℝ⁴.
    pub fn dzeta_bar(j: usize) -> Self {
        Self::dzeta(j).conj()
    }

    /// `Σ c_j dζ_j`.
    pub fn holomorphic_one_form(c: [C64; 2]) -> Self {
        Self::dzeta(0).scale_c(c[0]) + Self::dzeta(1).scale_c(c[1])
    }

    /// `Σ c_j dζ̄_j`.
    pub fn antiholomorphic_one_form(c: [C64; 2]) -> Self {
        Self::dzeta_bar(0).scale_c(c[0]) + Self::dzeta_bar(1).scale_c(c[1])
    }

    /// `du = ∂u + ∂̄u` for a real `u` with `∂u = Σ g_j dζ_j`.
    pub fn d_real(g: [C64; 2]) -> Self {
        Self::holomorphic_one_form(g) + Self::antiholomorphic_one_form(g.map(|v| v.conj()))
    }

    /// `d^c u = (∂u − ∂̄u)/2i` for a real `u` with `∂u = Σ g_j dζ_j`.
    pub fn dc_real(g: [C64; 2]) -> Self {
        (Self::holomorphic_one_form(g) - Self::antiholomorphic_one_form(g.map(|v| v.conj())))
            .scale_c(C64::new(0.0, -0.5))
    }
}

impl Add for FormValue {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        assert!(self.dim == o.dim && self.degree == o.degree, "adding forms of different type");
        let mut out = self;
        for (x, y) in out.c.iter_mut().zip(o.c.iter()) {
            *x += y;
        }
        out
    }
}

impl Sub for FormValue {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + o * -1.0
    }
}

impl Mul<f64> for FormValue {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        let mut out = self;
        out.c.iter_mut().for_each(|x| *x *= k);
        out
    }
}

impl Linear for FormValue {
    fn is_finite_value(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }
}

/// `Σ c_i dx_i` on ℝ⁴ with real or complex coefficients.
pub fn real_one_form(c: [C64; 4]) -> FormValue {
    let mut f = FormValue::zero(4, 1);
    for (i, v) in c.into_iter().enumerate() {
        f.c[1 << i] = v;
    }
    f
}

/// The 2-form `i Σ h_{jk̄} dζ_j ∧ dζ̄_k`.
pub fn hermitian_to_form(h: &HermitianForm2) -> FormValue {
    let mut out = FormValue::zero(4, 2);
    for j in 0..2 {
        for k in 0..2 {
            let term = FormValue::dzeta(j).wedge(&FormValue::dzeta_bar(k));
            out = out + term.scale_c(I * h.entry(j, k));
        }
    }
    out
}

/// Where a form field may be evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    Everywhere,
    /// `|z| < 1` and `|w| < 1` on ℝ⁴.
    Bidisk,
}

impl Domain {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::Everywhere => true,
            Domain::Bidisk => x[0] * x[0] + x[1] * x[1] < 1.0 && x[2] * x[2] + x[3] * x[3] < 1.0,
        }
    }

    /// Euclidean distance to the domain boundary.
    pub fn margin(&self, x: &[f64]) -> f64 {
        match self {
            Domain::Everywhere => f64::INFINITY,
            Domain::Bidisk => (1.0 - x[0].hypot(x[1])).min(1.0 - x[2].hypot(x[3])),
        }
    }
}

pub trait FormField: Sync {
    fn dim(&self) -> usize;
    fn degree(&self) -> usize;
    fn eval(&self, x: &[f64]) -> FormValue;
    fn contains(&self, _x: &[f64]) -> bool {
        true
    }
    /// Length scale on which the coefficients vary; steps stay well below it.
    fn step_scale(&self, _x: &[f64]) -> f64 {
        f64::INFINITY
    }
}

/// A form field given by a closure.
pub struct FnForm<F> {
    pub dim: usize,
    pub degree: usize,
    pub domain: Domain,
    pub f: F,
}

impl<F> FnForm<F>
where
    F: Fn(&[f64]) -> FormValue + Sync,
{
    pub fn new(dim: usize, degree: usize, domain: Domain, f: F) -> Self {
        Self { dim, degree, domain, f }
    }
}

impl<F> FormField for FnForm<F>
where
    F: Fn(&[f64]) -> FormValue + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn degree(&self) -> usize {
        self.degree
    }
    fn eval(&self, x: &[f64]) -> FormValue {
        (self.f)(x)
    }
    fn contains(&self, x: &[f64]) -> bool {
        self.domain.contains(x)
    }
    fn step_scale(&self, x: &[f64]) -> f64 {
        self.domain.margin(x)
    }
}

fn point_string(x: &[f64]) -> String {
    format!("{x:?}")
}

/// `dω = Σ_j dx_j ∧ ∂_j ω`, coefficients differentiated numerically.
pub fn exterior_derivative(form: &dyn FormField, x: &[f64]) -> Result<FormValue> {
    let n = form.dim();
    assert_eq!(x.len(), n);
    assert!(form.degree() < n, "d of a top-degree form");
    let mut out = FormValue::zero(n, form.degree() + 1);
    let mut buf = [0.0; 4];
    buf[..n].copy_from_slice(x);
    for axis in 0..n {
        let h = fit_step(gradient_step(x[axis]).min(form.step_scale(x) * STEP_FRACTION), |r| {
            [-r, r].iter().all(|s| {
                let mut y = buf;
                y[axis] += s;
                form.contains(&y[..n])
            })
        })
        .ok_or_else(|| Error::StencilOutOfDomain { point: point_string(x), reach: 2.0 * MIN_GRADIENT_STEP })?;
        let partial = richardson_derivative(
            |s| {
                let mut y = buf;
                y[axis] += s;
                form.eval(&y[..n])
            },
            h,
        );
        if !partial.is_finite_value() {
            return Err(Error::NonFinite(point_string(x)));
        }
        out = out + FormValue::basis(n, 1 << axis).wedge(&partial);
    }
    Ok(out)
}

/// `d^c f = (∂f − ∂̄f)/2i` for a real field, from the numeric Wirtinger gradient.
pub fn dc_scalar(f: &dyn Fn(Point4) -> f64, p: BidiskPoint) -> Result<FormValue> {
    let g = wirtinger_gradient_real(f, p)?;
    let d = FormValue::holomorphic_one_form(g.holomorphic()) - FormValue::antiholomorphic_one_form(g.antiholomorphic());
    Ok(d.scale_c(C64::new(0.0, -0.5)))
}

/// Determinant of a `k×k` matrix, `k ≤ 4`, by cofactor expansion.
fn det(m: &[[f64; 4]; 4], k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => m[0][0],
        _ => {
            let mut total = 0.0;
            for col in 0..k {
                let mut minor = [[0.0; 4]; 4];
                for r in 1..k {
                    let mut cc = 0;
                    for c in 0..k {
                        if c != col {
                            minor[r - 1][cc] = m[r][c];
                            cc += 1;
                        }
                    }
                }
                let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
                total += sign * m[0][col] * det(&minor, k - 1);
            }
            total
        }
    }
}

fn bits(mask: usize) -> impl Iterator<Item = usize> {
    (0..4).filter(move |i| mask & (1 << i) != 0)
}

/// `(φ*ω)(q)` for a map `φ: ℝᵐ → ℝⁿ` (with `n = ω.dim()`), using a
/// numerical Jacobian: `(φ*ω)_J = Σ_I ω_I(φ(q)) det(∂φ_I/∂q_J)`.
pub fn pullback_at(form: &dyn FormField, map: &(dyn Fn(&[f64]) -> Point4 + Sync), q: &[f64]) -> Result<FormValue> {
    let m = q.len();
    let n = form.dim();
    let k = form.degree();
    assert!(k <= m, "cannot pull a {k}-form back to R^{m}");
    let mut buf = [0.0; 4];
    buf[..m].copy_from_slice(q);
    let mut jac = [[0.0; 4]; 4]; // jac[target][source]
    for src in 0..m {
        let h = gradient_step(q[src]);
        let col = richardson_derivative(
            |s| {
                let mut y = buf;
                y[src] += s;
                Col(map(&y[..m]))
            },
            h,
        );
        if !col.is_finite_value() {
            return Err(Error::NonFinite(point_string(q)));
        }
        for (t, row) in jac.iter_mut().enumerate().take(n) {
            row[src] = col.0[t];
        }
    }
    let image = map(q);
    if !form.contains(&image[..n]) {
        return Err(Error::StencilOutOfDomain { point: point_string(q), reach: 0.0 });
    }
    let omega = form.eval(&image[..n]);
    let mut out = FormValue::zero(m, k);
    let source_masks: Vec<usize> = out.masks().collect();
    for jm in source_masks {
        let mut acc = ZERO;
        for im in omega.masks() {
            let coeff = omega.coeff(im);
            if coeff == ZERO {
                continue;
            }
            let mut minor = [[0.0; 4]; 4];
            for (r, ti) in bits(im).enumerate() {
                for (c, sj) in bits(jm).enumerate() {
                    minor[r][c] = jac[ti][sj];
                }
            }
            acc += coeff * det(&minor, k);
        }
        out.c[jm] = acc;
    }
    Ok(out)
}

#[derive(Clone, Copy)]
struct Col(Point4);

impl Add for Col {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Col(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for Col {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Col(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Mul<f64> for Col {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Col(self.0.map(|v| v * k))
    }
}

impl Linear for Col {
    fn is_finite_value(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// `φ*ω` as a form field on the source space. Evaluation failures surface as
/// NaN coefficients, which the differentiation routines reject.
pub struct PulledBack<'a> {
    pub form: &'a dyn FormField,
    pub map: &'a (dyn Fn(&[f64]) -> Point4 + Sync),
    pub source_dim: usize,
}

impl FormField for PulledBack<'_> {
    fn dim(&self) -> usize {
        self.source_dim
    }
    fn degree(&self) -> usize {
        self.form.degree()
    }
    fn eval(&self, x: &[f64]) -> FormValue {
        pullback_at(self.form, self.map, x).unwrap_or_else(|_| FormValue::nan(self.source_dim, self.form.degree()))
    }
    fn contains(&self, x: &[f64]) -> bool {
        let image = (self.map)(x);
        self.form.contains(&image[..self.form.dim()])
    }
}
