//! Tensor-product midpoint quadrature on boxes of ℝ⁴ and the Stokes balance
//! `∫_B dω = ∫_∂B ω` for 3-forms.
//!
//! Orientation: `dx₁∧dy₁∧dx₂∧dy₂` is positive; faces carry the outward
//! normal first. On the face `x_j = const` the restricted 3-form is the
//! coefficient of the multi-index without `j`, with sign `(−1)^j` on the
//! upper face and `−(−1)^j` on the lower one.

use rayon::prelude::*;
use serde::Serialize;

use super::{exterior_derivative, FormField, Point4};
use crate::error::{Error, Result};
use crate::mc::KahanSum;
use crate::moebius::C64;

pub const MIN_GRID: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Box4 {
    pub lo: Point4,
    pub hi: Point4,
}

impl Box4 {
    /// Requires `lo < hi` on every axis and the closed box inside the bidisk.
    pub fn new(lo: Point4, hi: Point4) -> Result<Self> {
        if (0..4).any(|i| !(lo[i] < hi[i])) {
            return Err(Error::InvalidArgument(format!("degenerate box {lo:?} .. {hi:?}")));
        }
        let b = Self { lo, hi };
        let reach = |i: usize| lo[i].abs().max(hi[i].abs());
        if reach(0).hypot(reach(1)) >= 1.0 || reach(2).hypot(reach(3)) >= 1.0 {
            return Err(Error::InvalidArgument(format!("box {lo:?} .. {hi:?} leaves the bidisk")));
        }
        Ok(b)
    }

    /// Cube of half-width `half` about `center`.
    pub fn around(center: Point4, half: f64) -> Result<Self> {
        Self::new(center.map(|c| c - half), center.map(|c| c + half))
    }

    pub fn center(&self) -> Point4 {
        std::array::from_fn(|i| 0.5 * (self.lo[i] + self.hi[i]))
    }

    pub fn widths(&self) -> Point4 {
        std::array::from_fn(|i| self.hi[i] - self.lo[i])
    }

    pub fn volume(&self) -> f64 {
        self.widths().iter().product()
    }

    /// The box scaled by `factor` about its center.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let c = self.center();
        let w = self.widths();
        Self::new(
            std::array::from_fn(|i| c[i] - 0.5 * factor * w[i]),
            std::array::from_fn(|i| c[i] + 0.5 * factor * w[i]),
        )
    }

    /// Midpoint grid points of the box, row-major with axis 0 outermost.
    pub fn midpoints(&self, n: usize) -> impl Iterator<Item = Point4> + '_ {
        let w = self.widths();
        (0..n.pow(4)).map(move |idx| {
            let ix = [idx / (n * n * n), (idx / (n * n)) % n, (idx / n) % n, idx % n];
            std::array::from_fn(|a| self.lo[a] + (ix[a] as f64 + 0.5) * w[a] / n as f64)
        })
    }
}

#[derive(Default, Clone, Copy)]
struct ComplexSum {
    re: KahanSum,
    im: KahanSum,
}

impl ComplexSum {
    fn add(&mut self, z: C64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }
    fn value(&self) -> C64 {
        C64::new(self.re.value(), self.im.value())
    }
}

/// Midpoint rule over `B` with `n` cells per axis. Slabs along axis 0 are
/// summed in parallel and merged in slab order.
pub fn integrate_box<F>(b: &Box4, n: usize, f: F) -> Result<C64>
where
    F: Fn(&Point4) -> Result<C64> + Sync,
{
    let w = b.widths();
    let cell = w.iter().product::<f64>() / (n as f64).powi(4);
    let slabs: Result<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|i0| {
            let mut s = ComplexSum::default();
            let x0 = b.lo[0] + (i0 as f64 + 0.5) * w[0] / n as f64;
            for i1 in 0..n {
                let x1 = b.lo[1] + (i1 as f64 + 0.5) * w[1] / n as f64;
                for i2 in 0..n {
                    let x2 = b.lo[2] + (i2 as f64 + 0.5) * w[2] / n as f64;
                    for i3 in 0..n {
                        let x3 = b.lo[3] + (i3 as f64 + 0.5) * w[3] / n as f64;
                        s.add(f(&[x0, x1, x2, x3])?);
                    }
                }
            }
            Ok(s.value())
        })
        .collect();
    let mut total = ComplexSum::default();
    for v in slabs? {
        total.add(v);
    }
    Ok(total.value() * cell)
}

/// Midpoint rule over the face `x_axis = value` of `B` (3-dimensional).
pub fn integrate_face<F>(b: &Box4, axis: usize, value: f64, n: usize, f: F) -> Result<C64>
where
    F: Fn(&Point4) -> Result<C64> + Sync,
{
    let free: Vec<usize> = (0..4).filter(|&a| a != axis).collect();
    let w = b.widths();
    let cell = free.iter().map(|&a| w[a]).product::<f64>() / (n as f64).powi(3);
    let rows: Result<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|i0| {
            let mut s = ComplexSum::default();
            for i1 in 0..n {
                for i2 in 0..n {
                    let mut x = [0.0; 4];
                    x[axis] = value;
                    for (slot, i) in free.iter().zip([i0, i1, i2]) {
                        x[*slot] = b.lo[*slot] + (i as f64 + 0.5) * w[*slot] / n as f64;
                    }
                    s.add(f(&x)?);
                }
            }
            Ok(s.value())
        })
        .collect();
    let mut total = ComplexSum::default();
    for v in rows? {
        total.add(v);
    }
    Ok(total.value() * cell)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct StokesReport {
    /// `∫_B dω` (finite-difference exterior derivative, midpoint rule).
    pub lhs: C64,
    /// `∫_∂B ω` with outward orientation.
    pub rhs: C64,
    /// `Σ_faces ∫ |ω_face|`, the size of the boundary flux before cancellation.
    pub flux_scale: f64,
    /// `|lhs − rhs| / max(|lhs|, |rhs|, flux_scale)`.
    pub gap: f64,
    pub grid: usize,
}

/// Boundary integral `∫_∂B ω` of a 3-form and its unsigned flux scale.
pub fn boundary_integral(form: &dyn FormField, b: &Box4, grid: usize) -> Result<(C64, f64)> {
    let mut total = ComplexSum::default();
    let mut scale = KahanSum::default();
    for axis in 0..4 {
        let mask = 0b1111 & !(1 << axis);
        let parity = if axis % 2 == 0 { 1.0 } else { -1.0 };
        for (value, side) in [(b.hi[axis], 1.0), (b.lo[axis], -1.0)] {
            let coeff = |x: &Point4| -> Result<C64> {
                if !form.contains(x) {
                    return Err(Error::StencilOutOfDomain { point: format!("{x:?}"), reach: 0.0 });
                }
                Ok(form.eval(x).coeff(mask))
            };
            let signed = integrate_face(b, axis, value, grid, coeff)?;
            let unsigned = integrate_face(b, axis, value, grid, |x| coeff(x).map(|c| C64::new(c.norm(), 0.0)))?;
            total.add(signed * (parity * side));
            scale.add(unsigned.re);
        }
    }
    Ok((total.value(), scale.value()))
}

pub fn stokes_check(form: &dyn FormField, b: &Box4, grid: usize) -> Result<StokesReport> {
    if grid < MIN_GRID {
        return Err(Error::InvalidArgument(format!("grid {grid} < {MIN_GRID} cells per axis")));
    }
    if form.dim() != 4 || form.degree() != 3 {
        return Err(Error::InvalidArgument("Stokes check needs a 3-form on R^4".into()));
    }
    let lhs = integrate_box(b, grid, |x| Ok(exterior_derivative(form, x)?.top()))?;
    let (rhs, flux_scale) = boundary_integral(form, b, grid)?;
    let denom = lhs.norm().max(rhs.norm()).max(flux_scale).max(f64::MIN_POSITIVE);
    Ok(StokesReport { lhs, rhs, flux_scale, gap: (lhs - rhs).norm() / denom, grid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{Domain, FnForm, FormValue};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn box_validation() {
        assert!(Box4::new([0.0; 4], [0.1, 0.1, 0.0, 0.1]).is_err());
        assert!(Box4::around([0.7, 0.7, 0.0, 0.0], 0.1).is_err());
        assert!(Box4::around([0.2, 0.0, -0.1, 0.3], 0.1).is_ok());
        assert!(stokes_check(
            &FnForm::new(4, 3, Domain::Everywhere, |_x: &[f64]| FormValue::zero(4, 3)),
            &Box4::around([0.0; 4], 0.1).unwrap(),
            3
        )
        .is_err());
    }

    #[test]
    fn polynomial_volume_integral() {
        // ∫ x₀² over [0,1]⁴-like box: midpoint is exact up to h²/12 per axis
        let b = Box4::new([0.0, 0.0, 0.0, 0.0], [0.5, 0.5, 0.5, 0.5]).unwrap();
        let v = integrate_box(&b, 16, |x| Ok(c(x[0] * x[0]))).unwrap();
        let exact = 0.5f64.powi(3) / 3.0 * 0.5f64.powi(3);
        assert!((v.re - exact).abs() < 1e-3 * exact);
    }

    #[test]
    fn exact_forms_balance() {
        // ω = d(η) with η = x₀ x₂² dy₁∧dy₂ + x₁³ dx₁∧dx₂ (0-based axes)
        let omega = FnForm::new(4, 3, Domain::Everywhere, |x: &[f64]| {
            let mut f = FormValue::zero(4, 3);
            // d(x₀x₂² dx₁∧dx₃) = x₂² dx₀∧dx₁∧dx₃ + 2x₀x₂ dx₂∧dx₁∧dx₃
            f.set(0b1011, c(x[2] * x[2]));
            f.set(0b1110, c(-2.0 * x[0] * x[2]));
            // d(x₁³ dx₀∧dx₂) = 3x₁² dx₁∧dx₀∧dx₂
            f.set(0b0111, c(-3.0 * x[1] * x[1]));
            f
        });
        let b = Box4::new([0.1, -0.2, 0.0, 0.2], [0.4, 0.1, 0.3, 0.45]).unwrap();
        let r = stokes_check(&omega, &b, 16).unwrap();
        assert!(r.gap < 1e-3, "{r:?}");
        assert!(r.lhs.norm() < 1e-9);
    }

    #[test]
    fn non_exact_form_balances() {
        // ω = x₀² x₃ dx₁∧dx₂∧dx₃ − sin(x₁) x₂ dx₀∧dx₂∧dx₃, dω ≠ 0
        let omega = FnForm::new(4, 3, Domain::Everywhere, |x: &[f64]| {
            let mut f = FormValue::zero(4, 3);
            f.set(0b1110, c(x[0] * x[0] * x[3]));
            f.set(0b1101, c(-x[1].sin() * x[2]));
            f
        });
        let b = Box4::new([0.1, -0.2, 0.0, 0.2], [0.4, 0.1, 0.3, 0.45]).unwrap();
        let r = stokes_check(&omega, &b, 16).unwrap();
        assert!(r.lhs.norm() > 1e-4);
        assert!((r.lhs - r.rhs).norm() < 1e-3 * r.lhs.norm(), "{r:?}");
    }

    #[test]
    fn tiny_box_integrals_vanish() {
        let omega = FnForm::new(4, 3, Domain::Everywhere, |x: &[f64]| {
            let mut f = FormValue::zero(4, 3);
            f.set(0b1110, c(x[0] * x[0] * x[3] + 1.0));
            f
        });
        let b = Box4::around([0.1, 0.1, 0.1, 0.1], 1e-4).unwrap();
        let r = stokes_check(&omega, &b, 4).unwrap();
        assert!(r.lhs.norm() < 1e-11 && r.rhs.norm() < 1e-11);
    }
}
