//! Finite-difference Wirtinger calculus on ℂ² ≅ ℝ⁴.
//!
//! Real coordinates are ordered `(Re z, Im z, Re w, Im w)`. Derivatives are
//! central differences with one level of Richardson extrapolation.
//!
//! Step policy:
//! * first derivatives: `h = min(1e-3·max(1, |x_i|), margin/50)`, halved until the `±2h`
//!   stencil fits in the domain (at most down to `1e-7`). The extrapolated
//!   error is `O(h⁴)`, so this balances truncation against rounding;
//! * second derivatives: `h = min(1e-3, margin/50)`, where `margin` is the
//!   distance to the bidisk boundary. Near the boundary the functions of
//!   interest scale like `margin⁻ᵏ`, so the step shrinks with it.

mod forms;
mod hermitian;
mod stokes;

pub use forms::{
    dc_scalar, exterior_derivative, hermitian_to_form, pullback_at, real_one_form, Domain, FnForm, FormField,
    FormValue, PulledBack,
};
pub use hermitian::{ma_det, min_eigenvalue, HermitianForm2};
pub use stokes::{boundary_integral, integrate_box, integrate_face, stokes_check, Box4, StokesReport};

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::moebius::{BidiskPoint, C64};

pub type Point4 = [f64; 4];

/// Values that finite differences can combine linearly.
pub trait Linear: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn is_finite_value(&self) -> bool;
}

impl Linear for f64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Linear for C64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

pub fn gradient_step(x: f64) -> f64 {
    1e-3 * x.abs().max(1.0)
}

/// Steps never exceed this fraction of the distance to the domain boundary.
pub const STEP_FRACTION: f64 = 0.02;

/// Smallest allowed first-derivative step after shrinking.
pub const MIN_GRADIENT_STEP: f64 = 1e-7;

/// Halves `h` until `fits(2h)`; `None` below [`MIN_GRADIENT_STEP`].
pub fn fit_step(mut h: f64, fits: impl Fn(f64) -> bool) -> Option<f64> {
    while h >= MIN_GRADIENT_STEP {
        if fits(2.0 * h) {
            return Some(h);
        }
        h *= 0.5;
    }
    None
}

pub fn hessian_step(p: &BidiskPoint) -> f64 {
    (p.margin() * STEP_FRACTION).min(1e-3)
}

/// Central difference of `g` at 0 with step `h`, Richardson-extrapolated.
pub fn richardson_derivative<T: Linear>(g: impl Fn(f64) -> T, h: f64) -> T {
    let central = |s: f64| (g(s) - g(-s)) * (0.5 / s);
    let (coarse, fine) = (central(h), central(0.5 * h));
    (fine * 4.0 - coarse) * (1.0 / 3.0)
}

fn check_margin(p: &BidiskPoint, reach: f64) -> Result<()> {
    if p.margin() > reach {
        Ok(())
    } else {
        Err(Error::StencilOutOfDomain { point: format!("({}, {})", p.z, p.w), reach })
    }
}

fn shifted(x: Point4, axis: usize, s: f64) -> Point4 {
    let mut y = x;
    y[axis] += s;
    y
}

/// `(∂f/∂z, ∂f/∂w, ∂f/∂z̄, ∂f/∂w̄)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WirtingerGradient {
    pub dz: C64,
    pub dw: C64,
    pub dzb: C64,
    pub dwb: C64,
}

impl WirtingerGradient {
    pub fn holomorphic(&self) -> [C64; 2] {
        [self.dz, self.dw]
    }

    pub fn antiholomorphic(&self) -> [C64; 2] {
        [self.dzb, self.dwb]
    }
}

/// Real partial derivatives of a complex-valued field.
pub fn real_gradient(f: &dyn Fn(Point4) -> C64, p: BidiskPoint) -> Result<[C64; 4]> {
    let x = p.to_real();
    let mut g = [C64::new(0.0, 0.0); 4];
    for (axis, slot) in g.iter_mut().enumerate() {
        let h =
            fit_step(gradient_step(x[axis]).min(p.margin() * STEP_FRACTION), |r| p.margin() > r).ok_or_else(|| {
                Error::StencilOutOfDomain { point: format!("({}, {})", p.z, p.w), reach: MIN_GRADIENT_STEP }
            })?;
        *slot = richardson_derivative(|s| f(shifted(x, axis, s)), h);
        if !slot.is_finite() {
            return Err(Error::NonFinite(format!("({}, {})", p.z, p.w)));
        }
    }
    Ok(g)
}

pub fn wirtinger_gradient(f: &dyn Fn(Point4) -> C64, p: BidiskPoint) -> Result<WirtingerGradient> {
    let g = real_gradient(f, p)?;
    let i = C64::new(0.0, 1.0);
    Ok(WirtingerGradient {
        dz: (g[0] - i * g[1]) * 0.5,
        dw: (g[2] - i * g[3]) * 0.5,
        dzb: (g[0] + i * g[1]) * 0.5,
        dwb: (g[2] + i * g[3]) * 0.5,
    })
}

/// Wirtinger gradient of a real-valued field.
pub fn wirtinger_gradient_real(f: &dyn Fn(Point4) -> f64, p: BidiskPoint) -> Result<WirtingerGradient> {
    wirtinger_gradient(&|x| C64::new(f(x), 0.0), p)
}

/// Real 4×4 Hessian by nested central differences at step `h`.
fn real_hessian_at(f: &dyn Fn(Point4) -> f64, x: Point4, h: f64) -> [[f64; 4]; 4] {
    let f0 = f(x);
    let mut hess = [[0.0; 4]; 4];
    for i in 0..4 {
        let fp = f(shifted(x, i, h));
        let fm = f(shifted(x, i, -h));
        hess[i][i] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in (i + 1)..4 {
            let fpp = f(shifted(shifted(x, i, h), j, h));
            let fpm = f(shifted(shifted(x, i, h), j, -h));
            let fmp = f(shifted(shifted(x, i, -h), j, h));
            let fmm = f(shifted(shifted(x, i, -h), j, -h));
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    hess
}

/// Richardson-extrapolated real Hessian.
pub fn real_hessian(f: &dyn Fn(Point4) -> f64, p: BidiskPoint) -> Result<[[f64; 4]; 4]> {
    let h = hessian_step(&p);
    check_margin(&p, 2.0 * h)?;
    if h <= 0.0 {
        return Err(Error::StencilOutOfDomain { point: format!("({}, {})", p.z, p.w), reach: h });
    }
    let x = p.to_real();
    let coarse = real_hessian_at(f, x, h);
    let fine = real_hessian_at(f, x, 0.5 * h);
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (4.0 * fine[i][j] - coarse[i][j]) / 3.0;
            if !out[i][j].is_finite() {
                return Err(Error::NonFinite(format!("({}, {})", p.z, p.w)));
            }
        }
    }
    Ok(out)
}

/// Levi matrix `∂²f/∂ζ_j∂ζ̄_k` of a real field:
/// `¼[f_{x_j x_k} + f_{y_j y_k} + i(f_{x_j y_k} − f_{y_j x_k})]`.
pub fn complex_hessian(f: &dyn Fn(Point4) -> f64, p: BidiskPoint) -> Result<HermitianForm2> {
    let r = real_hessian(f, p)?;
    let mut h = [[C64::new(0.0, 0.0); 2]; 2];
    for (j, row) in h.iter_mut().enumerate() {
        for (k, entry) in row.iter_mut().enumerate() {
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            *entry = C64::new(r[xj][xk] + r[yj][yk], r[xj][yk] - r[yj][xk]) * 0.25;
        }
    }
    Ok(HermitianForm2::symmetrized(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn pt(z: (f64, f64), w: (f64, f64)) -> BidiskPoint {
        BidiskPoint::new(C64::new(z.0, z.1), C64::new(w.0, w.1)).unwrap()
    }

    fn neg_log_delta(x: Point4) -> f64 {
        let p = BidiskPoint::from_real(x);
        -crate::tube::delta(&p).ln()
    }

    #[test]
    fn gradient_of_real_part() {
        let g = wirtinger_gradient_real(&|x| x[0], pt((0.2, -0.1), (0.4, 0.3))).unwrap();
        assert!((g.dz - C64::new(0.5, 0.0)).norm() < 1e-9);
        assert!((g.dzb - C64::new(0.5, 0.0)).norm() < 1e-9);
        assert!(g.dw.norm() < 1e-9 && g.dwb.norm() < 1e-9);
    }

    #[test]
    fn gradient_of_modulus_squared() {
        let g = wirtinger_gradient_real(&|x| x[0] * x[0] + x[1] * x[1], pt((0.3, 0.0), (0.0, 0.0))).unwrap();
        assert!((g.dz - C64::new(0.3, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn stencil_near_boundary_is_rejected() {
        let p = BidiskPoint::new(C64::new(1.0 - 1e-6, 0.0), C64::new(0.0, 0.0)).unwrap();
        assert!(matches!(wirtinger_gradient_real(&|x| x[0], p), Err(Error::StencilOutOfDomain { .. })));
    }

    #[test]
    fn hessian_examples() {
        let p = pt((0.3, -0.2), (0.1, 0.5));
        let h = complex_hessian(&|x| x.iter().map(|v| v * v).sum(), p).unwrap();
        assert!(h.max_entry_gap(&HermitianForm2::identity()) < 1e-8);
        // Re(z w) is pluriharmonic
        let h = complex_hessian(&|x| x[0] * x[2] - x[1] * x[3], p).unwrap();
        assert!(h.frobenius_norm() < 1e-8);
        let h = complex_hessian(&neg_log_delta, pt((0.0, 0.0), (0.0, 0.0))).unwrap();
        assert!(h.max_entry_gap(&HermitianForm2::identity()) < 1e-6);
    }

    #[test]
    fn hessian_is_hermitian_on_random_points() {
        let mut rng = crate::mc::Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut c = || C64::from_polar(0.9 * rng.gen::<f64>(), 6.3 * rng.gen::<f64>());
            let p = BidiskPoint::new(c(), c()).unwrap();
            let h = complex_hessian(&neg_log_delta, p).unwrap();
            assert!(h.hermitian_defect() < 1e-10);
        }
    }
}
