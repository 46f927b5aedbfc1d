use std::ops::{Add, Mul, Sub};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::moebius::C64;

/// Coefficients `h_{jk̄}` of the (1,1)-form `i Σ h_{jk̄} dζ_j∧dζ̄_k`, rows and
/// columns indexed by `(z, w)`. Entry `[0][1]` multiplies `i dz∧dw̄`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HermitianForm2 {
    h: [[C64; 2]; 2],
}

const HERMITIAN_TOL: f64 = 1e-10;

impl HermitianForm2 {
    /// Accepts a matrix that is Hermitian within `1e-10` (relative to its
    /// size) and removes the residual skew part.
    pub fn new(h: [[C64; 2]; 2]) -> Result<Self> {
        let raw = Self { h };
        let scale = raw.frobenius_norm().max(1.0);
        if raw.hermitian_defect() > HERMITIAN_TOL * scale {
            return Err(Error::InvalidArgument(format!("matrix is not Hermitian: {h:?}")));
        }
        Ok(Self::symmetrized(h))
    }

    /// `(H + H*)/2`.
    pub fn symmetrized(h: [[C64; 2]; 2]) -> Self {
        let off = (h[0][1] + h[1][0].conj()) * 0.5;
        Self { h: [[C64::new(h[0][0].re, 0.0), off], [off.conj(), C64::new(h[1][1].re, 0.0)]] }
    }

    pub fn from_parts(a: f64, off: C64, d: f64) -> Self {
        Self { h: [[C64::new(a, 0.0), off], [off.conj(), C64::new(d, 0.0)]] }
    }

    pub fn identity() -> Self {
        Self::from_parts(1.0, C64::new(0.0, 0.0), 1.0)
    }

    pub fn zero() -> Self {
        Self::from_parts(0.0, C64::new(0.0, 0.0), 0.0)
    }

    pub fn diagonal(a: f64, d: f64) -> Self {
        Self::from_parts(a, C64::new(0.0, 0.0), d)
    }

    /// `v v*`.
    pub fn rank_one(v: [C64; 2]) -> Self {
        Self::from_parts(v[0].norm_sqr(), v[0] * v[1].conj(), v[1].norm_sqr())
    }

    pub fn entries(&self) -> [[C64; 2]; 2] {
        self.h
    }

    pub fn entry(&self, j: usize, k: usize) -> C64 {
        self.h[j][k]
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for j in 0..2 {
            for k in 0..2 {
                d = d.max((self.h[j][k] - self.h[k][j].conj()).norm());
            }
        }
        d
    }

    pub fn trace(&self) -> f64 {
        self.h[0][0].re + self.h[1][1].re
    }

    pub fn det(&self) -> f64 {
        (self.h[0][0] * self.h[1][1] - self.h[0][1] * self.h[1][0]).re
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.h.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.h.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(a+d)/2 ∓ √(((a−d)/2)² + |b|²)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let (a, d) = (self.h[0][0].re, self.h[1][1].re);
        let mean = 0.5 * (a + d);
        let r = (0.5 * (a - d)).hypot(self.h[0][1].norm());
        (mean - r, mean + r)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().0
    }

    pub fn max_entry_gap(&self, other: &Self) -> f64 {
        let mut g: f64 = 0.0;
        for j in 0..2 {
            for k in 0..2 {
                g = g.max((self.h[j][k] - other.h[j][k]).norm());
            }
        }
        g
    }

    /// The Hermitian metric `Σ h_{jk̄} v_j v̄_k` on a tangent vector.
    pub fn metric(&self, v: [C64; 2]) -> f64 {
        let mut s = C64::new(0.0, 0.0);
        for j in 0..2 {
            for k in 0..2 {
                s += self.h[j][k] * v[j] * v[k].conj();
            }
        }
        s.re
    }
}

impl Add for HermitianForm2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut h = self.h;
        for j in 0..2 {
            for k in 0..2 {
                h[j][k] += o.h[j][k];
            }
        }
        Self { h }
    }
}

impl Sub for HermitianForm2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + o * -1.0
    }
}

impl Mul<f64> for HermitianForm2 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        let mut h = self.h;
        h.iter_mut().flatten().for_each(|c| *c *= k);
        Self { h }
    }
}

/// `(i∂∂̄u)² = 0` in two variables iff this determinant vanishes.
pub fn ma_det(h: &HermitianForm2) -> f64 {
    h.det()
}

pub fn min_eigenvalue(h: &HermitianForm2) -> f64 {
    h.min_eigenvalue()
}
