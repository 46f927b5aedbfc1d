//! Unit-disk automorphisms `z ↦ (a z + b)/(b̄ z + ā)` with `|a|² − |b|² = 1`,
//! and the conjugated diagonal action on the bidisk
//! `γ·(z, w) = (γ z, conj(γ conj(w)))`.
//!
//! Every value here is `Copy` and every operation is pure.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance on `|a|² − |b|² − 1`, relative to `max(1, |a|²)`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Past this size of `|a|²` the determinant is dominated by rounding and
/// renormalizing would inject noise instead of removing it.
const RENORMALIZE_LIMIT: f64 = 1e8;

/// A point of the open unit disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint(C64);

impl DiskPoint {
    pub fn new(z: C64) -> Result<Self> {
        if z.is_finite() && z.norm_sqr() < 1.0 {
            Ok(Self(z))
        } else {
            Err(Error::OutsideDisk(format!("{z}")))
        }
    }

    pub fn origin() -> Self {
        Self(C64::new(0.0, 0.0))
    }

    pub fn value(self) -> C64 {
        self.0
    }

    pub fn conj(self) -> Self {
        Self(self.0.conj())
    }
}

impl From<DiskPoint> for C64 {
    fn from(p: DiskPoint) -> C64 {
        p.0
    }
}

/// A point `(z, w)` of the bidisk, the universal cover coordinate of the
/// quotient manifold.
///
/// `new` enforces `|z|, |w| < 1`. Level-set charts at the maximal radius land
/// on `𝔻 × ∂𝔻`; those images are built with [`BidiskPoint::raw`] and are
/// flagged by [`BidiskPoint::is_interior`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BidiskPoint {
    pub z: C64,
    pub w: C64,
}

impl BidiskPoint {
    pub fn new(z: C64, w: C64) -> Result<Self> {
        let p = Self { z, w };
        if p.is_interior() {
            Ok(p)
        } else {
            Err(Error::OutsideDisk(format!("({z}, {w})")))
        }
    }

    pub fn raw(z: C64, w: C64) -> Self {
        Self { z, w }
    }

    pub fn is_interior(&self) -> bool {
        self.z.is_finite() && self.w.is_finite() && self.z.norm_sqr() < 1.0 && self.w.norm_sqr() < 1.0
    }

    /// Real coordinates `(Re z, Im z, Re w, Im w)`.
    pub fn to_real(self) -> [f64; 4] {
        [self.z.re, self.z.im, self.w.re, self.w.im]
    }

    pub fn from_real(x: [f64; 4]) -> Self {
        Self { z: C64::new(x[0], x[1]), w: C64::new(x[2], x[3]) }
    }

    /// Distance to the boundary of the bidisk, `min(1 − |z|, 1 − |w|)`.
    pub fn margin(&self) -> f64 {
        (1.0 - self.z.norm()).min(1.0 - self.w.norm())
    }

    /// True when the point lies on the conjugated diagonal `w = z̄`.
    pub fn on_core(&self, tol: f64) -> bool {
        (self.w - self.z.conj()).norm() <= tol
    }
}

/// A disk automorphism in normalized matrix form `[[a, b], [b̄, ā]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskMoebius {
    a: C64,
    b: C64,
}

impl DiskMoebius {
    /// Builds a transform from entries that must already satisfy
    /// `|a|² − |b|² = 1` within [`NORMALIZATION_TOL`].
    pub fn new(a: C64, b: C64) -> Result<Self> {
        let det = a.norm_sqr() - b.norm_sqr();
        let scale = a.norm_sqr().max(1.0);
        if !(a.is_finite() && b.is_finite()) || (det - 1.0).abs() > NORMALIZATION_TOL * scale {
            return Err(Error::NotNormalized { det });
        }
        Ok(Self { a, b })
    }

    /// Rescales `(a, b)` so the determinant is one. Fails when the pair does
    /// not define a disk automorphism (`|a| ≤ |b|`).
    pub fn normalized(a: C64, b: C64) -> Result<Self> {
        let det = a.norm_sqr() - b.norm_sqr();
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::NotNormalized { det });
        }
        let s = det.sqrt();
        Ok(Self { a: a / s, b: b / s })
    }

    pub fn identity() -> Self {
        Self { a: C64::new(1.0, 0.0), b: C64::new(0.0, 0.0) }
    }

    /// Rotation `z ↦ e^{iθ} z`.
    pub fn rotation(theta: f64) -> Self {
        Self { a: C64::from_polar(1.0, theta / 2.0), b: C64::new(0.0, 0.0) }
    }

    /// Hyperbolic translation of length `length` along the diameter at angle
    /// `theta`; it sends `0` to `tanh(length/2) e^{iθ}` and fixes `±e^{iθ}`.
    pub fn translation(theta: f64, length: f64) -> Self {
        let h = length / 2.0;
        Self { a: C64::new(h.cosh(), 0.0), b: C64::from_polar(h.sinh(), theta) }
    }

    /// The automorphism `z ↦ (z + c)/(1 + c̄ z)` sending `0` to `c`.
    pub fn moving_origin_to(c: DiskPoint) -> Self {
        let c = c.value();
        let s = (1.0 - c.norm_sqr()).sqrt();
        Self { a: C64::new(1.0 / s, 0.0), b: c / s }
    }

    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn b(&self) -> C64 {
        self.b
    }

    pub fn det(&self) -> f64 {
        self.a.norm_sqr() - self.b.norm_sqr()
    }

    /// Evaluates the fractional-linear map at any `z` with nonzero
    /// denominator. On `|z| = 1` this is the boundary extension.
    pub fn apply_c(&self, z: C64) -> C64 {
        (self.a * z + self.b) / (self.b.conj() * z + self.a.conj())
    }

    pub fn apply(&self, z: DiskPoint) -> DiskPoint {
        let image = self.apply_c(z.value());
        // rounding can push images of points very close to the circle onto it
        if image.norm_sqr() < 1.0 {
            DiskPoint(image)
        } else {
            DiskPoint(image / image.norm() * (1.0 - f64::EPSILON))
        }
    }

    /// `conj(γ conj(w)) = (ā w + b̄)/(b w + a)`.
    pub fn conj_apply_c(&self, w: C64) -> C64 {
        (self.a.conj() * w + self.b.conj()) / (self.b * w + self.a)
    }

    pub fn conj_apply(&self, w: DiskPoint) -> DiskPoint {
        DiskPoint(self.conj_apply_c(w.value())).clamp_inside()
    }

    pub fn act_bidisk(&self, p: BidiskPoint) -> BidiskPoint {
        BidiskPoint { z: self.apply_c(p.z), w: self.conj_apply_c(p.w) }
    }

    /// Complex derivative `1/(b̄ z + ā)²`.
    pub fn derivative(&self, z: C64) -> C64 {
        let d = self.b.conj() * z + self.a.conj();
        1.0 / (d * d)
    }

    /// Matrix product `self · other`, i.e. `self ∘ other` as maps.
    pub fn compose(&self, other: &Self) -> Self {
        let a = self.a * other.a + self.b * other.b.conj();
        let b = self.a * other.b + self.b * other.a.conj();
        Self::renormalize(a, b)
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.a.conj(), b: -self.b }
    }

    fn renormalize(a: C64, b: C64) -> Self {
        let det = a.norm_sqr() - b.norm_sqr();
        if a.norm_sqr() < RENORMALIZE_LIMIT && det > 0.0 {
            let s = det.sqrt();
            Self { a: a / s, b: b / s }
        } else {
            Self { a, b }
        }
    }

    /// Entrywise equality up to the global sign `(a, b) ~ (−a, −b)`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.distance_mod_sign(other) <= tol
    }

    /// Max entry difference, minimized over the two sign representatives.
    pub fn distance_mod_sign(&self, other: &Self) -> f64 {
        let plus = (self.a - other.a).norm().max((self.b - other.b).norm());
        let minus = (self.a + other.a).norm().max((self.b + other.b).norm());
        plus.min(minus)
    }

    /// Translation length `2 acosh(|Re a|)` for hyperbolic elements.
    pub fn translation_length(&self) -> f64 {
        2.0 * self.a.re.abs().max(1.0).acosh()
    }

    /// Fixed points on the circle of a hyperbolic element, repelling first.
    pub fn boundary_fixed_points(&self) -> Option<(C64, C64)> {
        // b̄ z² + (ā − a) z − b = 0
        let qa = self.b.conj();
        if qa.norm() < 1e-15 {
            return None;
        }
        let qb = self.a.conj() - self.a;
        let disc = (qb * qb + 4.0 * qa * self.b).sqrt();
        let r1 = (-qb + disc) / (2.0 * qa);
        let r2 = (-qb - disc) / (2.0 * qa);
        if self.derivative(r1).norm() > 1.0 {
            Some((r1, r2))
        } else {
            Some((r2, r1))
        }
    }
}

impl DiskPoint {
    fn clamp_inside(self) -> Self {
        if self.0.norm_sqr() < 1.0 {
            self
        } else {
            Self(self.0 / self.0.norm() * (1.0 - f64::EPSILON))
        }
    }
}

/// `sinh(d/2) = |z₁ − z₂| / √((1 − |z₁|²)(1 − |z₂|²))`, accurate for both
/// tiny and large separations.
pub fn hyperbolic_distance(z1: DiskPoint, z2: DiskPoint) -> f64 {
    hyperbolic_distance_c(z1.value(), z2.value())
}

pub fn hyperbolic_distance_c(z1: C64, z2: C64) -> f64 {
    let num = (z1 - z2).norm();
    if num == 0.0 {
        return 0.0;
    }
    let den = ((1.0 - z1.norm_sqr()) * (1.0 - z2.norm_sqr())).sqrt();
    2.0 * (num / den).asinh()
}

/// The pseudo-hyperbolic distance `|(z₁ − z₂)/(1 − z̄₁ z₂)| = tanh(d/2)`.
pub fn pseudo_hyperbolic(z1: C64, z2: C64) -> f64 {
    ((z1 - z2) / (1.0 - z1.conj() * z2)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng, rmax: f64) -> DiskPoint {
        let r = rmax * rng.gen::<f64>().sqrt();
        let t = rng.gen::<f64>() * std::f64::consts::TAU;
        DiskPoint::new(C64::from_polar(r, t)).unwrap()
    }

    fn random_moebius(rng: &mut ChaCha8Rng) -> DiskMoebius {
        let c = random_point(rng, 0.9);
        DiskMoebius::moving_origin_to(c).compose(&DiskMoebius::rotation(rng.gen::<f64>() * 6.0))
    }

    #[test]
    fn identity_fixes_points() {
        let z = DiskPoint::new(C64::new(0.3, 0.1)).unwrap();
        assert_eq!(DiskMoebius::identity().apply(z), z);
        let w = DiskPoint::new(C64::new(0.2, -0.5)).unwrap();
        assert_eq!(DiskMoebius::identity().conj_apply(w), w);
        let p = BidiskPoint::new(C64::new(0.3, 0.0), C64::new(0.0, 0.4)).unwrap();
        assert_eq!(DiskMoebius::identity().act_bidisk(p), p);
    }

    #[test]
    fn real_translation_sends_origin_to_tanh() {
        for s in [0.1, 0.7, 2.0] {
            let m = DiskMoebius::new(C64::new(f64::cosh(s), 0.0), C64::new(f64::sinh(s), 0.0)).unwrap();
            let img = m.apply(DiskPoint::origin()).value();
            assert!((img - C64::new(s.tanh(), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_unnormalized_entries() {
        assert!(DiskMoebius::new(C64::new(2.0, 0.0), C64::new(0.0, 0.0)).is_err());
        assert!(DiskMoebius::normalized(C64::new(0.5, 0.0), C64::new(1.0, 0.0)).is_err());
        let m = DiskMoebius::normalized(C64::new(2.0, 1.0), C64::new(0.5, -0.5)).unwrap();
        assert!((m.det() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_undoes_apply() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let m = random_moebius(&mut rng);
            let z = random_point(&mut rng, 0.95);
            let back = m.inverse().apply(m.apply(z));
            assert!((back.value() - z.value()).norm() < 1e-12);
        }
    }

    #[test]
    fn real_coefficients_commute_with_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = DiskMoebius::translation(0.0, 1.3);
        for _ in 0..100 {
            let w = random_point(&mut rng, 0.99);
            assert!((m.conj_apply(w).value() - m.apply(w).value()).norm() < 1e-14);
        }
    }

    #[test]
    fn conj_apply_is_a_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let (m1, m2) = (random_moebius(&mut rng), random_moebius(&mut rng));
            let w = random_point(&mut rng, 0.9);
            let lhs = m1.compose(&m2).conj_apply(w).value();
            let rhs = m1.conj_apply(m2.conj_apply(w)).value();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn group_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let id = DiskMoebius::identity();
        assert!(id.inverse().approx_eq(&id, 0.0));
        for _ in 0..100 {
            let m = random_moebius(&mut rng);
            assert!(m.compose(&id).approx_eq(&m, 1e-15));
            assert!(m.compose(&m.inverse()).approx_eq(&id, 1e-12));
            let (m2, m3) = (random_moebius(&mut rng), random_moebius(&mut rng));
            let left = m.compose(&m2).compose(&m3);
            let right = m.compose(&m2.compose(&m3));
            assert!(left.approx_eq(&right, 1e-12 * left.a().norm_sqr().max(1.0)));
            assert!((m.compose(&m2).det() - 1.0).abs() < 1e-12);
        }
        let neg = DiskMoebius::new(-id.a(), -id.b()).unwrap();
        assert!(neg.approx_eq(&id, 0.0));
    }

    #[test]
    fn boundary_maps_to_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..100 {
            let m = random_moebius(&mut rng);
            let t = rng.gen::<f64>() * 6.3;
            let on = m.apply_c(C64::from_polar(1.0, t));
            assert!((on.norm() - 1.0).abs() < 1e-12);
            let near = m.apply(DiskPoint::new(C64::from_polar(1.0 - 1e-9, t)).unwrap());
            assert!(near.value().norm() < 1.0);
        }
    }

    #[test]
    fn conjugated_diagonal_is_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..100 {
            let m = random_moebius(&mut rng);
            let z = random_point(&mut rng, 0.95).value();
            let img = m.act_bidisk(BidiskPoint::new(z, z.conj()).unwrap());
            assert!((img.w - img.z.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn bidisk_action_is_left_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let (m1, m2) = (random_moebius(&mut rng), random_moebius(&mut rng));
            let p =
                BidiskPoint::new(random_point(&mut rng, 0.95).value(), random_point(&mut rng, 0.95).value()).unwrap();
            let lhs = m1.act_bidisk(m2.act_bidisk(p));
            let rhs = m1.compose(&m2).act_bidisk(p);
            assert!((lhs.z - rhs.z).norm() < 1e-11 && (lhs.w - rhs.w).norm() < 1e-11);
        }
    }

    #[test]
    fn distance_values() {
        let o = DiskPoint::origin();
        assert_eq!(hyperbolic_distance(o, o), 0.0);
        let half = DiskPoint::new(C64::new(0.5, 0.0)).unwrap();
        assert!((hyperbolic_distance(o, half) - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn distance_is_invariant_and_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for _ in 0..1000 {
            let m = random_moebius(&mut rng);
            let (a, b, c) = (random_point(&mut rng, 0.95), random_point(&mut rng, 0.95), random_point(&mut rng, 0.95));
            let d = hyperbolic_distance(a, b);
            assert!((hyperbolic_distance(m.apply(a), m.apply(b)) - d).abs() < 1e-10 * d.max(1.0));
            assert!((hyperbolic_distance(b, a) - d).abs() < 1e-14);
            assert!(hyperbolic_distance(a, c) <= d + hyperbolic_distance(b, c) + 1e-12);
        }
    }

    #[test]
    fn translation_fixed_points() {
        let m = DiskMoebius::translation(0.4, 2.0);
        let (rep, att) = m.boundary_fixed_points().unwrap();
        assert!((att - C64::from_polar(1.0, 0.4)).norm() < 1e-12);
        assert!((rep + C64::from_polar(1.0, 0.4)).norm() < 1e-12);
        assert!((m.translation_length() - 2.0).abs() < 1e-13);
    }
}
