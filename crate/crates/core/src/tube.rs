//! The explicit functions on `X = 𝔻×𝔻/Γ`:
//! `δ = 1 − |(w − z̄)/(1 − zw)|²`, the tube radius `ρ = arccos √δ`, `ρ²`,
//! `−√δ` and `−δ^η`, with their closed-form Levi matrices.
//!
//! Closed forms are assembled from two building blocks, with
//! `a = 1/(1−|z|²)`, `b = 1/(1−|w|²)` and `ε = −(w − z̄)/(w̄ − z)`:
//!
//! * `D = diag(a², b²)`, the Levi matrix of `u = −log δ`;
//! * `O` with `O[0][1] = ε a b`, so that `∂u ∂̄uᵀ/(1 − δ) = D + O`.
//!
//! Near the core `S = {w = z̄}` the product `(1 − δ) ε = −(w − z̄)²/|1 − zw|²`
//! is used instead of `ε`, which is undefined there.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use rand::Rng as _;
use serde::Serialize;

use crate::calculus::{complex_hessian, HermitianForm2, Point4};
use crate::error::{Error, Result};
use crate::fuchsian::FuchsianGroup;
use crate::mc;
use crate::moebius::{hyperbolic_distance_c, BidiskPoint, DiskPoint, C64};

/// Closed forms for `ρ` and `ρ²` are refused when `δ > 1 − CORE_GUARD`.
pub const CORE_GUARD: f64 = 1e-6;

/// Eigenvalues above `−DF_TOL` count as nonnegative in the exponent sweep.
pub const DF_TOL: f64 = 1e-9;

/// Bisection resolution of the exponent estimate.
pub const DF_RESOLUTION: f64 = 1e-3;

pub fn delta(p: &BidiskPoint) -> f64 {
    1.0 - ((p.w - p.z.conj()) / (1.0 - p.z * p.w)).norm_sqr()
}

/// `(1 − |z|²)(1 − |w|²)/|1 − zw|²`.
pub fn delta_alt(p: &BidiskPoint) -> f64 {
    (1.0 - p.z.norm_sqr()) * (1.0 - p.w.norm_sqr()) / (1.0 - p.z * p.w).norm_sqr()
}

/// `|(w − z̄)/(1 − zw)| = sin ρ`.
pub fn chordal(p: &BidiskPoint) -> f64 {
    ((p.w - p.z.conj()) / (1.0 - p.z * p.w)).norm()
}

/// `arcsin |(w − z̄)/(1 − zw)|`, switching to `arccos √δ` away from the core
/// where it is better conditioned.
pub fn rho(p: &BidiskPoint) -> f64 {
    let q = chordal(p);
    if q < 0.7 {
        q.asin()
    } else {
        delta_alt(p).sqrt().acos()
    }
}

pub fn rho_arccos(p: &BidiskPoint) -> f64 {
    delta(p).max(0.0).sqrt().acos()
}

pub fn rho_squared(p: &BidiskPoint) -> f64 {
    let r = rho(p);
    r * r
}

pub fn neg_sqrt_delta(p: &BidiskPoint) -> f64 {
    -delta(p).sqrt()
}

/// `ε = −(w − z̄)/(w̄ − z)`, unimodular off the core.
pub fn epsilon(p: &BidiskPoint) -> C64 {
    -(p.w - p.z.conj()) / (p.w.conj() - p.z)
}

/// `(1 − δ) ε`, smooth across the core.
pub fn one_minus_delta_times_epsilon(p: &BidiskPoint) -> C64 {
    let d = p.w - p.z.conj();
    -(d * d) / (1.0 - p.z * p.w).norm_sqr()
}

/// `(∂u/∂z, ∂u/∂w)` for `u = −log δ`.
pub fn neg_log_delta_gradient(p: &BidiskPoint) -> [C64; 2] {
    let one_zw = 1.0 - p.z * p.w;
    [p.z.conj() / (1.0 - p.z.norm_sqr()) - p.w / one_zw, p.w.conj() / (1.0 - p.w.norm_sqr()) - p.z / one_zw]
}

/// `(∂ρ/∂z, ∂ρ/∂w) = ½ √(δ/(1−δ)) ∂u`, off the core.
pub fn rho_gradient(p: &BidiskPoint) -> [C64; 2] {
    let d = delta_alt(p);
    let k = 0.5 * (d / (1.0 - d)).sqrt();
    neg_log_delta_gradient(p).map(|g| g * k)
}

fn metric_factors(p: &BidiskPoint) -> (f64, f64) {
    (1.0 / (1.0 - p.z.norm_sqr()), 1.0 / (1.0 - p.w.norm_sqr()))
}

/// `D`: the Levi matrix of `−log δ`.
pub fn block_diagonal(p: &BidiskPoint) -> HermitianForm2 {
    let (a, b) = metric_factors(p);
    HermitianForm2::diagonal(a * a, b * b)
}

/// `O` built from `ε`; undefined on the core.
pub fn block_off_diagonal(p: &BidiskPoint) -> HermitianForm2 {
    let (a, b) = metric_factors(p);
    HermitianForm2::from_parts(0.0, epsilon(p) * a * b, 0.0)
}

/// `(1 − δ) O`, smooth everywhere.
pub fn block_off_diagonal_scaled(p: &BidiskPoint) -> HermitianForm2 {
    let (a, b) = metric_factors(p);
    HermitianForm2::from_parts(0.0, one_minus_delta_times_epsilon(p) * a * b, 0.0)
}

/// The functions whose Levi forms are tabulated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum LeviTag {
    NegLogDelta,
    Rho,
    RhoSquared,
    NegSqrtDelta,
    NegDeltaPower(f64),
}

impl fmt::Display for LeviTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LeviTag::NegLogDelta => write!(f, "-log delta"),
            LeviTag::Rho => write!(f, "rho"),
            LeviTag::RhoSquared => write!(f, "rho^2"),
            LeviTag::NegSqrtDelta => write!(f, "-sqrt delta"),
            LeviTag::NegDeltaPower(eta) => write!(f, "-delta^{eta}"),
        }
    }
}

impl LeviTag {
    pub fn value(&self, p: &BidiskPoint) -> f64 {
        match *self {
            LeviTag::NegLogDelta => -delta(p).ln(),
            LeviTag::Rho => rho(p),
            LeviTag::RhoSquared => rho_squared(p),
            LeviTag::NegSqrtDelta => neg_sqrt_delta(p),
            LeviTag::NegDeltaPower(eta) => -delta(p).powf(eta),
        }
    }

    fn needs_core_guard(&self) -> bool {
        matches!(self, LeviTag::Rho | LeviTag::RhoSquared)
    }
}

/// The displayed closed-form Levi matrices.
pub fn levi_closed(tag: LeviTag, p: &BidiskPoint) -> Result<HermitianForm2> {
    let d = delta_alt(p);
    if tag.needs_core_guard() && d > 1.0 - CORE_GUARD {
        return Err(Error::NearCore { tag: tag.to_string(), delta: d });
    }
    let diag = block_diagonal(p);
    Ok(match tag {
        LeviTag::NegLogDelta => diag,
        LeviTag::Rho => {
            let k = 0.25 * (d / (1.0 - d)).sqrt();
            (diag - block_off_diagonal(p)) * k
        }
        LeviTag::RhoSquared => {
            let r = rho(p);
            let s = r * (d / (1.0 - d)).sqrt();
            diag * (0.5 * (s + d)) + block_off_diagonal(p) * (0.5 * (d - s))
        }
        LeviTag::NegSqrtDelta => {
            // (√δ/2)·[(1+δ)/2 D − (1−δ)/2 O]
            (diag * (0.5 * (1.0 + d)) - block_off_diagonal_scaled(p) * 0.5) * (0.5 * d.sqrt())
        }
        LeviTag::NegDeltaPower(eta) => df_levi(eta, p),
    })
}

/// Levi matrix of `−δ^η`: `η δ^η [D − η(1 − δ)(D + O)]`.
pub fn df_levi(eta: f64, p: &BidiskPoint) -> HermitianForm2 {
    let d = delta_alt(p);
    let diag = block_diagonal(p);
    let inner = diag * (1.0 - eta * (1.0 - d)) - block_off_diagonal_scaled(p) * eta;
    inner * (eta * d.powf(eta))
}

/// `∂u ∂̄uᵀ/(1 − δ)` in its displayed form `D + O`.
pub fn grad_outer_over_one_minus_delta(p: &BidiskPoint) -> HermitianForm2 {
    block_diagonal(p) + block_off_diagonal(p)
}

pub fn levi_numeric(tag: LeviTag, p: &BidiskPoint) -> Result<HermitianForm2> {
    complex_hessian(&|x: Point4| tag.value(&BidiskPoint::from_real(x)), *p)
}

#[derive(Clone, Debug, Serialize)]
pub struct LeviReport {
    pub tag: String,
    pub point: BidiskPoint,
    pub delta: f64,
    pub closed_form: Option<HermitianForm2>,
    pub numeric: HermitianForm2,
    pub max_entry_gap: Option<f64>,
    /// `max_entry_gap / max(1, largest closed-form entry)`.
    pub relative_gap: Option<f64>,
    pub min_eigenvalue: f64,
    pub ma_det: f64,
}

/// Closed form against the finite-difference Hessian. On the core only the
/// numeric path exists for `ρ²` (the function is smooth there even though
/// the closed-form intermediates are not).
pub fn levi_numeric_crosscheck(tag: LeviTag, p: &BidiskPoint) -> Result<LeviReport> {
    let numeric = levi_numeric(tag, p)?;
    let closed = match levi_closed(tag, p) {
        Ok(h) => Some(h),
        Err(Error::NearCore { .. }) if tag == LeviTag::RhoSquared => None,
        Err(e) => return Err(e),
    };
    let spectral = closed.unwrap_or(numeric);
    Ok(LeviReport {
        tag: tag.to_string(),
        point: *p,
        delta: delta_alt(p),
        max_entry_gap: closed.map(|c| c.max_entry_gap(&numeric)),
        relative_gap: closed.map(|c| c.max_entry_gap(&numeric) / c.max_abs_entry().max(1.0)),
        closed_form: closed,
        numeric,
        min_eigenvalue: spectral.min_eigenvalue(),
        ma_det: spectral.det(),
    })
}

/// The point `(z, (s e^{iθ} + z̄)/(1 + z s e^{iθ}))`, which has
/// `|(w − z̄)/(1 − zw)| = s`, i.e. `δ = 1 − s²`.
pub fn level_point(z: C64, s: f64, theta: f64) -> BidiskPoint {
    let e = C64::from_polar(s, theta);
    BidiskPoint::raw(z, (e + z.conj()) / (1.0 + z * e))
}

/// Sample grid for the Diederich–Fornæss sweep.
#[derive(Clone, Debug, Serialize)]
pub struct DfGrid {
    pub delta_min: f64,
    pub delta_max: f64,
    pub n_delta: usize,
    pub z_points: Vec<C64>,
    pub n_phase: usize,
}

impl DfGrid {
    /// `δ ∈ [1e-4, 0.2]`, log-spaced.
    pub fn standard() -> Self {
        Self {
            delta_min: 1e-4,
            delta_max: 0.2,
            n_delta: 30,
            z_points: vec![
                C64::new(0.0, 0.0),
                C64::new(0.3, 0.0),
                C64::new(0.0, 0.5),
                C64::new(-0.6, 0.2),
                C64::from_polar(0.8, 1.0),
            ],
            n_phase: 8,
        }
    }

    pub fn with_delta_range(mut self, lo: f64, hi: f64) -> Self {
        self.delta_min = lo;
        self.delta_max = hi;
        self
    }

    pub fn deltas(&self) -> Vec<f64> {
        if self.n_delta == 1 {
            return vec![self.delta_min];
        }
        let (a, b) = (self.delta_min.ln(), self.delta_max.ln());
        (0..self.n_delta).map(|i| (a + (b - a) * i as f64 / (self.n_delta - 1) as f64).exp()).collect()
    }

    pub fn points(&self) -> Vec<BidiskPoint> {
        let mut out = Vec::new();
        for d in self.deltas() {
            let s = (1.0 - d).sqrt();
            for z in &self.z_points {
                for k in 0..self.n_phase {
                    let theta = std::f64::consts::TAU * (k as f64 + 0.25) / self.n_phase as f64;
                    out.push(level_point(*z, s, theta));
                }
            }
        }
        out
    }
}

/// The grid point where `df_levi(η)` has its smallest eigenvalue.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DfWitness {
    pub eta: f64,
    pub point: BidiskPoint,
    pub delta: f64,
    pub min_eigenvalue: f64,
}

pub fn grid_min_eigenvalue(eta: f64, points: &[BidiskPoint]) -> DfWitness {
    points
        .iter()
        .map(|p| DfWitness { eta, point: *p, delta: delta_alt(p), min_eigenvalue: df_levi(eta, p).min_eigenvalue() })
        .min_by(|a, b| a.min_eigenvalue.total_cmp(&b.min_eigenvalue))
        .expect("nonempty grid")
}

/// Largest `η ∈ (0, 1]` whose Levi matrix stays nonnegative (to `−1e-9`) on
/// the grid, by bisection to [`DF_RESOLUTION`]. Returns the last feasible `η`.
pub fn df_exponent_estimate(grid: &DfGrid) -> f64 {
    let points = grid.points();
    let feasible = |eta: f64| grid_min_eigenvalue(eta, &points).min_eigenvalue >= -DF_TOL;
    if feasible(1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > DF_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `(η, grid minimum eigenvalue)` rows for `η` on `[eta_min, eta_max]`.
pub fn df_scan(grid: &DfGrid, eta_min: f64, eta_max: f64, step: f64) -> Vec<DfWitness> {
    let points = grid.points();
    let n = ((eta_max - eta_min) / step).round() as usize;
    (0..=n).map(|i| grid_min_eigenvalue(eta_min + step * i as f64, &points)).collect()
}

/// Result of the sublevel compactness check for `−√δ`.
#[derive(Clone, Debug, Serialize)]
pub struct ExhaustionReport {
    pub c: f64,
    /// `log((1 + √(1−c))/(1 − √(1−c)))`.
    pub distance_bound: f64,
    pub max_distance: f64,
    /// `tanh((R + bound)/2)` with `R` the hyperbolic circumradius of the domain.
    pub w_radius_bound: f64,
    pub max_w_modulus: f64,
    pub max_delta_drift: f64,
    pub all_reduced_in_domain: bool,
    pub samples: usize,
    pub pass: bool,
}

/// Samples points with `δ ≥ c` anywhere in the bidisk, moves them by the
/// element reducing `z` into the fundamental domain, and checks that `w`
/// stays within the hyperbolic distance bound of `z̄`.
pub fn exhaustion_check(group: &FuchsianGroup, c: f64, samples: usize, rng: &mut mc::Rng) -> Result<ExhaustionReport> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::InvalidArgument(format!("sublevel constant {c} outside (0, 1]")));
    }
    let s_max = (1.0 - c).sqrt();
    let distance_bound = ((1.0 + s_max) / (1.0 - s_max)).ln();
    let big_r = 2.0 * group.circumradius.atanh();
    let w_radius_bound = ((big_r + distance_bound) / 2.0).tanh();
    let mut report = ExhaustionReport {
        c,
        distance_bound,
        max_distance: 0.0,
        w_radius_bound,
        max_w_modulus: 0.0,
        max_delta_drift: 0.0,
        all_reduced_in_domain: true,
        samples,
        pass: false,
    };
    for _ in 0..samples {
        let z = C64::from_polar(0.98 * rng.gen::<f64>().sqrt(), rng.gen::<f64>() * std::f64::consts::TAU);
        let target = c + (1.0 - c) * rng.gen::<f64>();
        let p = level_point(z, (1.0 - target).max(0.0).sqrt(), rng.gen::<f64>() * std::f64::consts::TAU);
        let (zr, word) = group.reduce(DiskPoint::new(z)?)?;
        let back = word.inverse();
        let moved = BidiskPoint::raw(zr.value(), back.conj_apply_c(group, p.w));
        report.all_reduced_in_domain &= group.in_fundamental_domain(zr);
        report.max_distance = report.max_distance.max(hyperbolic_distance_c(moved.w, moved.z.conj()));
        report.max_w_modulus = report.max_w_modulus.max(moved.w.norm());
        report.max_delta_drift = report.max_delta_drift.max((delta(&moved) - delta(&p)).abs());
    }
    report.pass = report.all_reduced_in_domain
        && report.max_distance <= distance_bound + 1e-9
        && report.max_w_modulus <= w_radius_bound + 1e-12;
    Ok(report)
}

/// Largest `|δ(γ·p) − δ(p)|` over the given words and points.
pub fn gamma_invariance_defect(
    group: &FuchsianGroup,
    words: &[crate::fuchsian::GroupWord],
    points: &[BidiskPoint],
) -> f64 {
    let mut worst: f64 = 0.0;
    for w in words {
        let g = w.eval(group);
        for p in points {
            worst = worst.max((delta(&g.act_bidisk(*p)) - delta(p)).abs());
        }
    }
    worst
}

/// `n` points with `|z| < 0.7` and `δ` uniform in `[lo, hi]`, or
/// log-uniform when `log_scale`.
pub fn points_with_delta(rng: &mut mc::Rng, n: usize, lo: f64, hi: f64, log_scale: bool) -> Vec<BidiskPoint> {
    (0..n)
        .map(|_| {
            let z = C64::from_polar(0.7 * rng.gen::<f64>().sqrt(), rng.gen::<f64>() * std::f64::consts::TAU);
            let u = rng.gen::<f64>();
            let d = if log_scale { (lo.ln() + (hi.ln() - lo.ln()) * u).exp() } else { lo + (hi - lo) * u };
            level_point(z, (1.0 - d).sqrt(), rng.gen::<f64>() * std::f64::consts::TAU)
        })
        .collect()
}

/// `n_words` words of length `≤ max_len` and `n_points` points with `z` in
/// the fundamental domain and `|w| ≤ 0.95`.
///
/// Each letter shrinks the Euclidean margin of `z` by `e^{-L} ≈ 1/21`, and a
/// point at margin `m` determines `δ` only to about `ε/m` in f64, so the
/// attainable defect grows by that factor per letter.
pub fn invariance_fixture(
    group: &FuchsianGroup,
    n_words: usize,
    n_points: usize,
    max_len: usize,
    rng: &mut mc::Rng,
) -> (Vec<crate::fuchsian::GroupWord>, Vec<BidiskPoint>) {
    let words = (0..n_words)
        .map(|_| {
            let len = rng.gen_range(0..=max_len);
            group.random_word(len, rng)
        })
        .collect();
    let points = (0..n_points)
        .map(|_| {
            let z = group.sample_domain(rng);
            let w = C64::from_polar(0.95 * rng.gen::<f64>().sqrt(), rng.gen::<f64>() * std::f64::consts::TAU);
            BidiskPoint::raw(z, w)
        })
        .collect();
    (words, points)
}

/// Numeric Levi matrix of `ρ²` on the core against `(dz∧dz̄ + dw∧dw̄)/(1−|z|²)²`,
/// and the induced metric on the tangent vector `(v, v̄)` of the core
/// against `2|v|²/(1−|z|²)²`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CoreMetricReport {
    pub z: C64,
    pub entry_gap: f64,
    pub metric_gap: f64,
}

pub fn core_metric_check(z: C64, v: C64) -> Result<CoreMetricReport> {
    let p = BidiskPoint::new(z, z.conj())?;
    let numeric = levi_numeric(LeviTag::RhoSquared, &p)?;
    let a = 1.0 / (1.0 - z.norm_sqr());
    let expected = HermitianForm2::diagonal(a * a, a * a);
    let metric = numeric.metric([v, v.conj()]);
    let expected_metric = 2.0 * v.norm_sqr() * a * a;
    Ok(CoreMetricReport {
        z,
        entry_gap: numeric.max_entry_gap(&expected),
        metric_gap: (metric - expected_metric).abs() / v.norm_sqr().max(f64::MIN_POSITIVE),
    })
}

pub const MAX_RADIUS: f64 = FRAC_PI_2;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::wirtinger_gradient_real;
    use crate::fuchsian::octagon_group;
    use rand::SeedableRng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_point(rng: &mut mc::Rng, r: f64) -> BidiskPoint {
        let mut d = || C64::from_polar(r * rng.gen::<f64>().sqrt(), rng.gen::<f64>() * std::f64::consts::TAU);
        BidiskPoint::new(d(), d()).unwrap()
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(&BidiskPoint::new(c(0.0, 0.0), c(0.0, 0.0)).unwrap()), 1.0);
        let z = C64::from_polar(0.7, PI / 5.0);
        assert!((delta(&BidiskPoint::new(z, z.conj()).unwrap()) - 1.0).abs() < 1e-15);
        let w = c(0.3, -0.4);
        assert!((delta(&BidiskPoint::new(c(0.0, 0.0), w).unwrap()) - (1.0 - w.norm_sqr())).abs() < 1e-15);
    }

    #[test]
    fn delta_matches_alternate_formula() {
        let mut rng = mc::Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let p = random_point(&mut rng, 0.999);
            assert!((delta(&p) - delta_alt(&p)).abs() < 1e-13);
            let d = delta(&p);
            assert!(d > 0.0 && d <= 1.0);
        }
    }

    #[test]
    fn rho_expressions_agree() {
        let mut rng = mc::Rng::seed_from_u64(2);
        assert_eq!(rho(&BidiskPoint::new(c(0.0, 0.0), c(0.0, 0.0)).unwrap()), 0.0);
        let w = c(0.5, 0.6);
        assert!((rho(&BidiskPoint::new(c(0.0, 0.0), w).unwrap()) - w.norm().asin()).abs() < 1e-15);
        let mut sup: f64 = 0.0;
        for _ in 0..100_000 {
            let p = random_point(&mut rng, 0.999_999);
            let r = rho(&p);
            assert!((r - rho_arccos(&p)).abs() < 1e-12 || delta(&p) < 1e-6);
            assert!(r < MAX_RADIUS);
            sup = sup.max(r);
            let v = neg_sqrt_delta(&p);
            assert!((-1.0..0.0).contains(&v));
        }
        assert!(sup > 1.5);
    }

    #[test]
    fn closed_levi_at_origin() {
        let o = BidiskPoint::new(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        let h = levi_closed(LeviTag::NegLogDelta, &o).unwrap();
        assert!(h.max_entry_gap(&HermitianForm2::identity()) < 1e-15);
        let h = levi_closed(LeviTag::NegSqrtDelta, &o).unwrap();
        assert!(h.max_entry_gap(&(HermitianForm2::identity() * 0.5)) < 1e-15);
        assert!(matches!(levi_closed(LeviTag::Rho, &o), Err(Error::NearCore { .. })));
    }

    #[test]
    fn rho_levi_is_rank_one() {
        let mut rng = mc::Rng::seed_from_u64(3);
        for p in points_with_delta(&mut rng, 500, 0.05, 0.95, false) {
            let h = levi_closed(LeviTag::Rho, &p).unwrap();
            let n2 = h.frobenius_norm().powi(2);
            assert!(h.det().abs() < 1e-10 * n2);
            assert!(h.min_eigenvalue().abs() < 1e-10 * n2.sqrt());
            assert!((epsilon(&p).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn displayed_gradient_identity() {
        let mut rng = mc::Rng::seed_from_u64(4);
        for p in points_with_delta(&mut rng, 200, 0.05, 0.95, false) {
            let g = neg_log_delta_gradient(&p);
            let outer = HermitianForm2::rank_one(g) * (1.0 / (1.0 - delta(&p)));
            assert!(outer.max_entry_gap(&grad_outer_over_one_minus_delta(&p)) < 1e-10 * outer.frobenius_norm());
            let scaled = block_off_diagonal(&p) * (1.0 - delta_alt(&p));
            assert!(scaled.max_entry_gap(&block_off_diagonal_scaled(&p)) < 1e-12);
        }
    }

    #[test]
    fn dbar_rho_identity() {
        let mut rng = mc::Rng::seed_from_u64(5);
        for p in points_with_delta(&mut rng, 200, 0.05, 0.95, false) {
            let numeric = wirtinger_gradient_real(&|x| rho(&BidiskPoint::from_real(x)), p).unwrap();
            let closed = rho_gradient(&p);
            assert!((numeric.dzb - closed[0].conj()).norm() < 1e-6);
            assert!((numeric.dwb - closed[1].conj()).norm() < 1e-6);
            let u = wirtinger_gradient_real(&|x| -delta(&BidiskPoint::from_real(x)).ln(), p).unwrap();
            let g = neg_log_delta_gradient(&p);
            assert!((u.dz - g[0]).norm() < 1e-6 && (u.dw - g[1]).norm() < 1e-6);
        }
    }

    #[test]
    fn closed_forms_match_finite_differences() {
        let mut rng = mc::Rng::seed_from_u64(6);
        let tags = [
            LeviTag::NegLogDelta,
            LeviTag::Rho,
            LeviTag::RhoSquared,
            LeviTag::NegSqrtDelta,
            LeviTag::NegDeltaPower(0.3),
        ];
        for p in points_with_delta(&mut rng, 200, 0.05, 0.95, false) {
            for tag in tags {
                let r = levi_numeric_crosscheck(tag, &p).unwrap();
                let gap = r.relative_gap.unwrap();
                assert!(gap < 1e-6, "{tag} at {p:?}: {gap}");
                assert!(r.numeric.hermitian_defect() < 1e-10);
            }
        }
    }

    #[test]
    fn rho_levi_at_half_delta() {
        let p = level_point(c(0.2, 0.1), 0.5f64.sqrt(), 0.4);
        assert!((delta(&p) - 0.5).abs() < 1e-12);
        assert!(levi_numeric_crosscheck(LeviTag::Rho, &p).unwrap().max_entry_gap.unwrap() < 1e-5);
    }

    #[test]
    fn positivity() {
        let mut rng = mc::Rng::seed_from_u64(7);
        let mut pts = points_with_delta(&mut rng, 900, 0.01, 1.0, false);
        pts.extend(points_with_delta(&mut rng, 100, 1e-4, 0.01, false));
        for p in &pts {
            assert!(levi_closed(LeviTag::NegSqrtDelta, p).unwrap().min_eigenvalue() > 0.0);
            assert!(df_levi(0.5, p).min_eigenvalue() > 0.0);
            if delta_alt(p) < 1.0 - CORE_GUARD {
                assert!(levi_closed(LeviTag::RhoSquared, p).unwrap().min_eigenvalue() > 0.0);
            }
        }
        let z = c(0.3, -0.2);
        let on_core = BidiskPoint::new(z, z.conj()).unwrap();
        assert!(levi_numeric(LeviTag::RhoSquared, &on_core).unwrap().min_eigenvalue() > 0.0);
    }

    #[test]
    fn df_levi_at_half_is_neg_sqrt_delta() {
        let mut rng = mc::Rng::seed_from_u64(8);
        for _ in 0..200 {
            let p = random_point(&mut rng, 0.99);
            let a = df_levi(0.5, &p);
            let b = levi_closed(LeviTag::NegSqrtDelta, &p).unwrap();
            assert!(a.max_entry_gap(&b) < 1e-10 * a.frobenius_norm().max(1.0));
        }
    }

    /// Found by `grid_min_eigenvalue(0.55, DfGrid::standard().points())`.
    #[test]
    fn frozen_sharpness_witness() {
        let p = level_point(c(0.0, 0.0), (1.0 - 1e-4f64).sqrt(), std::f64::consts::TAU * 0.25 / 8.0);
        assert!(delta(&p) < 0.05);
        assert!(df_levi(0.55, &p).min_eigenvalue() < 0.0);
        let w = grid_min_eigenvalue(0.55, &DfGrid::standard().points());
        assert!(w.min_eigenvalue < 0.0 && w.delta < 0.05);
    }

    #[test]
    fn df_exponent_is_one_half() {
        let est = df_exponent_estimate(&DfGrid::standard());
        assert!((est - 0.5).abs() <= 5e-3, "{est}");
        let interior = df_exponent_estimate(&DfGrid::standard().with_delta_range(0.5, 1.0));
        assert!(interior > 0.5);
    }

    #[test]
    fn grid_minimum_is_monotone_in_eta() {
        let rows = df_scan(&DfGrid::standard(), 0.3, 0.7, 0.01);
        for pair in rows.windows(2) {
            assert!(pair[1].min_eigenvalue <= pair[0].min_eigenvalue + 1e-15);
        }
    }

    #[test]
    fn exhaustion_bounds() {
        let g = octagon_group().unwrap();
        let mut rng = mc::Rng::seed_from_u64(9);
        let r = exhaustion_check(&g, 1.0, 500, &mut rng).unwrap();
        assert_eq!(r.distance_bound, 0.0);
        assert!(r.max_distance < 1e-7 && r.pass, "{r:?}");
        let r = exhaustion_check(&g, 0.75, 10_000, &mut rng).unwrap();
        assert!((r.distance_bound - 3f64.ln()).abs() < 1e-14);
        assert!(r.pass && r.max_delta_drift < 1e-10, "{r:?}");
        let r = exhaustion_check(&g, 0.99, 10_000, &mut rng).unwrap();
        assert!(r.pass && r.max_distance <= 0.2007, "{r:?}");
        assert!(exhaustion_check(&g, 0.0, 1, &mut rng).is_err());
    }

    #[test]
    fn delta_is_gamma_invariant() {
        let g = octagon_group().unwrap();
        let mut rng = mc::Rng::seed_from_u64(10);
        let (words, pts) = invariance_fixture(&g, 100, 100, 2, &mut rng);
        assert!(words.iter().any(|w| w.len() == 2));
        let d = gamma_invariance_defect(&g, &words, &pts);
        assert!(d < 1e-12, "{d:e}");
    }

    #[test]
    fn core_metric() {
        let mut rng = mc::Rng::seed_from_u64(11);
        for _ in 0..50 {
            let z = C64::from_polar(0.8 * rng.gen::<f64>().sqrt(), rng.gen::<f64>() * std::f64::consts::TAU);
            let v = C64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU);
            let r = core_metric_check(z, v).unwrap();
            assert!(r.entry_gap < 1e-4 && r.metric_gap < 1e-4, "{r:?}");
        }
    }
}
