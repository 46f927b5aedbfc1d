//! Level sets `M_t = {δ = cos²t}` of the tube, their trivializations over
//! the fundamental domain, and the integrals of the Liouville argument for
//! bounded holomorphic functions on the cover.
//!
//! Orientation: `dx∧dy∧dθ` on `R × ∂𝔻` and `dx₁∧dy₁∧dx₂∧dy₂` on the bidisk
//! are positive.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use rand::Rng as _;
use serde::Serialize;

use crate::calculus::{
    boundary_integral, exterior_derivative, hermitian_to_form, integrate_box, pullback_at, wirtinger_gradient, Box4,
    Domain, FnForm, FormField, FormValue, HermitianForm2, Point4,
};
use crate::error::{Error, Result};
use crate::fuchsian::{FuchsianGroup, GENUS};
use crate::mc::{self, Estimate};
use crate::moebius::{BidiskPoint, DiskMoebius, DiskPoint, C64};
use crate::tube::{self, LeviTag};

/// θ strata per Monte Carlo sample.
pub const THETA_STRATA: usize = 8;

/// `ι_t(z, e^{iθ}) = (z, (sin t·e^{iθ} + z̄)/(1 + z sin t·e^{iθ}))`.
pub fn iota(t: f64, z: DiskPoint, theta: f64) -> BidiskPoint {
    tube::level_point(z.value(), t.sin(), theta)
}

/// `κ_t(e^{iθ'}, w) = ((sin t·e^{iθ'} + w̄)/(1 + w sin t·e^{iθ'}), w)`.
pub fn kappa(t: f64, theta_prime: f64, w: DiskPoint) -> BidiskPoint {
    let p = tube::level_point(w.value(), t.sin(), theta_prime);
    BidiskPoint::raw(p.w, p.z)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChartKind {
    /// Over `R × ∂𝔻`.
    Iota,
    /// Over `∂𝔻 × R'`.
    Kappa,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LevelChart {
    pub t: f64,
    pub kind: ChartKind,
}

impl LevelChart {
    pub fn new(t: f64, kind: ChartKind) -> Result<Self> {
        if !(t > 0.0 && t <= FRAC_PI_2) {
            return Err(Error::InvalidArgument(format!("tube radius {t} outside (0, π/2]")));
        }
        Ok(Self { t, kind })
    }

    /// Image of the base point `a` and circle parameter `theta`.
    pub fn map(&self, a: DiskPoint, theta: f64) -> BidiskPoint {
        match self.kind {
            ChartKind::Iota => iota(self.t, a, theta),
            ChartKind::Kappa => kappa(self.t, theta, a),
        }
    }

    /// The chart in real coordinates `(Re a, Im a, θ) ↦ ℝ⁴`.
    pub fn real_map(&self) -> impl Fn(&[f64]) -> Point4 + Sync + '_ {
        move |q: &[f64]| {
            let a = C64::new(q[0], q[1]);
            let s = self.t.sin();
            let p = tube::level_point(a, s, q[2]);
            match self.kind {
                ChartKind::Iota => p.to_real(),
                ChartKind::Kappa => BidiskPoint::raw(p.w, p.z).to_real(),
            }
        }
    }
}

/// Bounded holomorphic test functions on `𝔻×𝔻`.
#[derive(Clone, Debug)]
pub enum BoundedHoloFn {
    Const(C64),
    Z,
    W,
    /// `a z + b w + c`.
    Linear {
        a: C64,
        b: C64,
        c: C64,
    },
    Sum(Box<BoundedHoloFn>, Box<BoundedHoloFn>),
    Product(Box<BoundedHoloFn>, Box<BoundedHoloFn>),
    Scale(C64, Box<BoundedHoloFn>),
    MoebiusZ(DiskMoebius),
    MoebiusW(DiskMoebius),
    /// `Π (z − a_k)/(1 − ā_k z)`.
    BlaschkeZ(Vec<C64>),
    BlaschkeW(Vec<C64>),
}

fn blaschke(zeros: &[C64], x: C64) -> (C64, C64) {
    let (mut value, mut deriv) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    for a in zeros {
        let den = 1.0 - a.conj() * x;
        let factor = (x - a) / den;
        let factor_deriv = (1.0 - a.norm_sqr()) / (den * den);
        deriv = deriv * factor + value * factor_deriv;
        value *= factor;
    }
    (value, deriv)
}

impl BoundedHoloFn {
    pub fn one() -> Self {
        Self::Const(C64::new(1.0, 0.0))
    }

    pub fn z_plus_w_over_4() -> Self {
        Self::Linear { a: C64::new(0.25, 0.0), b: C64::new(0.25, 0.0), c: C64::new(0.0, 0.0) }
    }

    pub fn zw() -> Self {
        Self::Product(Box::new(Self::Z), Box::new(Self::W))
    }

    /// Value and `(∂f/∂z, ∂f/∂w)`.
    pub fn eval_with_gradient(&self, z: C64, w: C64) -> (C64, [C64; 2]) {
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        match self {
            Self::Const(c) => (*c, [zero, zero]),
            Self::Z => (z, [one, zero]),
            Self::W => (w, [zero, one]),
            Self::Linear { a, b, c } => (a * z + b * w + c, [*a, *b]),
            Self::Sum(f, g) => {
                let (fv, fg) = f.eval_with_gradient(z, w);
                let (gv, gg) = g.eval_with_gradient(z, w);
                (fv + gv, [fg[0] + gg[0], fg[1] + gg[1]])
            }
            Self::Product(f, g) => {
                let (fv, fg) = f.eval_with_gradient(z, w);
                let (gv, gg) = g.eval_with_gradient(z, w);
                (fv * gv, [fg[0] * gv + fv * gg[0], fg[1] * gv + fv * gg[1]])
            }
            Self::Scale(k, f) => {
                let (v, g) = f.eval_with_gradient(z, w);
                (k * v, [k * g[0], k * g[1]])
            }
            Self::MoebiusZ(m) => (m.apply_c(z), [m.derivative(z), zero]),
            Self::MoebiusW(m) => (m.apply_c(w), [zero, m.derivative(w)]),
            Self::BlaschkeZ(a) => {
                let (v, d) = blaschke(a, z);
                (v, [d, zero])
            }
            Self::BlaschkeW(a) => {
                let (v, d) = blaschke(a, w);
                (v, [zero, d])
            }
        }
    }

    pub fn eval(&self, p: &BidiskPoint) -> C64 {
        self.eval_with_gradient(p.z, p.w).0
    }

    pub fn gradient(&self, p: &BidiskPoint) -> [C64; 2] {
        self.eval_with_gradient(p.z, p.w).1
    }

    /// A bound for `sup |f|` on the bidisk from the structure of `f`.
    pub fn structural_bound(&self) -> f64 {
        match self {
            Self::Const(c) => c.norm(),
            Self::Z | Self::W => 1.0,
            Self::Linear { a, b, c } => a.norm() + b.norm() + c.norm(),
            Self::Sum(f, g) => f.structural_bound() + g.structural_bound(),
            Self::Product(f, g) => f.structural_bound() * g.structural_bound(),
            Self::Scale(k, f) => k.norm() * f.structural_bound(),
            Self::MoebiusZ(_) | Self::MoebiusW(_) | Self::BlaschkeZ(_) | Self::BlaschkeW(_) => 1.0,
        }
    }

    /// Largest `|f|` over `samples` uniform points of the bidisk.
    pub fn sampled_sup(&self, samples: usize, rng: &mut mc::Rng) -> f64 {
        let mut disk = || C64::from_polar(rng.gen::<f64>().sqrt(), rng.gen::<f64>() * TAU);
        (0..samples).map(|_| self.eval_with_gradient(disk(), disk()).0.norm()).fold(0.0, f64::max)
    }

    /// Numeric Wirtinger derivatives at `points`: the largest `|∂̄f|` and the
    /// largest gap between numeric and closed `∂f`.
    pub fn holomorphy_certificate(&self, points: &[BidiskPoint]) -> Result<HolomorphyCertificate> {
        let mut cert = HolomorphyCertificate { max_dbar: 0.0, max_gradient_gap: 0.0, points: points.len() };
        for p in points {
            let g = wirtinger_gradient(&|x: Point4| self.eval(&BidiskPoint::from_real(x)), *p)?;
            let closed = self.gradient(p);
            cert.max_dbar = cert.max_dbar.max(g.dzb.norm()).max(g.dwb.norm());
            cert.max_gradient_gap = cert.max_gradient_gap.max((g.dz - closed[0]).norm()).max((g.dw - closed[1]).norm());
        }
        Ok(cert)
    }
}

impl fmt::Display for BoundedHoloFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coef = |c: &C64| if c.im == 0.0 { c.re.to_string() } else { format!("({c})") };
        match self {
            Self::Const(c) => write!(f, "{}", coef(c)),
            Self::Z => write!(f, "z"),
            Self::W => write!(f, "w"),
            Self::Linear { a, b, c } if *c == C64::new(0.0, 0.0) => write!(f, "{}z+{}w", coef(a), coef(b)),
            Self::Linear { a, b, c } => write!(f, "{}z+{}w+{}", coef(a), coef(b), coef(c)),
            Self::Sum(a, b) => write!(f, "({a}+{b})"),
            Self::Product(a, b) => write!(f, "{a}{b}"),
            Self::Scale(k, a) => write!(f, "({k})·{a}"),
            Self::MoebiusZ(_) => write!(f, "m(z)"),
            Self::MoebiusW(_) => write!(f, "m(w)"),
            Self::BlaschkeZ(a) => write!(f, "B{}(z)", a.len()),
            Self::BlaschkeW(a) => write!(f, "B{}(w)", a.len()),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HolomorphyCertificate {
    pub max_dbar: f64,
    pub max_gradient_gap: f64,
    pub points: usize,
}

fn nan_form(degree: usize) -> FormValue {
    FormValue::zero(4, degree) * f64::NAN
}

/// `β |f|² d^c(−log δ) ∧ i∂∂̄(−log δ)`.
pub fn level_form_at(f: &BoundedHoloFn, beta: f64, p: &BidiskPoint) -> FormValue {
    let dc = FormValue::dc_real(tube::neg_log_delta_gradient(p));
    let levi = hermitian_to_form(&tube::block_diagonal(p));
    dc.wedge(&levi) * (beta * f.eval(p).norm_sqr())
}

/// `i∂f ∧ ∂̄f̄ ∧ d^c(−δ)`.
pub fn gradient_form_at(f: &BoundedHoloFn, p: &BidiskPoint) -> FormValue {
    let outer = hermitian_to_form(&HermitianForm2::rank_one(f.gradient(p)));
    let dc = FormValue::dc_real(tube::neg_log_delta_gradient(p)) * tube::delta(p);
    outer.wedge(&dc)
}

/// The `dx∧dy∧dθ` coefficient of the `ι_t`-pullback of a 3-form field.
fn pulled_coefficient(
    chart: &LevelChart,
    form: impl Fn(&BidiskPoint) -> FormValue + Sync,
    z: C64,
    theta: f64,
) -> Result<C64> {
    let field =
        FnForm::new(4, 3, Domain::Everywhere, |x: &[f64]| form(&BidiskPoint::from_real([x[0], x[1], x[2], x[3]])));
    let map = chart.real_map();
    Ok(pullback_at(&field, &map, &[z.re, z.im, theta])?.coeff(0b111))
}

/// `4 sin²t |f(ι_t)|²/(1 − |z|²)²`, the pulled-back density predicted by the
/// level-set identity.
pub fn level_density(f: &BoundedHoloFn, t: f64, z: C64, theta: f64) -> f64 {
    let p = tube::level_point(z, t.sin(), theta);
    let s = 1.0 - z.norm_sqr();
    4.0 * t.sin().powi(2) * f.eval(&p).norm_sqr() / (s * s)
}

/// Numeric pullback of `cos²t |f|² d^c(−log δ) ∧ i∂∂̄(−log δ)` under `ι_t`
/// against [`level_density`]; worst relative gap over `samples`.
pub fn pullback_identity_check(f: &BoundedHoloFn, t: f64, samples: &[(C64, f64)]) -> Result<f64> {
    if !(0.3..=1.5).contains(&t) {
        return Err(Error::InvalidArgument(format!("t = {t} outside [0.3, 1.5]")));
    }
    let chart = LevelChart::new(t, ChartKind::Iota)?;
    let beta = t.cos().powi(2);
    let mut worst: f64 = 0.0;
    for &(z, theta) in samples {
        let got = pulled_coefficient(&chart, |p| level_form_at(f, beta, p), z, theta)?;
        let want = level_density(f, t, z, theta);
        let gap = (got - want).norm() / want.max(f64::MIN_POSITIVE);
        worst = worst.max(if want == 0.0 { got.norm() } else { gap });
    }
    Ok(worst)
}

/// `(z, θ)` pairs with `z` uniform in the fundamental domain.
pub fn chart_samples(group: &FuchsianGroup, n: usize, rng: &mut mc::Rng) -> Vec<(C64, f64)> {
    (0..n).map(|_| (group.sample_domain(rng), rng.gen::<f64>() * TAU)).collect()
}

/// How the level-integral integrand is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Integrand {
    /// Numeric pullback of the 3-form, divided by `sin²t`.
    Pullback,
    /// [`level_density`] divided by `sin²t`.
    Closed,
}

fn stratified_theta_mean(rng: &mut mc::Rng, g: impl Fn(f64) -> f64) -> f64 {
    let mut total = 0.0;
    for k in 0..THETA_STRATA {
        total += g(TAU * (k as f64 + rng.gen::<f64>()) / THETA_STRATA as f64);
    }
    total / THETA_STRATA as f64
}

/// `I(t) = ∫_{R×∂𝔻} |f∘ι_t|² · 2 i dz∧dz̄ ∧ dθ/(1−|z|²)²`, by rejection from
/// the circumdisk of `R` with `θ` stratified into equal arcs.
pub fn level_integral(
    group: &FuchsianGroup,
    f: &BoundedHoloFn,
    t: f64,
    samples: u64,
    task_seed: u64,
    shards: usize,
    integrand: Integrand,
) -> Result<Estimate> {
    if !(0.3..=1.5).contains(&t) {
        return Err(Error::InvalidArgument(format!("t = {t} outside [0.3, 1.5]")));
    }
    let chart = LevelChart::new(t, ChartKind::Iota)?;
    let beta = t.cos().powi(2);
    let norm = 1.0 / t.sin().powi(2);
    let est = mc::sharded_mean(samples, task_seed, shards, |rng| {
        let z = group.sample_envelope(rng);
        if !group.contains_c(z) {
            return 0.0;
        }
        stratified_theta_mean(rng, |theta| match integrand {
            Integrand::Closed => level_density(f, t, z, theta) * norm,
            Integrand::Pullback => {
                pulled_coefficient(&chart, |p| level_form_at(f, beta, p), z, theta).map_or(f64::NAN, |c| c.re * norm)
            }
        })
    })
    .scaled(group.envelope_area() * TAU);
    if !est.value.is_finite() {
        return Err(Error::NonFinite(format!("level integral of {f} at t = {t}")));
    }
    Ok(est)
}

/// `4π²(2g − 2)`, the constant in the bound `I ≤ 4π² sup|f|² (2g − 2)`.
pub fn bound_prefactor(genus: u32) -> f64 {
    4.0 * PI * PI * (2.0 * f64::from(genus) - 2.0)
}

/// Exact `I(t)` for `f ≡ 1`: `2π · ∫_R 4 dx dy/(1 − |z|²)² = 2π · 2 · 2π(2g − 2)/2`.
pub fn constant_level_integral(genus: u32) -> f64 {
    TAU * 2.0 * crate::fuchsian::gauss_bonnet_area(genus) / 2.0
}

/// Measured Hardy constant against the bound's prefactor.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HardyConstantReport {
    pub estimate: Estimate,
    pub exact: f64,
    pub bound_prefactor: f64,
    /// `|exact − bound_prefactor| > 1e-12·exact`.
    pub prefactor_mismatch: bool,
    pub within_3_sigma: bool,
}

pub fn hardy_constant_report(estimate: Estimate) -> HardyConstantReport {
    let exact = constant_level_integral(GENUS);
    let bound_prefactor = bound_prefactor(GENUS);
    HardyConstantReport {
        estimate,
        exact,
        bound_prefactor,
        prefactor_mismatch: (exact - bound_prefactor).abs() > 1e-12 * exact,
        within_3_sigma: estimate.within_sigma(exact, 3.0),
    }
}

/// One row of the boundary trend of `J(t) = ∫_{M_t} i∂f∧∂̄f̄∧d^c(−δ)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrendRow {
    pub t: f64,
    pub value: f64,
    pub stderr: f64,
    /// `J(t)/sin²t`.
    pub per_sin2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Trend {
    Increasing,
    Decreasing,
    Flat,
    Mixed,
}

/// Monte Carlo `J(t)` on a grid of `t ∈ [0.5, 1.55]` via numeric `ι_t`
/// pullback.
pub fn gradient_boundary_trend(
    group: &FuchsianGroup,
    f: &BoundedHoloFn,
    ts: &[f64],
    samples: u64,
    task_seed: u64,
    shards: usize,
) -> Result<Vec<TrendRow>> {
    let mut rows = Vec::with_capacity(ts.len());
    for (i, &t) in ts.iter().enumerate() {
        if !(0.5..=1.55).contains(&t) {
            return Err(Error::InvalidArgument(format!("t = {t} outside [0.5, 1.55]")));
        }
        let chart = LevelChart::new(t, ChartKind::Iota)?;
        let est = mc::sharded_mean(samples, mc::splitmix64(task_seed ^ i as u64), shards, |rng| {
            let z = group.sample_envelope(rng);
            if !group.contains_c(z) {
                return 0.0;
            }
            stratified_theta_mean(rng, |theta| {
                pulled_coefficient(&chart, |p| gradient_form_at(f, p), z, theta).map_or(f64::NAN, |c| c.re)
            })
        })
        .scaled(group.envelope_area() * TAU);
        if !est.value.is_finite() {
            return Err(Error::NonFinite(format!("trend of {f} at t = {t}")));
        }
        rows.push(TrendRow { t, value: est.value, stderr: est.stderr, per_sin2: est.value / t.sin().powi(2) });
    }
    Ok(rows)
}

/// Direction of the trend, steps smaller than `k` combined stderr count as flat.
pub fn classify_trend(rows: &[TrendRow], k: f64) -> Trend {
    let (mut up, mut down) = (false, false);
    for pair in rows.windows(2) {
        let diff = pair[1].value - pair[0].value;
        let noise = k * pair[0].stderr.hypot(pair[1].stderr);
        if diff > noise {
            up = true;
        } else if diff < -noise {
            down = true;
        }
    }
    match (up, down) {
        (true, false) => Trend::Increasing,
        (false, true) => Trend::Decreasing,
        (false, false) => Trend::Flat,
        (true, true) => Trend::Mixed,
    }
}

/// `J(π/2)` for `f` depending on `z` alone with `|f'| ≡ 1`, e.g. `f = z`:
/// the circle average of the Poisson kernel leaves `4π · EuclideanArea(R)`.
pub fn trend_limit_for_z(group: &FuchsianGroup) -> f64 {
    4.0 * PI * group.euclidean_area()
}

/// `ω_f = d^c|f|² ∧ i∂ρ∧∂̄ρ + |f|² d^cρ ∧ i∂∂̄ρ`.
pub fn level_three_form(f: &BoundedHoloFn, p: &BidiskPoint) -> Result<FormValue> {
    let (v, g) = f.eval_with_gradient(p.z, p.w);
    let abs2_grad = g.map(|x| v.conj() * x);
    let rho_grad = tube::rho_gradient(p);
    let levi = hermitian_to_form(&tube::levi_closed(LeviTag::Rho, p)?);
    let first = FormValue::dc_real(abs2_grad).wedge(&hermitian_to_form(&HermitianForm2::rank_one(rho_grad)));
    let second = FormValue::dc_real(rho_grad).wedge(&levi) * v.norm_sqr();
    Ok(first + second)
}

/// `i∂∂̄|f|² ∧ dρ∧d^cρ + |f|² (i∂∂̄ρ)²`.
pub fn level_four_form(f: &BoundedHoloFn, p: &BidiskPoint) -> Result<FormValue> {
    let (v, g) = f.eval_with_gradient(p.z, p.w);
    let rho_grad = tube::rho_gradient(p);
    let levi = hermitian_to_form(&tube::levi_closed(LeviTag::Rho, p)?);
    let first = hermitian_to_form(&HermitianForm2::rank_one(g))
        .wedge(&FormValue::d_real(rho_grad))
        .wedge(&FormValue::dc_real(rho_grad));
    Ok(first + levi.wedge(&levi) * v.norm_sqr())
}

/// `ω_f` as a form field on the bidisk.
pub fn level_field(f: &BoundedHoloFn) -> impl FormField + '_ {
    FnForm::new(4, 3, Domain::Bidisk, move |x: &[f64]| {
        level_three_form(f, &BidiskPoint::from_real([x[0], x[1], x[2], x[3]])).unwrap_or_else(|_| nan_form(3))
    })
}

/// Boxes away from the core used by the Stokes suite.
pub fn stokes_fixture_boxes() -> Vec<Box4> {
    [[0.5, 0.0, 0.0, 0.3], [-0.2, 0.1, 0.6, 0.0], [0.1, 0.0, -0.4, 0.4]]
        .into_iter()
        .map(|c| Box4::around(c, 0.05).expect("fixture box inside the bidisk"))
        .collect()
}

/// Largest `δ` over a `5⁴` lattice of the box, corners included.
pub fn max_delta_on_box(b: &Box4) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..625usize {
        let mut x = [0.0; 4];
        for (k, xk) in x.iter_mut().enumerate() {
            let step = (i / 5usize.pow(k as u32)) % 5;
            *xk = b.lo[k] + (b.hi[k] - b.lo[k]) * step as f64 / 4.0;
        }
        worst = worst.max(tube::delta(&BidiskPoint::from_real(x)));
    }
    worst
}

/// Three evaluations of `∫_B i∂∂̄|f|²∧dρ∧d^cρ + |f|²(i∂∂̄ρ)²`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StokesEvaluation {
    pub grid: usize,
    /// Midpoint rule on the closed-form 4-form.
    pub direct: C64,
    /// Midpoint rule on the finite-difference `dω_f`.
    pub exterior: C64,
    /// `∫_∂B ω_f`.
    pub boundary: C64,
    pub flux_scale: f64,
    /// Largest pairwise difference over `max(|·|, flux_scale)`.
    pub gap: f64,
}

pub fn stokes_evaluate(f: &BoundedHoloFn, b: &Box4, grid: usize) -> Result<StokesEvaluation> {
    let field = level_field(f);
    let direct = integrate_box(b, grid, |x| Ok(level_four_form(f, &BidiskPoint::from_real(*x))?.top()))?;
    let exterior = integrate_box(b, grid, |x| Ok(exterior_derivative(&field, x)?.top()))?;
    let (boundary, flux_scale) = boundary_integral(&field, b, grid)?;
    let vals = [direct, exterior, boundary];
    let scale = vals.iter().map(|v| v.norm()).fold(flux_scale, f64::max).max(f64::MIN_POSITIVE);
    let gap = [(0, 1), (0, 2), (1, 2)].iter().map(|&(i, j)| (vals[i] - vals[j]).norm()).fold(0.0, f64::max) / scale;
    if !gap.is_finite() {
        return Err(Error::NonFinite(format!("Stokes balance of {f}")));
    }
    Ok(StokesEvaluation { grid, direct, exterior, boundary, flux_scale, gap })
}

#[derive(Clone, Debug, Serialize)]
pub struct StokesBoxReport {
    pub f: String,
    pub lo: Point4,
    pub hi: Point4,
    pub max_delta: f64,
    pub coarse: StokesEvaluation,
    pub fine: StokesEvaluation,
    /// Fine gap ≤ coarse gap, or both at the rounding floor.
    pub converged: bool,
    pub pass: bool,
}

/// Relative tolerance of the three-way agreement.
pub const STOKES_TOL: f64 = 1e-2;

/// Gaps below this are treated as exact agreement in the convergence test.
pub const STOKES_FLOOR: f64 = 1e-9;

/// Stokes balance for `ω_f` on each box at `grid/2` and `grid` cells per axis.
pub fn stokes_suite(f: &BoundedHoloFn, boxes: &[Box4], grid: usize) -> Result<Vec<StokesBoxReport>> {
    boxes
        .iter()
        .map(|b| {
            let max_delta = max_delta_on_box(b);
            if max_delta >= 0.95 {
                return Err(Error::InvalidArgument(format!("box reaches δ = {max_delta} ≥ 0.95")));
            }
            let coarse = stokes_evaluate(f, b, grid / 2)?;
            let fine = stokes_evaluate(f, b, grid)?;
            let converged = fine.gap <= coarse.gap || fine.gap < STOKES_FLOOR;
            Ok(StokesBoxReport {
                f: f.to_string(),
                lo: b.lo,
                hi: b.hi,
                max_delta,
                pass: fine.gap < STOKES_TOL && converged,
                coarse,
                fine,
                converged,
            })
        })
        .collect()
}
