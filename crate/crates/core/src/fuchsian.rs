//! The genus-2 surface group of the regular hyperbolic octagon with vertex
//! angles π/4, its Dirichlet domain at the origin, greedy reduction, random
//! words and the Monte Carlo area of the domain.
//!
//! Sides are numbered `j = 0..8` by the direction `jπ/4` of their midpoints;
//! side `j` is the bisector between `0` and `T_j·0`, where `T_j` is the
//! translation along the diameter at angle `jπ/4`. Generator `k ∈ 0..4` is
//! `T_k`, and `T_{k+4} = T_k⁻¹`. Opposite sides are paired.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI, TAU};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{self, Estimate, KahanSum};
use crate::moebius::{hyperbolic_distance_c, DiskMoebius, DiskPoint, C64};

pub const SIDES: usize = 8;
pub const GENUS: u32 = 2;

/// Maximum number of greedy steps before `reduce` gives up.
pub const REDUCE_CAP: usize = 10_000;

/// Required decrease of the distance to the origin for a reduction step.
const REDUCE_IMPROVEMENT: f64 = 1e-13;

/// Slack (in the squared pseudo-distance comparison) for points on a side.
const TIE_TOL: f64 = 1e-14;

/// One letter of a word: generator index `0..4` and exponent `±1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub generator: u8,
    pub exponent: i8,
}

impl Letter {
    /// The letter of the side pairing `T_j`, `j ∈ 0..8`.
    pub fn from_side(j: usize) -> Self {
        if j < 4 {
            Self { generator: j as u8, exponent: 1 }
        } else {
            Self { generator: (j - 4) as u8, exponent: -1 }
        }
    }

    pub fn side(self) -> usize {
        self.generator as usize + if self.exponent > 0 { 0 } else { 4 }
    }

    pub fn inverse(self) -> Self {
        Self { generator: self.generator, exponent: -self.exponent }
    }
}

/// A word in the generators; it evaluates to `L₁ ∘ L₂ ∘ … ∘ Lₙ`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupWord {
    pub letters: Vec<Letter>,
}

impl GroupWord {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    /// Concatenation `self · other`.
    pub fn then(&self, other: &GroupWord) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self { letters }
    }

    pub fn eval(&self, group: &FuchsianGroup) -> DiskMoebius {
        self.letters.iter().fold(DiskMoebius::identity(), |acc, l| acc.compose(&group.letter(*l)))
    }

    /// Applies the word to a point letter by letter (innermost first), which
    /// stays well conditioned for long words where the product matrix does not.
    pub fn apply_c(&self, group: &FuchsianGroup, z: C64) -> C64 {
        self.letters.iter().rev().fold(z, |z, l| group.letter(*l).apply_c(z))
    }

    pub fn conj_apply_c(&self, group: &FuchsianGroup, w: C64) -> C64 {
        self.letters.iter().rev().fold(w, |w, l| group.letter(*l).conj_apply_c(w))
    }
}

/// The side-pairing group of the regular octagon.
#[derive(Clone, Debug, Serialize)]
pub struct FuchsianGroup {
    generators: [DiskMoebius; 4],
    pairings: [DiskMoebius; SIDES],
    centers: [C64; SIDES],
    /// Interior angle at each vertex, radians.
    pub vertex_angle: f64,
    /// Euclidean radius of the octagon's vertices.
    pub circumradius: f64,
    /// Euclidean radius of the side midpoints.
    pub inradius: f64,
    /// Common translation length of the generators.
    pub translation_length: f64,
}

/// Interior angle at a vertex of the regular octagon whose vertices sit at
/// Euclidean radius `r`. Computed from the geodesic sides: the vertex is
/// moved to the origin, where geodesics are straight.
pub fn regular_octagon_angle(r: f64) -> f64 {
    let v = |k: i32| C64::from_polar(r, FRAC_PI_8 + f64::from(k) * FRAC_PI_4);
    angle_at(v(1), v(0), v(2))
}

/// Hyperbolic angle at `vertex` between the geodesics to `p` and `q`.
fn angle_at(vertex: C64, p: C64, q: C64) -> f64 {
    let to_origin = |x: C64| (x - vertex) / (1.0 - vertex.conj() * x);
    let (a, b) = (to_origin(p), to_origin(q));
    (b / a).arg().abs()
}

/// Finds the circumradius with vertex angle `target` by bisection; the angle
/// decreases from `3π/4` (Euclidean limit) to `0` as `r → 1`.
pub fn circumradius_for_angle(target: f64) -> Result<f64> {
    let (mut lo, mut hi) = (1e-6, 1.0 - 1e-12);
    let (alo, ahi) = (regular_octagon_angle(lo), regular_octagon_angle(hi));
    if !(alo > target && ahi < target) {
        return Err(Error::Construction(format!("vertex angle {target} not bracketed by [{ahi}, {alo}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if regular_octagon_angle(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The real point where the geodesic through `r e^{±iπ/8}` crosses `[0, 1)`.
fn side_midpoint(r: f64) -> f64 {
    // circle orthogonal to ∂𝔻 centered at c > 1 on the real axis
    let c = (r * r + 1.0) / (2.0 * r * FRAC_PI_8.cos());
    c - (c * c - 1.0).sqrt()
}

pub fn octagon_group() -> Result<FuchsianGroup> {
    let vertex_angle = FRAC_PI_4;
    let circumradius = circumradius_for_angle(vertex_angle)?;
    let inradius = side_midpoint(circumradius);
    let translation_length = 4.0 * inradius.atanh();
    let pairings: [DiskMoebius; SIDES] =
        std::array::from_fn(|j| DiskMoebius::translation(j as f64 * FRAC_PI_4, translation_length));
    let generators = [pairings[0], pairings[1], pairings[2], pairings[3]];
    let centers = std::array::from_fn(|j| pairings[j].apply_c(C64::new(0.0, 0.0)));
    let group =
        FuchsianGroup { generators, pairings, centers, vertex_angle, circumradius, inradius, translation_length };
    let mismatch = group.side_pairing_error();
    if mismatch > 1e-9 {
        return Err(Error::Construction(format!("side pairing mismatch {mismatch:e}")));
    }
    Ok(group)
}

/// A step of a vertex cycle: the pairing applied and the side it left from.
#[derive(Clone, Debug, Serialize)]
pub struct VertexCycle {
    pub vertices: Vec<usize>,
    pub sides: Vec<usize>,
    pub product: DiskMoebius,
    pub angle_sum: f64,
}

impl FuchsianGroup {
    pub fn generators(&self) -> &[DiskMoebius; 4] {
        &self.generators
    }

    /// Side pairing `T_j`; it maps side `j + 4 (mod 8)` onto side `j`.
    pub fn pairing(&self, j: usize) -> DiskMoebius {
        self.pairings[j % SIDES]
    }

    pub fn letter(&self, l: Letter) -> DiskMoebius {
        self.pairings[l.side()]
    }

    /// The orbit points `T_j·0` whose bisectors bound the Dirichlet domain.
    pub fn centers(&self) -> &[C64; SIDES] {
        &self.centers
    }

    /// Vertex `k` sits at angle `π/8 + kπ/4`; side `j` joins vertices `j−1` and `j`.
    pub fn vertex(&self, k: usize) -> C64 {
        C64::from_polar(self.circumradius, FRAC_PI_8 + (k % SIDES) as f64 * FRAC_PI_4)
    }

    pub fn side_vertices(&self, j: usize) -> (C64, C64) {
        (self.vertex((j + SIDES - 1) % SIDES), self.vertex(j % SIDES))
    }

    /// Interior angles at the 8 vertices, each measured geometrically.
    pub fn interior_angles(&self) -> [f64; SIDES] {
        std::array::from_fn(|k| angle_at(self.vertex(k), self.vertex(k + SIDES - 1), self.vertex(k + 1)))
    }

    pub fn angle_sum(&self) -> f64 {
        self.interior_angles().iter().sum()
    }

    /// Largest distance between `T_j(side j+4)` and `side j`, compared as
    /// vertex sets.
    pub fn side_pairing_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..SIDES {
            let (p, q) = self.side_vertices((j + 4) % SIDES);
            let (a, b) = self.side_vertices(j);
            let (ip, iq) = (self.pairings[j].apply_c(p), self.pairings[j].apply_c(q));
            let direct = (ip - a).norm().max((iq - b).norm());
            let swapped = (ip - b).norm().max((iq - a).norm());
            worst = worst.max(direct.min(swapped));
        }
        worst
    }

    fn nearest_vertex(&self, z: C64) -> usize {
        (0..SIDES).min_by(|&a, &b| (self.vertex(a) - z).norm().total_cmp(&(self.vertex(b) - z).norm())).unwrap_or(0)
    }

    /// Walks the cycle of vertex 0: at vertex `v` on side `s`, the pairing
    /// `T_s⁻¹ = T_{s+4}` carries side `s` to side `s+4` and `v` to a vertex
    /// `v'` of that side; the walk continues along the other side at `v'`.
    /// The accumulated product must be the identity for a torsion-free
    /// tiling with angle sum 2π.
    pub fn vertex_cycle(&self) -> VertexCycle {
        let start_vertex = 0;
        let start_side = 0;
        let (mut v, mut s) = (start_vertex, start_side);
        let mut product = DiskMoebius::identity();
        let mut vertices = vec![v];
        let mut sides = Vec::new();
        let mut angle_sum = 0.0;
        let angles = self.interior_angles();
        for _ in 0..4 * SIDES {
            angle_sum += angles[v];
            let pairing = self.pairings[(s + 4) % SIDES];
            product = pairing.compose(&product);
            let image = pairing.apply_c(self.vertex(v));
            let next_v = self.nearest_vertex(image);
            let landed_side = (s + 4) % SIDES;
            // the two sides at vertex k are k and k+1
            let next_s = if landed_side == next_v { (next_v + 1) % SIDES } else { next_v };
            sides.push(s);
            v = next_v;
            s = next_s;
            if v == start_vertex && s == start_side {
                break;
            }
            vertices.push(v);
        }
        VertexCycle { vertices, sides, product, angle_sum }
    }

    /// Dirichlet test `d(z, 0) ≤ d(z, T_j·0)` for all `j`, using the
    /// equivalent form `|z|²(1 − |c|²) ≤ |z − c|²`. Points on a side count as
    /// inside.
    pub fn in_fundamental_domain(&self, z: DiskPoint) -> bool {
        self.contains_c(z.value())
    }

    pub fn contains_c(&self, z: C64) -> bool {
        let zz = z.norm_sqr();
        self.centers.iter().all(|c| zz * (1.0 - c.norm_sqr()) <= (z - c).norm_sqr() + TIE_TOL)
    }

    /// Margin of the Dirichlet inequalities: positive inside, negative outside.
    pub fn domain_margin(&self, z: C64) -> f64 {
        let d0 = hyperbolic_distance_c(z, C64::new(0.0, 0.0));
        self.centers.iter().map(|c| hyperbolic_distance_c(z, *c) - d0).fold(f64::INFINITY, f64::min)
    }

    /// Greedy Dirichlet reduction: returns `(z', w)` with `z' = w⁻¹·z` in the
    /// domain. Each step applies the pairing that brings `z` closest to 0.
    pub fn reduce(&self, z: DiskPoint) -> Result<(DiskPoint, GroupWord)> {
        let mut cur = z.value();
        let mut word = GroupWord::empty();
        for _ in 0..REDUCE_CAP {
            let d0 = hyperbolic_distance_c(cur, C64::new(0.0, 0.0));
            let (best, dbest) = self
                .centers
                .iter()
                .enumerate()
                .map(|(j, c)| (j, hyperbolic_distance_c(cur, *c)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("eight centers");
            if d0 - dbest <= REDUCE_IMPROVEMENT {
                return Ok((DiskPoint::new(cur).unwrap_or(z), word));
            }
            cur = self.pairings[best].inverse().apply_c(cur);
            word.letters.push(Letter::from_side(best));
        }
        Err(Error::ReductionStall { point: format!("{}", z.value()), iterations: REDUCE_CAP })
    }

    /// Random word of `length` letters, i.i.d. uniform over the 8 letters
    /// except that a letter never follows its own inverse.
    pub fn random_word(&self, length: usize, rng: &mut mc::Rng) -> GroupWord {
        let mut letters: Vec<Letter> = Vec::with_capacity(length);
        for _ in 0..length {
            let next = match letters.last() {
                None => rng.gen_range(0..SIDES),
                Some(prev) => {
                    let forbidden = prev.inverse().side();
                    let k = rng.gen_range(0..SIDES - 1);
                    if k >= forbidden {
                        k + 1
                    } else {
                        k
                    }
                }
            };
            letters.push(Letter::from_side(next));
        }
        GroupWord { letters }
    }

    /// Uniform point of the disk of radius `circumradius` (the rejection
    /// envelope of the domain).
    pub fn sample_envelope(&self, rng: &mut mc::Rng) -> C64 {
        let r = self.circumradius * rng.gen::<f64>().sqrt();
        C64::from_polar(r, rng.gen::<f64>() * TAU)
    }

    /// Uniform (Euclidean) point of the domain by rejection.
    pub fn sample_domain(&self, rng: &mut mc::Rng) -> C64 {
        loop {
            let z = self.sample_envelope(rng);
            if self.contains_c(z) {
                return z;
            }
        }
    }

    pub fn envelope_area(&self) -> f64 {
        PI * self.circumradius * self.circumradius
    }

    /// Monte Carlo estimate of `∫_R i dz∧dz̄/(1−|z|²)² = ∫_R 2 dx dy/(1−|z|²)²`.
    /// Gauss–Bonnet gives `2π(2g − 2)/2 = 2π` for genus 2.
    pub fn domain_area(&self, samples: u64, task_seed: u64, shards: usize) -> Estimate {
        let envelope = self.envelope_area();
        mc::sharded_mean(samples, task_seed, shards, |rng| {
            let z = self.sample_envelope(rng);
            if self.contains_c(z) {
                area_density(z)
            } else {
                0.0
            }
        })
        .scaled(envelope)
    }

    /// Euclidean distance from 0 to the domain boundary along the ray at
    /// angle `phi` (the domain is star-shaped about 0). On the ray `t·e^{iφ}`
    /// the Dirichlet inequality for centre `c` fails past the smaller root of
    /// `t² − 2kt + 1` with `k = Re(c̄ e^{iφ})/|c|²`.
    pub fn boundary_radius(&self, phi: f64) -> f64 {
        let dir = C64::from_polar(1.0, phi);
        self.centers
            .iter()
            .filter_map(|c| {
                let k = (c.conj() * dir).re / c.norm_sqr();
                (k > 1.0).then(|| 1.0 / (k + (k * k - 1.0).sqrt()))
            })
            .fold(1.0, f64::min)
    }
}

impl FuchsianGroup {
    /// Euclidean area of the part of the domain with argument in
    /// `[phi0, phi1]`: composite Simpson rule for `½ ∫ r(φ)² dφ` with `n`
    /// intervals. Accurate when no vertex direction lies inside the range.
    pub fn sector_area(&self, phi0: f64, phi1: f64, n: usize) -> f64 {
        self.sector_integral(phi0, phi1, n, |r| 0.5 * r * r)
    }

    /// Simpson rule for `∫ g(r(φ)) dφ` over `[phi0, phi1]`.
    pub fn sector_integral(&self, phi0: f64, phi1: f64, n: usize, g: impl Fn(f64) -> f64) -> f64 {
        let n = (n.max(2) + 1) & !1;
        let h = (phi1 - phi0) / n as f64;
        let mut total = KahanSum::default();
        for i in 0..=n {
            let weight = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            total.add(weight * g(self.boundary_radius(phi0 + i as f64 * h)));
        }
        total.value() * h / 3.0
    }

    /// Quadrature split at the vertex directions, where `r(φ)` has kinks.
    pub fn euclidean_area(&self) -> f64 {
        (0..SIDES)
            .map(|k| {
                let a = PI / 8.0 + k as f64 * PI / 4.0;
                self.sector_area(a, a + PI / 4.0, 2048)
            })
            .sum()
    }
}

/// The density `2/(1 − |z|²)²` of `i dz∧dz̄/(1−|z|²)²` against `dx dy`.
pub fn area_density(z: C64) -> f64 {
    let s = 1.0 - z.norm_sqr();
    2.0 / (s * s)
}

/// Hyperbolic (curvature −1) area enclosed by a closed genus-`g` surface.
pub fn gauss_bonnet_area(genus: u32) -> f64 {
    2.0 * PI * (2.0 * f64::from(genus) - 2.0)
}

/// Area of the same surface under `i dz∧dz̄/(1−|z|²)²`, which is half the
/// curvature −1 area form `4|dz|²/(1−|z|²)²`.
pub fn form_area(genus: u32) -> f64 {
    0.5 * gauss_bonnet_area(genus)
}
