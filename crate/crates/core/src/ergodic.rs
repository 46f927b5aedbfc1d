//! Monte Carlo illustrations of ergodicity: equidistribution of the geodesic
//! flow on the genus-2 surface, and the spreading of a diagonal boundary
//! orbit on `∂𝔻 × ∂𝔻`.

use std::f64::consts::{FRAC_PI_8, TAU};
use std::fmt::Write as _;

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fuchsian::{FuchsianGroup, GroupWord};
use crate::mc;
use crate::moebius::{DiskMoebius, DiskPoint, C64};

fn unit(v: C64) -> C64 {
    v / v.norm()
}

/// Position in the fundamental domain, unit direction, and the word that
/// reduced the trajectory so far.
#[derive(Clone, Debug, Serialize)]
pub struct GeodesicState {
    pub z: DiskPoint,
    pub dir: C64,
    pub word: GroupWord,
}

impl GeodesicState {
    pub fn new(z: DiskPoint, dir: C64) -> Self {
        Self { z, dir: unit(dir), word: GroupWord::empty() }
    }
}

/// Unreduced flow: the point at hyperbolic arclength `t` along the geodesic
/// through `z` with direction `dir`, and the direction there. Exact: move `z`
/// to 0, step along a diameter, move back.
pub fn flow(z: C64, dir: C64, t: f64) -> (C64, C64) {
    let m = DiskMoebius::moving_origin_to(DiskPoint::new(z).expect("flow starts inside the disk"));
    let u = unit(dir / m.derivative(C64::new(0.0, 0.0)));
    let local = u * (t / 2.0).tanh();
    (m.apply_c(local), unit(m.derivative(local) * u))
}

pub const MAX_STEP: f64 = 0.5;

/// Advance arclength `dt` and reduce into the fundamental domain,
/// transporting the direction by the derivative of the reducing map.
pub fn geodesic_step(group: &FuchsianGroup, s: &GeodesicState, dt: f64) -> Result<GeodesicState> {
    if !(dt > 0.0 && dt <= MAX_STEP) {
        return Err(Error::InvalidArgument(format!("step {dt} outside (0, {MAX_STEP}]")));
    }
    let (z, dir) = flow(s.z.value(), s.dir, dt);
    let (reduced, word) = group.reduce(DiskPoint::new(z)?)?;
    let dir = if word.is_empty() { dir } else { unit(word.inverse().eval(group).derivative(z) * dir) };
    Ok(GeodesicState { z: reduced, dir, word: s.word.then(&word) })
}

/// Counts over a product of two binned axes, given by their edges.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram2D {
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    /// Row-major, `counts[i * ny + j]` for x bin `i` and y bin `j`.
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Histogram2D {
    pub fn new(x_edges: Vec<f64>, y_edges: Vec<f64>) -> Self {
        let n = (x_edges.len() - 1) * (y_edges.len() - 1);
        Self { x_edges, y_edges, counts: vec![0; n], total: 0 }
    }

    /// `m × m` bins on `[0, 2π)²`.
    pub fn torus(m: usize) -> Self {
        let edges: Vec<f64> = (0..=m).map(|i| TAU * i as f64 / m as f64).collect();
        Self::new(edges.clone(), edges)
    }

    pub fn nx(&self) -> usize {
        self.x_edges.len() - 1
    }

    pub fn ny(&self) -> usize {
        self.y_edges.len() - 1
    }

    pub fn add_index(&mut self, i: usize, j: usize) {
        let ny = self.ny();
        self.counts[i * ny + j] += 1;
        self.total += 1;
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.ny() + j]
    }

    pub fn merge(&mut self, other: &Histogram2D) {
        assert_eq!(self.counts.len(), other.counts.len());
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
    }

    pub fn nonzero_bins(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.total.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// `i,j,x_lo,x_hi,y_lo,y_hi,count` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,x_lo,x_hi,y_lo,y_hi,count\n");
        for i in 0..self.nx() {
            for j in 0..self.ny() {
                let _ = writeln!(
                    out,
                    "{i},{j},{},{},{},{},{}",
                    self.x_edges[i],
                    self.x_edges[i + 1],
                    self.y_edges[j],
                    self.y_edges[j + 1],
                    self.count(i, j)
                );
            }
        }
        out
    }
}

/// Cells of the fundamental domain: angular sectors starting at a vertex
/// direction, split radially at fractions of the boundary radius.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Cells {
    pub sectors: usize,
    pub shells: usize,
}

impl Cells {
    /// `n / 2` sectors of two shells each; `n / 2` must divide 8 so that
    /// sector edges fall on vertex directions.
    pub fn with_count(n: usize) -> Result<Self> {
        let sectors = n / 2;
        if !n.is_multiple_of(2) || !matches!(sectors, 1 | 2 | 4 | 8) {
            return Err(Error::InvalidArgument(format!("{n} cells: need 2, 4, 8 or 16")));
        }
        Ok(Self { sectors, shells: 2 })
    }

    pub fn count(&self) -> usize {
        self.sectors * self.shells
    }

    fn sector_width(&self) -> f64 {
        TAU / self.sectors as f64
    }

    /// `(sector, shell)` of a point of the domain.
    pub fn locate(&self, group: &FuchsianGroup, z: C64) -> (usize, usize) {
        let phi = z.arg();
        let offset = (phi - FRAC_PI_8).rem_euclid(TAU);
        let sector = ((offset / self.sector_width()) as usize).min(self.sectors - 1);
        let frac = z.norm() / group.boundary_radius(phi);
        let shell = ((frac * self.shells as f64) as usize).min(self.shells - 1);
        (sector, shell)
    }

    /// Normalized hyperbolic areas, in histogram order. The area of
    /// `{|z| ≤ λ r(φ)}` over a sector is `2 ∫ R²/(1 − R²) dφ` with `R = λ r(φ)`;
    /// each sector is integrated side by side so the integrand stays smooth.
    pub fn area_fractions(&self, group: &FuchsianGroup) -> Vec<f64> {
        let per_side = 8 / self.sectors;
        let mut areas = Vec::with_capacity(self.count());
        for s in 0..self.sectors {
            let cumulative = |lambda: f64| -> f64 {
                (0..per_side)
                    .map(|k| {
                        let a = FRAC_PI_8 + (s * per_side + k) as f64 * TAU / 8.0;
                        group.sector_integral(a, a + TAU / 8.0, 1024, |r| {
                            let rr = (lambda * r).powi(2);
                            2.0 * rr / (1.0 - rr)
                        })
                    })
                    .sum()
            };
            for sh in 0..self.shells {
                let lo = sh as f64 / self.shells as f64;
                let hi = (sh + 1) as f64 / self.shells as f64;
                areas.push(cumulative(hi) - cumulative(lo));
            }
        }
        let total: f64 = areas.iter().sum();
        areas.iter().map(|a| a / total).collect()
    }

    pub fn histogram(&self) -> Histogram2D {
        let sector_edges = (0..=self.sectors).map(|i| FRAC_PI_8 + i as f64 * self.sector_width()).collect();
        let shell_edges = (0..=self.shells).map(|i| i as f64 / self.shells as f64).collect();
        Histogram2D::new(sector_edges, shell_edges)
    }
}

/// `½ Σ |p_i − q_i|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[derive(Clone, Debug, Serialize)]
pub struct EquidistributionReport {
    pub seed: u64,
    pub total_time: f64,
    pub dt: f64,
    pub steps: u64,
    pub cells: Cells,
    pub expected: Vec<f64>,
    pub histogram: Histogram2D,
    pub tv_distance: f64,
}

/// Follows one trajectory from `start` for `total_time` and bins the
/// reduced positions.
pub fn equidistribution_from(
    group: &FuchsianGroup,
    start: GeodesicState,
    total_time: f64,
    dt: f64,
    cells: Cells,
) -> Result<(Histogram2D, Vec<f64>, f64)> {
    let steps = (total_time / dt).round() as u64;
    let mut hist = cells.histogram();
    let mut state = start;
    for _ in 0..steps {
        state = geodesic_step(group, &state, dt)?;
        state.word = GroupWord::empty();
        let (i, j) = cells.locate(group, state.z.value());
        hist.add_index(i, j);
    }
    let expected = cells.area_fractions(group);
    let tv = total_variation(&hist.frequencies(), &expected);
    Ok((hist, expected, tv))
}

/// Geodesic-flow equidistribution from a seeded random start.
pub fn equidistribution_experiment(
    group: &FuchsianGroup,
    total_time: f64,
    dt: f64,
    cells: usize,
    seed: u64,
) -> Result<EquidistributionReport> {
    let steps = (total_time / dt).round() as u64;
    if steps < 10_000 {
        return Err(Error::InvalidArgument(format!("T/dt = {steps} < 10⁴")));
    }
    let cells = Cells::with_count(cells)?;
    let mut rng = mc::shard_rng(mc::derive_seed(seed, "geodesic"), 0);
    let z = DiskPoint::new(group.sample_domain(&mut rng))?;
    let dir = C64::from_polar(1.0, rng.gen::<f64>() * TAU);
    let (histogram, expected, tv_distance) =
        equidistribution_from(group, GeodesicState::new(z, dir), total_time, dt, cells)?;
    Ok(EquidistributionReport { seed, total_time, dt, steps, cells, expected, histogram, tv_distance })
}

/// Starting pair of the boundary orbit.
pub const ORBIT_START: (f64, f64) = (0.3, 2.1);

fn boundary_apply(group: &FuchsianGroup, word: &GroupWord, xi: C64) -> C64 {
    unit(word.apply_c(group, xi))
}

fn bin_angle(z: C64, m: usize) -> usize {
    ((z.arg().rem_euclid(TAU) / TAU * m as f64) as usize).min(m - 1)
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryOrbitReport {
    pub words: u64,
    pub length: usize,
    pub grid: usize,
    pub seed: u64,
    pub histogram: Histogram2D,
    pub nonzero_bins: usize,
    /// Fraction of images within one bin of the diagonal `ξ = η`.
    pub near_diagonal: f64,
}

/// Applies `n` independent random words of length `length` diagonally to
/// `(e^{0.3i}, e^{2.1i})` and bins the image angle pairs on an `m×m` grid.
pub fn boundary_orbit_experiment(
    group: &FuchsianGroup,
    n: u64,
    length: usize,
    m: usize,
    seed: u64,
) -> Result<BoundaryOrbitReport> {
    if m == 0 || m > 32 {
        return Err(Error::InvalidArgument(format!("grid {m} outside 1..=32")));
    }
    boundary_orbit_unchecked(group, n, length, m, seed)
}

/// [`boundary_orbit_experiment`] without the size preconditions on `n` and
/// `length`.
pub fn boundary_orbit_unchecked(
    group: &FuchsianGroup,
    n: u64,
    length: usize,
    m: usize,
    seed: u64,
) -> Result<BoundaryOrbitReport> {
    let xi = C64::from_polar(1.0, ORBIT_START.0);
    let eta = C64::from_polar(1.0, ORBIT_START.1);
    let task = mc::derive_seed(seed, "boundary-orbit");
    let shards = mc::DEFAULT_SHARDS;
    let per = n / shards as u64;
    let extra = n % shards as u64;
    let parts: Vec<(Histogram2D, u64)> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = mc::shard_rng(task, s);
            let mut hist = Histogram2D::torus(m);
            let mut diagonal = 0;
            for _ in 0..per + u64::from((s as u64) < extra) {
                let word = group.random_word(length, &mut rng);
                let (a, b) = (boundary_apply(group, &word, xi), boundary_apply(group, &word, eta));
                let (i, j) = (bin_angle(a, m), bin_angle(b, m));
                hist.add_index(i, j);
                let d = (i + m - j) % m;
                diagonal += u64::from(d <= 1 || d == m - 1);
            }
            (hist, diagonal)
        })
        .collect();
    let mut histogram = Histogram2D::torus(m);
    let mut diagonal = 0;
    for (h, d) in &parts {
        histogram.merge(h);
        diagonal += d;
    }
    Ok(BoundaryOrbitReport {
        words: n,
        length,
        grid: m,
        seed,
        nonzero_bins: histogram.nonzero_bins(),
        near_diagonal: diagonal as f64 / n.max(1) as f64,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::octagon_group;
    use crate::moebius::hyperbolic_distance_c;
    use rand::SeedableRng;

    #[test]
    fn flow_from_origin_is_a_diameter() {
        for t in [0.1, 0.5, 1.0, 2.0] {
            let (z, dir) = flow(C64::new(0.0, 0.0), C64::new(1.0, 0.0), t);
            assert!((z - C64::new((t / 2.0).tanh(), 0.0)).norm() < 1e-15);
            assert!((dir - C64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn flow_is_additive_and_reversible() {
        let mut rng = mc::Rng::seed_from_u64(1);
        for _ in 0..200 {
            let z = C64::from_polar(0.9 * rng.gen::<f64>().sqrt(), rng.gen::<f64>() * TAU);
            let dir = C64::from_polar(1.0, rng.gen::<f64>() * TAU);
            let dt = 0.5 * rng.gen::<f64>() + 1e-3;
            let (z1, d1) = flow(z, dir, dt);
            let (z2, d2) = flow(z1, d1, dt);
            let (z3, d3) = flow(z, dir, 2.0 * dt);
            assert!((z2 - z3).norm() < 1e-8 && (d2 - d3).norm() < 1e-8);
            assert!((hyperbolic_distance_c(z, z1) - dt).abs() < 1e-8);
            let (back, _) = flow(z1, -d1, dt);
            assert!((back - z).norm() < 1e-8);
        }
    }

    #[test]
    fn reduced_steps_are_isometric() {
        let g = octagon_group().unwrap();
        let mut state = GeodesicState::new(DiskPoint::new(C64::new(0.1, 0.2)).unwrap(), C64::new(0.3, 1.0));
        for _ in 0..10_000 {
            let next = geodesic_step(&g, &state, 0.1).unwrap();
            assert!(g.in_fundamental_domain(next.z));
            assert!((next.dir.norm() - 1.0).abs() < 1e-10);
            let back_step = next.word.inverse().eval(&g).apply_c(state.z.value());
            assert!((hyperbolic_distance_c(back_step, next.z.value()) - 0.1).abs() < 1e-8);
            state = next;
            state.word = GroupWord::empty();
        }
        assert!(geodesic_step(&g, &state, 0.0).is_err());
        assert!(geodesic_step(&g, &state, 0.6).is_err());
    }

    #[test]
    fn cell_areas() {
        let g = octagon_group().unwrap();
        let cells = Cells::with_count(8).unwrap();
        let fr = cells.area_fractions(&g);
        assert_eq!(fr.len(), 8);
        assert!((fr.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // Eight-fold symmetry: all sectors alike, the outer shell heavier.
        for s in 1..4 {
            assert!((fr[2 * s] - fr[0]).abs() < 1e-9 && (fr[2 * s + 1] - fr[1]).abs() < 1e-9);
        }
        assert!(fr[1] > fr[0]);
        // Total hyperbolic area of the domain is 4π for curvature −1.
        let total: f64 = (0..8)
            .map(|k| {
                let a = FRAC_PI_8 + k as f64 * TAU / 8.0;
                g.sector_integral(a, a + TAU / 8.0, 1024, |r| 2.0 * r * r / (1.0 - r * r))
            })
            .sum();
        assert!((total - 4.0 * std::f64::consts::PI).abs() < 1e-8, "{total}");
        assert!(Cells::with_count(6).is_err());
    }

    #[test]
    fn cell_frequencies_match_uniform_area_sampling() {
        // Area-weighted rejection sampling is an independent oracle for the
        // cell fractions.
        let g = octagon_group().unwrap();
        let cells = Cells::with_count(8).unwrap();
        let fr = cells.area_fractions(&g);
        let mut rng = mc::Rng::seed_from_u64(4);
        let mut hist = cells.histogram();
        let mut weights = [0.0; 8];
        let mut total = 0.0;
        for _ in 0..400_000 {
            let z = g.sample_domain(&mut rng);
            let (i, j) = cells.locate(&g, z);
            let w = crate::fuchsian::area_density(z);
            weights[i * 2 + j] += w;
            total += w;
            hist.add_index(i, j);
        }
        for k in 0..8 {
            assert!((weights[k] / total - fr[k]).abs() < 5e-3);
        }
    }

    #[test]
    fn histogram_bookkeeping() {
        let mut a = Histogram2D::torus(4);
        a.add_index(0, 1);
        a.add_index(3, 3);
        let mut b = Histogram2D::torus(4);
        b.add_index(0, 1);
        a.merge(&b);
        assert_eq!(a.total, 3);
        assert_eq!(a.counts.iter().sum::<u64>(), a.total);
        assert_eq!(a.count(0, 1), 2);
        assert_eq!(a.nonzero_bins(), 2);
        assert_eq!(a.to_csv().lines().count(), 17);
    }

    #[test]
    fn equidistribution_short_runs() {
        let g = octagon_group().unwrap();
        let r = equidistribution_experiment(&g, 1_000.0, 0.1, 8, 1).unwrap();
        assert_eq!(r.histogram.total, 10_000);
        assert!(r.tv_distance < 0.2, "{}", r.tv_distance);
        assert!(equidistribution_experiment(&g, 100.0, 0.1, 8, 1).is_err());
    }

    #[test]
    fn tv_distance_shrinks_with_time() {
        let g = octagon_group().unwrap();
        let mean = |t: f64| -> f64 {
            (0..5).map(|s| equidistribution_experiment(&g, t, 0.1, 8, 100 + s).unwrap().tv_distance).sum::<f64>() / 5.0
        };
        let (short, long) = (mean(1_000.0), mean(20_000.0));
        assert!(long < short, "{short} -> {long}");
    }

    #[test]
    fn closed_geodesic_concentrates() {
        // The real axis closes up after one translation length. The flow
        // expands rounding errors like e^t, so the run stays short.
        let g = octagon_group().unwrap();
        let cells = Cells::with_count(8).unwrap();
        let start = GeodesicState::new(DiskPoint::origin(), C64::new(1.0, 0.0));
        let (hist, _, tv) = equidistribution_from(&g, start, 25.0, 0.1, cells).unwrap();
        assert!(tv > 0.3, "{tv}");
        assert!(hist.nonzero_bins() <= 4);
    }

    #[test]
    fn boundary_orbit_small_cases() {
        let g = octagon_group().unwrap();
        let one = boundary_orbit_unchecked(&g, 1, 30, 16, 3).unwrap();
        assert_eq!(one.nonzero_bins, 1);
        let a = boundary_orbit_unchecked(&g, 5_000, 20, 16, 3).unwrap();
        let b = boundary_orbit_unchecked(&g, 5_000, 20, 16, 3).unwrap();
        assert_eq!(a.histogram, b.histogram);
        assert_eq!(a.histogram.total, 5_000);
        assert!(boundary_orbit_experiment(&g, 10, 30, 33, 3).is_err());
    }

    #[test]
    fn boundary_orbit_collapses_to_the_diagonal() {
        // A long word contracts ∂𝔻 towards its attracting fixed point, so
        // both images land together.
        let g = octagon_group().unwrap();
        let r = boundary_orbit_unchecked(&g, 20_000, 30, 16, 5).unwrap();
        assert!(r.near_diagonal > 0.99, "{}", r.near_diagonal);
    }
}
