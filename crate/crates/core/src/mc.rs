//! Seed derivation and shard-deterministic Monte Carlo accumulation.
//!
//! A task seed is `splitmix64(root ^ fnv1a(task))`; shard `i` of a task uses
//! `splitmix64(task_seed + i)`. Shards are merged in index order with
//! compensated sums, so results depend on `(seed, shards)` only, never on the
//! thread schedule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub type Rng = ChaCha8Rng;

pub const DEFAULT_SHARDS: usize = 16;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

pub fn derive_seed(root: u64, task: &str) -> u64 {
    splitmix64(root ^ fnv1a(task.as_bytes()))
}

pub fn shard_rng(task_seed: u64, shard: usize) -> Rng {
    Rng::seed_from_u64(splitmix64(task_seed.wrapping_add(shard as u64)))
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl Estimate {
    pub fn scaled(self, k: f64) -> Self {
        Self { value: self.value * k, stderr: self.stderr * k.abs(), samples: self.samples }
    }

    /// `|value − target| ≤ k · stderr`.
    pub fn within_sigma(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr
    }

    /// Two estimates agree within `k` combined standard errors.
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        (self.value - other.value).abs() <= k * self.stderr.hypot(other.stderr)
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    sum: KahanSum,
    sum_sq: KahanSum,
    n: u64,
}

/// Mean of `sample(rng)` over `samples` draws split across `shards`
/// independent streams.
pub fn sharded_mean<F>(samples: u64, task_seed: u64, shards: usize, sample: F) -> Estimate
where
    F: Fn(&mut Rng) -> f64 + Sync,
{
    let shards = shards.max(1);
    let per = samples / shards as u64;
    let extra = samples % shards as u64;
    let parts: Vec<Moments> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = shard_rng(task_seed, s);
            let n = per + u64::from((s as u64) < extra);
            let mut m = Moments::default();
            for _ in 0..n {
                let x = sample(&mut rng);
                m.sum.add(x);
                m.sum_sq.add(x * x);
            }
            m.n = n;
            m
        })
        .collect();
    let mut total = Moments::default();
    for p in &parts {
        total.sum.add(p.sum.value());
        total.sum_sq.add(p.sum_sq.value());
        total.n += p.n;
    }
    let n = total.n.max(1) as f64;
    let mean = total.sum.value() / n;
    let var = (total.sum_sq.value() / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    Estimate { value: mean, stderr: (var / n).sqrt(), samples: total.n }
}
