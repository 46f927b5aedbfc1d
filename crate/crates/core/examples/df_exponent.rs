//! Diederich–Fornaess exponent of `−δ`: bisection on the near-core grid and
//! the witness that `η = 0.55` already fails.

use hyperconvex::tube::{self, DfGrid};

fn main() {
    let grid = DfGrid::standard();
    println!("grid of {} points, δ in [{:e}, {}]", grid.points().len(), grid.delta_min, grid.delta_max);
    println!("largest nonnegative η ≈ {:.4}", tube::df_exponent_estimate(&grid));
    for w in tube::df_scan(&grid, 0.40, 0.60, 0.05) {
        println!("η = {:.2}: min eigenvalue {:+.4e} at δ = {:.3e}", w.eta, w.min_eigenvalue, w.delta);
    }
}
