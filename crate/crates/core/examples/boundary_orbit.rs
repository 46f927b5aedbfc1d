//! Random words of fixed length applied diagonally to a pair of boundary
//! points. The image pairs pile up next to the diagonal instead of filling
//! the torus, since a long word contracts almost everything to its
//! attracting fixed point.

use hyperconvex::ergodic;
use hyperconvex::fuchsian::octagon_group;

fn main() -> hyperconvex::Result<()> {
    let group = octagon_group()?;
    let r = ergodic::boundary_orbit_experiment(&group, 200_000, 30, 16, 7)?;
    println!("{} of {} bins hit, {:.4} of images near the diagonal", r.nonzero_bins, 16 * 16, r.near_diagonal);
    Ok(())
}
