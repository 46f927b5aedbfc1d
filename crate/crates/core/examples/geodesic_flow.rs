//! Geodesic flow on the surface: time fractions spent in area cells of the
//! fundamental domain converge to the area fractions.

use hyperconvex::ergodic;
use hyperconvex::fuchsian::octagon_group;

fn main() -> hyperconvex::Result<()> {
    let group = octagon_group()?;
    let r = ergodic::equidistribution_experiment(&group, 1e5, 0.1, 8, 7)?;
    println!("{} steps, total variation {:.4}", r.steps, r.tv_distance);
    for (k, (o, e)) in r.histogram.frequencies().iter().zip(&r.expected).enumerate() {
        println!("cell {k}: observed {o:.4}, area {e:.4}");
    }
    Ok(())
}
