//! Disk automorphisms in `(a, b)` form and the conjugated diagonal action
//! on the bidisk, which preserves the anti-diagonal `w = z̄`.

use hyperconvex::moebius::{hyperbolic_distance, BidiskPoint, DiskMoebius, DiskPoint, C64};
use hyperconvex::tube;

fn main() -> hyperconvex::Result<()> {
    let g = DiskMoebius::translation(0.3, 1.2).compose(&DiskMoebius::rotation(0.7));
    println!("a = {:.6}, b = {:.6}, |a|² − |b|² = {:.3e}", g.a(), g.b(), g.det());

    let z = DiskPoint::new(C64::new(0.2, -0.4))?;
    let u = DiskPoint::new(C64::new(-0.5, 0.1))?;
    let before = hyperbolic_distance(z, u);
    let after = hyperbolic_distance(g.apply(z), g.apply(u));
    println!("hyperbolic distance {before:.12} -> {after:.12}");

    let core = BidiskPoint::new(z.value(), z.value().conj())?;
    let moved = g.act_bidisk(core);
    println!("core point stays on the core: |w − z̄| = {:.3e}", (moved.w - moved.z.conj()).norm());

    let p = BidiskPoint::new(C64::new(0.1, 0.3), C64::new(-0.6, 0.2))?;
    println!("δ(p) = {:.15}, δ(γ·p) = {:.15}", tube::delta(&p), tube::delta(&g.act_bidisk(p)));
    Ok(())
}
