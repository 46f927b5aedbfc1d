//! The level-set formula on small boxes: the direct 4-form integral, the
//! integral of the numeric exterior derivative, and the boundary flux agree.

use hyperconvex::hardy::{self, BoundedHoloFn};

fn main() -> hyperconvex::Result<()> {
    let boxes = hardy::stokes_fixture_boxes();
    for f in [BoundedHoloFn::one(), BoundedHoloFn::z_plus_w_over_4(), BoundedHoloFn::zw()] {
        for (k, r) in hardy::stokes_suite(&f, &boxes, 8)?.iter().enumerate() {
            println!(
                "f = {f:<10} box {k}: direct {:+.6e}, boundary {:+.6e}, gap {:.2e} -> {:.2e}",
                r.fine.direct.re, r.fine.boundary.re, r.coarse.gap, r.fine.gap
            );
        }
    }
    Ok(())
}
