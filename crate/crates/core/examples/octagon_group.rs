//! The genus-2 octagon group: angles, the vertex cycle, reduction into the
//! Dirichlet domain and the Monte Carlo area against Gauss–Bonnet.

use hyperconvex::fuchsian::{form_area, octagon_group, GENUS};
use hyperconvex::mc;
use hyperconvex::moebius::{DiskMoebius, DiskPoint, C64};

fn main() -> hyperconvex::Result<()> {
    let group = octagon_group()?;
    println!("interior angles: {:?}", group.interior_angles().map(|a| (a * 1e6).round() / 1e6));
    println!("angle sum − 2π = {:.3e}", group.angle_sum() - std::f64::consts::TAU);
    let cycle = group.vertex_cycle();
    println!(
        "vertex cycle of length {}: distance to ±identity {:.3e}",
        cycle.vertices.len(),
        cycle.product.distance_mod_sign(&DiskMoebius::identity())
    );

    let far = DiskPoint::new(C64::new(0.93, -0.21))?;
    let (reduced, word) = group.reduce(far)?;
    println!("{:.4} reduces to {:.4} by a word of length {}", far.value(), reduced.value(), word.len());

    let area = group.domain_area(2_000_000, mc::derive_seed(7, "example.area"), mc::DEFAULT_SHARDS);
    println!("area {:.5} ± {:.5}, Gauss–Bonnet {:.5}", area.value, area.stderr, form_area(GENUS));
    Ok(())
}
