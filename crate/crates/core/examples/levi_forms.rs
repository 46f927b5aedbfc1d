//! Closed-form Levi matrices of the tube functions at a point, their
//! finite-difference cross-check, and the Monge–Ampère degeneracy of `ρ`.

use hyperconvex::moebius::C64;
use hyperconvex::tube::{self, LeviTag};

fn main() -> hyperconvex::Result<()> {
    let p = tube::level_point(C64::new(0.2, 0.1), 0.6, 1.1);
    println!("δ = {:.6}, ρ = {:.6}", tube::delta(&p), tube::rho(&p));
    for tag in [LeviTag::NegLogDelta, LeviTag::Rho, LeviTag::RhoSquared, LeviTag::NegSqrtDelta] {
        let r = tube::levi_numeric_crosscheck(tag, &p)?;
        println!(
            "{tag:>10}: min eigenvalue {:+.6e}, det {:+.3e}, relative gap {:.2e}",
            r.min_eigenvalue,
            r.ma_det,
            r.relative_gap.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
