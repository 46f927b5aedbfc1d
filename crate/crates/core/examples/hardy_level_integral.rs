//! Monte Carlo level integrals of `|f|²` over `M_t` for `f ≡ 1`, which are
//! independent of `t` and equal `8π²` in genus 2, and the boundary trend of
//! the gradient term for `f = z`.

use hyperconvex::fuchsian::octagon_group;
use hyperconvex::hardy::{self, BoundedHoloFn, Integrand};
use hyperconvex::mc;

fn main() -> hyperconvex::Result<()> {
    let group = octagon_group()?;
    let exact = hardy::constant_level_integral(2);
    for t in [0.5, 1.0, 1.4] {
        let seed = mc::derive_seed(7, &format!("example.level.{t}"));
        let e = hardy::level_integral(
            &group,
            &BoundedHoloFn::one(),
            t,
            200_000,
            seed,
            mc::DEFAULT_SHARDS,
            Integrand::Pullback,
        )?;
        println!("t = {t}: I = {:.3} ± {:.3}  (exact {exact:.3})", e.value, e.stderr);
    }
    let rows =
        hardy::gradient_boundary_trend(&group, &BoundedHoloFn::Z, &[0.5, 1.0, 1.5], 50_000, 11, mc::DEFAULT_SHARDS)?;
    for r in &rows {
        println!("t = {}: J = {:.3} ± {:.3}, J/sin²t = {:.3}", r.t, r.value, r.stderr, r.per_sin2);
    }
    println!("trend {:?}, limit {:.3}", hardy::classify_trend(&rows, 3.0), hardy::trend_limit_for_z(&group));
    Ok(())
}
