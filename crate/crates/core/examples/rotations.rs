//! The bipartite rotations that carry the z-field model to the x and y models.

use bell_ising::evolution::evolve_closed;
use bell_ising::model::{Axis, ModelParams};
use bell_ising::synthesis::{axis_map, conjugate_bell, rotated_params};

fn main() -> bell_ising::Result<()> {
    let p = ModelParams::new([0.3, -1.4, 0.9], 0.5, 1.1, Axis::Z)?;
    let t = 1.7;
    let uz = evolve_closed(&p, t);
    for target in [Axis::X, Axis::Y] {
        let (r, _) = axis_map(target);
        let q = rotated_params(&p, target);
        let dev = conjugate_bell(&uz.mat, &r).dist(&evolve_closed(&q, t).mat);
        println!(
            "z -> {target}: Euler ({:+.4}, {:+.4}, {:+.4}), couplings {:?}, deviation {dev:.3e}",
            r.alpha, r.beta, r.gamma, q.coupling
        );
    }
    Ok(())
}
