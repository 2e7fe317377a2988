//! U(t) = exp(-iHt) in the Bell basis and its two sectors.

use bell_ising::evolution::{evolve_closed, evolve_oracle};
use bell_ising::model::{Axis, ModelParams};

fn main() -> bell_ising::Result<()> {
    let p = ModelParams::new([0.7, -0.4, 1.1], 0.9, -0.3, Axis::Y)?;
    let t = 2.5;
    let u = evolve_closed(&p, t);
    for row in &u.mat.0 {
        let cells: Vec<String> = row.iter().map(|z| format!("{:+.4}{:+.4}i", z.re, z.im)).collect();
        println!("{}", cells.join("  "));
    }
    for s in &u.sectors {
        let (k, l) = s.rows.unwrap_or_default();
        println!(
            "sector rows ({k},{l}): phase {:+.6}, angle {:.6}, axis [{:+.4}, {:+.4}, {:+.4}]",
            s.phase, s.angle, s.axis[0], s.axis[1], s.axis[2]
        );
    }
    println!("|U_closed - U_oracle| = {:.3e}", u.mat.dist(&evolve_oracle(&p, t)?));
    Ok(())
}
