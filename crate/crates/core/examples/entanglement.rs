//! Concurrence of an evolving Bell state, and eigenstate entanglement.

use bell_ising::entanglement::{bell_concurrence_evolution, concurrence_period, eigenstate_entanglement};
use bell_ising::model::{Axis, ModelParams, Sign};

fn main() -> bell_ising::Result<()> {
    let p = ModelParams::new([0.5, 1.2, -0.3], 0.8, 0.4, Axis::X)?;
    let (mu, nu) = (Sign::Minus, Sign::Minus);
    let period = concurrence_period(&p, mu, nu).unwrap_or(f64::INFINITY);
    println!("period pi/R = {period:.6}");
    println!("{:>8} {:>10} {:>10} {:>10} {:>10}", "t", "exact", "oracle", "short", "entropy");
    for k in 0..=10 {
        let t = period * k as f64 / 10.0;
        let c = bell_concurrence_evolution(&p, mu, nu, t)?;
        println!("{t:8.4} {:10.6} {:10.6} {:10.6} {:10.6}", c.exact, c.oracle, c.closed, c.entropy);
    }
    for (k, r) in eigenstate_entanglement(&p)?.iter().enumerate() {
        println!("eigenstate {k}: C = {:.6}, S = {:.6}", r.concurrence, r.entropy);
    }
    Ok(())
}
