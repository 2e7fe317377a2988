//! Evolution loops (U = +/- I) and Bell-pair exchange pulses.

use bell_ising::model::{bell_label, Axis, ModelParams};
use bell_ising::synthesis::{find_evolution_loop, find_exchange};

fn main() -> bell_ising::Result<()> {
    let zz = ModelParams::new([0.0, 0.0, 1.0], 0.0, 0.0, Axis::Z)?;
    let rep = find_evolution_loop(&zz, Some(10.0), 1e-10);
    let first = rep.require_exact()?;
    println!("loop at T = {:.12}, U = {}I, residual {:.3e}", first.time, first.sign.symbol(), first.residual);

    let generic = ModelParams::new([0.3, 2f64.sqrt(), 0.7], 0.0, 0.0, Axis::Z)?;
    let rep = find_evolution_loop(&generic, Some(500.0), 1e-10);
    match rep.require_exact() {
        Ok(c) => println!("exact loop at {}", c.time),
        Err(e) => println!("{e}; best approximant at T = {:.6}", rep.approximate[0].time),
    }

    let ex = ModelParams::new([0.7, -0.7, 0.4], 0.9, -0.3, Axis::Z)?;
    let sol = find_exchange(&ex, None)?;
    let (a, b) = (bell_label(sol.rows.0), bell_label(sol.rows.1));
    println!(
        "exchange after t = {:.6}: beta{}{} <-> beta{}{} with amplitude {:.12}",
        sol.pulse.duration,
        a.0.symbol(),
        a.1.symbol(),
        b.0.symbol(),
        b.1.symbol(),
        sol.amplitude
    );
    Ok(())
}
