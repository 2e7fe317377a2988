//! Realize random SU(2) sector targets with two pulses and print the sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bell_ising::model::Axis;
use bell_ising::sampling::haar_su2;
use bell_ising::synthesis::{coverage_experiment, sequence_to_json, synthesize_two_pulse, SynthesisTarget};

fn main() -> bell_ising::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let target = SynthesisTarget::from_matrix(haar_su2(&mut rng), Axis::Y, 0, 1e-8)?;
    let sol = synthesize_two_pulse(&target)?;
    println!("{:?}: residual {:.3e}, total time {:.6}", sol.kind, sol.residual, sol.total_time);
    println!("{}", serde_json::to_string_pretty(&sequence_to_json(&sol.pulses))?);

    let rep = coverage_experiment(&mut rng, Axis::Z, 200, 1e-8)?;
    println!("coverage {:.3}, max residual {:.3e}", rep.success_rate(), rep.max_residual);
    println!("delta histogram over [0, pi]: {:?}", rep.delta_histogram);
    Ok(())
}
