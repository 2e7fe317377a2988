//! Same-family products, inverse pulses and the SU(2) composition rule.

use bell_ising::evolution::Sector;
use bell_ising::group::{
    classify_special, compose_bch, family_pulse, inverse_prescription, product_closure_check, pulse_label,
    CouplingMode, PulseSpec, DEFAULT_WINDOW,
};
use bell_ising::linalg::Mat4;
use bell_ising::model::{Axis, ModelParams};

fn main() -> bell_ising::Result<()> {
    let p = PulseSpec::new(ModelParams::new([0.3, 1.1, -0.6], 0.7, 0.2, Axis::Z)?, 1.3)?;
    let q = family_pulse(&p, [1.8, -0.5], 0.4, 0.9)?;
    println!("label p: {:?}", pulse_label(&p));
    println!("label q: {:?}", pulse_label(&q));

    let closure = product_closure_check(&p, &q)?;
    println!("fused D+ {:?}, D- {:?}, residual {:.3e}", closure.delta_plus, closure.delta_minus, closure.residual);

    let inv = inverse_prescription(&p, CouplingMode::Free { duration: None }, DEFAULT_WINDOW)?;
    let back = inv.pulse.unitary().mat * p.unitary().mat;
    println!("inverse pulse t' = {:.6}, |U'U - I| = {:.3e}", inv.pulse.duration, back.dist(&Mat4::identity()));
    println!("U'U is {:?}", classify_special(&back, Axis::Z, 1e-9)?);

    let (a, b) = (p.unitary().sectors[0], q.unitary().sectors[0]);
    let c: Sector = compose_bch(&a, &b)?;
    println!("composition vs product: {:.3e}", c.mat.dist(&(a.mat * b.mat)));
    Ok(())
}
