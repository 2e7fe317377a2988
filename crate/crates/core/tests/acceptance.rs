//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bell_ising::entanglement::{
    bell_concurrence_evolution, concurrence_bell, concurrence_oracle, concurrence_period, eigenstate_entanglement,
};
use bell_ising::evolution::{evolve_closed, evolve_oracle, extract_sectors, reassemble, structure_violation, Sector};
use bell_ising::group::{
    compose_bch, family_pulse, in_s_h, inverse_prescription, normality_witness, product_closure_check, random_pulse,
    CouplingMode, DEFAULT_WINDOW,
};
use bell_ising::linalg::Mat4;
use bell_ising::model::{Axis, BellVector, ModelParams, Sign};
use bell_ising::sampling::{haar_su2, random_params, random_state};
use bell_ising::spectral::{closed_form_levels, oracle_bell};
use bell_ising::synthesis::{
    axis_map, conjugate_bell, find_evolution_loop, find_exchange, rotated_params, synthesize_two_pulse,
    SynthesisTarget,
};

const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn sorted(mut v: [f64; 4]) -> [f64; 4] {
    v.sort_by(f64::total_cmp);
    v
}

fn max_gap(a: [f64; 4], b: [f64; 4]) -> f64 {
    sorted(a).iter().zip(&sorted(b)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn criterion_1(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    for axis in Axis::ALL {
        for _ in 0..1000 {
            let p = random_params(rng, axis, 3.0);
            let eig = match oracle_bell(&p) {
                Ok(e) => e,
                Err(e) => return outcome(false, format!("oracle failed: {e}")),
            };
            worst = worst.max(max_gap(closed_form_levels(&p).0, eig.values));
        }
    }
    let iso = ModelParams::new([1.0, 1.0, 1.0], 0.0, 0.0, Axis::Z).unwrap();
    let iso_gap = max_gap(closed_form_levels(&iso).0, [-1.0, -1.0, -1.0, 3.0]);
    outcome(
        worst < 1e-10 && iso_gap < 1e-12,
        format!("3x1000 draws, max level gap {worst:.2e}; isotropic gap {iso_gap:.2e}"),
    )
}

fn criterion_2(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    let mut zero_exact = true;
    for axis in Axis::ALL {
        for _ in 0..1000 {
            let p = random_params(rng, axis, 3.0);
            let t = rng.random_range(0.0..=10.0);
            let o = evolve_oracle(&p, t).expect("oracle converges");
            worst = worst.max(evolve_closed(&p, t).mat.dist(&o));
        }
        let p = random_params(rng, axis, 3.0);
        zero_exact &= evolve_closed(&p, 0.0).mat == Mat4::identity();
    }
    outcome(
        worst < 1e-10 && zero_exact,
        format!("3x1000 draws, max |U_closed - U_oracle|_F {worst:.2e}; U(0) == I exactly: {zero_exact}"),
    )
}

fn criterion_3(rng: &mut ChaCha8Rng) -> Outcome {
    let (mut members, mut det, mut trip, mut zeros) = (0usize, 0.0f64, 0.0f64, 0.0f64);
    let mut total = 0;
    for axis in Axis::ALL {
        for _ in 0..1000 {
            let p = random_params(rng, axis, 3.0);
            let u = evolve_closed(&p, rng.random_range(0.0..=10.0)).mat;
            total += 1;
            members += usize::from(in_s_h(&u, axis, 1e-12));
            zeros = zeros.max(structure_violation(&u, axis).map_or(0.0, |w| w.2));
            let s = extract_sectors(&u, axis).expect("block structure");
            det = det.max((s[0].det() * s[1].det() - 1.0).norm());
            let rebuilt = s.map(|x| Sector { mat: x.rebuild(), ..x });
            trip = trip.max(reassemble(axis, &rebuilt).dist(&u));
        }
    }
    outcome(
        members == total && det < 1e-12 && trip < 1e-12 && zeros < 1e-12,
        format!("{members}/{total} in S_h; det product gap {det:.2e}; extract/rebuild {trip:.2e}; zeros {zeros:.2e}"),
    )
}

fn criterion_4(rng: &mut ChaCha8Rng) -> Outcome {
    let mut conc = 0.0f64;
    for _ in 0..10_000 {
        let v = random_state(rng);
        conc = conc.max((concurrence_bell(&v).unwrap() - concurrence_oracle(&v).unwrap()).abs());
    }
    let mut entropy = 0.0f64;
    let (mut period, mut gap) = (0.0f64, 0.0f64);
    for axis in Axis::ALL {
        for _ in 0..100 {
            let mut p = random_params(rng, axis, 3.0);
            p.field1 = 0.0;
            p.field2 = 0.0;
            for r in eigenstate_entanglement(&p).unwrap() {
                entropy = entropy.max((r.entropy - 1.0).abs());
            }
        }
        for _ in 0..100 {
            let p = random_params(rng, axis, 3.0);
            for mu in Sign::ALL {
                for nu in Sign::ALL {
                    let Some(tp) = concurrence_period(&p, mu, nu) else { continue };
                    let t = rng.random_range(0.0..10.0);
                    let a = bell_concurrence_evolution(&p, mu, nu, t).unwrap();
                    let b = bell_concurrence_evolution(&p, mu, nu, t + tp).unwrap();
                    period = period.max((a.oracle - b.oracle).abs());
                    gap = gap.max(a.closed_gap());
                }
            }
        }
    }
    outcome(
        conc < 1e-10 && entropy < 1e-10 && period < 1e-8,
        format!(
            "concurrence gap {conc:.2e} (1e4 states); zero-field entropy gap {entropy:.2e}; \
             period gap {period:.2e}; short closed form vs oracle max gap {gap:.3} (reported)"
        ),
    )
}

fn criterion_5(rng: &mut ChaCha8Rng) -> Outcome {
    let (mut closure, mut inverse, mut bch, mut comm) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut feasible = 0;
    for axis in Axis::ALL {
        for _ in 0..100 {
            let p = random_pulse(rng, axis);
            let q = family_pulse(
                &p,
                [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
                rng.random_range(-3.0..3.0),
                rng.random_range(0.0..5.0),
            )
            .unwrap();
            closure = closure.max(product_closure_check(&p, &q).map_or(f64::INFINITY, |c| c.residual));
            for mode in [CouplingMode::Free { duration: None }, CouplingMode::Fixed] {
                if let Ok(sol) = inverse_prescription(&p, mode, DEFAULT_WINDOW) {
                    feasible += 1;
                    inverse = inverse.max((sol.pulse.unitary().mat * p.unitary().mat).dist(&Mat4::identity()));
                }
            }
        }
        comm = comm.max(normality_witness(rng, axis, 100).max_commutator);
    }
    for _ in 0..10_000 {
        let a = Sector::from_matrix(haar_su2(rng));
        let b = Sector::from_matrix(haar_su2(rng));
        bch = bch.max(compose_bch(&a, &b).unwrap().mat.dist(&(a.mat * b.mat)));
    }
    outcome(
        closure < 1e-10 && inverse < 1e-10 && feasible > 0 && bch < 1e-12 && comm < 1e-10,
        format!(
            "closure {closure:.2e}; inverse {inverse:.2e} over {feasible} feasible; BCH {bch:.2e}; \
             diagonal commutator {comm:.2e}"
        ),
    )
}

fn criterion_6(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = random_params(rng, Axis::Z, 3.0);
        let t = rng.random_range(0.0..10.0);
        let uz = evolve_closed(&p, t).mat;
        for target in [Axis::X, Axis::Y] {
            let (r, _) = axis_map(target);
            worst = worst.max(conjugate_bell(&uz, &r).dist(&evolve_closed(&rotated_params(&p, target), t).mat));
        }
    }
    outcome(worst < 1e-10, format!("100 draws, max conjugation gap {worst:.2e}"))
}

fn criterion_7(rng: &mut ChaCha8Rng) -> Outcome {
    let (mut solved, mut residual) = (0usize, 0.0f64);
    for axis in Axis::ALL {
        for i in 0..1000 {
            let target = SynthesisTarget::from_matrix(haar_su2(rng), axis, i % 2, 1e-8).unwrap();
            if let Ok(sol) = synthesize_two_pulse(&target) {
                solved += 1;
                residual = residual.max(sol.residual);
            }
        }
    }
    let ex = ModelParams::new([0.7, -0.7, 0.4], 0.9, -0.3, Axis::Z).unwrap();
    let swap = match find_exchange(&ex, None) {
        Ok(sol) => {
            let u = sol.pulse.unitary().mat;
            let v = BellVector::new(Mat4::identity().0[sol.rows.0]);
            (BellVector::new(u.mul_vec(&v.amps)).amps[sol.rows.1].norm() - 1.0).abs()
        }
        Err(_) => f64::INFINITY,
    };
    let zz = ModelParams::new([0.0, 0.0, 1.0], 0.0, 0.0, Axis::Z).unwrap();
    let loop_gap = match find_evolution_loop(&zz, Some(10.0), 1e-10).require_exact() {
        Ok(c) if (c.time - PI).abs() < 1e-12 => (evolve_closed(&zz, c.time).mat + Mat4::identity()).frobenius_norm(),
        _ => f64::INFINITY,
    };
    outcome(
        solved == 3000 && residual < 1e-8 && swap < 1e-8 && loop_gap < 1e-10,
        format!(
            "{solved}/3000 targets, max residual {residual:.2e}; exchange amplitude gap {swap:.2e}; \
             |U(pi) + I| {loop_gap:.2e}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_bell-ising"))
            .args(["verify", "--suite", "all", "--seed", "42"])
            .output()
    };
    match (run(), run()) {
        (Ok(a), Ok(b)) => {
            let code = a.status.code();
            let same = a.stdout == b.stdout && b.status.code() == code;
            outcome(
                code == Some(0) && same,
                format!("exit {code:?}; byte-identical across runs: {same}"),
            )
        }
        (Err(e), _) | (_, Err(e)) => outcome(false, format!("could not run CLI: {e}")),
    }
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let results = [
        ("spectrum agreement", criterion_1(&mut rng)),
        ("evolution agreement", criterion_2(&mut rng)),
        ("sector structure", criterion_3(&mut rng)),
        ("entanglement", criterion_4(&mut rng)),
        ("group laws", criterion_5(&mut rng)),
        ("rotation equivalences", criterion_6(&mut rng)),
        ("synthesis", criterion_7(&mut rng)),
        ("cli verify", criterion_8()),
    ];
    let mut all = true;
    for (k, (name, o)) in results.iter().enumerate() {
        all &= o.passed;
        println!(
            "criterion {} [{}] {}: {}",
            k + 1,
            if o.passed { "PASS" } else { "FAIL" },
            name,
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
