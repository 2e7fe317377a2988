//! Property suites behind `verify`: each check samples seeded random inputs,
//! records the largest deviation and compares it with a fixed tolerance.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::entanglement::{
    bell_concurrence_evolution, concurrence_bell, concurrence_oracle, concurrence_period, eigenstate_entanglement,
};
use crate::error::{Error, Result};
use crate::evolution::{evolve_closed, evolve_oracle, extract_sectors, reassemble, structure_violation};
use crate::group::{
    classify_special, commutes, compose_bch, family_pulse, in_s_h, inverse_prescription, normality_witness,
    product_closure_check, pulse_label, random_pulse, subgroup_label, CouplingMode, SpecialClass, DEFAULT_WINDOW,
};
use crate::linalg::Mat4;
use crate::model::{
    bell_to_computational, computational_to_bell, reduce, Axis, BellVector, ModelParams, Sign,
};
use crate::sampling::{haar_su2, random_params, random_state};
use crate::spectral::{closed_form_levels, closed_form_vectors, hamiltonian_bell, oracle_bell};
use crate::synthesis::{
    axis_map, conjugate_bell, coverage_experiment, find_evolution_loop, find_exchange, rotated_params,
};
use crate::evolution::Sector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Model,
    Spectral,
    Evolution,
    Entanglement,
    Group,
    Synthesis,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Model,
        Suite::Spectral,
        Suite::Evolution,
        Suite::Entanglement,
        Suite::Group,
        Suite::Synthesis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Model => "model",
            Suite::Spectral => "spectral",
            Suite::Evolution => "evolution",
            Suite::Entanglement => "entanglement",
            Suite::Group => "group",
            Suite::Synthesis => "synthesis",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown suite {s:?}")))
    }
}

/// Sample counts; `scale` multiplies every default count (minimum 1).
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub axes: Vec<Axis>,
    pub seed: u64,
    /// Overrides every per-check count when set.
    pub samples: Option<usize>,
}

impl VerifyConfig {
    pub fn new(suite: Suite, seed: u64) -> Self {
        VerifyConfig {
            suite,
            axes: Axis::ALL.to_vec(),
            seed,
            samples: None,
        }
    }

    fn count(&self, default: usize) -> usize {
        self.samples.unwrap_or(default).max(1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: String,
    pub samples: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub note: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn find(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Fixed-width pass/fail table.
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<12} {:<width$} {:>7} {:>12} {:>9}  result",
            "suite", "check", "samples", "max_dev", "tol"
        );
        for c in &self.checks {
            let _ = write!(
                out,
                "{:<12} {:<width$} {:>7} {:>12.3e} {:>9.1e}  {}",
                c.suite,
                c.name,
                c.samples,
                c.max_deviation,
                c.tolerance,
                if c.passed { "PASS" } else { "FAIL" }
            );
            if !c.note.is_empty() {
                let _ = write!(out, "  ({})", c.note);
            }
            out.push('\n');
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(out, "{passed}/{} checks passed", self.checks.len());
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.all_passed(),
            "checks": self.checks.iter().map(|c| json!({
                "suite": c.suite,
                "check": c.name,
                "samples": c.samples,
                "max_deviation": c.max_deviation,
                "tolerance": c.tolerance,
                "passed": c.passed,
                "note": c.note,
            })).collect::<Vec<_>>(),
        })
    }
}

struct Recorder<'a> {
    suite: &'static str,
    out: &'a mut Vec<CheckResult>,
}

impl Recorder<'_> {
    /// Pass when `max_deviation <= tolerance`.
    fn bound(&mut self, name: impl Into<String>, samples: usize, max_deviation: f64, tolerance: f64) {
        self.push(name, samples, max_deviation, tolerance, max_deviation <= tolerance, String::new());
    }

    fn push(&mut self, name: impl Into<String>, samples: usize, max_deviation: f64, tolerance: f64, passed: bool, note: String) {
        self.out.push(CheckResult {
            suite: self.suite,
            name: name.into(),
            samples,
            max_deviation,
            tolerance,
            // NaN deviations never pass
            passed: passed && !max_deviation.is_nan(),
            note,
        });
    }
}

/// Run the configured suites. Each suite draws from its own generator seeded
/// from `seed`, so running one suite alone reproduces its part of `all`.
pub fn run(config: &VerifyConfig) -> VerifyReport {
    let mut report = VerifyReport::default();
    let suites: Vec<Suite> = if config.suite == Suite::All {
        Suite::EACH.to_vec()
    } else {
        vec![config.suite]
    };
    for suite in suites {
        let offset = Suite::EACH.iter().position(|s| *s == suite).unwrap_or(0) as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(offset));
        let mut rec = Recorder {
            suite: suite.name(),
            out: &mut report.checks,
        };
        match suite {
            Suite::Model => model_suite(config, &mut rng, &mut rec),
            Suite::Spectral => spectral_suite(config, &mut rng, &mut rec),
            Suite::Evolution => evolution_suite(config, &mut rng, &mut rec),
            Suite::Entanglement => entanglement_suite(config, &mut rng, &mut rec),
            Suite::Group => group_suite(config, &mut rng, &mut rec),
            Suite::Synthesis => synthesis_suite(config, &mut rng, &mut rec),
            Suite::All => unreachable!(),
        }
    }
    report
}

fn model_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let n = cfg.count(1000);
    for &axis in &cfg.axes {
        let (mut ratio, mut sums, mut json_dev) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..n {
            let p = random_params(rng, axis, 3.0);
            let r = reduce(&p);
            for s in Sign::ALL {
                if r.rabi(s) > 0.0 {
                    ratio = ratio.max((r.b(s).powi(2) + r.j(s).powi(2) - 1.0).abs());
                }
            }
            let field = [r.field(Sign::Minus), r.field(Sign::Plus)];
            let pair = [r.pair(Sign::Minus), r.pair(Sign::Plus)];
            match ModelParams::from_sums(axis, r.coupling_axis, field, pair) {
                Ok(q) => {
                    let d = (0..3)
                        .map(|k| (q.coupling[k] - p.coupling[k]).abs())
                        .chain([(q.field1 - p.field1).abs(), (q.field2 - p.field2).abs()])
                        .fold(0.0, f64::max);
                    sums = sums.max(d);
                }
                Err(_) => sums = f64::INFINITY,
            }
            json_dev = json_dev.max(match ModelParams::from_json_value(&p.to_json_value()) {
                Ok(q) if q == p => 0.0,
                _ => 1.0,
            });
        }
        rec.bound(format!("ratio_normalization[{axis}]"), n, ratio, 1e-12);
        rec.bound(format!("sum_difference_round_trip[{axis}]"), n, sums, 1e-12);
        rec.bound(format!("json_round_trip[{axis}]"), n, json_dev, 0.0);
    }
    let mut basis = 0.0f64;
    for _ in 0..n {
        let v = random_state(rng);
        let back = computational_to_bell(&bell_to_computational(&v));
        basis = basis.max(
            v.amps
                .iter()
                .zip(&back.amps)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        );
    }
    rec.bound("bell_basis_round_trip", n, basis, 1e-14);
}

fn multiset_gap(a: [f64; 4], b: [f64; 4]) -> f64 {
    let mut x = a;
    let mut y = b;
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    x.iter().zip(&y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

fn spectral_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let n = cfg.count(1000);
    for &axis in &cfg.axes {
        let (mut levels, mut resid, mut ortho, mut trace) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for _ in 0..n {
            let p = random_params(rng, axis, 3.0);
            let closed = closed_form_levels(&p);
            match oracle_bell(&p) {
                Ok(eig) => levels = levels.max(multiset_gap(closed.0, eig.values)),
                Err(_) => levels = f64::INFINITY,
            }
            trace = trace.max(closed.sum().abs());
            match closed_form_vectors(&p) {
                Ok(sys) => {
                    resid = resid.max(sys.residual(&hamiltonian_bell(&p)));
                    ortho = ortho.max(sys.orthonormality_deviation());
                }
                Err(_) => resid = f64::INFINITY,
            }
        }
        rec.bound(format!("levels_vs_oracle[{axis}]"), n, levels, 1e-10);
        rec.bound(format!("eigenvector_residual[{axis}]"), n, resid, 1e-10);
        rec.bound(format!("eigenvector_orthonormality[{axis}]"), n, ortho, 1e-10);
        rec.bound(format!("traceless_levels[{axis}]"), n, trace, 1e-12);
    }
    let mut iso = 0.0f64;
    for &axis in &cfg.axes {
        let p = ModelParams::new([1.0, 1.0, 1.0], 0.0, 0.0, axis).expect("finite");
        iso = iso.max(multiset_gap(closed_form_levels(&p).0, [-1.0, -1.0, -1.0, 3.0]));
    }
    rec.bound("isotropic_levels", cfg.axes.len(), iso, 1e-12);
}

fn evolution_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let n = cfg.count(1000);
    for &axis in &cfg.axes {
        let mut oracle = 0.0f64;
        let mut member = 0usize;
        let mut zero_pattern = 0.0f64;
        let mut det_recip = 0.0f64;
        let mut round_trip = 0.0f64;
        for _ in 0..n {
            let p = random_params(rng, axis, 3.0);
            let t = rng.random_range(0.0..=10.0);
            let u = evolve_closed(&p, t);
            oracle = oracle.max(match evolve_oracle(&p, t) {
                Ok(o) => u.mat.dist(&o),
                Err(_) => f64::INFINITY,
            });
            if !in_s_h(&u.mat, axis, 1e-12) {
                member += 1;
            }
            zero_pattern = zero_pattern.max(structure_violation(&u.mat, axis).map_or(0.0, |w| w.2));
            match extract_sectors(&u.mat, axis) {
                Ok(s) => {
                    det_recip = det_recip.max((s[0].det() * s[1].det() - 1.0).norm());
                    let rebuilt: [Sector; 2] = s.map(|x| Sector {
                        mat: x.rebuild(),
                        ..x
                    });
                    round_trip = round_trip.max(reassemble(axis, &rebuilt).dist(&u.mat));
                }
                Err(_) => round_trip = f64::INFINITY,
            }
        }
        rec.bound(format!("closed_vs_oracle[{axis}]"), n, oracle, 1e-10);
        rec.push(
            format!("membership[{axis}]"),
            n,
            member as f64,
            0.0,
            member == 0,
            String::new(),
        );
        rec.bound(format!("zero_pattern[{axis}]"), n, zero_pattern, 1e-12);
        rec.bound(format!("sector_det_reciprocal[{axis}]"), n, det_recip, 1e-12);
        rec.bound(format!("extract_rebuild[{axis}]"), n, round_trip, 1e-12);

        let p = random_params(rng, axis, 3.0);
        let u0 = evolve_closed(&p, 0.0).mat;
        let exact = u0 == Mat4::identity();
        rec.push(
            format!("identity_at_zero[{axis}]"),
            1,
            u0.dist(&Mat4::identity()),
            0.0,
            exact,
            String::new(),
        );
    }
}

fn entanglement_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let n_states = cfg.count(10_000);
    let mut dev = 0.0f64;
    for _ in 0..n_states {
        let v = random_state(rng);
        dev = dev.max(match (concurrence_bell(&v), concurrence_oracle(&v)) {
            (Ok(a), Ok(b)) => (a - b).abs(),
            _ => f64::INFINITY,
        });
    }
    rec.bound("concurrence_vs_spin_flip", n_states, dev, 1e-10);

    let n = cfg.count(100);
    for &axis in &cfg.axes {
        let mut entropy = 0.0f64;
        for _ in 0..n {
            let mut p = random_params(rng, axis, 3.0);
            p.field1 = 0.0;
            p.field2 = 0.0;
            match eigenstate_entanglement(&p) {
                Ok(reps) => {
                    for r in reps {
                        entropy = entropy.max((r.entropy - 1.0).abs());
                    }
                }
                Err(_) => entropy = f64::INFINITY,
            }
        }
        rec.bound(format!("zero_field_entropy_is_one[{axis}]"), n, entropy, 1e-10);

        let (mut period, mut exact, mut gap) = (0.0f64, 0.0f64, 0.0f64);
        let mut count = 0;
        for _ in 0..n {
            let p = random_params(rng, axis, 3.0);
            let mu = if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus };
            let nu = if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus };
            let Some(tp) = concurrence_period(&p, mu, nu) else {
                continue;
            };
            count += 1;
            let t = rng.random_range(0.0..10.0);
            match (
                bell_concurrence_evolution(&p, mu, nu, t),
                bell_concurrence_evolution(&p, mu, nu, t + tp),
            ) {
                (Ok(a), Ok(b)) => {
                    period = period.max((a.oracle - b.oracle).abs());
                    exact = exact.max((a.exact - a.oracle).abs());
                    gap = gap.max(a.closed_gap());
                }
                _ => period = f64::INFINITY,
            }
        }
        rec.bound(format!("bell_concurrence_period[{axis}]"), count, period, 1e-8);
        rec.bound(format!("bell_concurrence_exact_form[{axis}]"), count, exact, 1e-10);
        // the short closed expression is reported, not enforced
        rec.push(
            format!("bell_concurrence_short_form_gap[{axis}]"),
            count,
            gap,
            f64::INFINITY,
            true,
            "reported only".into(),
        );
    }
}

fn group_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let n = cfg.count(100);
    let n_bch = cfg.count(10_000);
    for &axis in &cfg.axes {
        let (mut closure, mut label_miss, mut abelian, mut commute_miss) = (0.0f64, 0usize, 0.0f64, 0usize);
        let mut label_checked = 0usize;
        for _ in 0..n {
            let p = random_pulse(rng, axis);
            let scales = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let Ok(q) = family_pulse(&p, scales, rng.random_range(-3.0..3.0), rng.random_range(0.0..5.0)) else {
                closure = f64::INFINITY;
                continue;
            };
            closure = closure.max(product_closure_check(&p, &q).map_or(f64::INFINITY, |c| c.residual));
            let (up, uq) = (p.unitary().mat, q.unitary().mat);
            abelian = abelian.max(up.commutator(&uq).frobenius_norm());
            if !commutes(&p, &q) {
                commute_miss += 1;
            }
            if let Ok(label) = subgroup_label(&(uq * up), axis) {
                label_checked += 1;
                if !label.matches(&pulse_label(&p)) {
                    label_miss += 1;
                }
            }
        }
        rec.bound(format!("closure_prescription[{axis}]"), n, closure, 1e-10);
        rec.push(
            format!("closure_label[{axis}]"),
            label_checked,
            label_miss as f64,
            0.0,
            label_miss == 0,
            String::new(),
        );
        rec.bound(format!("family_abelian[{axis}]"), n, abelian, 1e-10);
        rec.push(
            format!("commutes_predicate[{axis}]"),
            n,
            commute_miss as f64,
            0.0,
            commute_miss == 0,
            String::new(),
        );

        let (mut inverse, mut feasible) = (0.0f64, 0usize);
        for _ in 0..n {
            let p = random_pulse(rng, axis);
            for mode in [CouplingMode::Free { duration: None }, CouplingMode::Fixed] {
                if let Ok(sol) = inverse_prescription(&p, mode, DEFAULT_WINDOW) {
                    feasible += 1;
                    let u = sol.pulse.unitary().mat * p.unitary().mat;
                    inverse = inverse.max(u.dist(&Mat4::identity()));
                }
            }
        }
        rec.push(
            format!("inverse_prescription[{axis}]"),
            feasible,
            inverse,
            1e-10,
            inverse <= 1e-10 && feasible > 0,
            format!("{feasible} feasible of {}", 2 * n),
        );

        let identity_ok = matches!(
            classify_special(&Mat4::identity(), axis, 1e-12),
            Ok(SpecialClass::GlobalPhase { .. })
        ) && in_s_h(&Mat4::identity(), axis, 1e-12);
        rec.push(format!("identity_member[{axis}]"), 1, 0.0, 0.0, identity_ok, String::new());

        let mut bch = 0.0f64;
        for _ in 0..n_bch {
            let a = Sector::from_matrix(haar_su2(rng));
            let b = Sector::from_matrix(haar_su2(rng));
            bch = bch.max(match compose_bch(&a, &b) {
                Ok(c) => c.mat.dist(&(a.mat * b.mat)),
                Err(_) => f64::INFINITY,
            });
        }
        rec.bound(format!("bch_vs_product[{axis}]"), n_bch, bch, 1e-12);

        let norm = normality_witness(rng, axis, n);
        rec.bound(format!("diagonal_commutes[{axis}]"), n, norm.max_commutator, 1e-10);
        rec.bound(format!("diagonal_normal[{axis}]"), n, norm.max_conjugation, 1e-10);
    }
}

fn synthesis_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let n_rot = cfg.count(100);
    for target in [Axis::X, Axis::Y] {
        let (r, _) = axis_map(target);
        let (mut dev, mut angles) = (0.0f64, 0.0f64);
        for _ in 0..n_rot {
            let p = random_params(rng, Axis::Z, 3.0);
            let t = rng.random_range(0.0..10.0);
            let uz = evolve_closed(&p, t);
            let ut = evolve_closed(&rotated_params(&p, target), t);
            dev = dev.max(conjugate_bell(&uz.mat, &r).dist(&ut.mat));
            let mut a: Vec<f64> = uz.sectors.iter().map(|s| s.angle).collect();
            let mut b: Vec<f64> = ut.sectors.iter().map(|s| s.angle).collect();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            angles = angles.max((a[0] - b[0]).abs().max((a[1] - b[1]).abs()));
        }
        rec.bound(format!("rotation_z_to_{target}"), n_rot, dev, 1e-10);
        rec.bound(format!("rotation_angles_z_to_{target}"), n_rot, angles, 1e-10);
    }

    let n_syn = cfg.count(1000);
    for &axis in &cfg.axes {
        match coverage_experiment(rng, axis, n_syn, 1e-8) {
            Ok(rep) => {
                let ok = rep.successes == rep.samples && rep.max_residual < 1e-8;
                rec.push(
                    format!("two_pulse_coverage[{axis}]"),
                    n_syn,
                    rep.max_residual,
                    1e-8,
                    ok,
                    format!("success rate {:.4}", rep.success_rate()),
                );
            }
            Err(e) => rec.push(format!("two_pulse_coverage[{axis}]"), n_syn, f64::INFINITY, 1e-8, false, e.to_string()),
        }

        let mut swap = 0.0f64;
        let n_ex = cfg.count(100);
        for _ in 0..n_ex {
            // vanishing coupling pair in the sector driven by B_-
            let field = [rng.random_range(0.2..3.0), rng.random_range(-3.0..3.0)];
            let pair = [rng.random_range(-3.0..3.0), 0.0];
            let p = ModelParams::from_sums(axis, rng.random_range(-3.0..3.0), field, pair).expect("finite");
            swap = swap.max(match find_exchange(&p, None) {
                Ok(sol) => {
                    let u = sol.pulse.unitary().mat;
                    let k = sol.rows.0;
                    let w = BellVector::new(u.mul_vec(&BellVector::new(Mat4::identity().0[k]).amps));
                    (w.amps[sol.rows.1].norm() - 1.0).abs()
                }
                Err(_) => f64::INFINITY,
            });
        }
        rec.bound(format!("exchange_swap[{axis}]"), n_ex, swap, 1e-8);
    }

    let p = ModelParams::new([0.0, 0.0, 1.0], 0.0, 0.0, Axis::Z).expect("finite");
    let rep = find_evolution_loop(&p, Some(10.0), 1e-10);
    let dev = match rep.require_exact() {
        Ok(c) if (c.time - PI).abs() < 1e-12 => (evolve_closed(&p, c.time).mat + Mat4::identity()).frobenius_norm(),
        _ => f64::INFINITY,
    };
    rec.bound("loop_zz_at_pi", 1, dev, 1e-10);
}
