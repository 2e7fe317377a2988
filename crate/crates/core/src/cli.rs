//! Command-line front end. Exit codes: 0 success, 1 verification or solver
//! failure, 2 invalid input.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::entanglement::{bell_concurrence_evolution, concurrence_bell, concurrence_oracle, EntanglementReport};
use crate::error::{Error, Result};
use crate::evolution::{evolve_closed, evolve_oracle, sector_signs};
use crate::group::{ratios_from_axis, PulseSpec};
use crate::linalg::{Mat2, Vec3, C64};
use crate::model::{bell_label, parse_bell_label, Axis, BellVector, ModelParams, Sign};
use crate::output::{complex_json, emit, matrix_json, to_json_string, CsvTable};
use crate::sampling::random_state;
use crate::spectral::{closed_form_levels, closed_form_vectors, hamiltonian_bell, oracle_bell, VectorSource};
use crate::synthesis::{find_evolution_loop, sequence_to_json, synthesize_two_pulse, LoopCandidate, SynthesisTarget};
use crate::verify::{self, Suite, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    /// Human-readable table (verify only).
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "bell-ising", version, about = "Two-qubit anisotropic Ising dynamics in the Bell basis")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON parameter document {"J":[..],"B1":..,"B2":..,"axis":..}
    #[arg(long, global = true)]
    pub params: Option<PathBuf>,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Tolerance override
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t0: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub t1: f64,
    #[arg(long, default_value_t = 400)]
    pub steps: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy levels and Bell-basis eigenvectors
    Spectrum,
    /// U(t) over a time grid
    Evolve {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Concurrence and entropy of an evolving state
    Entangle {
        /// `bell:<mu><nu>` such as `bell:-+`, or `random`
        #[arg(long, default_value = "bell:--")]
        state: String,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Sector decomposition of U(t)
    Sector {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        t: f64,
    },
    /// Property suites with a pass/fail table
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Restrict to one axis
        #[arg(long)]
        axis: Option<String>,
        /// Override every sample count
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Two-pulse realization of a sector target
    Synthesize {
        #[arg(long, default_value = "z")]
        axis: String,
        /// `axis=nx,ny,nz;angle=a` or `matrix=re00,im00,re01,im01,re10,im10,re11,im11`
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 0)]
        sector: usize,
    },
    /// Durations with U(T) = +/- I
    Loops {
        #[arg(long)]
        horizon: Option<f64>,
    },
}

/// Validated settings shared by the subcommands.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: u64,
    pub tol: Option<f64>,
}

impl RunConfig {
    pub fn from_common(c: &CommonArgs) -> Result<Self> {
        if let Some(t) = c.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidParams(format!("--tol must be positive, got {t}")));
            }
        }
        Ok(RunConfig {
            params: c.params.clone(),
            out: c.out.clone(),
            format: c.format,
            seed: c.seed,
            tol: c.tol,
        })
    }

    fn load_params(&self) -> Result<ModelParams> {
        let path = self
            .params
            .as_deref()
            .ok_or_else(|| Error::InvalidParams("--params is required".into()))?;
        load_params(path)
    }

    fn format_or(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(Error::InvalidParams(format!("format {f:?} is not supported here")))
        }
    }

    fn write(&self, text: &str) -> Result<()> {
        emit(self.out.as_deref(), text)
    }
}

pub fn load_params(path: &Path) -> Result<ModelParams> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    ModelParams::from_json_str(&text).map_err(|e| Error::InvalidParams(format!("{}: {e}", path.display())))
}

impl SweepArgs {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 1 {
            return Err(Error::InvalidParams("--steps must be at least 1".into()));
        }
        if !(self.t0.is_finite() && self.t1.is_finite()) || self.t1 < self.t0 {
            return Err(Error::InvalidParams(format!(
                "need finite t0 <= t1, got t0={} t1={}",
                self.t0, self.t1
            )));
        }
        Ok(())
    }

    /// `steps` equally spaced times from `t0` to `t1` inclusive.
    pub fn times(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.t0];
        }
        let dt = (self.t1 - self.t0) / (self.steps - 1) as f64;
        (0..self.steps).map(|k| self.t0 + k as f64 * dt).collect()
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            let code = exit_code(&e);
            let diag = json!({"error": error_kind(&e), "message": e.to_string()});
            eprintln!("{diag}");
            code
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParams(_)
        | Error::Json(_)
        | Error::NotNormalized { .. }
        | Error::NonUnitAxis { .. }
        | Error::NotHermitian { .. } => EXIT_INVALID,
        Error::Io { path, .. } if path != "<stdout>" => EXIT_INVALID,
        _ => EXIT_FAILURE,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidParams(_) => "InvalidParams",
        Error::NotNormalized { .. } => "NotNormalized",
        Error::NotHermitian { .. } => "NotHermitian",
        Error::StructureViolation { .. } => "StructureViolation",
        Error::NonUnitAxis { .. } => "NonUnitAxis",
        Error::RowMismatch { .. } => "RowMismatch",
        Error::IndeterminateLabel { .. } => "IndeterminateLabel",
        Error::Infeasible(_) => "Infeasible",
        Error::NotClosed(_) => "NotClosed",
        Error::NoExactLoop { .. } => "NoExactLoop",
        Error::InfeasibleParams { .. } => "InfeasibleParams",
        Error::SolverFailure(_) => "SolverFailure",
        Error::Io { .. } => "Io",
        Error::Json(_) => "Json",
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let cfg = RunConfig::from_common(&cli.common)?;
    match &cli.command {
        Command::Spectrum => cmd_spectrum(&cfg),
        Command::Evolve { sweep } => cmd_evolve(&cfg, sweep),
        Command::Entangle { state, sweep } => cmd_entangle(&cfg, state, sweep),
        Command::Sector { t } => cmd_sector(&cfg, *t),
        Command::Verify { suite, axis, samples } => cmd_verify(&cfg, suite, axis.as_deref(), *samples),
        Command::Synthesize { axis, target, sector } => cmd_synthesize(&cfg, axis, target, *sector),
        Command::Loops { horizon } => cmd_loops(&cfg, *horizon),
    }
}

fn label(mu: Sign, nu: Sign) -> String {
    format!("{}{}", mu.symbol(), nu.symbol())
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<i32> {
    let p = cfg.load_params()?;
    let format = cfg.format_or(Format::Json, &[Format::Json, Format::Csv])?;
    let levels = closed_form_levels(&p);
    let sys = closed_form_vectors(&p)?;
    let oracle = oracle_bell(&p)?;
    let h = hamiltonian_bell(&p);
    let text = match format {
        Format::Json => {
            let mut lv = serde_json::Map::new();
            for k in 0..4 {
                let (mu, nu) = bell_label(k);
                lv.insert(label(mu, nu), json!(levels.0[k]));
            }
            let vectors: Vec<Value> = sys
                .vectors
                .iter()
                .map(|v| Value::Array(v.amps.iter().map(|z| complex_json(*z)).collect()))
                .collect();
            let sources: Vec<&str> = sys
                .sources
                .iter()
                .map(|s| match s {
                    VectorSource::ClosedForm => "closed_form",
                    VectorSource::Oracle => "oracle",
                })
                .collect();
            let mut oracle_levels = oracle.values;
            oracle_levels.sort_by(f64::total_cmp);
            to_json_string(&json!({
                "params": p.to_json_value(),
                "levels": lv,
                "vectors_bell": vectors,
                "vector_sources": sources,
                "oracle_levels": oracle_levels,
                "oracle_residual": sys.residual(&h),
            }))?
        }
        _ => {
            let mut t = CsvTable::new(
                ["mu", "nu", "energy"]
                    .into_iter()
                    .map(String::from)
                    .chain((0..4).flat_map(|r| [format!("v{r}_re"), format!("v{r}_im")])),
            );
            for k in 0..4 {
                let (mu, nu) = bell_label(k);
                let mut row = vec![mu.value(), nu.value(), levels.0[k]];
                row.extend(sys.vectors[k].amps.iter().flat_map(|z| [z.re, z.im]));
                t.push(row);
            }
            t.render()
        }
    };
    cfg.write(&text)?;
    Ok(EXIT_OK)
}

fn finish_table(cfg: &RunConfig, table: &CsvTable, default: Format) -> Result<i32> {
    let text = match cfg.format_or(default, &[Format::Csv, Format::Json])? {
        Format::Csv => table.render(),
        _ => to_json_string(&table.to_json())?,
    };
    cfg.write(&text)?;
    Ok(EXIT_OK)
}

pub fn cmd_evolve(cfg: &RunConfig, sweep: &SweepArgs) -> Result<i32> {
    sweep.validate()?;
    let p = cfg.load_params()?;
    let mut header = vec!["t".to_string()];
    for r in 0..4 {
        for c in 0..4 {
            header.push(format!("u{r}{c}_re"));
            header.push(format!("u{r}{c}_im"));
        }
    }
    header.extend(["angle0".into(), "angle1".into(), "phase0".into(), "phase1".into()]);
    let mut table = CsvTable::new(header);
    for t in sweep.times() {
        let u = evolve_closed(&p, t);
        let mut row = vec![t];
        row.extend(u.mat.0.iter().flatten().flat_map(|z| [z.re, z.im]));
        let canon = [u.sectors[0].canonical(), u.sectors[1].canonical()];
        row.extend([canon[0].1, canon[1].1, canon[0].0, canon[1].0]);
        table.push(row);
    }
    finish_table(cfg, &table, Format::Csv)
}

enum StateSpec {
    Bell(Sign, Sign),
    Random,
}

fn parse_state(s: &str) -> Result<StateSpec> {
    if s.eq_ignore_ascii_case("random") {
        return Ok(StateSpec::Random);
    }
    match s.split_once(':') {
        Some((kind, lab)) if kind.eq_ignore_ascii_case("bell") => {
            let (mu, nu) = parse_bell_label(lab)?;
            Ok(StateSpec::Bell(mu, nu))
        }
        _ => Err(Error::InvalidParams(format!(
            "--state must be bell:<mu><nu> or random, got {s:?}"
        ))),
    }
}

pub fn cmd_entangle(cfg: &RunConfig, state: &str, sweep: &SweepArgs) -> Result<i32> {
    sweep.validate()?;
    let p = cfg.load_params()?;
    let spec = parse_state(state)?;
    let v = match spec {
        StateSpec::Bell(mu, nu) => BellVector::bell(mu, nu),
        StateSpec::Random => random_state(&mut ChaCha8Rng::seed_from_u64(cfg.seed)),
    };
    let bell = matches!(spec, StateSpec::Bell(..));
    let mut header = vec!["t", "C_closed", "C_oracle", "S_oracle"];
    if bell {
        header.push("C_short");
    }
    let mut table = CsvTable::new(header);
    for t in sweep.times() {
        let u = evolve_closed(&p, t).mat;
        let c_closed = concurrence_bell(&BellVector::new(u.mul_vec(&v.amps)))?;
        let uo = evolve_oracle(&p, t)?;
        let evolved = BellVector::new(uo.mul_vec(&v.amps));
        let n = evolved.norm();
        let c_oracle = concurrence_oracle(&BellVector::new(evolved.amps.map(|z| z / n)))?;
        let s_oracle = EntanglementReport::from_concurrence(c_oracle).entropy;
        let mut row = vec![t, c_closed, c_oracle, s_oracle];
        if let StateSpec::Bell(mu, nu) = spec {
            row.push(bell_concurrence_evolution(&p, mu, nu, t)?.closed);
        }
        table.push(row);
    }
    finish_table(cfg, &table, Format::Csv)
}

pub fn cmd_sector(cfg: &RunConfig, t: f64) -> Result<i32> {
    if !t.is_finite() {
        return Err(Error::InvalidParams(format!("--t must be finite, got {t}")));
    }
    let p = cfg.load_params()?;
    let u = evolve_closed(&p, t);
    let format = cfg.format_or(Format::Json, &[Format::Json, Format::Csv])?;
    let text = match format {
        Format::Json => {
            let sectors: Vec<Value> = u
                .sectors
                .iter()
                .enumerate()
                .map(|(idx, s)| {
                    let signs = sector_signs(p.axis, idx);
                    let (phase, angle, axis) = s.canonical();
                    let (b, j) = ratios_from_axis(p.axis, idx, &s.axis);
                    let rows = s.rows.expect("closed-form sectors carry rows");
                    json!({
                        "index": idx,
                        "rows": [rows.0, rows.1],
                        "bell": [label_of(rows.0), label_of(rows.1)],
                        "alpha": signs.alpha.value(),
                        "beta": signs.beta.value(),
                        "q": signs.q.value(),
                        "phase": phase,
                        "angle": angle,
                        "axis": axis,
                        "b": b,
                        "j": j,
                        "matrix": s.mat.0.iter().map(|r| r.iter().map(|z| complex_json(*z)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            to_json_string(&json!({
                "params": p.to_json_value(),
                "t": t,
                "unitary_bell": matrix_json(&u.mat),
                "sectors": sectors,
            }))?
        }
        _ => {
            let mut table = CsvTable::new(["index", "k", "l", "phase", "angle", "nx", "ny", "nz"]);
            for (idx, s) in u.sectors.iter().enumerate() {
                let (phase, angle, n) = s.canonical();
                let (k, l) = s.rows.expect("closed-form sectors carry rows");
                table.push(vec![idx as f64, k as f64, l as f64, phase, angle, n[0], n[1], n[2]]);
            }
            table.render()
        }
    };
    cfg.write(&text)?;
    Ok(EXIT_OK)
}

fn label_of(index: usize) -> String {
    let (mu, nu) = bell_label(index);
    label(mu, nu)
}

pub fn cmd_verify(cfg: &RunConfig, suite: &str, axis: Option<&str>, samples: Option<usize>) -> Result<i32> {
    let mut vc = VerifyConfig::new(suite.parse::<Suite>()?, cfg.seed);
    if let Some(a) = axis {
        vc.axes = vec![a.parse::<Axis>()?];
    }
    vc.samples = samples;
    let format = cfg.format_or(Format::Text, &[Format::Text, Format::Json])?;
    let report = verify::run(&vc);
    let text = match format {
        Format::Json => to_json_string(&report.to_json())?,
        _ => report.table(),
    };
    cfg.write(&text)?;
    Ok(if report.all_passed() { EXIT_OK } else { EXIT_FAILURE })
}

/// `axis=nx,ny,nz;angle=a` (axis normalized) or `matrix=` with 8 reals, row-major `re,im` pairs.
pub fn parse_target(text: &str, axis: Axis, sector: usize, tol: f64) -> Result<SynthesisTarget> {
    let mut n: Option<Vec3> = None;
    let mut angle: Option<f64> = None;
    let mut matrix: Option<Mat2> = None;
    let numbers = |s: &str| -> Result<Vec<f64>> {
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParams(format!("bad number {x:?} in --target")))
            })
            .collect()
    };
    for part in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::InvalidParams(format!("--target entry {part:?} lacks '='")))?;
        match key.trim().to_ascii_lowercase().as_str() {
            "axis" => {
                let v = numbers(value)?;
                let [x, y, z] = v[..] else {
                    return Err(Error::InvalidParams("target axis needs 3 components".into()));
                };
                let norm = (x * x + y * y + z * z).sqrt();
                if !(norm > 0.0 && norm.is_finite()) {
                    return Err(Error::NonUnitAxis { norm });
                }
                n = Some([x / norm, y / norm, z / norm]);
            }
            "angle" => angle = Some(numbers(value)?.first().copied().unwrap_or(f64::NAN)),
            "matrix" => {
                let v = numbers(value)?;
                if v.len() != 8 {
                    return Err(Error::InvalidParams("target matrix needs 8 numbers".into()));
                }
                let z = |k: usize| C64::new(v[2 * k], v[2 * k + 1]);
                matrix = Some(crate::linalg::CMat([[z(0), z(1)], [z(2), z(3)]]));
            }
            other => return Err(Error::InvalidParams(format!("unknown --target key {other:?}"))),
        }
    }
    match (matrix, n, angle) {
        (Some(m), None, None) => SynthesisTarget::from_matrix(m, axis, sector, tol),
        (None, Some(n), Some(a)) if a.is_finite() => SynthesisTarget::from_axis_angle(n, a, axis, sector, tol),
        _ => Err(Error::InvalidParams(
            "--target needs either axis=..;angle=.. or matrix=..".into(),
        )),
    }
}

pub fn cmd_synthesize(cfg: &RunConfig, axis: &str, target: &str, sector: usize) -> Result<i32> {
    let axis: Axis = axis.parse()?;
    let tol = cfg.tol.unwrap_or(crate::synthesis::two_pulse::SYNTHESIS_TOL);
    let target = parse_target(target, axis, sector, tol)?;
    cfg.format_or(Format::Json, &[Format::Json])?;
    let sol = synthesize_two_pulse(&target)?;
    let pulses: Vec<PulseSpec> = sol.pulses.to_vec();
    cfg.write(&to_json_string(&sequence_to_json(&pulses))?)?;
    eprintln!(
        "{}",
        json!({
            "kind": format!("{:?}", sol.kind),
            "residual": sol.residual,
            "total_time": sol.total_time,
            "removed_phase": sol.removed_phase,
            "delta": sol.angles.delta,
        })
    );
    Ok(EXIT_OK)
}

fn loop_json(c: &LoopCandidate) -> Value {
    json!({"t": c.time, "sign": c.sign.value(), "residual": c.residual})
}

pub fn cmd_loops(cfg: &RunConfig, horizon: Option<f64>) -> Result<i32> {
    if let Some(h) = horizon {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidParams(format!("--horizon must be positive, got {h}")));
        }
    }
    let p = cfg.load_params()?;
    let tol = cfg.tol.unwrap_or(1e-10);
    cfg.format_or(Format::Json, &[Format::Json])?;
    let rep = find_evolution_loop(&p, horizon, tol);
    let doc = json!({
        "params": p.to_json_value(),
        "horizon": rep.horizon,
        "tol": rep.tol,
        "scanned": rep.scanned,
        "exact_found": !rep.exact.is_empty(),
        "exact": rep.exact.iter().map(loop_json).collect::<Vec<_>>(),
        "approximate": rep.approximate.iter().map(loop_json).collect::<Vec<_>>(),
        "best_residual": rep.best_residual,
    });
    cfg.write(&to_json_string(&doc)?)?;
    match rep.require_exact() {
        Ok(_) => Ok(EXIT_OK),
        Err(e) => {
            eprintln!("{}", json!({"error": error_kind(&e), "message": e.to_string()}));
            Ok(EXIT_FAILURE)
        }
    }
}
