//! Two-pulse realization of an arbitrary SU(2) sector.
//!
//! Every single pulse of axis `h` rotates its sector about an axis confined to
//! one plane `P` (x-z for odd `h`, y-z for even `h`). A target `rot(theta, m)`
//! is written as `rot(D, n) rot(D', n')` with `n, n'` in `P`, solved in the
//! frame `n`, `n_perp = p x n`, `n_tilde = n x n_perp` where `p` is the
//! normal of `P`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use crate::error::{Error, Result};
use crate::evolution::{assemble, quarter_turn, rotation_matrix, sector_signs, Sector};
use crate::group::PulseSpec;
use crate::linalg::{cross3, dot3, norm3, scale3, Mat2, Mat4, Vec3, C64};
use crate::model::{Axis, ModelParams};

use super::sequence_unitary;

/// Number of in-plane directions `n` tried by the solver.
pub const FRAME_GRID: usize = 360;
/// Default end-to-end tolerance.
pub const SYNTHESIS_TOL: f64 = 1e-8;
const DEGENERATE: f64 = 1e-12;

/// A sector target projected to SU(2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthesisTarget {
    pub su2: Mat2,
    /// Phase removed by the projection: `input = e^{i phase} su2`.
    pub removed_phase: f64,
    pub axis: Axis,
    /// Sector index (0 or 1).
    pub sector: usize,
    pub tol: f64,
}

impl SynthesisTarget {
    pub fn from_matrix(mat: Mat2, axis: Axis, sector: usize, tol: f64) -> Result<Self> {
        check_common(sector, tol)?;
        let dev = mat.unitarity_deviation();
        if dev > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "target is not unitary (deviation {dev:.3e})"
            )));
        }
        let s = Sector::from_matrix(mat);
        let su2 = mat.scale(C64::from_polar(1.0, -s.phase));
        Ok(SynthesisTarget {
            su2,
            removed_phase: s.phase,
            axis,
            sector,
            tol,
        })
    }

    /// `cos(angle) I - i sin(angle) n.sigma` with a unit axis `n`.
    pub fn from_axis_angle(n: Vec3, angle: f64, axis: Axis, sector: usize, tol: f64) -> Result<Self> {
        check_common(sector, tol)?;
        let s = Sector::from_exponential(0.0, angle, n)?;
        Ok(SynthesisTarget {
            su2: s.mat,
            removed_phase: 0.0,
            axis,
            sector,
            tol,
        })
    }

    /// The full 4x4 operator: target in its sector, identity in the other.
    pub fn embedded(&self) -> Mat4 {
        let id = Mat2::identity();
        if self.sector == 0 {
            assemble(self.axis, [&self.su2, &id])
        } else {
            assemble(self.axis, [&id, &self.su2])
        }
    }
}

fn check_common(sector: usize, tol: f64) -> Result<()> {
    if sector > 1 {
        return Err(Error::InvalidParams(format!("sector index must be 0 or 1, got {sector}")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParams(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub n: Vec3,
    pub n_perp: Vec3,
    pub n_tilde: Vec3,
}

impl Frame {
    fn new(plane_normal: &Vec3, n: Vec3) -> Frame {
        let n_perp = cross3(plane_normal, &n);
        let n_tilde = cross3(&n, &n_perp);
        Frame { n, n_perp, n_tilde }
    }
}

/// Target axis `m = cos(alpha) n + sin(alpha) (cos(beta) n_perp + sin(beta) n_tilde)`;
/// `delta` is the angle of the second axis from `n` toward `n_perp`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameAngles {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionKind {
    TwoPulse,
    /// Target axis already in the pulse plane; the second pulse has zero duration.
    SinglePulse,
    /// Identity target: a pulse followed by its reverse.
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoPulseSolution {
    /// In application order.
    pub pulses: [PulseSpec; 2],
    pub kind: SolutionKind,
    pub frame: Frame,
    pub angles: FrameAngles,
    /// Frobenius distance between the realized 4x4 product and the embedded target.
    pub residual: f64,
    pub removed_phase: f64,
    pub total_time: f64,
}

fn plane_normal(axis: Axis) -> Vec3 {
    if axis.index() % 2 == 1 {
        [0.0, 1.0, 0.0]
    } else {
        [1.0, 0.0, 0.0]
    }
}

/// Unit-Rabi pulse of `axis` rotating sector `sector` by `angle` about the
/// in-plane axis `n` (physical convention).
pub fn pulse_for_rotation(axis: Axis, sector: usize, n: &Vec3, angle: f64) -> Result<PulseSpec> {
    let (n, angle) = if angle < 0.0 { (scale3(n, -1.0), -angle) } else { (*n, angle) };
    let p = plane_normal(axis);
    let off = dot3(&n, &p).abs();
    if off > 1e-10 || (norm3(&n) - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParams(format!(
            "axis {n:?} is not a unit vector in the pulse plane"
        )));
    }
    let signs = sector_signs(axis, sector);
    let (sn, cs) = quarter_turn(axis);
    // physical axis = -(q b sn, q b cs, beta j)
    let b = -signs.q.value() * (n[0] * sn + n[1] * cs);
    let j = -signs.beta.value() * n[2];
    let alpha = signs.alpha;
    let mut field = [0.0; 2];
    let mut pair = [0.0; 2];
    field[alpha.flip().slot()] = b;
    pair[alpha.slot()] = j;
    let params = ModelParams::from_sums(axis, 0.0, field, pair)?;
    PulseSpec::new(params, angle)
}

struct Candidate {
    cost: f64,
    frame: Frame,
    angles: FrameAngles,
    first: (f64, Vec3),
    second: (f64, Vec3),
}

fn rot(angle: f64, n: &Vec3) -> Mat2 {
    rotation_matrix(0.0, angle, n)
}

fn solve_in_frame(m: &Vec3, theta: f64, frame: Frame) -> Option<Candidate> {
    let ca = dot3(m, &frame.n);
    let sa = (1.0 - ca * ca).max(0.0).sqrt();
    if sa < 1e-9 {
        return None;
    }
    let cb = dot3(m, &frame.n_perp) / sa;
    let sb = dot3(m, &frame.n_tilde) / sa;
    let beta = sb.atan2(cb);
    let (st, ct) = theta.sin_cos();
    // cot(delta) = (cos(beta) sin(theta) cos(alpha) - sin(beta) cos(theta)) / (sin(theta) sin(alpha))
    let y = st * sa;
    let x = st * ca * cb - ct * sb;
    let delta = y.atan2(x);
    let sin_second = x.hypot(y);
    let cos_second = sb * st * ca + cb * ct;
    let second = sin_second.atan2(cos_second);
    let (sd, cd) = delta.sin_cos();
    let n2 = [
        cd * frame.n[0] + sd * frame.n_perp[0],
        cd * frame.n[1] + sd * frame.n_perp[1],
        cd * frame.n[2] + sd * frame.n_perp[2],
    ];
    Some(Candidate {
        cost: beta.abs() + second.abs(),
        frame,
        angles: FrameAngles {
            alpha: sa.atan2(ca),
            beta,
            delta,
        },
        first: (second, n2),
        second: (beta, frame.n),
    })
}

/// Realize the target sector with two pulses of its axis.
///
/// Scans [`FRAME_GRID`] in-plane directions and keeps the valid decomposition
/// with the smallest total pulse time; ties go to the first direction.
pub fn synthesize_two_pulse(target: &SynthesisTarget) -> Result<TwoPulseSolution> {
    let axis = target.axis;
    let s = Sector::from_matrix(target.su2);
    let (theta, m) = (s.angle, s.axis);
    let p = plane_normal(axis);
    let z = [0.0, 0.0, 1.0];

    let (kind, frame, angles, first, second) = if theta.sin().abs() < DEGENERATE && theta < FRAC_PI_2 {
        let frame = Frame::new(&p, z);
        (SolutionKind::Identity, frame, zero_angles(), (FRAC_PI_2, z), (FRAC_PI_2, scale3(&z, -1.0)))
    } else if dot3(&m, &p).abs() < DEGENERATE || theta.sin().abs() < DEGENERATE {
        // -I reads out with axis z, which lies in every pulse plane
        let frame = Frame::new(&p, m);
        (SolutionKind::SinglePulse, frame, zero_angles(), (theta, m), (0.0, m))
    } else {
        let mut best: Option<Candidate> = None;
        for k in 0..FRAME_GRID {
            let psi = 2.0 * PI * k as f64 / FRAME_GRID as f64;
            let (sp, cp) = psi.sin_cos();
            let n = if p[1] != 0.0 { [sp, 0.0, cp] } else { [0.0, sp, cp] };
            let Some(c) = solve_in_frame(&m, theta, Frame::new(&p, n)) else {
                continue;
            };
            let product = rot(c.second.0, &c.second.1) * rot(c.first.0, &c.first.1);
            if product.dist(&target.su2) >= target.tol {
                continue;
            }
            if best.as_ref().is_none_or(|b| c.cost < b.cost - 1e-12) {
                best = Some(c);
            }
        }
        let c = best.ok_or_else(|| {
            Error::SolverFailure(format!(
                "no frame direction reproduced the target (angle {theta:.6}, axis {m:?}) within {:.1e}",
                target.tol
            ))
        })?;
        (SolutionKind::TwoPulse, c.frame, c.angles, c.first, c.second)
    };

    let pulses = [
        pulse_for_rotation(axis, target.sector, &first.1, first.0)?,
        pulse_for_rotation(axis, target.sector, &second.1, second.0)?,
    ];
    let realized = sequence_unitary(&pulses);
    let residual = realized.dist(&target.embedded());
    if residual >= target.tol {
        return Err(Error::SolverFailure(format!(
            "end-to-end product misses the target by {residual:.3e} (tol {:.1e})",
            target.tol
        )));
    }
    Ok(TwoPulseSolution {
        pulses,
        kind,
        frame,
        angles,
        residual,
        removed_phase: target.removed_phase,
        total_time: pulses[0].duration + pulses[1].duration,
    })
}

fn zero_angles() -> FrameAngles {
    FrameAngles {
        alpha: 0.0,
        beta: 0.0,
        delta: 0.0,
    }
}

/// Histogram bins of `delta` over `[0, pi]`.
pub const DELTA_BINS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageReport {
    pub axis: Axis,
    pub samples: usize,
    pub successes: usize,
    pub single_pulse: usize,
    pub max_residual: f64,
    /// Counts of two-pulse `delta` in `DELTA_BINS` equal bins over `[0, pi]`.
    pub delta_histogram: [usize; DELTA_BINS],
    /// Diagnostics of failed targets.
    pub failures: Vec<String>,
}

impl CoverageReport {
    pub fn success_rate(&self) -> f64 {
        if self.samples == 0 {
            1.0
        } else {
            self.successes as f64 / self.samples as f64
        }
    }
}

/// Synthesize `samples` Haar-random targets, alternating sectors.
pub fn coverage_experiment<R: Rng + ?Sized>(rng: &mut R, axis: Axis, samples: usize, tol: f64) -> Result<CoverageReport> {
    let mut report = CoverageReport {
        axis,
        samples,
        successes: 0,
        single_pulse: 0,
        max_residual: 0.0,
        delta_histogram: [0; DELTA_BINS],
        failures: Vec::new(),
    };
    for i in 0..samples {
        let u = crate::sampling::haar_su2(rng);
        let target = SynthesisTarget::from_matrix(u, axis, i % 2, tol)?;
        match synthesize_two_pulse(&target) {
            Ok(sol) => {
                report.successes += 1;
                report.max_residual = report.max_residual.max(sol.residual);
                match sol.kind {
                    SolutionKind::TwoPulse => {
                        let bin = ((sol.angles.delta / PI) * DELTA_BINS as f64) as usize;
                        report.delta_histogram[bin.min(DELTA_BINS - 1)] += 1;
                    }
                    _ => report.single_pulse += 1,
                }
            }
            Err(e) => report.failures.push(format!("sample {i}: {e}")),
        }
    }
    Ok(report)
}
