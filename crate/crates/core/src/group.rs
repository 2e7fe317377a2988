//! Subgroup structure of the block-sparse evolution operators.
//!
//! For a fixed field axis `h`, every `U_h(t)` lives in the subgroup `S_h` of
//! SU(4) with two Bell-pair sectors. Pulses whose sectors share a rotation
//! axis (up to sign) form abelian families; this module labels those families
//! and provides closed-form inverse and product prescriptions.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::error::{Error, Result};
use crate::evolution::{
    assemble, evolve_closed, extract_sectors, rotation_matrix, sector_axis, sector_signs, structure_violation,
    EvolutionOp, PhasePair, Sector, CLOSED_FORM_TIME_SIGN,
};
use crate::linalg::{cross3, dot3, norm3, scale3, wrap_pi, Mat2, Mat4, Vec3, C64};
use crate::model::{reduce, Axis, ModelParams, ReducedParams, Sign};

/// Default tolerance for group identities.
pub const GROUP_TOL: f64 = 1e-10;
/// Dead zone for label comparison.
pub const LABEL_TOL: f64 = 1e-9;
/// Default integer branch window `[-8, 8]`.
pub const DEFAULT_WINDOW: i64 = 8;

/// One rectangular pulse: a Hamiltonian held for `duration`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseSpec {
    pub params: ModelParams,
    pub duration: f64,
}

impl PulseSpec {
    pub fn new(params: ModelParams, duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "pulse duration must be finite and non-negative, got {duration}"
            )));
        }
        Ok(PulseSpec { params, duration })
    }

    pub fn axis(&self) -> Axis {
        self.params.axis
    }

    pub fn unitary(&self) -> EvolutionOp {
        evolve_closed(&self.params, self.duration)
    }

    pub fn phases(&self, alpha: Sign) -> PhasePair {
        PhasePair::new(&reduce(&self.params), alpha, self.duration)
    }
}

/// Sign of the field ratio within a family label; `Zero` marks `b = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldSign {
    Minus,
    Zero,
    Plus,
}

impl FieldSign {
    pub fn symbol(self) -> &'static str {
        match self {
            FieldSign::Minus => "-",
            FieldSign::Zero => "0",
            FieldSign::Plus => "+",
        }
    }
}

/// `(|j|, sign b)` with `j` taken non-negative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorLabel {
    pub abs_j: f64,
    pub sign_b: FieldSign,
}

impl SectorLabel {
    pub fn from_ratios(b: f64, j: f64) -> Self {
        let sign_b = if b.abs() <= LABEL_TOL {
            FieldSign::Zero
        } else if j.abs() <= LABEL_TOL || b * j > 0.0 {
            FieldSign::Plus
        } else {
            FieldSign::Minus
        };
        SectorLabel { abs_j: j.abs().min(1.0), sign_b }
    }

    pub fn matches(&self, other: &SectorLabel) -> bool {
        (self.abs_j - other.abs_j).abs() <= LABEL_TOL && self.sign_b == other.sign_b
    }
}

/// Family label of an element of `S_h`, sectors in row order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupLabel {
    pub axis: Axis,
    pub sectors: [SectorLabel; 2],
}

impl GroupLabel {
    pub fn matches(&self, other: &GroupLabel) -> bool {
        self.axis == other.axis && self.sectors[0].matches(&other.sectors[0]) && self.sectors[1].matches(&other.sectors[1])
    }
}

fn ratios(r: &ReducedParams, alpha: Sign) -> (f64, f64) {
    (r.b(alpha.flip()), r.j(alpha.flip()))
}

pub fn pulse_label(pulse: &PulseSpec) -> GroupLabel {
    let r = reduce(&pulse.params);
    let axis = pulse.axis();
    let label = |idx: usize| {
        let (b, j) = ratios(&r, sector_signs(axis, idx).alpha);
        SectorLabel::from_ratios(b, j)
    };
    GroupLabel {
        axis,
        sectors: [label(0), label(1)],
    }
}

/// `(b, j)` recovered from a physical sector axis.
pub fn ratios_from_axis(axis: Axis, idx: usize, n: &Vec3) -> (f64, f64) {
    let signs = sector_signs(axis, idx);
    let native = scale3(n, CLOSED_FORM_TIME_SIGN);
    let (sn, cs) = match axis {
        Axis::X => (1.0, 0.0),
        Axis::Y => (0.0, -1.0),
        Axis::Z => (-1.0, 0.0),
    };
    let b = signs.q.value() * (native[0] * sn + native[1] * cs);
    let j = signs.beta.value() * native[2];
    (b, j)
}

/// Family label read off a matrix in `S_h`.
pub fn subgroup_label(u: &Mat4, axis: Axis) -> Result<GroupLabel> {
    let sectors = extract_sectors(u, axis)?;
    let mut labels = [SectorLabel::from_ratios(0.0, 1.0); 2];
    for (idx, s) in sectors.iter().enumerate() {
        if s.angle.sin().abs() <= LABEL_TOL {
            return Err(Error::IndeterminateLabel { sector: idx });
        }
        let (b, j) = ratios_from_axis(axis, idx, &s.axis);
        labels[idx] = SectorLabel::from_ratios(b, j);
    }
    Ok(GroupLabel { axis, sectors: labels })
}

/// Unitary, unit determinant and the sector zero pattern of `axis`, all within `tol`.
pub fn in_s_h(u: &Mat4, axis: Axis, tol: f64) -> bool {
    if u.unitarity_deviation() > tol || (u.det() - 1.0).norm() > tol {
        return false;
    }
    if structure_violation(u, axis).is_some_and(|(_, _, m)| m > tol) {
        return false;
    }
    (0..2).all(|idx| {
        let (k, l) = crate::evolution::sector_rows(axis, idx);
        let block = crate::linalg::CMat([[u.0[k][k], u.0[k][l]], [u.0[l][k], u.0[l][l]]]);
        block.unitarity_deviation() <= tol
    })
}

/// True when both sectors rotate about parallel axes: `Jpair' B - B' Jpair = 0`.
pub fn commutes(p1: &PulseSpec, p2: &PulseSpec) -> bool {
    if p1.axis() != p2.axis() {
        return false;
    }
    let (r1, r2) = (reduce(&p1.params), reduce(&p2.params));
    Sign::ALL.iter().all(|&alpha| {
        let (b1, j1) = (r1.field(alpha.flip()), r1.pair(alpha));
        let (b2, j2) = (r2.field(alpha.flip()), r2.pair(alpha));
        let scale = (r1.rabi(alpha.flip()) * r2.rabi(alpha.flip())).max(1.0);
        (j2 * b1 - b2 * j1).abs() <= GROUP_TOL * scale
    })
}

/// How two same-family pulses fuse into one, per sector in row order.
///
/// Angles are in the closed-form convention: the fused sector has
/// `delta_plus = D+ + D'+ + 2 r pi` and `delta_minus = D'- + S D- + 2 r' pi`.
#[derive(Clone, Copy, Debug)]
pub struct ClosurePrescription {
    pub signs: [Sign; 2],
    pub phase_wraps: [i64; 2],
    pub angle_wraps: [i64; 2],
    pub delta_plus: [f64; 2],
    pub delta_minus: [f64; 2],
    /// Operator predicted from the prescription.
    pub predicted: Mat4,
    /// `|predicted - U(p2) U(p1)|_F`
    pub residual: f64,
}

/// Closure of `U(p2) U(p1)` (`p1` first) within one family.
pub fn product_closure_check(p1: &PulseSpec, p2: &PulseSpec) -> Result<ClosurePrescription> {
    let axis = p1.axis();
    if p2.axis() != axis {
        return Err(Error::NotClosed(format!(
            "pulses act along different axes {} and {}",
            axis,
            p2.axis()
        )));
    }
    let (r1, r2) = (reduce(&p1.params), reduce(&p2.params));
    let mut out = ClosurePrescription {
        signs: [Sign::Plus; 2],
        phase_wraps: [0; 2],
        angle_wraps: [0; 2],
        delta_plus: [0.0; 2],
        delta_minus: [0.0; 2],
        predicted: Mat4::zeros(),
        residual: 0.0,
    };
    let mut blocks = [Mat2::identity(); 2];
    for (idx, block) in blocks.iter_mut().enumerate() {
        let alpha = sector_signs(axis, idx).alpha;
        let (b1, j1) = ratios(&r1, alpha);
        let (b2, j2) = ratios(&r2, alpha);
        let active1 = r1.rabi(alpha.flip()) > 0.0;
        let active2 = r2.rabi(alpha.flip()) > 0.0;
        let s = if !active1 || !active2 || ((b2 - b1).abs() <= LABEL_TOL && (j2 - j1).abs() <= LABEL_TOL) {
            Sign::Plus
        } else if (b2 + b1).abs() <= LABEL_TOL && (j2 + j1).abs() <= LABEL_TOL {
            Sign::Minus
        } else {
            return Err(Error::NotClosed(format!(
                "sector {idx}: (b, j) = ({b2:.6}, {j2:.6}) is not parallel to ({b1:.6}, {j1:.6})"
            )));
        };
        let pp1 = PhasePair::new(&r1, alpha, p1.duration);
        let pp2 = PhasePair::new(&r2, alpha, p2.duration);
        let raw_plus = pp1.delta_plus + pp2.delta_plus;
        let raw_minus = pp2.delta_minus + s.value() * pp1.delta_minus;
        let plus = wrap_pi(raw_plus);
        let r = ((plus - raw_plus) / TAU).round() as i64;
        let rp = -(raw_minus / TAU).floor() as i64;
        let minus = raw_minus + TAU * rp as f64;

        let n = if active2 {
            sector_axis(&r2, axis, alpha)
        } else {
            scale3(&sector_axis(&r1, axis, alpha), s.value())
        };
        *block = rotation_matrix(CLOSED_FORM_TIME_SIGN * plus, minus, &n);
        out.signs[idx] = s;
        out.phase_wraps[idx] = r;
        out.angle_wraps[idx] = rp;
        out.delta_plus[idx] = plus;
        out.delta_minus[idx] = minus;
    }
    out.predicted = assemble(axis, [&blocks[0], &blocks[1]]);
    out.residual = out.predicted.dist(&(p2.unitary().mat * p1.unitary().mat));
    Ok(out)
}

/// `s1 s2` through the SU(2) composition rule for axis-angle pairs.
pub fn compose_bch(s1: &Sector, s2: &Sector) -> Result<Sector> {
    if let (Some(left), Some(right)) = (s1.rows, s2.rows) {
        if left != right {
            return Err(Error::RowMismatch { left, right });
        }
    }
    let (sa, ca) = s1.angle.sin_cos();
    let (sb, cb) = s2.angle.sin_cos();
    let c = ca * cb - sa * sb * dot3(&s1.axis, &s2.axis);
    let x = cross3(&s1.axis, &s2.axis);
    let v = [
        sa * cb * s1.axis[0] + ca * sb * s2.axis[0] + sa * sb * x[0],
        sa * cb * s1.axis[1] + ca * sb * s2.axis[1] + sa * sb * x[1],
        sa * cb * s1.axis[2] + ca * sb * s2.axis[2] + sa * sb * x[2],
    ];
    let s = norm3(&v);
    let angle = s.atan2(c);
    let axis = if s > 1e-14 { scale3(&v, 1.0 / s) } else { [0.0, 0.0, 1.0] };
    let phase = s1.phase + s2.phase;
    Ok(Sector {
        mat: rotation_matrix(phase, angle, &axis),
        phase,
        angle,
        axis,
        rows: s1.rows.or(s2.rows),
        signs: s1.signs.or(s2.signs),
        phases: None,
    })
}

/// Integer branch `(S, n, m)` of an inverse prescription, per sector in row order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InverseBranch {
    pub signs: [Sign; 2],
    pub n: [i64; 2],
    pub m: [i64; 2],
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CouplingMode {
    /// Couplings and fields may all change; `duration` of the inverse pulse
    /// defaults to the original duration (or 1 for a zero-length pulse).
    Free { duration: Option<f64> },
    /// Couplings stay as they are; only fields and duration change.
    Fixed,
}

#[derive(Clone, Copy, Debug)]
pub struct InverseSolution {
    pub pulse: PulseSpec,
    pub branch: InverseBranch,
    /// `|U(p') U(p) - I|_F`
    pub residual: f64,
}

/// Build the inverse pulse for an explicit branch and inverse duration.
pub fn inverse_for_branch(pulse: &PulseSpec, branch: &InverseBranch, duration: f64) -> Result<PulseSpec> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::Infeasible(format!("inverse duration must be positive, got {duration}")));
    }
    let axis = pulse.axis();
    let r = reduce(&pulse.params);
    let t = pulse.duration;
    let mut field = [0.0; 2];
    let mut pair = [0.0; 2];
    let mut coupling_axis = [0.0; 2];
    for idx in 0..2 {
        let alpha = sector_signs(axis, idx).alpha;
        let s = branch.signs[idx].value();
        let pp = PhasePair::new(&r, alpha, t);
        let angle = branch.m[idx] as f64 * PI - s * pp.delta_minus;
        if angle < -1e-12 {
            return Err(Error::Infeasible(format!(
                "sector {idx}: m pi - S D- = {angle:.6} is negative, so no forward pulse reaches it"
            )));
        }
        let rabi = angle.max(0.0) / duration;
        let (b, j) = ratios(&r, alpha);
        field[alpha.flip().slot()] = s * b * rabi;
        pair[alpha.slot()] = s * j * rabi;
        let p = (2 * branch.n[idx] + branch.m[idx]) as f64;
        coupling_axis[idx] = (alpha.value() * p * PI - r.coupling_axis * t) / duration;
    }
    let p0 = 2 * branch.n[0] + branch.m[0];
    let p1 = 2 * branch.n[1] + branch.m[1];
    if p0 != -p1 {
        return Err(Error::Infeasible(format!(
            "phase conditions disagree between sectors: 2n+m is {p0} and {p1}, they must be opposite"
        )));
    }
    let params = ModelParams::from_sums(axis, coupling_axis[0], field, pair)?;
    PulseSpec::new(params, duration)
}

fn residual_against_identity(p: &PulseSpec, inv: &PulseSpec) -> f64 {
    (inv.unitary().mat * p.unitary().mat).dist(&Mat4::identity())
}

/// Smallest non-negative `m pi - S angle` per parity of `m`: `(S, m, value)`.
fn best_per_parity(angle: f64, window: i64) -> [Option<(Sign, i64, f64)>; 2] {
    let mut best: [Option<(Sign, i64, f64)>; 2] = [None, None];
    for s in [Sign::Plus, Sign::Minus] {
        for m in -window..=window {
            let v = m as f64 * PI - s.value() * angle;
            if v < -1e-12 {
                continue;
            }
            let par = m.rem_euclid(2) as usize;
            if best[par].is_none_or(|(_, _, b)| v < b - 1e-12) {
                best[par] = Some((s, m, v.max(0.0)));
            }
        }
    }
    best
}

/// Search the integer branches for an inverse pulse.
pub fn inverse_prescription(pulse: &PulseSpec, mode: CouplingMode, window: i64) -> Result<InverseSolution> {
    match mode {
        CouplingMode::Free { duration } => {
            let t_inv = duration.unwrap_or(if pulse.duration > 0.0 { pulse.duration } else { 1.0 });
            inverse_free(pulse, t_inv, window)
        }
        CouplingMode::Fixed => inverse_fixed(pulse, window),
    }
}

fn inverse_free(pulse: &PulseSpec, t_inv: f64, window: i64) -> Result<InverseSolution> {
    let axis = pulse.axis();
    let r = reduce(&pulse.params);
    let per_sector: Vec<_> = (0..2)
        .map(|idx| {
            let alpha = sector_signs(axis, idx).alpha;
            best_per_parity(PhasePair::new(&r, alpha, pulse.duration).delta_minus, window)
        })
        .collect();
    let mut best: Option<(f64, usize)> = None;
    for par in 0..2 {
        if let (Some(a), Some(b)) = (per_sector[0][par], per_sector[1][par]) {
            let total = a.2 + b.2;
            if best.is_none_or(|(v, _)| total < v - 1e-12) {
                best = Some((total, par));
            }
        }
    }
    let Some((_, par)) = best else {
        return Err(Error::Infeasible(format!(
            "no branch with m in [-{window}, {window}] gives non-negative angles in both sectors"
        )));
    };
    let (s0, m0, _) = per_sector[0][par].unwrap();
    let (s1, m1, _) = per_sector[1][par].unwrap();

    // 2 n0 + m0 = p, 2 n1 + m1 = -p; choose p closest to J_h t to keep J'_h small
    let target = r.coupling_axis * pulse.duration / PI;
    let mut choice: Option<(i64, i64, f64)> = None;
    for n0 in -window..=window {
        let p = 2 * n0 + m0;
        let twice_n1 = -p - m1;
        if twice_n1 % 2 != 0 || (twice_n1 / 2).abs() > window {
            continue;
        }
        let cost = (p as f64 - target).abs();
        if choice.is_none_or(|(_, _, c)| cost < c - 1e-12) {
            choice = Some((n0, twice_n1 / 2, cost));
        }
    }
    let Some((n0, n1, _)) = choice else {
        return Err(Error::Infeasible(format!(
            "phase offset J_h t / pi = {target:.3} cannot be matched with n in [-{window}, {window}]"
        )));
    };
    let branch = InverseBranch {
        signs: [s0, s1],
        n: [n0, n1],
        m: [m0, m1],
    };
    finish(pulse, branch, t_inv)
}

fn finish(pulse: &PulseSpec, branch: InverseBranch, t_inv: f64) -> Result<InverseSolution> {
    let inv = inverse_for_branch(pulse, &branch, t_inv)?;
    let residual = residual_against_identity(pulse, &inv);
    if residual > GROUP_TOL {
        return Err(Error::Infeasible(format!(
            "branch {branch:?} reproduces the inverse only to {residual:.3e}"
        )));
    }
    Ok(InverseSolution {
        pulse: inv,
        branch,
        residual,
    })
}

fn near_integer(x: f64) -> Option<i64> {
    let k = x.round();
    ((x - k).abs() <= 1e-9 * x.abs().max(1.0)).then_some(k as i64)
}

fn inverse_fixed(pulse: &PulseSpec, window: i64) -> Result<InverseSolution> {
    let axis = pulse.axis();
    let r = reduce(&pulse.params);
    let t = pulse.duration;
    let scale = pulse.params.coupling.iter().fold(1.0f64, |a, c| a.max(c.abs()));
    let locked: Vec<bool> = (0..2)
        .map(|idx| r.pair(sector_signs(axis, idx).alpha).abs() > 1e-12 * scale)
        .collect();

    let mut candidates = Vec::new();
    for (idx, &is_locked) in locked.iter().enumerate() {
        let rabi = r.rabi(sector_signs(axis, idx).alpha.flip());
        if is_locked && rabi > 0.0 {
            for m in -window..=window {
                candidates.push(m as f64 * PI / rabi - t);
            }
        }
    }
    if r.coupling_axis != 0.0 {
        for p in -2 * window..=2 * window {
            candidates.push(p as f64 * PI / r.coupling_axis - t);
        }
    }
    candidates.retain(|c| *c > 1e-12);
    candidates.sort_by(f64::total_cmp);
    if candidates.is_empty() && locked.iter().all(|l| !l) && r.coupling_axis == 0.0 {
        // only fields act: any duration works
        candidates.push(if t > 0.0 { t } else { 1.0 });
    }

    for &t_inv in &candidates {
        let total = t + t_inv;
        let p = if r.coupling_axis == 0.0 {
            Some(0)
        } else {
            near_integer(r.coupling_axis * total / PI)
        };
        let Some(p) = p else { continue };
        let mut signs = [Sign::Plus; 2];
        let mut ms = [0i64; 2];
        let mut ok = true;
        for idx in 0..2 {
            let alpha = sector_signs(axis, idx).alpha;
            let rabi = r.rabi(alpha.flip());
            let want_parity = (if alpha == Sign::Plus { p } else { -p }).rem_euclid(2) as usize;
            if locked[idx] {
                match near_integer(rabi * total / PI) {
                    Some(m) if m.rem_euclid(2) as usize == want_parity && m.abs() <= window => ms[idx] = m,
                    _ => ok = false,
                }
            } else if let Some((s, m, _)) = best_per_parity(rabi * t, window)[want_parity] {
                signs[idx] = s;
                ms[idx] = m;
            } else {
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        // sector idx solves 2n + m = alpha p
        let n_of = |idx: usize| (sector_signs(axis, idx).alpha.value() as i64 * p - ms[idx]) / 2;
        let branch = InverseBranch {
            signs,
            n: [n_of(0), n_of(1)],
            m: ms,
        };
        if let Ok(sol) = finish(pulse, branch, t_inv) {
            let same = sol
                .pulse
                .params
                .coupling
                .iter()
                .zip(&pulse.params.coupling)
                .all(|(a, b)| (a - b).abs() <= 1e-9 * scale);
            if same {
                return Ok(sol);
            }
        }
    }
    Err(Error::Infeasible(format!(
        "with couplings held fixed the inverse needs R (t + t') and J_h (t + t') to be multiples of pi \
         with matching parity; no t' in the branch window satisfies both (J_h = {:.6}, R = {:.6}, {:.6})",
        r.coupling_axis,
        r.rabi(Sign::Minus),
        r.rabi(Sign::Plus)
    )))
}

/// Taxonomy of special elements of `S_h`, most specific first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpecialClass {
    /// `e^{i phase} I`
    GlobalPhase { phase: f64 },
    /// Each sector is a signed phase times identity: `S_0 e^{i phase}`, `S_1 e^{-i phase}`.
    DiagonalFamily { phase: f64, signs: [Sign; 2] },
    /// Both sectors have unit determinant.
    SectorPhaseFree,
    Generic,
}

/// The diagonal element `S_0 e^{i phase}` on sector 0 and `S_1 e^{-i phase}` on sector 1.
pub fn diagonal_element(axis: Axis, phase: f64, signs: [Sign; 2]) -> Mat4 {
    let a = Mat2::identity().scale(C64::from_polar(signs[0].value(), phase));
    let b = Mat2::identity().scale(C64::from_polar(signs[1].value(), -phase));
    assemble(axis, [&a, &b])
}

pub fn classify_special(u: &Mat4, axis: Axis, tol: f64) -> Result<SpecialClass> {
    let sectors = extract_sectors(u, axis)?;
    let c00 = u.0[0][0];
    if (c00.norm() - 1.0).abs() <= tol && u.dist(&Mat4::identity().scale(c00)) <= tol {
        return Ok(SpecialClass::GlobalPhase { phase: c00.arg() });
    }
    let scalar = |s: &Sector| {
        let m = &s.mat;
        m.0[0][1].norm() <= tol && m.0[1][0].norm() <= tol && (m.0[0][0] - m.0[1][1]).norm() <= tol
    };
    if scalar(&sectors[0]) && scalar(&sectors[1]) {
        let mut phase = sectors[0].mat.0[0][0].arg();
        let mut s0 = Sign::Plus;
        if phase > PI / 2.0 {
            phase -= PI;
            s0 = Sign::Minus;
        } else if phase <= -PI / 2.0 {
            phase += PI;
            s0 = Sign::Minus;
        }
        let rest = sectors[1].mat.0[0][0] * C64::from_polar(1.0, phase);
        let s1 = Sign::from_value(rest.re);
        if (rest - s1.value()).norm() <= tol {
            return Ok(SpecialClass::DiagonalFamily {
                phase,
                signs: [s0, s1],
            });
        }
    }
    if sectors.iter().all(|s| (s.det() - 1.0).norm() <= tol) {
        return Ok(SpecialClass::SectorPhaseFree);
    }
    Ok(SpecialClass::Generic)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalityReport {
    pub samples: usize,
    /// Largest `|U D - D U|_F`.
    pub max_commutator: f64,
    /// Largest `|U D U^dag - D|_F`.
    pub max_conjugation: f64,
}

/// A random pulse along `axis`: couplings and fields in `[-3, 3]`, duration in `[0, 5]`.
pub fn random_pulse<R: Rng + ?Sized>(rng: &mut R, axis: Axis) -> PulseSpec {
    let params = crate::sampling::random_params(rng, axis, 3.0);
    PulseSpec::new(params, rng.random_range(0.0..5.0)).expect("valid duration")
}

/// Product of 1 to 3 random pulses.
pub fn random_product<R: Rng + ?Sized>(rng: &mut R, axis: Axis) -> Mat4 {
    let count = rng.random_range(1..=3);
    (0..count).fold(Mat4::identity(), |acc, _| random_pulse(rng, axis).unitary().mat * acc)
}

/// Check numerically that diagonal elements commute with products of pulses.
pub fn normality_witness<R: Rng + ?Sized>(rng: &mut R, axis: Axis, samples: usize) -> NormalityReport {
    let mut report = NormalityReport {
        samples,
        max_commutator: 0.0,
        max_conjugation: 0.0,
    };
    for _ in 0..samples {
        let phase = rng.random_range(-PI..PI);
        let signs = [random_sign(rng), random_sign(rng)];
        let d = diagonal_element(axis, phase, signs);
        let u = random_product(rng, axis);
        report.max_commutator = report.max_commutator.max(u.commutator(&d).frobenius_norm());
        report.max_conjugation = report.max_conjugation.max((u * d * u.adjoint()).dist(&d));
    }
    report
}

fn random_sign<R: Rng + ?Sized>(rng: &mut R) -> Sign {
    if rng.random_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// A pulse in the same family as `pulse`: each sector's `(B, Jpair)` is scaled
/// by `scales[idx]` (a negative scale flips the axis), with new `J_h` and duration.
pub fn family_pulse(pulse: &PulseSpec, scales: [f64; 2], coupling_axis: f64, duration: f64) -> Result<PulseSpec> {
    let axis = pulse.axis();
    let r = reduce(&pulse.params);
    let mut field = [0.0; 2];
    let mut pair = [0.0; 2];
    for (idx, k) in scales.iter().enumerate() {
        let alpha = sector_signs(axis, idx).alpha;
        field[alpha.flip().slot()] = k * r.field(alpha.flip());
        pair[alpha.slot()] = k * r.pair(alpha);
    }
    PulseSpec::new(ModelParams::from_sums(axis, coupling_axis, field, pair)?, duration)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pulse(j: [f64; 3], b1: f64, b2: f64, axis: Axis, t: f64) -> PulseSpec {
        PulseSpec::new(ModelParams::new(j, b1, b2, axis).unwrap(), t).unwrap()
    }

    #[test]
    fn identity_and_pulses_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for axis in Axis::ALL {
            assert!(in_s_h(&Mat4::identity(), axis, 1e-12));
            for _ in 0..50 {
                assert!(in_s_h(&random_pulse(&mut rng, axis).unitary().mat, axis, 1e-12));
            }
        }
    }

    #[test]
    fn dense_unitary_is_not_a_member() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut h = Mat4::zeros();
        for i in 0..4 {
            h.0[i][i] = C64::new(rng.random_range(-1.0..1.0), 0.0);
            for j in i + 1..4 {
                let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                h.0[i][j] = z;
                h.0[j][i] = z.conj();
            }
        }
        let e = crate::spectral::oracle_diagonalize(&h).unwrap();
        let mut u = Mat4::zeros();
        for k in 0..4 {
            let v = e.column(k);
            let ph = C64::from_polar(1.0, -e.values[k]);
            for a in 0..4 {
                for b in 0..4 {
                    u.0[a][b] += ph * v[a] * v[b].conj();
                }
            }
        }
        assert!(u.unitarity_deviation() < 1e-12);
        for axis in Axis::ALL {
            assert!(!in_s_h(&u, axis, 1e-10));
        }
    }

    #[test]
    fn labels_from_reduced_example() {
        let p = pulse([1.0, 1.0, 1.0], 1.0, 1.0, Axis::Z, 0.7);
        let label = pulse_label(&p);
        // sector 0 is driven by alpha = -, i.e. (b_+, j_+) = (1, 0)
        assert_eq!(sector_signs(Axis::Z, 0).alpha, Sign::Minus);
        assert_eq!(label.sectors[0], SectorLabel { abs_j: 0.0, sign_b: FieldSign::Plus });
        assert_eq!(label.sectors[1], SectorLabel { abs_j: 1.0, sign_b: FieldSign::Zero });
    }

    #[test]
    fn zero_field_label() {
        let p = pulse([0.3, 0.8, -0.2], 0.0, 0.0, Axis::X, 1.0);
        for s in pulse_label(&p).sectors {
            assert_eq!(s, SectorLabel { abs_j: 1.0, sign_b: FieldSign::Zero });
        }
    }

    #[test]
    fn matrix_label_agrees_with_pulse_label() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for axis in Axis::ALL {
            for _ in 0..50 {
                let p = random_pulse(&mut rng, axis);
                match subgroup_label(&p.unitary().mat, axis) {
                    Ok(l) => assert!(l.matches(&pulse_label(&p)), "{l:?} {:?}", pulse_label(&p)),
                    Err(Error::IndeterminateLabel { .. }) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn identity_label_is_indeterminate() {
        assert!(matches!(
            subgroup_label(&Mat4::identity(), Axis::Y),
            Err(Error::IndeterminateLabel { sector: 0 })
        ));
    }

    #[test]
    fn scaled_family_shares_label_and_commutes() {
        let p = pulse([0.4, -1.2, 0.9], 0.6, -0.3, Axis::Y, 1.3);
        let q = family_pulse(&p, [2.5, -0.7], 0.1, 0.4).unwrap();
        assert!(pulse_label(&p).matches(&pulse_label(&q)));
        assert!(commutes(&p, &q));
        let c = p.unitary().mat.commutator(&q.unitary().mat).frobenius_norm();
        assert!(c < 1e-10);
        let other_time = PulseSpec::new(p.params, 2.9).unwrap();
        assert!(commutes(&p, &other_time));
    }

    #[test]
    fn broken_ratio_does_not_commute() {
        let p = pulse([0.4, -1.2, 0.9], 0.6, -0.3, Axis::Z, 1.3);
        let q = pulse([0.4, -1.2, 0.9], 1.6, 0.5, Axis::Z, 0.8);
        assert!(!commutes(&p, &q));
        assert!(p.unitary().mat.commutator(&q.unitary().mat).frobenius_norm() > 1e-6);
        assert!(matches!(product_closure_check(&p, &q), Err(Error::NotClosed(_))));
    }

    #[test]
    fn closure_of_same_pulse() {
        let p = pulse([0.4, -1.2, 0.9], 0.6, -0.3, Axis::X, 0.45);
        let c = product_closure_check(&p, &p).unwrap();
        assert!(c.residual < 1e-10);
        for idx in 0..2 {
            let alpha = sector_signs(Axis::X, idx).alpha;
            let single = p.phases(alpha).delta_minus;
            let doubled = 2.0 * single - TAU * (2.0 * single / TAU).floor();
            assert!((c.delta_minus[idx] - doubled).abs() < 1e-12);
        }
    }

    #[test]
    fn closure_of_scaled_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for axis in Axis::ALL {
            for _ in 0..50 {
                let p = random_pulse(&mut rng, axis);
                let k = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
                let q = family_pulse(&p, k, rng.random_range(-3.0..3.0), rng.random_range(0.0..5.0)).unwrap();
                let c = product_closure_check(&p, &q).unwrap();
                assert!(c.residual < 1e-10, "{}", c.residual);
            }
        }
    }

    #[test]
    fn bch_special_cases() {
        let n = [0.6, 0.0, 0.8];
        let a = Sector::from_exponential(0.1, 0.4, n).unwrap();
        let b = Sector::from_exponential(0.2, 0.7, n).unwrap();
        let c = compose_bch(&a, &b).unwrap();
        assert!((c.angle - 1.1).abs() < 1e-12);
        assert!((c.axis[0] - 0.6).abs() < 1e-12 && (c.axis[2] - 0.8).abs() < 1e-12);

        let x = Sector::from_exponential(0.0, PI / 2.0, [1.0, 0.0, 0.0]).unwrap();
        let y = Sector::from_exponential(0.0, PI / 2.0, [0.0, 1.0, 0.0]).unwrap();
        let c = compose_bch(&x, &y).unwrap();
        assert!(c.angle.cos().abs() < 1e-12);
        assert!((c.axis[2] - 1.0).abs() < 1e-12);
        assert!(c.mat.dist(&(x.mat * y.mat)) < 1e-12);
    }

    #[test]
    fn bch_matches_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..1000 {
            let a = Sector::from_matrix(crate::sampling::haar_su2(&mut rng).scale(C64::from_polar(1.0, rng.random_range(-3.0..3.0))));
            let b = Sector::from_matrix(crate::sampling::haar_su2(&mut rng));
            let c = compose_bch(&a, &b).unwrap();
            assert!(c.mat.dist(&(a.mat * b.mat)) < 1e-12);
        }
    }

    #[test]
    fn bch_rejects_mismatched_rows() {
        let p = pulse([0.4, -1.2, 0.9], 0.6, -0.3, Axis::X, 0.45).unitary();
        assert!(matches!(
            compose_bch(&p.sectors[0], &p.sectors[1]),
            Err(Error::RowMismatch { .. })
        ));
    }

    #[test]
    fn free_inverse_exists_and_inverts() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for axis in Axis::ALL {
            for _ in 0..100 {
                let p = random_pulse(&mut rng, axis);
                let sol = inverse_prescription(&p, CouplingMode::Free { duration: None }, DEFAULT_WINDOW).unwrap();
                assert!(sol.residual < 1e-10);
                assert!(pulse_label(&sol.pulse).matches(&pulse_label(&p)) || p.duration == 0.0);
            }
        }
    }

    #[test]
    fn isotropic_diagonal_inverse() {
        let p = pulse([1.0, 1.0, 1.0], 0.0, 0.0, Axis::Z, 0.8);
        let sol = inverse_prescription(&p, CouplingMode::Free { duration: None }, DEFAULT_WINDOW).unwrap();
        assert!(sol.residual < 1e-12);
        let u = p.unitary().mat;
        assert!((u.adjoint() * u).dist(&Mat4::identity()) < 1e-12);
    }

    #[test]
    fn fixed_coupling_inverse_is_a_loop_completion() {
        // J = (0, 0, 1), no field: U(t) returns to -I at pi, so the inverse of t is pi - t... up to phase
        let p = pulse([0.0, 0.0, 1.0], 0.0, 0.0, Axis::Z, 0.5);
        let sol = inverse_prescription(&p, CouplingMode::Fixed, DEFAULT_WINDOW).unwrap();
        assert!(sol.residual < 1e-10);
        assert_eq!(sol.pulse.params.coupling, p.params.coupling);
        assert!((sol.pulse.duration - (2.0 * PI - 0.5)).abs() < 1e-9 || (sol.pulse.duration - (PI - 0.5)).abs() < 1e-9);
    }

    #[test]
    fn fixed_coupling_inverse_can_be_infeasible() {
        let p = pulse([0.3, 0.7 * 2f64.sqrt(), 1.0], 0.0, 0.0, Axis::Z, 0.5);
        assert!(matches!(
            inverse_prescription(&p, CouplingMode::Fixed, DEFAULT_WINDOW),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn explicit_branch_rejects_negative_angle() {
        let p = pulse([0.3, 0.2, 1.0], 0.4, 0.1, Axis::Z, 2.0);
        let branch = InverseBranch {
            signs: [Sign::Plus, Sign::Plus],
            n: [0, 0],
            m: [0, 0],
        };
        assert!(matches!(inverse_for_branch(&p, &branch, 1.0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn classification() {
        let g = Mat4::identity().scale(C64::new(0.0, 1.0));
        assert!(matches!(classify_special(&g, Axis::X, 1e-12).unwrap(), SpecialClass::GlobalPhase { .. }));
        let d = diagonal_element(Axis::X, 0.3, [Sign::Plus, Sign::Plus]);
        assert_eq!(
            classify_special(&d, Axis::X, 1e-12).unwrap(),
            SpecialClass::DiagonalFamily { phase: 0.3, signs: [Sign::Plus, Sign::Plus] }
        );
        let d = diagonal_element(Axis::Y, -1.2, [Sign::Minus, Sign::Plus]);
        match classify_special(&d, Axis::Y, 1e-12).unwrap() {
            SpecialClass::DiagonalFamily { phase, signs } => {
                assert!(diagonal_element(Axis::Y, phase, signs).dist(&d) < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        let p = pulse([0.4, -1.2, 0.9], 0.6, -0.3, Axis::Z, 1.37);
        assert_eq!(classify_special(&p.unitary().mat, Axis::Z, 1e-10).unwrap(), SpecialClass::Generic);
        let free = pulse([0.4, -1.2, 0.0], 0.6, -0.3, Axis::Z, 1.37);
        assert_eq!(classify_special(&free.unitary().mat, Axis::Z, 1e-10).unwrap(), SpecialClass::SectorPhaseFree);
    }

    #[test]
    fn diagonal_elements_commute_with_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        for axis in Axis::ALL {
            let rep = normality_witness(&mut rng, axis, 100);
            assert!(rep.max_commutator < 1e-10 && rep.max_conjugation < 1e-10);
        }
    }
}
