//! Closed-form evolution operators and their 2x2 Bell-pair sectors.
//!
//! In the Bell basis `U_h(t)` is block sparse: it couples exactly two pairs of
//! Bell states, and each pair evolves under its own `U(2)` block (a sector).
//! Physical evolution is `exp(-iHt)`.

use crate::error::{Error, Result};
use crate::linalg::{dot3, norm3, pauli_dot, scale3, CMat, Mat2, Mat4, Vec3, C64, I, ZERO};
use crate::model::{bell_index, reduce, Axis, ModelParams, ReducedParams, Sign};
use crate::spectral::{hamiltonian_bell, oracle_diagonalize};

/// The sector closed form is naturally written with the opposite sign of time:
/// `exp(-iHt)` equals [`closed_form_matrix`] evaluated at `CLOSED_FORM_TIME_SIGN * t`.
pub const CLOSED_FORM_TIME_SIGN: f64 = -1.0;

/// Entries that must vanish are checked against this bound.
pub const STRUCTURE_TOL: f64 = 1e-12;

/// Static layout of one sector of `U_h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SectorSigns {
    /// Which pair of levels drives the sector (`alpha`).
    pub alpha: Sign,
    pub beta: Sign,
    pub q: Sign,
}

/// Bell rows `(k, l)` of sector `index` (0 or 1) for axis `h`.
pub fn sector_rows(axis: Axis, index: usize) -> (usize, usize) {
    const ROWS: [[(usize, usize); 2]; 3] = [[(0, 1), (2, 3)], [(0, 3), (1, 2)], [(0, 2), (1, 3)]];
    ROWS[axis.index() - 1][index]
}

fn parity(n: usize) -> Sign {
    if n.is_multiple_of(2) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

pub fn sector_signs(axis: Axis, index: usize) -> SectorSigns {
    let h = axis.index();
    let j = index + 1;
    let (k, l) = sector_rows(axis, index);
    let alpha = parity(h + j + 1);
    let beta = parity(j * (h + l - k + 1));
    let q = beta.times(parity(h + 1));
    SectorSigns { alpha, beta, q }
}

/// Index of the sector driven by `alpha`.
pub fn sector_index_of(axis: Axis, alpha: Sign) -> usize {
    if sector_signs(axis, 0).alpha == alpha {
        0
    } else {
        1
    }
}

/// `(sin(h pi/2), cos(h pi/2))` as exact integers.
pub fn quarter_turn(axis: Axis) -> (f64, f64) {
    match axis {
        Axis::X => (1.0, 0.0),
        Axis::Y => (0.0, -1.0),
        Axis::Z => (-1.0, 0.0),
    }
}

/// Phase arguments of one sector: `delta_plus = alpha J_h t`,
/// `delta_minus = R_{-alpha} t`, in the closed-form time convention.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePair {
    pub delta_plus: f64,
    pub delta_minus: f64,
    pub alpha: Sign,
}

impl PhasePair {
    pub fn new(reduced: &ReducedParams, alpha: Sign, t: f64) -> Self {
        PhasePair {
            delta_plus: alpha.value() * reduced.coupling_axis * t,
            delta_minus: reduced.rabi(alpha.flip()) * t,
            alpha,
        }
    }
}

/// A 2x2 block `e^{i phase} (cos(angle) I - i sin(angle) axis.sigma)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sector {
    pub mat: Mat2,
    pub phase: f64,
    pub angle: f64,
    /// Unit Bloch axis.
    pub axis: Vec3,
    /// Bell rows in the enclosing 4x4 operator, if known.
    pub rows: Option<(usize, usize)>,
    pub signs: Option<SectorSigns>,
    /// Closed-form phases, present for sectors built from parameters.
    pub phases: Option<PhasePair>,
}

/// `e^{i phase} (cos(angle) I - i sin(angle) n.sigma)` without validation.
pub fn rotation_matrix(phase: f64, angle: f64, n: &Vec3) -> Mat2 {
    let (s, c) = angle.sin_cos();
    let m = Mat2::identity().scale(C64::new(c, 0.0)) - pauli_dot(n).scale(C64::new(0.0, s));
    m.scale(C64::from_polar(1.0, phase))
}

impl Sector {
    pub fn from_exponential(phase: f64, angle: f64, n: Vec3) -> Result<Sector> {
        let norm = norm3(&n);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NonUnitAxis { norm });
        }
        Ok(Sector {
            mat: rotation_matrix(phase, angle, &n),
            phase,
            angle,
            axis: n,
            rows: None,
            signs: None,
            phases: None,
        })
    }

    /// Canonical read-out of an arbitrary 2x2 unitary.
    ///
    /// `phase = arg(det)/2` in `(-pi/2, pi/2]`, `angle` in `[0, pi]`. When the
    /// angle is 0 or pi the axis is undefined and `(0, 0, 1)` is reported.
    pub fn from_matrix(mat: Mat2) -> Sector {
        let (phase, angle, axis) = readout(&mat);
        Sector {
            mat,
            phase,
            angle,
            axis,
            rows: None,
            signs: None,
            phases: None,
        }
    }

    pub fn det(&self) -> C64 {
        self.mat.det()
    }

    /// `phase`, `angle`, `axis` read back from the matrix in canonical form.
    pub fn canonical(&self) -> (f64, f64, Vec3) {
        readout(&self.mat)
    }

    /// Rebuild from the stored exponential parameters.
    pub fn rebuild(&self) -> Mat2 {
        rotation_matrix(self.phase, self.angle, &self.axis)
    }

    /// True when the rotation part is `+/- I`.
    pub fn is_trivial_rotation(&self, tol: f64) -> bool {
        self.angle.sin().abs() < tol
    }
}

fn readout(mat: &Mat2) -> (f64, f64, Vec3) {
    let det = mat.det();
    let mut phase = det.arg() / 2.0;
    if phase <= -std::f64::consts::FRAC_PI_2 {
        phase += std::f64::consts::PI;
    }
    let su = mat.scale(C64::from_polar(1.0, -phase));
    let c = 0.5 * (su.0[0][0] + su.0[1][1]).re;
    // su = c I - i v.sigma  =>  v_k = i tr(su sigma_k) / 2
    let v = [
        (0.5 * I * (su.0[0][1] + su.0[1][0])).re,
        (0.5 * I * (I * su.0[0][1] - I * su.0[1][0])).re,
        (0.5 * I * (su.0[0][0] - su.0[1][1])).re,
    ];
    let s = norm3(&v);
    let angle = s.atan2(c);
    let axis = if s > 1e-14 { scale3(&v, 1.0 / s) } else { [0.0, 0.0, 1.0] };
    (phase, angle, axis)
}

/// A 4x4 Bell-basis evolution operator with its two sectors.
#[derive(Clone, Copy, Debug)]
pub struct EvolutionOp {
    pub mat: Mat4,
    pub axis: Axis,
    pub time: f64,
    pub sectors: [Sector; 2],
}

impl EvolutionOp {
    pub fn sector_for(&self, alpha: Sign) -> &Sector {
        &self.sectors[sector_index_of(self.axis, alpha)]
    }
}

/// Place two sector blocks into a 4x4 matrix; everything else is an exact zero.
pub fn assemble(axis: Axis, blocks: [&Mat2; 2]) -> Mat4 {
    let mut m = Mat4::zeros();
    for (idx, b) in blocks.iter().enumerate() {
        let (k, l) = sector_rows(axis, idx);
        m.0[k][k] = b.0[0][0];
        m.0[k][l] = b.0[0][1];
        m.0[l][k] = b.0[1][0];
        m.0[l][l] = b.0[1][1];
    }
    m
}

/// Sector `index` of the closed form at time `t`:
/// `e^{i D+} [[e*, -q i^h d], [q (-i)^h d, e]]`,
/// `e = cos D- + i beta j sin D-`, `d = b sin D-`.
fn native_sector(reduced: &ReducedParams, axis: Axis, index: usize, t: f64) -> Mat2 {
    let signs = sector_signs(axis, index);
    let pp = PhasePair::new(reduced, signs.alpha, t);
    let j = reduced.j(signs.alpha.flip());
    let b = reduced.b(signs.alpha.flip());
    let (s, c) = pp.delta_minus.sin_cos();
    let e = C64::new(c, signs.beta.value() * j * s);
    let d = b * s;
    let ih = I.powu(axis.index() as u32);
    let q = signs.q.value();
    let m = CMat([[e.conj(), -ih * (q * d)], [ih.conj() * (q * d), e]]);
    m.scale(C64::from_polar(1.0, pp.delta_plus))
}

/// The closed form at time `t` in its native convention (time reversed).
pub fn closed_form_matrix(params: &ModelParams, t: f64) -> Mat4 {
    let r = reduce(params);
    let s0 = native_sector(&r, params.axis, 0, t);
    let s1 = native_sector(&r, params.axis, 1, t);
    assemble(params.axis, [&s0, &s1])
}

/// Physical Bloch axis of the sector driven by `alpha`.
///
/// In the closed-form convention the axis is `(q b sin(h pi/2), q b cos(h pi/2), beta j)`;
/// reversing time flips it.
pub fn sector_axis(reduced: &ReducedParams, axis: Axis, alpha: Sign) -> Vec3 {
    let signs = sector_signs(axis, sector_index_of(axis, alpha));
    let b = reduced.b(alpha.flip());
    let j = reduced.j(alpha.flip());
    let (sn, cs) = quarter_turn(axis);
    let q = signs.q.value();
    let native = [q * b * sn, q * b * cs, signs.beta.value() * j];
    scale3(&native, CLOSED_FORM_TIME_SIGN)
}

/// `U(t) = exp(-iHt)` in the Bell basis from the closed form.
pub fn evolve_closed(params: &ModelParams, t: f64) -> EvolutionOp {
    let r = reduce(params);
    let axis = params.axis;
    let mats = [
        native_sector(&r, axis, 0, CLOSED_FORM_TIME_SIGN * t),
        native_sector(&r, axis, 1, CLOSED_FORM_TIME_SIGN * t),
    ];
    let mut sectors = [Sector::from_matrix(Mat2::identity()); 2];
    for (idx, sector) in sectors.iter_mut().enumerate() {
        let signs = sector_signs(axis, idx);
        let pp = PhasePair::new(&r, signs.alpha, t);
        *sector = Sector {
            mat: mats[idx],
            phase: CLOSED_FORM_TIME_SIGN * pp.delta_plus,
            angle: pp.delta_minus,
            axis: sector_axis(&r, axis, signs.alpha),
            rows: Some(sector_rows(axis, idx)),
            signs: Some(signs),
            phases: Some(pp),
        };
    }
    EvolutionOp {
        mat: assemble(axis, [&mats[0], &mats[1]]),
        axis,
        time: t,
        sectors,
    }
}

/// `sum_k e^{-i E_k t} |phi_k><phi_k|` from the Jacobi oracle, Bell basis.
pub fn evolve_oracle(params: &ModelParams, t: f64) -> Result<Mat4> {
    let eig = oracle_diagonalize(&hamiltonian_bell(params))?;
    let mut u = Mat4::zeros();
    for k in 0..4 {
        let v = eig.column(k);
        let ph = C64::from_polar(1.0, -eig.values[k] * t);
        for a in 0..4 {
            for b in 0..4 {
                u.0[a][b] += ph * v[a] * v[b].conj();
            }
        }
    }
    Ok(u)
}

/// Largest entry outside the sector pattern of `axis`, with its position.
pub fn structure_violation(u: &Mat4, axis: Axis) -> Option<(usize, usize, f64)> {
    let mut allowed = [[false; 4]; 4];
    for idx in 0..2 {
        let (k, l) = sector_rows(axis, idx);
        for a in [k, l] {
            for b in [k, l] {
                allowed[a][b] = true;
            }
        }
    }
    let mut worst: Option<(usize, usize, f64)> = None;
    for (a, row) in allowed.iter().enumerate() {
        for (b, ok) in row.iter().enumerate() {
            let m = u.0[a][b].norm();
            if !ok && worst.is_none_or(|w| m > w.2) {
                worst = Some((a, b, m));
            }
        }
    }
    worst
}

/// Split a block-sparse operator into its two sectors (canonical read-out).
pub fn extract_sectors(u: &Mat4, axis: Axis) -> Result<[Sector; 2]> {
    if let Some((row, col, magnitude)) = structure_violation(u, axis) {
        if magnitude > STRUCTURE_TOL {
            return Err(Error::StructureViolation { row, col, magnitude });
        }
    }
    let mut out = [Sector::from_matrix(Mat2::identity()); 2];
    for (idx, s) in out.iter_mut().enumerate() {
        let (k, l) = sector_rows(axis, idx);
        let block = CMat([[u.0[k][k], u.0[k][l]], [u.0[l][k], u.0[l][l]]]);
        *s = Sector::from_matrix(block);
        s.rows = Some((k, l));
        s.signs = Some(sector_signs(axis, idx));
    }
    Ok(out)
}

/// Reassemble sectors into a 4x4 operator.
pub fn reassemble(axis: Axis, sectors: &[Sector; 2]) -> Mat4 {
    assemble(axis, [&sectors[0].mat, &sectors[1].mat])
}

/// The Bell label coupled to `(mu, nu)` by `U_h`.
pub fn pair_mapping(axis: Axis, mu: Sign, nu: Sign) -> (Sign, Sign) {
    match axis {
        Axis::X => (mu, nu.flip()),
        Axis::Y => (mu.flip(), nu.flip()),
        Axis::Z => (mu.flip(), nu),
    }
}

/// Map a Bell index through [`pair_mapping`].
pub fn partner_index(axis: Axis, index: usize) -> usize {
    let (mu, nu) = crate::model::bell_label(index);
    let (m2, n2) = pair_mapping(axis, mu, nu);
    bell_index(m2, n2)
}

/// Cosine of the angle between two sector axes.
pub fn axis_alignment(a: &Sector, b: &Sector) -> f64 {
    dot3(&a.axis, &b.axis)
}

/// Exact zero test helper used in tests and the CLI.
pub fn structural_zero_count(u: &Mat4) -> usize {
    u.0.iter().flatten().filter(|z| **z == ZERO).count()
}
