//! Homogeneous two-qubit rotations relating the three field axes.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::linalg::{kron, CMat, Mat2, Mat4, C64};
use crate::model::{operator_to_bell, Axis, ModelParams};

/// Euler angles `(alpha, beta, gamma)` in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl RotationParams {
    pub const fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        RotationParams { alpha, beta, gamma }
    }

    /// Rotation carrying the `z`-field model onto the `x`-field model.
    pub const Z_TO_X: RotationParams = RotationParams::new(FRAC_PI_2, FRAC_PI_2, 0.0);
    /// Rotation carrying the `z`-field model onto the `y`-field model.
    pub const Z_TO_Y: RotationParams = RotationParams::new(-PI, FRAC_PI_2, FRAC_PI_2);
}

/// Single-qubit rotation in the computational basis.
pub fn single_rotation(r: &RotationParams) -> Mat2 {
    let (sb, cb) = (r.beta / 2.0).sin_cos();
    let sum = (r.alpha + r.gamma) / 2.0;
    let diff = (r.alpha - r.gamma) / 2.0;
    CMat([
        [C64::from_polar(cb, -sum), -C64::from_polar(sb, diff)],
        [C64::from_polar(sb, -diff), C64::from_polar(cb, sum)],
    ])
}

/// `R (x) R` in the computational basis.
pub fn bipartite_rotation(r: &RotationParams) -> Mat4 {
    let one = single_rotation(r);
    kron(&one, &one)
}

/// `R (x) R` in the Bell basis.
pub fn bipartite_rotation_bell(r: &RotationParams) -> Mat4 {
    operator_to_bell(&bipartite_rotation(r))
}

/// `R U R^dag` with both `U` and the result in the Bell basis.
pub fn conjugate_bell(u: &Mat4, r: &RotationParams) -> Mat4 {
    let rb = bipartite_rotation_bell(r);
    rb * *u * rb.adjoint()
}

/// The rotation taking the `z`-field model to the `target` axis, and the
/// coupling relabeling that goes with it.
///
/// The rotations permute the spin axes, so the couplings must be permuted too:
/// `R U_z[J] R^dag = U_target[J']`.
pub fn axis_map(target: Axis) -> (RotationParams, [usize; 3]) {
    match target {
        Axis::X => (RotationParams::Z_TO_X, [2, 0, 1]),
        Axis::Y => (RotationParams::Z_TO_Y, [1, 2, 0]),
        Axis::Z => (RotationParams::new(0.0, 0.0, 0.0), [0, 1, 2]),
    }
}

/// Parameters of the `target`-axis model equivalent to `params` (which must have axis `z`).
pub fn rotated_params(params: &ModelParams, target: Axis) -> ModelParams {
    assert_eq!(params.axis, Axis::Z, "rotated_params expects a z-field model");
    let (_, perm) = axis_map(target);
    let coupling = perm.map(|k| params.coupling[k]);
    ModelParams {
        coupling,
        axis: target,
        ..*params
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::evolve_closed;
    use crate::linalg::{pauli, Mat2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_angles_are_identity() {
        let r = RotationParams::new(0.0, 0.0, 0.0);
        assert!(bipartite_rotation(&r).dist(&Mat4::identity()) < 1e-15);
    }

    #[test]
    fn pauli_expansion_agrees() {
        let r = RotationParams::new(0.3, 0.7, 1.1);
        let (sb, cb) = (r.beta / 2.0).sin_cos();
        let sum = (r.alpha + r.gamma) / 2.0;
        let diff = (r.alpha - r.gamma) / 2.0;
        let m = Mat2::identity().scale(C64::new(cb * sum.cos(), 0.0))
            - pauli(1).scale(C64::new(0.0, sb * diff.sin()))
            - pauli(2).scale(C64::new(0.0, sb * diff.cos()))
            - pauli(3).scale(C64::new(0.0, cb * sum.sin()));
        assert!(single_rotation(&r).dist(&m) < 1e-15);
        let full = bipartite_rotation(&r);
        assert!(full.unitarity_deviation() < 1e-14);
        assert!((full.det() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn conjugation_maps_z_model_to_x_and_y() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for _ in 0..50 {
            let p = crate::sampling::random_params(&mut rng, Axis::Z, 3.0);
            let t = rng.random_range(0.0..10.0);
            let uz = evolve_closed(&p, t);
            for target in [Axis::X, Axis::Y] {
                let (r, _) = axis_map(target);
                let q = rotated_params(&p, target);
                let ut = evolve_closed(&q, t);
                assert!(conjugate_bell(&uz.mat, &r).dist(&ut.mat) < 1e-10);
                // sector angles are preserved as a multiset
                let mut a: Vec<f64> = uz.sectors.iter().map(|s| s.angle).collect();
                let mut b: Vec<f64> = ut.sectors.iter().map(|s| s.angle).collect();
                a.sort_by(f64::total_cmp);
                b.sort_by(f64::total_cmp);
                assert!((a[0] - b[0]).abs() < 1e-10 && (a[1] - b[1]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn unpermuted_couplings_do_not_map() {
        let p = ModelParams::new([0.3, -1.4, 0.9], 0.5, 1.1, Axis::Z).unwrap();
        let uz = evolve_closed(&p, 1.3);
        let naive = ModelParams { axis: Axis::X, ..p };
        let (r, _) = axis_map(Axis::X);
        assert!(conjugate_bell(&uz.mat, &r).dist(&evolve_closed(&naive, 1.3).mat) > 1e-3);
    }
}
