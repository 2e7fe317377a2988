//! Spectrum and Bell-basis eigenvectors of the Hamiltonian.
//!
//! Closed forms live here; [`jacobi`] holds the independent numerical oracle.

pub mod jacobi;

use crate::error::Result;
use crate::linalg::{kron, pauli, Mat2, Mat4, C64, ZERO};
use crate::model::{bell_index, bell_label, operator_to_bell, reduce, BellVector, ModelParams, Sign};

pub use jacobi::{fix_phase, oracle_diagonalize, projector, Eigen};

/// `H` in the computational basis `|00>, |01>, |10>, |11>`.
pub fn hamiltonian_matrix(params: &ModelParams) -> Mat4 {
    let id = Mat2::identity();
    let mut h = Mat4::zeros();
    for k in 1..=3 {
        let s = pauli(k);
        h = h - kron(&s, &s).scale(C64::new(params.coupling[k - 1], 0.0));
    }
    let s = pauli(params.axis.index());
    h + kron(&s, &id).scale(C64::new(params.field1, 0.0))
        + kron(&id, &s).scale(C64::new(params.field2, 0.0))
}

/// `H` in the Bell basis.
pub fn hamiltonian_bell(params: &ModelParams) -> Mat4 {
    operator_to_bell(&hamiltonian_matrix(params))
}

/// Energies `E_{mu nu} = mu J_h + nu R_{-mu}`, stored in Bell index order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyLevels(pub [f64; 4]);

impl EnergyLevels {
    pub fn get(&self, mu: Sign, nu: Sign) -> f64 {
        self.0[bell_index(mu, nu)]
    }

    pub fn sorted(&self) -> [f64; 4] {
        let mut v = self.0;
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

pub fn closed_form_levels(params: &ModelParams) -> EnergyLevels {
    let r = reduce(params);
    let mut e = [0.0; 4];
    for mu in Sign::ALL {
        for nu in Sign::ALL {
            e[bell_index(mu, nu)] = mu.value() * r.coupling_axis + nu.value() * r.rabi(mu.flip());
        }
    }
    EnergyLevels(e)
}

/// Where an eigenvector came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorSource {
    ClosedForm,
    /// The closed form had a vanishing denominator; the vector was taken from
    /// the Jacobi oracle restricted to its two-state subspace.
    Oracle,
}

#[derive(Clone, Copy, Debug)]
pub struct EigenSystem {
    pub levels: EnergyLevels,
    /// Column `bell_index(mu, nu)` is `|phi_{mu nu}>`.
    pub vectors: [BellVector; 4],
    pub sources: [VectorSource; 4],
}

impl EigenSystem {
    pub fn vector(&self, mu: Sign, nu: Sign) -> &BellVector {
        &self.vectors[bell_index(mu, nu)]
    }

    /// `max |H phi - E phi|` over the four columns (`h` in the Bell basis).
    pub fn residual(&self, h: &Mat4) -> f64 {
        (0..4)
            .map(|k| {
                let v = &self.vectors[k].amps;
                let hv = h.mul_vec(v);
                hv.iter()
                    .zip(v)
                    .map(|(x, y)| (x - y * self.levels.0[k]).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `max |<phi_a|phi_b> - delta_ab|`
    pub fn orthonormality_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let ip = crate::linalg::inner(&self.vectors[a].amps, &self.vectors[b].amps);
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((ip - C64::new(want, 0.0)).norm());
            }
        }
        worst
    }
}

/// The two Bell indices mixed by the eigenvectors `phi_{mu, +/-}`.
pub fn eigen_pair_rows(params: &ModelParams, mu: Sign) -> [usize; 2] {
    use crate::model::Axis;
    match params.axis {
        Axis::X => [bell_index(mu, Sign::Plus), bell_index(mu, Sign::Minus)],
        Axis::Y => [bell_index(mu, Sign::Plus), bell_index(mu.flip(), Sign::Minus)],
        Axis::Z => [bell_index(Sign::Plus, mu), bell_index(Sign::Minus, mu)],
    }
}

/// `1 + s x` for a ratio `x` with `x^2 + y^2 = 1`, evaluated without cancellation.
fn one_plus(s: f64, x: f64, y: f64) -> f64 {
    if s * x >= 0.0 {
        1.0 + s * x
    } else {
        y * y / (1.0 - s * x)
    }
}

fn sign_of(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Closed-form eigenvectors in the Bell basis.
///
/// Each vector mixes exactly two Bell states. The coefficient
/// `b / sqrt(1 + s j)` is evaluated as `sign(b) sqrt(1 - s j)`, which is the
/// same number when `b^2 + j^2 = 1` and avoids cancellation near `|j| = 1`.
/// When the denominator vanishes exactly the vector falls back to the oracle.
pub fn closed_form_vectors(params: &ModelParams) -> Result<EigenSystem> {
    use crate::model::Axis;
    let r = reduce(params);
    let levels = closed_form_levels(params);
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut vectors = [BellVector::new([ZERO; 4]); 4];
    let mut sources = [VectorSource::ClosedForm; 4];
    let h_bell = hamiltonian_bell(params);

    for mu in Sign::ALL {
        let b = r.b(mu.flip());
        let j = r.j(mu.flip());
        for nu in Sign::ALL {
            let (m, n) = (mu.value(), nu.value());
            let slot = bell_index(mu, nu);
            let mut amps = [ZERO; 4];
            let denom = match params.axis {
                Axis::X | Axis::Y => one_plus(m * n, j, b),
                Axis::Z => one_plus(n, b, j),
            };
            if denom == 0.0 {
                amps = subspace_oracle_vector(&h_bell, eigen_pair_rows(params, mu), nu, levels.0[slot])?;
                sources[slot] = VectorSource::Oracle;
            } else {
                match params.axis {
                    Axis::X => {
                        amps[bell_index(mu, Sign::Plus)] = C64::new(n * denom.sqrt() / sqrt2, 0.0);
                        amps[bell_index(mu, Sign::Minus)] =
                            C64::new(-m * sign_of(b) * one_plus(-m * n, j, b).sqrt() / sqrt2, 0.0);
                    }
                    Axis::Y => {
                        amps[bell_index(mu, Sign::Plus)] = C64::new(0.0, n * denom.sqrt() / sqrt2);
                        amps[bell_index(mu.flip(), Sign::Minus)] =
                            C64::new(-m * sign_of(b) * one_plus(-m * n, j, b).sqrt() / sqrt2, 0.0);
                    }
                    Axis::Z => {
                        let half = denom.sqrt() / 2.0;
                        let cross = n * sign_of(j) * one_plus(-n, b, j).sqrt() / 2.0;
                        amps[bell_index(Sign::Plus, mu)] = C64::new(half + cross, 0.0);
                        amps[bell_index(Sign::Minus, mu)] = C64::new(half - cross, 0.0);
                    }
                }
            }
            fix_phase(&mut amps);
            vectors[slot] = BellVector::new(amps);
        }
    }
    let system = EigenSystem {
        levels,
        vectors,
        sources,
    };
    debug_assert!(system.residual(&h_bell) < 1e-8 * h_bell.max_abs().max(1.0));
    Ok(system)
}

/// Diagonalize the 2x2 block of `h` on `rows` and return the eigenvector whose
/// eigenvalue is nearest `target` (ties broken by `nu`: lower for `-`).
fn subspace_oracle_vector(h: &Mat4, rows: [usize; 2], nu: Sign, target: f64) -> Result<[C64; 4]> {
    let mut block = Mat2::zeros();
    for a in 0..2 {
        for b in 0..2 {
            block.0[a][b] = h.0[rows[a]][rows[b]];
        }
    }
    let e = oracle_diagonalize(&block)?;
    let tie = (e.values[1] - e.values[0]).abs() < 1e-12 * (1.0 + target.abs());
    let k = if tie {
        usize::from(nu == Sign::Plus)
    } else if (e.values[0] - target).abs() <= (e.values[1] - target).abs() {
        0
    } else {
        1
    };
    let col = e.column(k);
    let mut amps = [ZERO; 4];
    amps[rows[0]] = col[0];
    amps[rows[1]] = col[1];
    Ok(amps)
}

/// Oracle eigen-decomposition of `H` in the Bell basis.
pub fn oracle_bell(params: &ModelParams) -> Result<Eigen<4>> {
    oracle_diagonalize(&hamiltonian_bell(params))
}

/// Labels `(mu, nu)` in Bell index order, for iteration.
pub fn level_labels() -> [(Sign, Sign); 4] {
    [bell_label(0), bell_label(1), bell_label(2), bell_label(3)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Axis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(j: [f64; 3], b1: f64, b2: f64, axis: Axis) -> ModelParams {
        ModelParams::new(j, b1, b2, axis).unwrap()
    }

    fn random_params(rng: &mut ChaCha8Rng, axis: Axis) -> ModelParams {
        let mut u = || rng.random_range(-3.0..3.0);
        p([u(), u(), u()], u(), u(), axis)
    }

    #[test]
    fn zero_hamiltonian() {
        assert_eq!(hamiltonian_matrix(&p([0.0; 3], 0.0, 0.0, Axis::Z)), Mat4::zeros());
    }

    #[test]
    fn pure_zz_coupling() {
        let h = hamiltonian_matrix(&p([0.0, 0.0, 1.0], 0.0, 0.0, Axis::Z));
        let want = Mat4::from_diag([-1.0, 1.0, 1.0, -1.0].map(|x| C64::new(x, 0.0)));
        assert!(h.dist(&want) < 1e-15);
    }

    #[test]
    fn isotropic_levels() {
        let q = p([1.0, 1.0, 1.0], 0.0, 0.0, Axis::Z);
        let e = oracle_diagonalize(&hamiltonian_matrix(&q)).unwrap();
        for (got, want) in e.values.iter().zip([-1.0, -1.0, -1.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let l = closed_form_levels(&q);
        assert_eq!(l.get(Sign::Minus, Sign::Minus), -1.0);
        assert_eq!(l.get(Sign::Minus, Sign::Plus), -1.0);
        assert_eq!(l.get(Sign::Plus, Sign::Minus), -1.0);
        assert_eq!(l.get(Sign::Plus, Sign::Plus), 3.0);
    }

    #[test]
    fn pure_zeeman_levels() {
        let l = closed_form_levels(&p([0.0; 3], 1.0, 1.0, Axis::Z)).sorted();
        assert_eq!(l, [-2.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn hamiltonian_hermitian_traceless() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for axis in Axis::ALL {
            for _ in 0..50 {
                let h = hamiltonian_matrix(&random_params(&mut rng, axis));
                assert!(h.hermiticity_deviation() < 1e-14);
                assert!(h.trace().norm() < 1e-14);
                assert!(closed_form_levels(&random_params(&mut rng, axis)).sum().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn vectors_satisfy_eigen_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for axis in Axis::ALL {
            for _ in 0..100 {
                let q = random_params(&mut rng, axis);
                let sys = closed_form_vectors(&q).unwrap();
                let h = hamiltonian_bell(&q);
                assert!(sys.residual(&h) < 1e-10, "{axis} {:?}", q);
                assert!(sys.orthonormality_deviation() < 1e-12);
                assert!(sys.sources.iter().all(|s| *s == VectorSource::ClosedForm));
            }
        }
    }

    #[test]
    fn field_free_z_eigenvectors_are_bell_states() {
        // b = 0 on both sectors
        let sys = closed_form_vectors(&p([0.4, -1.1, 0.7], 0.0, 0.0, Axis::Z)).unwrap();
        for v in &sys.vectors {
            let big = v.amps.iter().filter(|z| z.norm() > 1e-12).count();
            assert_eq!(big, 1, "{:?}", v);
        }
    }

    #[test]
    fn degenerate_denominator_falls_back_to_oracle() {
        // x-axis isotropic: j_- = 1, b_- = 0 so 1 + mu nu j vanishes for mu = +, nu = -
        let q = p([1.0, 1.0, 1.0], 0.0, 0.0, Axis::X);
        let sys = closed_form_vectors(&q).unwrap();
        assert!(sys.sources.contains(&VectorSource::Oracle));
        assert!(sys.residual(&hamiltonian_bell(&q)) < 1e-12);
        assert!(sys.orthonormality_deviation() < 1e-12);
    }

    #[test]
    fn nondegenerate_vectors_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for axis in Axis::ALL {
            for _ in 0..100 {
                let q = random_params(&mut rng, axis);
                let sys = closed_form_vectors(&q).unwrap();
                let oracle = oracle_bell(&q).unwrap();
                for k in 0..4 {
                    let e = sys.levels.0[k];
                    let gaps: Vec<f64> = oracle.values.iter().map(|x| (x - e).abs()).collect();
                    let nearest = (0..4).min_by(|&a, &b| gaps[a].total_cmp(&gaps[b])).unwrap();
                    let isolated = (0..4).all(|i| i == nearest || gaps[i] > 1e-3);
                    if !isolated {
                        continue;
                    }
                    let o = oracle.column(nearest);
                    let overlap = crate::linalg::inner(&o, &sys.vectors[k].amps).norm();
                    assert!((overlap - 1.0).abs() < 1e-8);
                    // same phase convention, so the vectors coincide
                    let d: f64 = o.iter().zip(&sys.vectors[k].amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                    assert!(d < 1e-8, "{d}");
                }
            }
        }
    }
}
