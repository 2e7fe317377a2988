//! Seeded random draws shared by tests, verification suites and the CLI.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{Mat2, C64, ZERO};
use crate::model::{Axis, BellVector, ModelParams};

/// Couplings and fields uniform in `[-scale, scale]`.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R, axis: Axis, scale: f64) -> ModelParams {
    let mut u = || rng.random_range(-scale..=scale);
    let coupling = [u(), u(), u()];
    let (b1, b2) = (u(), u());
    ModelParams::new(coupling, b1, b2, axis).expect("finite draws")
}

/// A normalized state with Gaussian amplitudes (uniform on the sphere).
pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> BellVector {
    let mut amps = [ZERO; 4];
    for a in &mut amps {
        *a = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    }
    let n = crate::linalg::vec_norm(&amps);
    BellVector::new(amps.map(|z| z / n))
}

/// Haar-random element of SU(2).
pub fn haar_su2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let mut q = [0.0f64; 4];
    for x in &mut q {
        *x = rng.sample(StandardNormal);
    }
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [a, b, c, d] = q.map(|x| x / n);
    let u = C64::new(a, b);
    let v = C64::new(c, d);
    crate::linalg::CMat([[u, -v.conj()], [v, u.conj()]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_is_special_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let u = haar_su2(&mut rng);
            assert!(u.unitarity_deviation() < 1e-14);
            assert!((u.det() - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn seeded_draws_repeat() {
        let a = random_params(&mut ChaCha8Rng::seed_from_u64(3), Axis::Y, 3.0);
        let b = random_params(&mut ChaCha8Rng::seed_from_u64(3), Axis::Y, 3.0);
        assert_eq!(a, b);
        let s = random_state(&mut ChaCha8Rng::seed_from_u64(3));
        assert!((s.norm() - 1.0).abs() < 1e-14);
    }
}
