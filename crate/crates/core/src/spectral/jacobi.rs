//! Cyclic Jacobi diagonalization of small Hermitian matrices.
//!
//! This is the ground-truth route: it knows nothing about the model and is
//! used to check every closed-form expression in the crate.

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64, ZERO};

const MAX_SWEEPS: usize = 64;
const HERMITIAN_TOL: f64 = 1e-12;

/// Eigen-decomposition `A = V diag(values) V†`, values ascending,
/// eigenvectors in the columns of `vectors`.
#[derive(Clone, Copy, Debug)]
pub struct Eigen<const N: usize> {
    pub values: [f64; N],
    pub vectors: CMat<N>,
}

impl<const N: usize> Eigen<N> {
    pub fn column(&self, k: usize) -> [C64; N] {
        let mut v = [ZERO; N];
        for (i, x) in v.iter_mut().enumerate() {
            *x = self.vectors.0[i][k];
        }
        v
    }

    /// `V diag(values) V†`
    pub fn reconstruct(&self) -> CMat<N> {
        let mut d = CMat::<N>::zeros();
        for i in 0..N {
            d.0[i][i] = C64::new(self.values[i], 0.0);
        }
        self.vectors * d * self.vectors.adjoint()
    }

    /// `max_k |A v_k - lambda_k v_k|`
    pub fn residual(&self, a: &CMat<N>) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..N {
            let v = self.column(k);
            let av = a.mul_vec(&v);
            let r: f64 = av
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - y * self.values[k]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r);
        }
        worst
    }
}

fn off_diagonal_norm<const N: usize>(a: &CMat<N>) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                s += a.0[i][j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Diagonalize a Hermitian matrix with cyclic complex Jacobi rotations.
pub fn oracle_diagonalize<const N: usize>(h: &CMat<N>) -> Result<Eigen<N>> {
    let scale = h.max_abs().max(1.0);
    let deviation = h.hermiticity_deviation();
    if deviation > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { deviation });
    }
    // symmetrize so round-off in the input does not bias the rotations
    let mut a = (*h + h.adjoint()).scale(C64::new(0.5, 0.0));
    let mut v = CMat::<N>::identity();
    let eps = f64::EPSILON * scale;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= eps {
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                let z = a.0[p][q];
                let r = z.norm();
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                // phase rotation makes the (p,q) entry real, then a real Jacobi step zeroes it
                let phase = z / r;
                let app = a.0[p][p].re;
                let aqq = a.0[q][q].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                let mut g = CMat::<N>::identity();
                g.0[p][p] = C64::new(c, 0.0);
                g.0[p][q] = C64::new(s, 0.0);
                g.0[q][p] = -phase.conj() * s;
                g.0[q][q] = phase.conj() * c;

                a = g.adjoint() * a * g;
                a.0[p][q] = ZERO;
                a.0[q][p] = ZERO;
                v = v * g;
            }
        }
    }

    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&x, &y| a.0[x][x].re.total_cmp(&a.0[y][y].re));
    let mut values = [0.0; N];
    let mut vectors = CMat::<N>::zeros();
    for (k, &src) in order.iter().enumerate() {
        values[k] = a.0[src][src].re;
        let mut col = [ZERO; N];
        for (i, c) in col.iter_mut().enumerate() {
            *c = v.0[i][src];
        }
        fix_phase(&mut col);
        for i in 0..N {
            vectors.0[i][k] = col[i];
        }
    }
    Ok(Eigen { values, vectors })
}

/// Make the first non-negligible amplitude real and positive.
pub fn fix_phase<const N: usize>(v: &mut [C64; N]) {
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-12) {
        let rot = first.conj() / first.norm();
        v.iter_mut().for_each(|z| *z *= rot);
    }
}

/// Sum of `|v><v|` over a set of vectors.
pub fn projector<const N: usize>(vs: &[[C64; N]]) -> CMat<N> {
    let mut p = CMat::<N>::zeros();
    for v in vs {
        for i in 0..N {
            for j in 0..N {
                p.0[i][j] += v[i] * v[j].conj();
            }
        }
    }
    p
}
