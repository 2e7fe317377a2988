//! Small dense complex matrices.
//!
//! Everything in this crate lives in dimension 2 or 4, so matrices are plain
//! row-major arrays with const-generic size.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub type Vec3 = [f64; 3];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<const N: usize>(pub [[C64; N]; N]);

pub type Mat2 = CMat<2>;
pub type Mat4 = CMat<4>;

impl<const N: usize> CMat<N> {
    pub fn zeros() -> Self {
        CMat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_diag(d: [C64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z = z.conj());
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z *= s);
        m
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius distance.
    pub fn dist(&self, other: &Self) -> f64 {
        (*self - *other).frobenius_norm()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn mul_vec(&self, v: &[C64; N]) -> [C64; N] {
        let mut out = [ZERO; N];
        for i in 0..N {
            out[i] = (0..N).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }

    /// Max-entry deviation from Hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..N {
            for j in 0..N {
                dev = dev.max((self.0[i][j] - self.0[j][i].conj()).norm());
            }
        }
        dev
    }

    /// Frobenius norm of `A†A - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        (self.adjoint() * *self - Self::identity()).frobenius_norm()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> C64 {
        let mut a = self.0;
        let mut det = ONE;
        for col in 0..N {
            let pivot = (col..N)
                .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
                .unwrap();
            if a[pivot][col].norm() == 0.0 {
                return ZERO;
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            let p = a[col][col];
            det *= p;
            for row in col + 1..N {
                let f = a[row][col] / p;
                for k in col..N {
                    let v = a[col][k];
                    a[row][k] -= f * v;
                }
            }
        }
        det
    }
}

impl<const N: usize> Default for CMat<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Index<(usize, usize)> for CMat<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMat<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Mul for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl<const N: usize> Add for CMat<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Sub for CMat<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    m
}

/// Pauli matrix `sigma_k`, `k` in 1..=3.
pub fn pauli(k: usize) -> Mat2 {
    match k {
        1 => CMat([[ZERO, ONE], [ONE, ZERO]]),
        2 => CMat([[ZERO, -I], [I, ZERO]]),
        3 => CMat([[ONE, ZERO], [ZERO, -ONE]]),
        _ => panic!("Pauli index must be 1, 2 or 3, got {k}"),
    }
}

/// `n . sigma`
pub fn pauli_dot(n: &Vec3) -> Mat2 {
    CMat([
        [C64::new(n[2], 0.0), C64::new(n[0], -n[1])],
        [C64::new(n[0], n[1]), C64::new(-n[2], 0.0)],
    ])
}

pub fn norm3(v: &Vec3) -> f64 {
    dot3(v, v).sqrt()
}

pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn scale3(v: &Vec3, s: f64) -> Vec3 {
    [v[0] * s, v[1] * s, v[2] * s]
}

pub fn vec_norm<const N: usize>(v: &[C64; N]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b>`
pub fn inner<const N: usize>(a: &[C64; N], b: &[C64; N]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_pi(x: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut y = x.rem_euclid(two_pi);
    if y > std::f64::consts::PI {
        y -= two_pi;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let x = pauli(1);
        let y = pauli(2);
        let z = pauli(3);
        assert!((x * y - z.scale(I)).max_abs() < 1e-15);
        assert!((x * x - Mat2::identity()).max_abs() < 1e-15);
        let n = [0.3, -0.4, 0.5];
        let expect = x.scale(C64::from(n[0])) + y.scale(C64::from(n[1])) + z.scale(C64::from(n[2]));
        assert!((pauli_dot(&n) - expect).max_abs() < 1e-15);
    }

    #[test]
    fn det_matches_kron_rule() {
        let a = CMat([[C64::new(1.0, 2.0), C64::new(0.5, 0.0)], [C64::new(-1.0, 0.3), C64::new(0.0, 1.0)]]);
        let b = CMat([[C64::new(0.2, 0.0), C64::new(1.0, -1.0)], [C64::new(3.0, 0.0), C64::new(0.7, 0.1)]]);
        // det(A (x) B) = det(A)^2 det(B)^2 for 2x2 factors
        let k = kron(&a, &b);
        let expect = a.det().powi(2) * b.det().powi(2);
        assert!((k.det() - expect).norm() < 1e-12);
        let d2 = a.0[0][0] * a.0[1][1] - a.0[0][1] * a.0[1][0];
        assert!((a.det() - d2).norm() < 1e-15);
    }

    #[test]
    fn singular_det_is_zero() {
        let m = Mat4::zeros();
        assert_eq!(m.det(), ZERO);
    }

    #[test]
    fn wrap_pi_range() {
        for k in -20..20 {
            let x = 0.37 * k as f64;
            let w = wrap_pi(x);
            assert!(w > -std::f64::consts::PI && w <= std::f64::consts::PI);
            assert!(((x - w) / std::f64::consts::TAU).fract().abs() < 1e-12
                || (1.0 - ((x - w) / std::f64::consts::TAU).fract().abs()) < 1e-12);
        }
    }
}
