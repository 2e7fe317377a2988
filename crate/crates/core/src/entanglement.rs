//! Pure-state entanglement in the Bell basis.

use crate::error::{Error, Result};
use crate::linalg::{kron, pauli, C64};
use crate::model::{bell_to_computational, reduce, Axis, BellVector, ModelParams, Sign};
use crate::spectral::closed_form_vectors;

const NORM_TOL: f64 = 1e-8;

fn check_norm(v: &BellVector) -> Result<()> {
    let norm = v.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// `|B_{--}^2 + B_{++}^2 - B_{-+}^2 - B_{+-}^2|`
pub fn concurrence_bell(v: &BellVector) -> Result<f64> {
    check_norm(v)?;
    let [a, b, c, d] = v.amps;
    Ok((a * a + d * d - b * b - c * c).norm().min(1.0))
}

/// Spin-flip overlap `|<psi| Y(x)Y |psi*>|` in the computational basis.
pub fn concurrence_oracle(v: &BellVector) -> Result<f64> {
    check_norm(v)?;
    let psi = bell_to_computational(v);
    let flip = kron(&pauli(2), &pauli(2));
    let conj = psi.map(|z| z.conj());
    let flipped = flip.mul_vec(&conj);
    Ok(crate::linalg::inner(&psi, &flipped).norm().min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntanglementReport {
    pub concurrence: f64,
    /// Squared Schmidt coefficients, larger first.
    pub schmidt: (f64, f64),
    /// Base-2 entanglement entropy.
    pub entropy: f64,
}

impl EntanglementReport {
    pub fn from_concurrence(c: f64) -> Self {
        let c = c.clamp(0.0, 1.0);
        let r = (1.0 - c * c).max(0.0).sqrt();
        let hi = (1.0 + r) / 2.0;
        let lo = (1.0 - r) / 2.0;
        EntanglementReport {
            concurrence: c,
            schmidt: (hi, lo),
            entropy: binary_entropy(hi, lo),
        }
    }

    fn from_schmidt(hi: f64, lo: f64) -> Self {
        EntanglementReport {
            concurrence: 2.0 * (hi * lo).max(0.0).sqrt(),
            schmidt: (hi, lo),
            entropy: binary_entropy(hi, lo),
        }
    }
}

fn binary_entropy(a: f64, b: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    term(a) + term(b)
}

pub fn schmidt_and_entropy(v: &BellVector) -> Result<EntanglementReport> {
    Ok(EntanglementReport::from_concurrence(concurrence_bell(v)?))
}

/// Schmidt data of the eigenvectors, in Bell index order.
pub fn eigenstate_entanglement(params: &ModelParams) -> Result<[EntanglementReport; 4]> {
    let sys = closed_form_vectors(params)?;
    let mut out = [EntanglementReport::from_concurrence(0.0); 4];
    for (slot, v) in out.iter_mut().zip(&sys.vectors) {
        *slot = schmidt_and_entropy(v)?;
    }
    Ok(out)
}

/// Eigenstate Schmidt data straight from the field ratio: `(1 +/- |b_{-mu}|) / 2`.
pub fn eigenstate_entanglement_closed(params: &ModelParams) -> [EntanglementReport; 4] {
    let r = reduce(params);
    let mut out = [EntanglementReport::from_concurrence(0.0); 4];
    for (k, slot) in out.iter_mut().enumerate() {
        let (mu, _) = crate::model::bell_label(k);
        let b = r.b(mu.flip()).abs().min(1.0);
        *slot = EntanglementReport::from_schmidt((1.0 + b) / 2.0, (1.0 - b) / 2.0);
    }
    out
}

/// The sign label `f` whose Rabi frequency `R_{-f}` drives the Bell state `(mu, nu)`.
pub fn driving_label(axis: Axis, mu: Sign, nu: Sign) -> Sign {
    match axis {
        Axis::X => mu,
        Axis::Y => mu.times(nu),
        Axis::Z => nu,
    }
}

/// Concurrence of `U(t) beta_{mu nu}` by three routes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellConcurrence {
    /// `1 - 4 j b sin^4(R t)`. Kept for comparison; it is not the concurrence
    /// in general and can leave `[0, 1]`.
    pub closed: f64,
    /// `sqrt(1 - 4 j^2 b^2 sin^4(R t))`, the exact value.
    pub exact: f64,
    /// Spin-flip oracle on the numerically evolved state.
    pub oracle: f64,
    /// Entropy of the evolved state from the oracle concurrence.
    pub entropy: f64,
}

impl BellConcurrence {
    pub fn closed_gap(&self) -> f64 {
        (self.closed - self.oracle).abs()
    }
}

pub fn bell_concurrence_evolution(params: &ModelParams, mu: Sign, nu: Sign, t: f64) -> Result<BellConcurrence> {
    let r = reduce(params);
    let f = driving_label(params.axis, mu, nu);
    let b = r.b(f.flip());
    let j = r.j(f.flip());
    let s = (r.rabi(f.flip()) * t).sin();
    let s4 = s * s * s * s;
    let closed = 1.0 - 4.0 * j * b * s4;
    let exact = (1.0 - 4.0 * j * j * b * b * s4).max(0.0).sqrt();

    let u = crate::evolution::evolve_oracle(params, t)?;
    let evolved = BellVector::new(u.mul_vec(&BellVector::bell(mu, nu).amps));
    let oracle = concurrence_oracle(&normalized(evolved))?;
    Ok(BellConcurrence {
        closed,
        exact,
        oracle,
        entropy: EntanglementReport::from_concurrence(oracle).entropy,
    })
}

/// Period of the Bell-state concurrence, `pi / R_{-f}`; `None` when the state is stationary.
pub fn concurrence_period(params: &ModelParams, mu: Sign, nu: Sign) -> Option<f64> {
    let r = reduce(params);
    let rabi = r.rabi(driving_label(params.axis, mu, nu).flip());
    (rabi > 0.0).then(|| std::f64::consts::PI / rabi)
}

fn normalized(v: BellVector) -> BellVector {
    let n = v.norm();
    BellVector::new(v.amps.map(|z| z / C64::new(n, 0.0)))
}
