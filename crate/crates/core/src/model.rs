//! Physical parameters, reduced notation and the Bell basis.
//!
//! The Hamiltonian is
//! `H = -sum_k J_k s1_k s2_k + B1 s1_h + B2 s2_h` with the field along a single
//! axis `h`. Units have hbar = 1, so energies are angular frequencies.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linalg::{Mat4, C64, ZERO};

/// Field direction; the discriminant is the 1-based index 1, 2, 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X = 1,
    Y = 2,
    Z = 3,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Axis> {
        match i {
            1 => Some(Axis::X),
            2 => Some(Axis::Y),
            3 => Some(Axis::Z),
            _ => None,
        }
    }

    /// The two remaining coupling axes `(i, j)` with `i < j`.
    ///
    /// For `y` this is `(x, z)`, not the cyclic `(z, x)`: only the ascending
    /// order reproduces the closed-form eigenvectors and sector signs.
    pub fn pair(self) -> (Axis, Axis) {
        match self {
            Axis::X => (Axis::Y, Axis::Z),
            Axis::Y => (Axis::X, Axis::Z),
            Axis::Z => (Axis::X, Axis::Y),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Axis> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" | "1" => Ok(Axis::X),
            "y" | "2" => Ok(Axis::Y),
            "z" | "3" => Ok(Axis::Z),
            other => Err(Error::InvalidParams(format!(
                "axis must be one of x, y, z (got {other:?})"
            ))),
        }
    }
}

/// A `-`/`+` label. In arithmetic it stands for -1/+1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub const ALL: [Sign; 2] = [Sign::Minus, Sign::Plus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }

    pub fn from_value(v: f64) -> Sign {
        if v < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Plus => '+',
        }
    }

    pub(crate) fn slot(self) -> usize {
        match self {
            Sign::Minus => 0,
            Sign::Plus => 1,
        }
    }
}

/// Physical inputs of one Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// `(J_x, J_y, J_z)`.
    pub coupling: [f64; 3],
    pub field1: f64,
    pub field2: f64,
    pub axis: Axis,
}

impl ModelParams {
    pub fn new(coupling: [f64; 3], field1: f64, field2: f64, axis: Axis) -> Result<Self> {
        let p = ModelParams {
            coupling,
            field1,
            field2,
            axis,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.coupling.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "couplings must be finite, got {:?}",
                self.coupling
            )));
        }
        if !self.field1.is_finite() || !self.field2.is_finite() {
            return Err(Error::InvalidParams(format!(
                "fields must be finite, got B1={} B2={}",
                self.field1, self.field2
            )));
        }
        Ok(())
    }

    /// Inverse of [`reduce`]: build parameters from `J_h`, the field sums
    /// `[B_-, B_+]` and the coupling pairs `[Jpair_-, Jpair_+]`.
    pub fn from_sums(axis: Axis, coupling_axis: f64, field: [f64; 2], pair: [f64; 2]) -> Result<Self> {
        let (ai, aj) = axis.pair();
        let mut coupling = [0.0; 3];
        coupling[axis.index() - 1] = coupling_axis;
        coupling[ai.index() - 1] = (pair[1] + pair[0]) / 2.0;
        coupling[aj.index() - 1] = (pair[1] - pair[0]) / 2.0;
        let field1 = (field[1] + field[0]) / 2.0;
        let field2 = (field[1] - field[0]) / 2.0;
        ModelParams::new(coupling, field1, field2, axis)
    }

    pub fn coupling_along(&self, axis: Axis) -> f64 {
        self.coupling[axis.index() - 1]
    }

    /// Parse `{"J":[Jx,Jy,Jz],"B1":b1,"B2":b2,"axis":"x"|"y"|"z"}`.
    /// Keys and the axis value are case-insensitive.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_json_value(&value)
    }

    pub fn from_json_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidParams("parameter document must be a JSON object".into()))?;
        let lowered: Map<String, Value> = obj
            .iter()
            .map(|(k, v)| (k.to_ascii_lowercase(), v.clone()))
            .collect();
        let get = |key: &str, shown: &str| {
            lowered
                .get(key)
                .ok_or_else(|| Error::InvalidParams(format!("missing key \"{shown}\"")))
        };
        let number = |v: &Value, shown: &str| {
            v.as_f64()
                .ok_or_else(|| Error::InvalidParams(format!("\"{shown}\" must be a number, got {v}")))
        };

        let j = get("j", "J")?
            .as_array()
            .ok_or_else(|| Error::InvalidParams("\"J\" must be an array of 3 numbers".into()))?;
        if j.len() != 3 {
            return Err(Error::InvalidParams(format!(
                "\"J\" must have 3 entries, got {}",
                j.len()
            )));
        }
        let coupling = [number(&j[0], "J[0]")?, number(&j[1], "J[1]")?, number(&j[2], "J[2]")?];
        let field1 = number(get("b1", "B1")?, "B1")?;
        let field2 = number(get("b2", "B2")?, "B2")?;
        let axis = match get("axis", "axis")? {
            Value::String(s) => s.parse()?,
            Value::Number(n) => n
                .as_u64()
                .and_then(|i| Axis::from_index(i as usize))
                .ok_or_else(|| Error::InvalidParams(format!("axis index must be 1, 2 or 3, got {n}")))?,
            other => {
                return Err(Error::InvalidParams(format!(
                    "\"axis\" must be \"x\", \"y\" or \"z\", got {other}"
                )))
            }
        };
        ModelParams::new(coupling, field1, field2, axis)
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "J": self.coupling,
            "B1": self.field1,
            "B2": self.field2,
            "axis": self.axis.name(),
        })
    }
}

/// Derived Rabi frequencies and normalized field/coupling ratios.
///
/// Entries indexed by a [`Sign`] `s` follow the internal-operation
/// convention: `R_s = sqrt(B_s^2 + Jpair_{-s}^2)`, `b_s = B_s / R_s`,
/// `j_s = Jpair_{-s} / R_s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedParams {
    pub axis: Axis,
    /// `J_h`, the coupling along the field axis.
    pub coupling_axis: f64,
    field: [f64; 2],
    pair: [f64; 2],
    rabi: [f64; 2],
    b: [f64; 2],
    j: [f64; 2],
}

impl ReducedParams {
    /// `B_{h,s} = B1 + s B2`
    pub fn field(&self, s: Sign) -> f64 {
        self.field[s.slot()]
    }

    /// `J_{{h},s} = J_i + s J_j`
    pub fn pair(&self, s: Sign) -> f64 {
        self.pair[s.slot()]
    }

    /// `R_{h,s}`
    pub fn rabi(&self, s: Sign) -> f64 {
        self.rabi[s.slot()]
    }

    /// `b_{h,s}`
    pub fn b(&self, s: Sign) -> f64 {
        self.b[s.slot()]
    }

    /// `j_{h,s}`
    pub fn j(&self, s: Sign) -> f64 {
        self.j[s.slot()]
    }
}

/// Reduced parameters of a model. When `R_s = 0` the ratio pair is `(b, j) = (0, 1)`.
pub fn reduce(params: &ModelParams) -> ReducedParams {
    let (ai, aj) = params.axis.pair();
    let ji = params.coupling_along(ai);
    let jj = params.coupling_along(aj);
    let field = [params.field1 - params.field2, params.field1 + params.field2];
    let pair = [ji - jj, ji + jj];
    let mut rabi = [0.0; 2];
    let mut b = [0.0; 2];
    let mut j = [1.0; 2];
    for s in Sign::ALL {
        let k = s.slot();
        let other = s.flip().slot();
        let r = field[k].hypot(pair[other]);
        rabi[k] = r;
        if r > 0.0 {
            b[k] = field[k] / r;
            j[k] = pair[other] / r;
        }
    }
    ReducedParams {
        axis: params.axis,
        coupling_axis: params.coupling_along(params.axis),
        field,
        pair,
        rabi,
        b,
        j,
    }
}

/// Index of `beta_{mu nu}` in the order `(--, -+, +-, ++)`.
pub fn bell_index(mu: Sign, nu: Sign) -> usize {
    2 * mu.slot() + nu.slot()
}

/// Labels of the Bell state at an index (inverse of [`bell_index`]).
pub fn bell_label(index: usize) -> (Sign, Sign) {
    let s = |bit: usize| if bit == 0 { Sign::Minus } else { Sign::Plus };
    (s((index >> 1) & 1), s(index & 1))
}

/// Parse `"--"`, `"-+"`, `"+-"` or `"++"` (also `00`, `01`, `10`, `11`).
pub fn parse_bell_label(s: &str) -> Result<(Sign, Sign)> {
    let chars: Vec<char> = s.trim().chars().collect();
    let sign = |c: char| match c {
        '-' | '0' => Ok(Sign::Minus),
        '+' | '1' => Ok(Sign::Plus),
        _ => Err(Error::InvalidParams(format!("bad Bell label {s:?}"))),
    };
    if chars.len() != 2 {
        return Err(Error::InvalidParams(format!("bad Bell label {s:?}")));
    }
    Ok((sign(chars[0])?, sign(chars[1])?))
}

/// A two-qubit state as amplitudes on `beta_{--}, beta_{-+}, beta_{+-}, beta_{++}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellVector {
    pub amps: [C64; 4],
}

impl BellVector {
    pub fn new(amps: [C64; 4]) -> Self {
        BellVector { amps }
    }

    pub fn bell(mu: Sign, nu: Sign) -> Self {
        let mut amps = [ZERO; 4];
        amps[bell_index(mu, nu)] = C64::new(1.0, 0.0);
        BellVector { amps }
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::vec_norm(&self.amps)
    }

    pub fn amp(&self, mu: Sign, nu: Sign) -> C64 {
        self.amps[bell_index(mu, nu)]
    }
}

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Columns are the Bell states in the computational basis `|00>, |01>, |10>, |11>`;
/// `beta_{AB} = (|0,B> + (-1)^A |1,1+B>) / sqrt 2`.
const BELL_COLUMNS: [[f64; 4]; 4] = [
    [H, 0.0, H, 0.0],
    [0.0, H, 0.0, H],
    [0.0, H, 0.0, -H],
    [H, 0.0, -H, 0.0],
];

pub fn bell_to_computational(v: &BellVector) -> [C64; 4] {
    let mut out = [ZERO; 4];
    for (row, o) in BELL_COLUMNS.iter().zip(out.iter_mut()) {
        *o = row.iter().zip(&v.amps).map(|(m, a)| a * m).sum();
    }
    out
}

pub fn computational_to_bell(amps: &[C64; 4]) -> BellVector {
    let mut out = [ZERO; 4];
    for (col, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|row| amps[row] * BELL_COLUMNS[row][col]).sum();
    }
    BellVector { amps: out }
}

/// Change of basis of an operator from computational to Bell.
pub fn operator_to_bell(m: &Mat4) -> Mat4 {
    let mut out = Mat4::zeros();
    for a in 0..4 {
        for b in 0..4 {
            let mut acc = ZERO;
            for i in 0..4 {
                for k in 0..4 {
                    acc += m.0[i][k] * (BELL_COLUMNS[i][a] * BELL_COLUMNS[k][b]);
                }
            }
            out.0[a][b] = acc;
        }
    }
    out
}

/// Change of basis of an operator from Bell to computational.
pub fn operator_to_computational(m: &Mat4) -> Mat4 {
    let mut out = Mat4::zeros();
    for i in 0..4 {
        for k in 0..4 {
            let mut acc = ZERO;
            for a in 0..4 {
                for b in 0..4 {
                    acc += m.0[a][b] * (BELL_COLUMNS[i][a] * BELL_COLUMNS[k][b]);
                }
            }
            out.0[i][k] = acc;
        }
    }
    out
}
