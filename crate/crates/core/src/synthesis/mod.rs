//! Constructive control: axis rotations, evolution loops, exchanges and
//! two-pulse sector synthesis.

pub mod exchange;
pub mod loops;
pub mod rotation;
pub mod two_pulse;

pub use exchange::{find_exchange, hadamard_like, ExchangeSolution};
pub use loops::{default_horizon, find_evolution_loop, LoopCandidate, LoopReport};
pub use rotation::{axis_map, bipartite_rotation, bipartite_rotation_bell, conjugate_bell, rotated_params, single_rotation, RotationParams};
pub use two_pulse::{
    coverage_experiment, pulse_for_rotation, synthesize_two_pulse, CoverageReport, SolutionKind, SynthesisTarget,
    TwoPulseSolution,
};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::PulseSpec;
use crate::linalg::Mat4;
use crate::model::ModelParams;

/// Product of the pulses' evolutions, first pulse applied first.
pub fn sequence_unitary(pulses: &[PulseSpec]) -> Mat4 {
    pulses
        .iter()
        .fold(Mat4::identity(), |acc, p| p.unitary().mat * acc)
}

/// `[{"J":[..],"B1":..,"B2":..,"axis":"z","t":..}, ...]`
pub fn sequence_to_json(pulses: &[PulseSpec]) -> Value {
    Value::Array(
        pulses
            .iter()
            .map(|p| {
                let mut v = p.params.to_json_value();
                v["t"] = json!(p.duration);
                v
            })
            .collect(),
    )
}

pub fn sequence_from_json(value: &Value) -> Result<Vec<PulseSpec>> {
    let items = value
        .as_array()
        .ok_or_else(|| Error::InvalidParams("sequence must be a JSON array".into()))?;
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let t = item
                .get("t")
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::InvalidParams(format!("pulse {i}: missing numeric \"t\"")))?;
            let mut params = item.clone();
            if let Some(obj) = params.as_object_mut() {
                obj.remove("t");
            }
            let params = ModelParams::from_json_value(&params)
                .map_err(|e| Error::InvalidParams(format!("pulse {i}: {e}")))?;
            PulseSpec::new(params, t)
        })
        .collect()
}
