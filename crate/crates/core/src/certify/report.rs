//! JSON output with every real printed to 17 significant digits.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// A real serialized as `d.dddddddddddddddde±x`; non-finite values become `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

pub(crate) fn real(x: f64) -> Real {
    Real(x)
}

pub(crate) fn reals(xs: &[f64]) -> Vec<Real> {
    xs.iter().copied().map(Real).collect()
}

#[derive(Serialize)]
pub(crate) struct Report<I, R, P> {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub inputs: I,
    pub result: R,
    pub per_vertex: Vec<P>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            let text = serde_json::to_string(&Real(x)).unwrap();
            let digits = text.trim_start_matches('-').split('e').next().unwrap().replace('.', "");
            assert_eq!(digits.len(), 17, "{text}");
            assert_eq!(text.parse::<f64>().unwrap(), x);
        }
        assert_eq!(serde_json::to_string(&Real(f64::INFINITY)).unwrap(), "null");
        assert_eq!(serde_json::to_string(&vec![Real(f64::NAN)]).unwrap(), "[null]");
    }
}
