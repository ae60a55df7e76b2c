//! JSON transducer description.
//!
//! ```json
//! { "states": 2, "initial": 1, "input_alphabet": ["0", "1"],
//!   "transitions": [{"from": 1, "to": 2, "input": "1", "output": "1/2"}, ...],
//!   "final_outputs": {"1": "0"} }
//! ```
//!
//! Labels are rational strings (`"p/q"` or integers); bare JSON integers are
//! accepted too. `input_alphabet` and `final_outputs` are optional.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{StateId, Transducer, Transition};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelSpec {
    Text(String),
    Integer(i64),
}

impl LabelSpec {
    fn to_rational(&self, location: &str) -> Result<Rational> {
        match self {
            LabelSpec::Text(s) => rational::parse(s).map_err(|e| Error::Parse(format!("{location}: {e}"))),
            LabelSpec::Integer(n) => Ok(rational::int(*n)),
        }
    }

    fn from_rational(value: &Rational) -> Self {
        LabelSpec::Text(rational::to_string(value))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionSpec {
    pub from: StateId,
    pub to: StateId,
    pub input: LabelSpec,
    pub output: LabelSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransducerSpec {
    pub states: usize,
    #[serde(default = "initial_state")]
    pub initial: StateId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_alphabet: Option<Vec<LabelSpec>>,
    pub transitions: Vec<TransitionSpec>,
    #[serde(default)]
    pub final_outputs: BTreeMap<StateId, LabelSpec>,
}

fn initial_state() -> StateId {
    1
}

impl TransducerSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn build(&self) -> Result<Transducer> {
        if self.initial != 1 {
            return Err(Error::Parse(format!(
                "initial: state {} given, the initial state must be 1",
                self.initial
            )));
        }
        let alphabet = self
            .input_alphabet
            .as_ref()
            .map(|symbols| {
                symbols
                    .iter()
                    .enumerate()
                    .map(|(i, s)| s.to_rational(&format!("input_alphabet[{i}]")))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        let transitions = self
            .transitions
            .iter()
            .enumerate()
            .map(|(i, t)| {
                Ok(Transition::new(
                    t.from,
                    t.to,
                    t.input.to_rational(&format!("transitions[{i}].input"))?,
                    t.output.to_rational(&format!("transitions[{i}].output"))?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let final_outputs = self
            .final_outputs
            .iter()
            .map(|(&s, v)| Ok((s, v.to_rational(&format!("final_outputs[\"{s}\"]"))?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Transducer::new(self.states, transitions, final_outputs, alphabet)
    }
}

impl Transducer {
    pub fn to_spec(&self) -> TransducerSpec {
        TransducerSpec {
            states: self.state_count(),
            initial: 1,
            input_alphabet: Some(self.input_alphabet().iter().map(LabelSpec::from_rational).collect()),
            transitions: self
                .transitions()
                .iter()
                .map(|t| TransitionSpec {
                    from: t.from,
                    to: t.to,
                    input: LabelSpec::from_rational(&t.input),
                    output: LabelSpec::from_rational(&t.output),
                })
                .collect(),
            final_outputs: self
                .states()
                .map(|s| (s, LabelSpec::from_rational(self.final_output(s))))
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Transducer> {
        TransducerSpec::from_json(text)?.build()
    }

    pub fn load(path: &Path) -> Result<Transducer> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        TransducerSpec::from_json(&text)
            .and_then(|spec| spec.build())
            .map_err(|e| match e {
                Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
                other => other,
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::rational::{frac, int};

    const NAF: &str = r#"{
        "states": 3, "initial": 1, "input_alphabet": ["0", "1"],
        "transitions": [
            {"from": 1, "to": 1, "input": "0", "output": "0"},
            {"from": 1, "to": 2, "input": "1", "output": "1"},
            {"from": 2, "to": 1, "input": "0", "output": "0"},
            {"from": 2, "to": 3, "input": "1", "output": "0"},
            {"from": 3, "to": 2, "input": "0", "output": "1"},
            {"from": 3, "to": 3, "input": "1", "output": "0"}
        ],
        "final_outputs": {"1": "0", "2": "0", "3": "1"}
    }"#;

    #[test]
    fn parses_naf() {
        assert_eq!(Transducer::from_json(NAF).unwrap(), builtins::naf());
    }

    #[test]
    fn final_outputs_default_to_zero_and_numbers_are_accepted() {
        let t = Transducer::from_json(
            r#"{"states": 1, "transitions": [
                {"from": 1, "to": 1, "input": 0, "output": "1/2"},
                {"from": 1, "to": 1, "input": "-3/2", "output": 2}]}"#,
        )
        .unwrap();
        assert_eq!(t.final_output(1), &int(0));
        assert_eq!(t.input_alphabet(), &[frac(-3, 2), int(0)]);
    }

    #[test]
    fn reports_locations() {
        let err = Transducer::from_json(
            r#"{"states": 1, "transitions": [{"from": 1, "to": 1, "input": "x", "output": "0"}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("transitions[0].input"), "{err}");

        let err = Transducer::from_json("{\"states\": 1,\n \"transitions\": [}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");

        let err = Transducer::from_json(r#"{"states": 1, "initial": 2, "transitions": []}"#).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn spec_round_trip_on_builtins() {
        for (_, t) in builtins::all_default() {
            let json = t.to_spec().to_json();
            assert_eq!(Transducer::from_json(&json).unwrap(), t);
        }
    }
}
