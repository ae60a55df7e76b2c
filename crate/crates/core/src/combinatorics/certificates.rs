//! Cycle certificates: every simple cycle satisfies
//! `output_sum = k * length` (bounded variance, quasi-determinism) or
//! `output_sum = a * length + b * input_sum` (rank-one covariance).

use num_traits::Zero;
use serde::Serialize;

use super::cycles::{cycles_of_component, cycles_of_transducer, Cycle};
use crate::error::{Error, Result};
use crate::model::{FinalComponent, StateId, Transducer};
use crate::moments::{moments_algebraic, Moments};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Output sum per unit of cycle length.
    Slope(Rational),
    /// `output_sum = a * length + b * input_sum`.
    Affine { a: Rational, b: Rational },
}

impl Serialize for Witness {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(None)?;
        match self {
            Witness::Slope(k) => map.serialize_entry("k", &rational::to_string(k))?,
            Witness::Affine { a, b } => {
                map.serialize_entry("a", &rational::to_string(a))?;
                map.serialize_entry("b", &rational::to_string(b))?;
            }
        }
        map.end()
    }
}

/// A positive verdict carries the witness; a negative one carries a cycle
/// violating the relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub verdict: bool,
    pub witness: Option<Witness>,
    /// The cycle that fixed the slope, for slope certificates.
    pub reference: Option<Cycle>,
    pub counterexample: Option<Cycle>,
    pub cycles_checked: usize,
}

fn slope_certificate(cycles: Vec<Cycle>) -> Certificate {
    let Some(first) = cycles.first() else {
        return Certificate {
            verdict: true,
            witness: Some(Witness::Slope(Rational::zero())),
            reference: None,
            counterexample: None,
            cycles_checked: 0,
        };
    };
    let k = &first.output_sum / first.length_rational();
    let counterexample = cycles.iter().find(|c| !c.satisfies(&k, &Rational::zero())).cloned();
    Certificate {
        verdict: counterexample.is_none(),
        witness: counterexample.is_none().then_some(Witness::Slope(k)),
        reference: Some(first.clone()),
        counterexample,
        cycles_checked: cycles.len(),
    }
}

/// Bounded output variance holds iff all simple cycles of the final
/// component share the output slope of the first one.
pub fn bounded_variance_certificate(fc: &FinalComponent, cycle_budget: usize) -> Result<Certificate> {
    Ok(slope_certificate(cycles_of_component(fc, cycle_budget)?))
}

/// The same slope test over every simple cycle of the whole (weakly
/// connected) transducer: output is `k n + O(1)` for all inputs.
pub fn quasi_deterministic_certificate(t: &Transducer, cycle_budget: usize) -> Result<Certificate> {
    if !t.is_weakly_connected() {
        return Err(Error::NotWeaklyConnected);
    }
    Ok(slope_certificate(cycles_of_transducer(t, cycle_budget)?))
}

/// Rank-one covariance with `v1 != 0` holds iff every simple cycle of the
/// final component satisfies `output_sum = a length + b input_sum` with
/// `b = c / v1` and `a = e2 - b e1`.
pub fn rank1_certificate(fc: &FinalComponent, moments: &Moments, cycle_budget: usize) -> Result<Certificate> {
    if moments.v1.is_zero() {
        return Err(Error::PreconditionViolated(
            "rank-one certificate needs a nondegenerate input variance".into(),
        ));
    }
    let b = &moments.c / &moments.v1;
    let a = &moments.e2 - &b * &moments.e1;
    let cycles = cycles_of_component(fc, cycle_budget)?;
    let counterexample = cycles.iter().find(|c| !c.satisfies(&a, &b)).cloned();
    Ok(Certificate {
        verdict: counterexample.is_none(),
        witness: counterexample.is_none().then_some(Witness::Affine { a, b }),
        reference: None,
        counterexample,
        cycles_checked: cycles.len(),
    })
}

/// Check `output_sum = k * length` on every closed walk from `start` of
/// length at most `max_length` that returns to `start` only at its end.
pub fn closed_walk_spot_check(fc: &FinalComponent, start: StateId, max_length: usize, k: &Rational) -> Result<bool> {
    let Some(origin) = fc.local_index(start) else {
        return Err(Error::PreconditionViolated(format!(
            "state {start} is not in the final component"
        )));
    };
    if max_length == 0 {
        return Err(Error::PreconditionViolated("walk length bound must be positive".into()));
    }

    fn walk(
        fc: &FinalComponent,
        origin: usize,
        here: usize,
        length: usize,
        output: &Rational,
        max_length: usize,
        k: &Rational,
    ) -> bool {
        fc.outgoing(here).iter().all(|&e| {
            let t = &fc.transitions()[e];
            let next = fc.local_index(t.to).unwrap();
            let out = output + &t.output;
            if next == origin {
                out == k * rational::int(length as i64 + 1)
            } else if length + 1 < max_length {
                walk(fc, origin, next, length + 1, &out, max_length, k)
            } else {
                true
            }
        })
    }
    Ok(walk(fc, origin, origin, 0, &Rational::zero(), max_length, k))
}

/// For outputs in `{0, 1}`: the output variance is bounded iff all outputs
/// are equal. Returns whether it is bounded, after checking the two sides
/// agree.
pub fn zero_one_output_check(fc: &FinalComponent) -> Result<bool> {
    let (zero, one) = (Rational::zero(), rational::int(1));
    if fc.transitions().iter().any(|t| t.output != zero && t.output != one) {
        return Err(Error::PreconditionViolated("outputs must lie in {0, 1}".into()));
    }
    fc.require_aperiodic()?;
    let bounded = moments_algebraic(fc)?.v2.is_zero();
    let first = &fc.transitions()[0].output;
    let constant = fc.transitions().iter().all(|t| &t.output == first);
    if bounded != constant {
        return Err(Error::InternalMismatch(format!(
            "output variance bounded = {bounded}, outputs constant = {constant}"
        )));
    }
    Ok(bounded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::combinatorics::DEFAULT_CYCLE_BUDGET;
    use crate::model::{final_component, Transition};
    use crate::rational::{frac, int};

    fn fc_of(t: &Transducer) -> FinalComponent {
        final_component(t).unwrap()
    }

    #[test]
    fn naf_is_not_bounded() {
        let cert = bounded_variance_certificate(&fc_of(&builtins::naf()), DEFAULT_CYCLE_BUDGET).unwrap();
        assert!(!cert.verdict);
        assert_eq!(cert.reference.unwrap().output_sum, int(0));
        let bad = cert.counterexample.unwrap();
        assert_eq!((bad.length, bad.output_sum), (2, int(1)));
    }

    #[test]
    fn block10m01_is_bounded() {
        let fc = fc_of(&builtins::block10m01());
        let cert = bounded_variance_certificate(&fc, DEFAULT_CYCLE_BUDGET).unwrap();
        assert!(cert.verdict);
        assert_eq!(cert.witness, Some(Witness::Slope(int(0))));
        assert!(closed_walk_spot_check(&fc, 2, 8, &int(0)).unwrap());
        assert!(moments_algebraic(&fc).unwrap().v2.is_zero());
    }

    #[test]
    fn spot_check_finds_violation() {
        let fc = fc_of(&builtins::naf());
        assert!(!closed_walk_spot_check(&fc, 1, 4, &int(0)).unwrap());
        assert!(closed_walk_spot_check(&fc, 1, 1, &int(0)).unwrap());
        assert!(closed_walk_spot_check(&fc, 9, 4, &int(0)).is_err());
        assert!(closed_walk_spot_check(&fc, 1, 0, &int(0)).is_err());
    }

    /// State 1 loops on `1|1` and leaves on `0|0` to state 2, which loops on
    /// both inputs with output 0.
    fn absorbing() -> Transducer {
        Transducer::new(
            2,
            vec![
                Transition::new(1, 1, int(1), int(1)),
                Transition::new(1, 2, int(0), int(0)),
                Transition::new(2, 2, int(0), int(0)),
                Transition::new(2, 2, int(1), int(0)),
            ],
            Default::default(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn quasi_determinism_needs_the_whole_graph() {
        let t = absorbing();
        assert!(
            bounded_variance_certificate(&fc_of(&t), DEFAULT_CYCLE_BUDGET)
                .unwrap()
                .verdict
        );
        let cert = quasi_deterministic_certificate(&t, DEFAULT_CYCLE_BUDGET).unwrap();
        assert!(!cert.verdict);
        assert!(cert.counterexample.is_some());
        let cert = quasi_deterministic_certificate(&builtins::block10m01(), DEFAULT_CYCLE_BUDGET).unwrap();
        assert!(cert.verdict);
    }

    #[test]
    fn disconnected_transducer_is_rejected() {
        let t = Transducer::new(
            2,
            vec![
                Transition::new(1, 1, int(0), int(0)),
                Transition::new(1, 1, int(1), int(0)),
                Transition::new(2, 2, int(0), int(0)),
                Transition::new(2, 2, int(1), int(0)),
            ],
            Default::default(),
            None,
        )
        .unwrap();
        assert!(matches!(
            quasi_deterministic_certificate(&t, DEFAULT_CYCLE_BUDGET),
            Err(Error::NotWeaklyConnected)
        ));
    }

    #[test]
    fn rank1_on_identity_output() {
        let t = builtins::simple([int(0), int(1), int(1), int(0)]);
        let fc = fc_of(&t);
        let m = moments_algebraic(&fc).unwrap();
        let cert = rank1_certificate(&fc, &m, DEFAULT_CYCLE_BUDGET).unwrap();
        assert!(cert.verdict);
        assert_eq!(cert.witness, Some(Witness::Affine { a: int(0), b: int(1) }));
    }

    #[test]
    fn rank1_fails_on_naf() {
        let fc = fc_of(&builtins::naf());
        let m = moments_algebraic(&fc).unwrap();
        let cert = rank1_certificate(&fc, &m, DEFAULT_CYCLE_BUDGET).unwrap();
        assert!(!cert.verdict);
        let bad = cert.counterexample.unwrap();
        let b = &m.c / &m.v1;
        let a = &m.e2 - &b * &m.e1;
        assert!(!bad.satisfies(&a, &b));
        assert_ne!(m.sigma_det(), frac(0, 1));
    }

    #[test]
    fn zero_one_outputs() {
        assert!(!zero_one_output_check(&fc_of(&builtins::naf())).unwrap());
        assert!(zero_one_output_check(&fc_of(&builtins::simple(Default::default()))).unwrap());
        assert!(zero_one_output_check(&fc_of(&builtins::block10m01())).is_err());
    }
}
