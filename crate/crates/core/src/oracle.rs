//! Exact finite-length moments of `(Input, Output)` under uniformly random
//! input words, by a per-state moment dynamic program and by brute force.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{final_component, Transducer};
use crate::moments::{moments_algebraic, Moments};
use crate::rational::{self, Rational};

pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1_000_000;

/// Aggregates over all input words of a fixed length ending in one state.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StateAccumulator {
    pub count: Rational,
    pub sum_in: Rational,
    pub sum_out: Rational,
    pub sum_in2: Rational,
    pub sum_io: Rational,
    pub sum_out2: Rational,
}

impl StateAccumulator {
    fn word(count: Rational) -> Self {
        StateAccumulator {
            count,
            ..Default::default()
        }
    }

    /// Append a letter with input `e` and output `d` to every word.
    fn extend(&self, e: &Rational, d: &Rational) -> Self {
        let two = rational::int(2);
        StateAccumulator {
            count: self.count.clone(),
            sum_in: &self.sum_in + e * &self.count,
            sum_out: &self.sum_out + d * &self.count,
            sum_in2: &self.sum_in2 + &two * e * &self.sum_in + e * e * &self.count,
            sum_io: &self.sum_io + e * &self.sum_out + d * &self.sum_in + e * d * &self.count,
            sum_out2: &self.sum_out2 + &two * d * &self.sum_out + d * d * &self.count,
        }
    }

    /// Add a constant to every output sum, leaving the inputs alone.
    fn shift_output(&self, d: &Rational) -> Self {
        self.extend(&Rational::zero(), d)
    }

    fn add(mut self, other: &StateAccumulator) -> Self {
        self.count += &other.count;
        self.sum_in += &other.sum_in;
        self.sum_out += &other.sum_out;
        self.sum_in2 += &other.sum_in2;
        self.sum_io += &other.sum_io;
        self.sum_out2 += &other.sum_out2;
        self
    }

    fn merge(self, other: StateAccumulator) -> Self {
        self.add(&other)
    }

    fn moments(&self, n: usize) -> ExactMoments {
        let total = &self.count;
        let e_in = &self.sum_in / total;
        let e_out = &self.sum_out / total;
        ExactMoments {
            n,
            v_in: &self.sum_in2 / total - &e_in * &e_in,
            v_out: &self.sum_out2 / total - &e_out * &e_out,
            cov: &self.sum_io / total - &e_in * &e_out,
            e_in,
            e_out,
        }
    }
}

/// Expectations, variances and covariance of the input sum and the output
/// sum (final output included) over the `K^n` words of length `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMoments {
    pub n: usize,
    pub e_in: Rational,
    pub e_out: Rational,
    pub v_in: Rational,
    pub v_out: Rational,
    pub cov: Rational,
}

/// Per-state accumulators after `0..=n_max` letters, pulled along incoming
/// transitions so each step is a deterministic map over target states.
fn accumulator_series(t: &Transducer, n_max: usize, exec: Execution) -> Vec<Vec<StateAccumulator>> {
    let states: Vec<usize> = t.states().collect();
    let mut incoming = vec![Vec::new(); t.state_count() + 1];
    for tr in t.transitions() {
        incoming[tr.to].push(tr);
    }
    let mut current = vec![StateAccumulator::default(); t.state_count() + 1];
    current[t.initial()] = StateAccumulator::word(rational::int(1));
    let mut series = Vec::with_capacity(n_max + 1);
    series.push(current.clone());
    for _ in 0..n_max {
        let mut next = vec![StateAccumulator::default()];
        next.extend(exec.map_slice(&states, |&s| {
            incoming[s]
                .iter()
                .filter(|tr| !current[tr.from].count.is_zero())
                .fold(StateAccumulator::default(), |acc, tr| {
                    acc.merge(current[tr.from].extend(&tr.input, &tr.output))
                })
        }));
        series.push(next.clone());
        current = next;
    }
    series
}

fn close(t: &Transducer, accumulators: &[StateAccumulator], n: usize) -> ExactMoments {
    t.states()
        .map(|s| accumulators[s].shift_output(t.final_output(s)))
        .fold(StateAccumulator::default(), StateAccumulator::merge)
        .moments(n)
}

/// Exact moments for every length `0..=n_max`.
pub fn exact_moments_series(t: &Transducer, n_max: usize, exec: Execution) -> Vec<ExactMoments> {
    accumulator_series(t, n_max, exec)
        .iter()
        .enumerate()
        .map(|(n, acc)| close(t, acc, n))
        .collect()
}

pub fn exact_moments_dp(t: &Transducer, n: usize, exec: Execution) -> ExactMoments {
    let series = accumulator_series(t, n, exec);
    close(t, &series[n], n)
}

/// Brute force over all `K^n` words through [`Transducer::run`].
pub fn exact_moments_enumeration(t: &Transducer, n: usize, budget: u64, exec: Execution) -> Result<ExactMoments> {
    let k = t.alphabet_size() as u64;
    let count = BigInt::from(k).pow(n as u32);
    let words = match count.to_u64() {
        Some(c) if c <= budget => c,
        _ => {
            return Err(Error::BudgetExceeded {
                required: count.to_string(),
                cap: budget,
            })
        }
    };
    let alphabet = t.input_alphabet();
    let totals = exec.map_reduce(
        words,
        StateAccumulator::default,
        |mut index| {
            let word: Vec<Rational> = (0..n)
                .map(|_| {
                    let letter = alphabet[(index % k) as usize].clone();
                    index /= k;
                    letter
                })
                .collect();
            let run = t.run(&word).expect("letters come from the alphabet");
            let (i, o) = (run.input_sum, run.output_sum);
            Some(StateAccumulator {
                count: rational::int(1),
                sum_in2: &i * &i,
                sum_io: &i * &o,
                sum_out2: &o * &o,
                sum_in: i,
                sum_out: o,
            })
        },
        StateAccumulator::merge,
    );
    Ok(totals.moments(n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeRow {
    pub n: usize,
    pub e_out: Rational,
    pub v_out: Rational,
    pub cov: Rational,
    /// `E_out(n + 1) - E_out(n)`, and likewise below.
    pub delta_e_out: Rational,
    pub delta_v_out: Rational,
    pub delta_cov: Rational,
}

/// First differences of the exact output moments next to the asymptotic
/// constants they approach.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeReport {
    pub moments: Moments,
    pub rows: Vec<SlopeRow>,
}

/// Rows for `n` in `n_from..=n_to`.
pub fn slope_report(t: &Transducer, n_from: usize, n_to: usize, exec: Execution) -> Result<SlopeReport> {
    let fc = final_component(t)?;
    fc.require_aperiodic()?;
    let moments = moments_algebraic(&fc)?;
    let series = exact_moments_series(t, n_to + 1, exec);
    let rows = (n_from..=n_to)
        .map(|n| {
            let (a, b) = (&series[n], &series[n + 1]);
            SlopeRow {
                n,
                e_out: a.e_out.clone(),
                v_out: a.v_out.clone(),
                cov: a.cov.clone(),
                delta_e_out: &b.e_out - &a.e_out,
                delta_v_out: &b.v_out - &a.v_out,
                delta_cov: &b.cov - &a.cov,
            }
        })
        .collect();
    Ok(SlopeReport { moments, rows })
}

/// `|E_out(n) - e2 n|`, `|V_out(n) - v2 n|` and `|Cov(n) - c n|` for
/// `n = 1..=n_max`.
pub fn residuals(series: &[ExactMoments], m: &Moments) -> [Vec<Rational>; 3] {
    let pick = |f: &dyn Fn(&ExactMoments) -> Rational| series.iter().skip(1).map(f).collect::<Vec<_>>();
    let n = |x: &ExactMoments| rational::int(x.n as i64);
    [
        pick(&|x| (&x.e_out - &m.e2 * n(x)).abs()),
        pick(&|x| (&x.v_out - &m.v2 * n(x)).abs()),
        pick(&|x| (&x.cov - &m.c * n(x)).abs()),
    ]
}

/// Whether the maximum of `values` (indexed from `n = 1`) is already
/// attained among the first `by` entries.
pub fn running_max_attained_by(values: &[Rational], by: usize) -> bool {
    let Some(overall) = values.iter().max() else {
        return true;
    };
    values.iter().take(by).any(|v| v == overall)
}

/// Extremes of `Output - k n` over all words of length `n`, final output
/// included.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OutputBand {
    pub n: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub min: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub max: Rational,
}

fn serialize_rational<S: serde::Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&rational::to_string(value))
}

/// [`OutputBand`] for every length `0..=n_max`, by a min/max dynamic program
/// over the states.
pub fn quasi_det_bound_series(t: &Transducer, k: &Rational, n_max: usize) -> Vec<OutputBand> {
    // (min, max) of output minus k * length over words ending in each state.
    let mut current: Vec<Option<(Rational, Rational)>> = vec![None; t.state_count() + 1];
    current[t.initial()] = Some((Rational::zero(), Rational::zero()));
    let mut bands = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut band: Option<(Rational, Rational)> = None;
        for s in t.states() {
            if let Some((lo, hi)) = &current[s] {
                let phi = t.final_output(s);
                let (lo, hi) = (lo + phi, hi + phi);
                band = Some(match band {
                    None => (lo, hi),
                    Some((a, b)) => (a.min(lo), b.max(hi)),
                });
            }
        }
        let (min, max) = band.expect("some state is reachable");
        bands.push(OutputBand { n, min, max });
        if n == n_max {
            break;
        }
        let mut next: Vec<Option<(Rational, Rational)>> = vec![None; t.state_count() + 1];
        for tr in t.transitions() {
            if let Some((lo, hi)) = &current[tr.from] {
                let step = &tr.output - k;
                let (lo, hi) = (lo + &step, hi + &step);
                next[tr.to] = Some(match next[tr.to].take() {
                    None => (lo, hi),
                    Some((a, b)) => (a.min(lo), b.max(hi)),
                });
            }
        }
        current = next;
    }
    bands
}

pub fn quasi_det_bound(t: &Transducer, k: &Rational, n: usize) -> (Rational, Rational) {
    let band = quasi_det_bound_series(t, k, n).pop().unwrap();
    (band.min, band.max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::rational::{frac, int};

    #[test]
    fn binary_input_moments() {
        for (_, t) in builtins::all_default() {
            for m in exact_moments_series(&t, 12, Execution::Sequential) {
                let n = int(m.n as i64);
                assert_eq!(m.e_in, &n * frac(1, 2));
                assert_eq!(m.v_in, &n * frac(1, 4));
            }
        }
    }

    #[test]
    fn dp_matches_enumeration() {
        for (name, t) in builtins::all_default() {
            for n in 0..=10 {
                let dp = exact_moments_dp(&t, n, Execution::Parallel);
                let brute = exact_moments_enumeration(&t, n, DEFAULT_ENUMERATION_BUDGET, Execution::Parallel).unwrap();
                assert_eq!(dp, brute, "{name} n={n}");
            }
        }
    }

    #[test]
    fn naf_length_four() {
        // Hand enumeration of the 16 words of length 4.
        let t = builtins::naf();
        let mut outputs = Vec::new();
        for w in 0..16u32 {
            let word: Vec<_> = (0..4).map(|i| int(((w >> i) & 1) as i64)).collect();
            outputs.push(t.run(&word).unwrap().output_sum);
        }
        let mean: Rational = outputs.iter().sum::<Rational>() / int(16);
        let m = exact_moments_dp(&t, 4, Execution::Sequential);
        assert_eq!(m.e_out, mean);
    }

    #[test]
    fn empty_word() {
        let m = exact_moments_enumeration(&builtins::gray(), 0, 10, Execution::Sequential).unwrap();
        assert_eq!((m.e_out, m.v_out, m.cov), (int(0), int(0), int(0)));
        let shifted = builtins::naf().map_outputs(|o| o + int(2));
        let m = exact_moments_dp(&shifted, 0, Execution::Sequential);
        assert_eq!(m.e_out, int(2));
    }

    #[test]
    fn zero_outputs() {
        let t = builtins::simple(Default::default());
        for m in exact_moments_series(&t, 10, Execution::Sequential) {
            assert_eq!((m.e_out, m.v_out, m.cov), (int(0), int(0), int(0)));
        }
    }

    #[test]
    fn enumeration_budget() {
        let err = exact_moments_enumeration(&builtins::naf(), 21, DEFAULT_ENUMERATION_BUDGET, Execution::Sequential);
        assert!(matches!(err, Err(Error::BudgetExceeded { cap: 1_000_000, .. })));
    }

    #[test]
    fn slopes_approach_constants() {
        let report = slope_report(&builtins::block01(), 10, 30, Execution::Sequential).unwrap();
        assert_eq!(report.moments.v2, frac(1, 16));
        let last = report.rows.last().unwrap();
        assert!((&last.delta_v_out - frac(1, 16)).abs() < frac(1, 1000));
        let report = slope_report(
            &builtins::simple([int(1), int(0), int(0), int(0)]),
            10,
            30,
            Execution::Sequential,
        )
        .unwrap();
        let last = report.rows.last().unwrap();
        assert!((&last.delta_cov + frac(1, 4)).abs() < frac(1, 1000));
    }

    #[test]
    fn bounds() {
        let t = builtins::block10m01();
        let bands = quasi_det_bound_series(&t, &int(0), 50);
        let widest = bands
            .iter()
            .map(|b| (b.min.clone(), b.max.clone()))
            .max_by_key(|(lo, hi)| hi - lo)
            .unwrap();
        assert!(widest.1 - widest.0 <= int(2));

        let naf = quasi_det_bound(&builtins::naf(), &int(0), 40);
        assert!(naf.1 >= int(19));

        let constant = builtins::simple([int(3), int(3), int(3), int(3)]);
        for b in quasi_det_bound_series(&constant, &int(3), 20) {
            assert_eq!((b.min, b.max), (int(0), int(0)));
        }
    }

    #[test]
    fn running_max() {
        let v = [int(1), int(3), int(2), int(3)];
        assert!(running_max_attained_by(&v, 2));
        assert!(!running_max_attained_by(&v, 1));
    }
}
