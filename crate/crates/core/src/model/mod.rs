//! Transducer data model: validation, execution and the final component.

mod component;
mod spec_file;

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use component::{final_component, period, FinalComponent};
pub use spec_file::{LabelSpec, TransducerSpec, TransitionSpec};

/// 1-based state identifier; state 1 is the initial state.
pub type StateId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: StateId,
    pub to: StateId,
    pub input: Rational,
    pub output: Rational,
}

impl Transition {
    pub fn new(from: StateId, to: StateId, input: Rational, output: Rational) -> Self {
        Transition {
            from,
            to,
            input,
            output,
        }
    }
}

/// A complete, deterministic, subsequential transducer.
///
/// Immutable once built; every constructor path goes through validation.
#[derive(Clone, Debug, PartialEq)]
pub struct Transducer {
    state_count: usize,
    transitions: Vec<Transition>,
    final_outputs: Vec<Rational>,
    alphabet: Vec<Rational>,
    /// `table[s - 1][a]` is the index of the transition leaving `s` on `alphabet[a]`.
    table: Vec<Vec<usize>>,
}

/// Result of feeding a word to a transducer.
#[derive(Clone, Debug, PartialEq)]
pub struct Run {
    pub input_sum: Rational,
    /// Sum of the transition outputs plus the final output of the last state.
    pub output_sum: Rational,
    pub path: Vec<StateId>,
}

impl Transducer {
    /// Validate and build a transducer.
    ///
    /// The input alphabet is `declared_alphabet` when given, otherwise the set
    /// of transition inputs. Missing final outputs default to zero.
    pub fn new(
        state_count: usize,
        transitions: Vec<Transition>,
        final_outputs: BTreeMap<StateId, Rational>,
        declared_alphabet: Option<Vec<Rational>>,
    ) -> Result<Self> {
        if state_count == 0 {
            return Err(Error::Parse("a transducer needs at least one state".into()));
        }
        for (index, t) in transitions.iter().enumerate() {
            for state in [t.from, t.to] {
                if state == 0 || state > state_count {
                    return Err(Error::UnknownState {
                        location: format!("transitions[{index}]"),
                        state,
                    });
                }
            }
        }

        let declared = declared_alphabet.is_some();
        let mut alphabet = declared_alphabet.unwrap_or_else(|| transitions.iter().map(|t| t.input.clone()).collect());
        alphabet.sort();
        alphabet.dedup();

        let mut slots: Vec<Vec<Option<usize>>> = vec![vec![None; alphabet.len()]; state_count];
        for (index, t) in transitions.iter().enumerate() {
            let Ok(a) = alphabet.binary_search(&t.input) else {
                debug_assert!(declared);
                return Err(Error::SymbolNotInAlphabet {
                    location: format!("transitions[{index}]"),
                    symbol: t.input.clone(),
                });
            };
            let slot = &mut slots[t.from - 1][a];
            if slot.is_some() {
                return Err(Error::DuplicateTransition {
                    index,
                    state: t.from,
                    input: t.input.clone(),
                });
            }
            *slot = Some(index);
        }

        let mut table = Vec::with_capacity(state_count);
        for (s, row) in slots.into_iter().enumerate() {
            let mut filled = Vec::with_capacity(row.len());
            for (a, slot) in row.into_iter().enumerate() {
                match slot {
                    Some(index) => filled.push(index),
                    None => {
                        return Err(Error::Incomplete {
                            state: s + 1,
                            input: alphabet[a].clone(),
                        })
                    }
                }
            }
            table.push(filled);
        }

        let mut outputs = vec![Rational::zero(); state_count];
        for (state, value) in final_outputs {
            if state == 0 || state > state_count {
                return Err(Error::UnknownState {
                    location: "final_outputs".into(),
                    state,
                });
            }
            outputs[state - 1] = value;
        }

        Ok(Transducer {
            state_count,
            transitions,
            final_outputs: outputs,
            alphabet,
            table,
        })
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn initial(&self) -> StateId {
        1
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        1..=self.state_count
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Sorted input alphabet.
    pub fn input_alphabet(&self) -> &[Rational] {
        &self.alphabet
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn final_output(&self, state: StateId) -> &Rational {
        &self.final_outputs[state - 1]
    }

    pub fn final_outputs(&self) -> &[Rational] {
        &self.final_outputs
    }

    /// Moment analysis needs at least two input symbols.
    pub fn require_moment_alphabet(&self) -> Result<()> {
        if self.alphabet.len() < 2 {
            Err(Error::AlphabetTooSmall {
                size: self.alphabet.len(),
            })
        } else {
            Ok(())
        }
    }

    /// Indices of the transitions leaving `state`, ordered by input symbol.
    pub fn outgoing(&self, state: StateId) -> &[usize] {
        &self.table[state - 1]
    }

    pub fn step(&self, state: StateId, symbol: &Rational) -> Option<&Transition> {
        let a = self.alphabet.binary_search(symbol).ok()?;
        Some(&self.transitions[self.table[state - 1][a]])
    }

    /// Feed `input` from the initial state, in the order given.
    pub fn run(&self, input: &[Rational]) -> Result<Run> {
        let mut state = self.initial();
        let mut path = Vec::with_capacity(input.len() + 1);
        path.push(state);
        let mut input_sum = Rational::zero();
        let mut output_sum = Rational::zero();
        for (position, symbol) in input.iter().enumerate() {
            let t = self.step(state, symbol).ok_or_else(|| Error::SymbolNotInAlphabet {
                location: format!("input[{position}]"),
                symbol: symbol.clone(),
            })?;
            input_sum += &t.input;
            output_sum += &t.output;
            state = t.to;
            path.push(state);
        }
        output_sum += self.final_output(state);
        Ok(Run {
            input_sum,
            output_sum,
            path,
        })
    }

    /// Same graph and inputs, every output label (final outputs included)
    /// replaced by `f(label)`.
    pub fn map_outputs(&self, f: impl Fn(&Rational) -> Rational) -> Transducer {
        let mut mapped = self.clone();
        for t in &mut mapped.transitions {
            t.output = f(&t.output);
        }
        for a in &mut mapped.final_outputs {
            *a = f(a);
        }
        mapped
    }

    /// Exchange input and output labels on every transition. Final outputs
    /// are reset to zero. Fails unless the result is again deterministic and
    /// complete.
    pub fn swap_labels(&self) -> Result<Transducer> {
        let swapped = self
            .transitions
            .iter()
            .map(|t| Transition::new(t.from, t.to, t.output.clone(), t.input.clone()))
            .collect();
        Transducer::new(self.state_count, swapped, BTreeMap::new(), None)
    }

    /// Whether the underlying undirected graph is connected.
    pub fn is_weakly_connected(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.state_count).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = self.state_count;
        for t in &self.transitions {
            let (a, b) = (find(&mut parent, t.from - 1), find(&mut parent, t.to - 1));
            if a != b {
                parent[a] = b;
                components -= 1;
            }
        }
        components == 1
    }
}
