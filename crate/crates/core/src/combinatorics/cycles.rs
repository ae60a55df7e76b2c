//! Simple directed cycles by Johnson's backtracking on the support graph,
//! expanded over parallel transitions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{FinalComponent, StateId, Transducer, Transition};
use crate::rational::{self, Rational};

pub const DEFAULT_CYCLE_BUDGET: usize = 1_000_000;

/// A simple directed cycle with its length, input sum and output sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    /// Transitions in traversal order, starting at the smallest state.
    pub edges: Vec<Transition>,
    pub length: usize,
    pub input_sum: Rational,
    pub output_sum: Rational,
}

impl Cycle {
    pub fn from_edges(edges: Vec<Transition>) -> Self {
        let input_sum = edges.iter().map(|e| &e.input).sum();
        let output_sum = edges.iter().map(|e| &e.output).sum();
        Cycle {
            length: edges.len(),
            edges,
            input_sum,
            output_sum,
        }
    }

    pub fn states(&self) -> Vec<StateId> {
        self.edges.iter().map(|e| e.from).collect()
    }

    pub fn length_rational(&self) -> Rational {
        rational::int(self.length as i64)
    }

    /// `output_sum == slope * length + input_weight * input_sum`.
    pub fn satisfies(&self, slope: &Rational, input_weight: &Rational) -> bool {
        self.output_sum == slope * self.length_rational() + input_weight * &self.input_sum
    }
}

#[derive(Serialize)]
struct CycleRecord {
    states: Vec<StateId>,
    length: usize,
    input_sum: String,
    output_sum: String,
}

impl Serialize for Cycle {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CycleRecord {
            states: self.states(),
            length: self.length,
            input_sum: rational::to_string(&self.input_sum),
            output_sum: rational::to_string(&self.output_sum),
        }
        .serialize(serializer)
    }
}

struct Johnson<'a> {
    successors: Vec<Vec<usize>>,
    /// `parallel[v][w]`: transitions from v to w.
    parallel: Vec<Vec<Vec<&'a Transition>>>,
    blocked: Vec<bool>,
    blocked_by: Vec<Vec<usize>>,
    stack: Vec<usize>,
    start: usize,
    cycles: Vec<Cycle>,
    cap: usize,
    overflow: bool,
}

impl<'a> Johnson<'a> {
    fn unblock(&mut self, u: usize) {
        self.blocked[u] = false;
        for w in std::mem::take(&mut self.blocked_by[u]) {
            if self.blocked[w] {
                self.unblock(w);
            }
        }
    }

    fn emit(&mut self) {
        // Every combination of parallel transitions along the vertex cycle.
        let hops: Vec<&[&Transition]> = (0..self.stack.len())
            .map(|i| {
                let v = self.stack[i];
                let w = self.stack[(i + 1) % self.stack.len()];
                self.parallel[v][w].as_slice()
            })
            .collect();
        let mut choice = vec![0usize; hops.len()];
        loop {
            if self.cycles.len() >= self.cap {
                self.overflow = true;
                return;
            }
            let edges = hops.iter().zip(&choice).map(|(h, &c)| h[c].clone()).collect();
            self.cycles.push(Cycle::from_edges(edges));
            let mut i = hops.len();
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                choice[i] += 1;
                if choice[i] < hops[i].len() {
                    break;
                }
                choice[i] = 0;
            }
        }
    }

    fn circuit(&mut self, v: usize) -> bool {
        let mut found = false;
        self.stack.push(v);
        self.blocked[v] = true;
        for i in 0..self.successors[v].len() {
            if self.overflow {
                break;
            }
            let w = self.successors[v][i];
            if w < self.start {
                continue;
            }
            if w == self.start {
                self.emit();
                found = true;
            } else if !self.blocked[w] && self.circuit(w) {
                found = true;
            }
        }
        if found {
            self.unblock(v);
        } else {
            for i in 0..self.successors[v].len() {
                let w = self.successors[v][i];
                if w >= self.start && !self.blocked_by[w].contains(&v) {
                    self.blocked_by[w].push(v);
                }
            }
        }
        self.stack.pop();
        found
    }
}

/// All simple cycles of the digraph on `states` (any order) formed by
/// `transitions`. Parallel transitions yield distinct cycles. Output order
/// is deterministic: by smallest state, then depth-first by successor.
pub fn simple_cycles(states: &[StateId], transitions: &[Transition], cap: usize) -> Result<Vec<Cycle>> {
    let mut sorted = states.to_vec();
    sorted.sort_unstable();
    let index = |s: StateId| sorted.binary_search(&s).expect("transition endpoint in state set");
    let n = sorted.len();
    let mut parallel = vec![vec![Vec::new(); n]; n];
    for t in transitions {
        parallel[index(t.from)][index(t.to)].push(t);
    }
    let successors = (0..n)
        .map(|v| (0..n).filter(|&w| !parallel[v][w].is_empty()).collect())
        .collect();
    let mut search = Johnson {
        successors,
        parallel,
        blocked: vec![false; n],
        blocked_by: vec![Vec::new(); n],
        stack: Vec::new(),
        start: 0,
        cycles: Vec::new(),
        cap,
        overflow: false,
    };
    for start in 0..n {
        search.start = start;
        for v in start..n {
            search.blocked[v] = false;
            search.blocked_by[v].clear();
        }
        search.circuit(start);
        if search.overflow {
            return Err(Error::CycleBudgetExceeded { cap });
        }
    }
    debug_assert!(search.cycles.iter().all(|c| !c.edges.is_empty()));
    Ok(search.cycles)
}

pub fn cycles_of_component(fc: &FinalComponent, cap: usize) -> Result<Vec<Cycle>> {
    simple_cycles(fc.states(), fc.transitions(), cap)
}

pub fn cycles_of_transducer(t: &Transducer, cap: usize) -> Result<Vec<Cycle>> {
    let states: Vec<StateId> = t.states().collect();
    simple_cycles(&states, t.transitions(), cap)
}
