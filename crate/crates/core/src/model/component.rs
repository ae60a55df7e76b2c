use std::collections::{BTreeMap, VecDeque};

use num_integer::Integer;

use super::{StateId, Transducer, Transition};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// The unique sink strongly connected component of a transducer, with its
/// induced transitions.
#[derive(Clone, Debug, PartialEq)]
pub struct FinalComponent {
    states: Vec<StateId>,
    transitions: Vec<Transition>,
    alphabet: Vec<Rational>,
    /// Local index of each state, `None` outside the component.
    local: Vec<Option<usize>>,
    /// Transition indices leaving each local state, ordered by input.
    outgoing: Vec<Vec<usize>>,
}

impl FinalComponent {
    /// Build from a closed set of states. Every transition leaving a member
    /// must stay inside.
    fn from_states(t: &Transducer, mut states: Vec<StateId>) -> Self {
        states.sort_unstable();
        let mut local = vec![None; t.state_count() + 1];
        for (i, &s) in states.iter().enumerate() {
            local[s] = Some(i);
        }
        let mut transitions = Vec::new();
        let mut outgoing = vec![Vec::new(); states.len()];
        for (i, &s) in states.iter().enumerate() {
            for &index in t.outgoing(s) {
                let tr = &t.transitions()[index];
                debug_assert!(local[tr.to].is_some(), "final component is not closed");
                outgoing[i].push(transitions.len());
                transitions.push(tr.clone());
            }
        }
        FinalComponent {
            states,
            transitions,
            alphabet: t.input_alphabet().to_vec(),
            local,
            outgoing,
        }
    }

    /// Member states in increasing order.
    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn alphabet(&self) -> &[Rational] {
        &self.alphabet
    }

    /// Number of states `N`.
    pub fn n(&self) -> usize {
        self.states.len()
    }

    /// Alphabet size `K`.
    pub fn k(&self) -> usize {
        self.alphabet.len()
    }

    pub fn contains(&self, state: StateId) -> bool {
        self.local.get(state).copied().flatten().is_some()
    }

    /// Position of `state` in [`states`](Self::states).
    pub fn local_index(&self, state: StateId) -> Option<usize> {
        self.local.get(state).copied().flatten()
    }

    /// Indices into [`transitions`](Self::transitions) leaving the state at
    /// local position `local`.
    pub fn outgoing(&self, local: usize) -> &[usize] {
        &self.outgoing[local]
    }

    /// Fails with [`Error::Periodic`] unless the component is aperiodic.
    pub fn require_aperiodic(&self) -> Result<()> {
        match period(self) {
            1 => Ok(()),
            p => Err(Error::Periodic { period: p }),
        }
    }

    /// The component as a standalone strongly connected transducer. States are
    /// renumbered in increasing order (so the smallest member becomes the
    /// initial state); final outputs are zero.
    pub fn to_transducer(&self) -> Transducer {
        let renumber = |s: StateId| self.local_index(s).expect("closed component") + 1;
        let transitions = self
            .transitions
            .iter()
            .map(|t| Transition::new(renumber(t.from), renumber(t.to), t.input.clone(), t.output.clone()))
            .collect();
        Transducer::new(self.n(), transitions, BTreeMap::new(), Some(self.alphabet.clone()))
            .expect("final component of a complete transducer is complete")
    }
}

/// Strongly connected components, each as a list of 0-based vertices, in
/// reverse topological order of the condensation (sinks first).
fn tarjan(successors: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = successors.len();
    let mut index = vec![usize::MAX; n];
    let mut lowlink = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut counter = 0;

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        // (vertex, next successor position)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        lowlink[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = successors[v].get(*pos) {
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    lowlink[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                lowlink[parent] = lowlink[parent].min(lowlink[v]);
            }
            if lowlink[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                components.push(component);
            }
        }
    }
    components
}

/// The final component: the unique sink of the condensation.
pub fn final_component(t: &Transducer) -> Result<FinalComponent> {
    let successors: Vec<Vec<usize>> = t
        .states()
        .map(|s| t.outgoing(s).iter().map(|&i| t.transitions()[i].to - 1).collect())
        .collect();
    let components = tarjan(&successors);
    let mut component_of = vec![0; t.state_count()];
    for (c, members) in components.iter().enumerate() {
        for &v in members {
            component_of[v] = c;
        }
    }
    let sinks: Vec<usize> = (0..components.len())
        .filter(|&c| {
            components[c]
                .iter()
                .all(|&v| successors[v].iter().all(|&w| component_of[w] == c))
        })
        .collect();
    if sinks.len() != 1 {
        return Err(Error::NotFinallyConnected { sinks: sinks.len() });
    }
    let states = components[sinks[0]].iter().map(|&v| v + 1).collect();
    Ok(FinalComponent::from_states(t, states))
}

/// Gcd of all closed-walk lengths of a strongly connected component, via
/// breadth-first depths: gcd over edges `u -> v` of `depth(u) + 1 - depth(v)`.
pub fn period(fc: &FinalComponent) -> u64 {
    let mut depth = vec![None; fc.n()];
    depth[0] = Some(0i64);
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &e in fc.outgoing(u) {
            let v = fc.local_index(fc.transitions()[e].to).expect("closed");
            if depth[v].is_none() {
                depth[v] = Some(depth[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    fc.transitions().iter().fold(0i64, |g, t| {
        let du = depth[fc.local_index(t.from).unwrap()].expect("strongly connected");
        let dv = depth[fc.local_index(t.to).unwrap()].expect("strongly connected");
        g.gcd(&(du + 1 - dv))
    }) as u64
}
