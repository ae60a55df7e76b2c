//! Spanning functional digraphs of the final component.
//!
//! A functional digraph picks one outgoing transition per state. Each weak
//! component of it contains exactly one cycle, so the sets `D1` and `D2` of
//! digraphs with one and two weak components are recognized by counting
//! cycles. Quantities on cycles are linear combinations of the three basic
//! cycle parameters: length, input sum and output sum.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::cycles::Cycle;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::jet::{Jet2, Var};
use crate::model::FinalComponent;
use crate::moments::{characteristic_jet, Moments};
use crate::rational::{self, Rational};

pub const DEFAULT_DIGRAPH_BUDGET: u64 = 10_000_000;

/// A spanning functional digraph together with its cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalDigraph {
    /// For each state of the component (in increasing order), the index of
    /// the chosen transition in `fc.transitions()`.
    pub choice: Vec<usize>,
    pub cycles: Vec<Cycle>,
}

impl FunctionalDigraph {
    pub fn component_count(&self) -> usize {
        self.cycles.len()
    }
}

/// `alpha * length + beta * input_sum + gamma * output_sum`, a linear
/// function on cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selector {
    pub coefficients: [Rational; 3],
}

impl Selector {
    pub fn new(length: Rational, input: Rational, output: Rational) -> Self {
        Selector {
            coefficients: [length, input, output],
        }
    }

    pub fn length() -> Self {
        Selector::new(rational::int(1), rational::int(0), rational::int(0))
    }

    pub fn input() -> Self {
        Selector::new(rational::int(0), rational::int(1), rational::int(0))
    }

    pub fn output() -> Self {
        Selector::new(rational::int(0), rational::int(0), rational::int(1))
    }

    /// `selector - mean * length`.
    pub fn centered(&self, mean: &Rational) -> Self {
        let mut s = self.clone();
        s.coefficients[0] -= mean;
        s
    }

    pub fn apply(&self, cycle: &Cycle) -> Rational {
        let [a, b, c] = &self.coefficients;
        a * cycle.length_rational() + b * &cycle.input_sum + c * &cycle.output_sum
    }

    fn dot(&self, v: &[Rational; 3]) -> Rational {
        self.coefficients.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    fn bilinear(&self, q: &[[Rational; 3]; 3], other: &Selector) -> Rational {
        let mut acc = Rational::zero();
        for (i, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            acc += a * other.dot(&q[i]);
        }
        acc
    }
}

/// `g(D1)`, `gh(D1)` and `gh(D2)` for two selectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigraphSums {
    pub g_d1: Rational,
    pub gh_d1: Rational,
    pub gh_d2: Rational,
}

/// Direct evaluation over explicit digraph lists. In `D2` the product runs
/// over ordered pairs of distinct cycles.
pub fn digraph_sums(d1: &[FunctionalDigraph], d2: &[FunctionalDigraph], g: &Selector, h: &Selector) -> DigraphSums {
    let mut sums = DigraphSums {
        g_d1: Rational::zero(),
        gh_d1: Rational::zero(),
        gh_d2: Rational::zero(),
    };
    for d in d1 {
        let c = &d.cycles[0];
        let gc = g.apply(c);
        sums.gh_d1 += &gc * h.apply(c);
        sums.g_d1 += gc;
    }
    for d in d2 {
        let (a, b) = (&d.cycles[0], &d.cycles[1]);
        sums.gh_d2 += g.apply(a) * h.apply(b) + g.apply(b) * h.apply(a);
    }
    sums
}

/// Streaming totals over all functional digraphs, enough to evaluate
/// [`digraph_sums`] for any pair of selectors. Basis order: length, input,
/// output.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DigraphTotals {
    pub d1_count: u64,
    pub d2_count: u64,
    /// Digraphs with three or more weak components.
    pub other_count: u64,
    pub linear_d1: [Rational; 3],
    pub quadratic_d1: [[Rational; 3]; 3],
    pub quadratic_d2: [[Rational; 3]; 3],
}

type CycleVector = [Rational; 3];

impl DigraphTotals {
    fn merge(mut self, other: DigraphTotals) -> DigraphTotals {
        self.d1_count += other.d1_count;
        self.d2_count += other.d2_count;
        self.other_count += other.other_count;
        for i in 0..3 {
            self.linear_d1[i] += &other.linear_d1[i];
            for j in 0..3 {
                self.quadratic_d1[i][j] += &other.quadratic_d1[i][j];
                self.quadratic_d2[i][j] += &other.quadratic_d2[i][j];
            }
        }
        self
    }

    fn single(cycles: &[CycleVector]) -> DigraphTotals {
        let mut t = DigraphTotals::default();
        match cycles {
            [c] => {
                t.d1_count = 1;
                for i in 0..3 {
                    t.linear_d1[i] = c[i].clone();
                    for j in 0..3 {
                        t.quadratic_d1[i][j] = &c[i] * &c[j];
                    }
                }
            }
            [a, b] => {
                t.d2_count = 1;
                for i in 0..3 {
                    for j in 0..3 {
                        t.quadratic_d2[i][j] = &a[i] * &b[j] + &b[i] * &a[j];
                    }
                }
            }
            _ => t.other_count = 1,
        }
        t
    }

    pub fn total_count(&self) -> u64 {
        self.d1_count + self.d2_count + self.other_count
    }

    pub fn g_d1(&self, g: &Selector) -> Rational {
        g.dot(&self.linear_d1)
    }

    pub fn gh_d1(&self, g: &Selector, h: &Selector) -> Rational {
        g.bilinear(&self.quadratic_d1, h)
    }

    pub fn gh_d2(&self, g: &Selector, h: &Selector) -> Rational {
        g.bilinear(&self.quadratic_d2, h)
    }

    pub fn sums(&self, g: &Selector, h: &Selector) -> DigraphSums {
        DigraphSums {
            g_d1: self.g_d1(g),
            gh_d1: self.gh_d1(g, h),
            gh_d2: self.gh_d2(g, h),
        }
    }
}

/// Number of functional digraphs, the product of the out-degrees.
pub fn choice_count(fc: &FinalComponent) -> BigInt {
    (0..fc.n()).map(|s| BigInt::from(fc.outgoing(s).len())).product()
}

fn require_budget(fc: &FinalComponent, budget: u64) -> Result<u64> {
    let count = choice_count(fc);
    match count.to_u64() {
        Some(c) if c <= budget => Ok(c),
        _ => Err(Error::BudgetExceeded {
            required: count.to_string(),
            cap: budget,
        }),
    }
}

/// Mixed-radix decoding of `index` into one transition per state.
fn decode(fc: &FinalComponent, mut index: u64) -> Vec<usize> {
    (0..fc.n())
        .map(|s| {
            let out = fc.outgoing(s);
            let digit = (index % out.len() as u64) as usize;
            index /= out.len() as u64;
            out[digit]
        })
        .collect()
}

/// Cycles of the functional digraph `choice`, each as the list of its
/// transition indices starting from the smallest state. Stops after
/// `limit` cycles.
fn cycles_of_choice(fc: &FinalComponent, choice: &[usize], limit: usize) -> Vec<Vec<usize>> {
    let n = choice.len();
    let next = |s: usize| fc.local_index(fc.transitions()[choice[s]].to).unwrap();
    // 0 = unseen; otherwise walk id + 1.
    let mut mark = vec![0usize; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if mark[start] != 0 {
            continue;
        }
        let walk = start + 1;
        let mut s = start;
        while mark[s] == 0 {
            mark[s] = walk;
            s = next(s);
        }
        if mark[s] == walk {
            // `s` lies on a new cycle; walk it once, then rotate to its minimum.
            let mut members = vec![s];
            let mut u = next(s);
            while u != s {
                members.push(u);
                u = next(u);
            }
            let lowest = members.iter().enumerate().min_by_key(|(_, &v)| v).unwrap().0;
            members.rotate_left(lowest);
            cycles.push(members.into_iter().map(|v| choice[v]).collect());
            if cycles.len() >= limit {
                break;
            }
        }
    }
    cycles
}

fn cycle_vector(fc: &FinalComponent, edges: &[usize]) -> CycleVector {
    let mut v: CycleVector = Default::default();
    v[0] = rational::int(edges.len() as i64);
    for &e in edges {
        let t = &fc.transitions()[e];
        v[1] += &t.input;
        v[2] += &t.output;
    }
    v
}

/// All functional digraphs with one (`D1`) and two (`D2`) weak components.
/// Fails with [`Error::BudgetExceeded`] when there are more than `budget`
/// functional digraphs in total.
pub fn spanning_functional_digraphs(
    fc: &FinalComponent,
    budget: u64,
    exec: Execution,
) -> Result<(Vec<FunctionalDigraph>, Vec<FunctionalDigraph>)> {
    let count = require_budget(fc, budget)?;
    let found = exec.map_reduce(
        count,
        Vec::new,
        |index| {
            let choice = decode(fc, index);
            let cycles = cycles_of_choice(fc, &choice, 3);
            (cycles.len() <= 2).then(|| {
                let cycles = cycles
                    .iter()
                    .map(|c| Cycle::from_edges(c.iter().map(|&e| fc.transitions()[e].clone()).collect()))
                    .collect();
                vec![(index, FunctionalDigraph { choice, cycles })]
            })
        },
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    );
    let mut found = found;
    found.sort_by_key(|(index, _)| *index);
    let (d1, d2): (Vec<_>, Vec<_>) = found
        .into_iter()
        .map(|(_, d)| d)
        .partition(|d| d.component_count() == 1);
    Ok((d1, d2))
}

/// [`DigraphTotals`] by a data-parallel fold over all functional digraphs.
pub fn digraph_totals(fc: &FinalComponent, budget: u64, exec: Execution) -> Result<DigraphTotals> {
    let count = require_budget(fc, budget)?;
    Ok(exec.map_reduce(
        count,
        DigraphTotals::default,
        |index| {
            let choice = decode(fc, index);
            let vectors: Vec<CycleVector> = cycles_of_choice(fc, &choice, 3)
                .iter()
                .map(|c| cycle_vector(fc, c))
                .collect();
            Some(DigraphTotals::single(&vectors))
        },
        DigraphTotals::merge,
    ))
}

/// The five constants from the digraph totals:
/// `e = g(D1) / 1(D1)` and `(gh(D1) - gh(D2)) / 1(D1)` for variances and
/// covariance with centered selectors.
pub fn moments_from_totals(totals: &DigraphTotals) -> Result<Moments> {
    let length = totals.g_d1(&Selector::length());
    if length.is_zero() {
        return Err(Error::DegenerateCharacteristic);
    }
    let e1 = totals.g_d1(&Selector::input()) / &length;
    let e2 = totals.g_d1(&Selector::output()) / &length;
    let g = Selector::input().centered(&e1);
    let h = Selector::output().centered(&e2);
    let second = |a: &Selector, b: &Selector| (totals.gh_d1(a, b) - totals.gh_d2(a, b)) / &length;
    Ok(Moments {
        v1: second(&g, &g),
        v2: second(&h, &h),
        c: second(&g, &h),
        e1,
        e2,
    })
}

pub fn moments_combinatorial(fc: &FinalComponent, budget: u64, exec: Execution) -> Result<Moments> {
    moments_from_totals(&digraph_totals(fc, budget, exec)?)
}

/// One relation between a partial derivative of the characteristic
/// determinant and digraph sums.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    #[serde(serialize_with = "serialize_rational")]
    pub lhs: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub rhs: Rational,
    pub holds: bool,
}

fn serialize_rational<S: serde::Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&rational::to_string(value))
}

/// The nine first- and second-order relations
/// `f_a = -K^-N a(D1)`, `f_ab = K^-N (ab(D2) - ab(D1))` for `a != b` and
/// `f_aa + f_a = K^-N (aa(D2) - aa(D1))`, where the selector of `x` is the
/// input sum, of `y` the output sum and of `z` the length.
pub fn derivative_identities(fc: &FinalComponent, budget: u64, exec: Execution) -> Result<Vec<IdentityCheck>> {
    let jet = characteristic_jet(fc)?;
    let totals = digraph_totals(fc, budget, exec)?;
    Ok(identity_checks(fc, &jet, &totals))
}

/// The relations of [`derivative_identities`] for a precomputed jet and
/// precomputed totals.
pub fn identity_checks(fc: &FinalComponent, jet: &Jet2, totals: &DigraphTotals) -> Vec<IdentityCheck> {
    let scale = rational::pow(&rational::frac(1, fc.k() as i64), fc.n());
    let selector = |v: Var| match v {
        Var::X => Selector::input(),
        Var::Y => Selector::output(),
        Var::Z => Selector::length(),
    };
    let mut checks = Vec::with_capacity(9);
    let mut push = |name: &'static str, lhs: Rational, rhs: Rational| {
        checks.push(IdentityCheck {
            holds: lhs == rhs,
            name,
            lhs,
            rhs,
        });
    };
    const FIRST: [(&str, Var); 3] = [("f_x", Var::X), ("f_y", Var::Y), ("f_z", Var::Z)];
    for (name, v) in FIRST {
        push(name, jet.d(v), -(&scale * totals.g_d1(&selector(v))));
    }
    const PURE: [(&str, Var); 3] = [("f_xx + f_x", Var::X), ("f_yy + f_y", Var::Y), ("f_zz + f_z", Var::Z)];
    for (name, v) in PURE {
        let s = selector(v);
        push(
            name,
            jet.d2(v, v) + jet.d(v),
            &scale * (totals.gh_d2(&s, &s) - totals.gh_d1(&s, &s)),
        );
    }
    const MIXED: [(&str, Var, Var); 3] = [
        ("f_xy", Var::X, Var::Y),
        ("f_xz", Var::X, Var::Z),
        ("f_yz", Var::Y, Var::Z),
    ];
    for (name, a, b) in MIXED {
        let (sa, sb) = (selector(a), selector(b));
        push(
            name,
            jet.d2(a, b),
            &scale * (totals.gh_d2(&sa, &sb) - totals.gh_d1(&sa, &sb)),
        );
    }
    checks
}

/// Fails with [`Error::IdentityViolated`] on the first relation that does
/// not hold.
pub fn require_identities(checks: &[IdentityCheck]) -> Result<()> {
    match checks.iter().find(|c| !c.holds) {
        Some(bad) => Err(Error::IdentityViolated {
            name: bad.name,
            lhs: rational::to_string(&bad.lhs),
            rhs: rational::to_string(&bad.rhs),
        }),
        None => Ok(()),
    }
}

/// [`derivative_identities`], failing with [`Error::IdentityViolated`] on
/// the first relation that does not hold.
pub fn verify_derivative_identities(fc: &FinalComponent, budget: u64, exec: Execution) -> Result<Vec<IdentityCheck>> {
    let checks = derivative_identities(fc, budget, exec)?;
    require_identities(&checks)?;
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::model::final_component;
    use crate::moments::moments_algebraic;
    use crate::rational::int;

    fn fc_of(t: &crate::Transducer) -> FinalComponent {
        final_component(t).unwrap()
    }

    #[test]
    fn naf_digraph_counts() {
        let fc = fc_of(&builtins::naf());
        let (d1, d2) = spanning_functional_digraphs(&fc, DEFAULT_DIGRAPH_BUDGET, Execution::Sequential).unwrap();
        assert_eq!((d1.len(), d2.len()), (4, 4));
        let totals = digraph_totals(&fc, DEFAULT_DIGRAPH_BUDGET, Execution::Sequential).unwrap();
        assert_eq!(totals.g_d1(&Selector::length()), int(6));
        assert_eq!(totals.g_d1(&Selector::output()), int(2));
        assert_eq!(totals.total_count(), 8);
    }

    #[test]
    fn simple_machine_digraphs() {
        let a = [int(2), int(3), int(5), int(7)];
        let fc = fc_of(&builtins::simple(a));
        let (d1, d2) = spanning_functional_digraphs(&fc, DEFAULT_DIGRAPH_BUDGET, Execution::Sequential).unwrap();
        assert_eq!((d1.len(), d2.len()), (3, 1));
        let sums = digraph_sums(&d1, &d2, &Selector::length(), &Selector::length());
        assert_eq!(sums.g_d1, int(4));
        assert_eq!(
            digraph_sums(&d1, &d2, &Selector::output(), &Selector::length()).g_d1,
            int(17)
        );
    }

    #[test]
    fn totals_match_explicit_lists() {
        for (name, t) in builtins::all_default() {
            let fc = fc_of(&t);
            let (d1, d2) = spanning_functional_digraphs(&fc, DEFAULT_DIGRAPH_BUDGET, Execution::Parallel).unwrap();
            let totals = digraph_totals(&fc, DEFAULT_DIGRAPH_BUDGET, Execution::Parallel).unwrap();
            assert_eq!(totals.d1_count, d1.len() as u64, "{name}");
            assert_eq!(totals.d2_count, d2.len() as u64, "{name}");
            let sels = [Selector::length(), Selector::input(), Selector::output()];
            for g in &sels {
                for h in &sels {
                    assert_eq!(totals.sums(g, h), digraph_sums(&d1, &d2, g, h), "{name}");
                }
            }
        }
    }

    #[test]
    fn identities_and_agreement_on_builtins() {
        for (name, t) in builtins::all_default() {
            let fc = fc_of(&t);
            let checks = verify_derivative_identities(&fc, DEFAULT_DIGRAPH_BUDGET, Execution::Parallel)
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(checks.len(), 9);
            let combinatorial = moments_combinatorial(&fc, DEFAULT_DIGRAPH_BUDGET, Execution::Sequential).unwrap();
            assert_eq!(combinatorial, moments_algebraic(&fc).unwrap(), "{name}");
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let fc = fc_of(&builtins::wnaf(6).unwrap());
        let a = digraph_totals(&fc, DEFAULT_DIGRAPH_BUDGET, Execution::Sequential).unwrap();
        let b = digraph_totals(&fc, DEFAULT_DIGRAPH_BUDGET, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let (s1, s2) = spanning_functional_digraphs(&fc, DEFAULT_DIGRAPH_BUDGET, Execution::Sequential).unwrap();
        let (p1, p2) = spanning_functional_digraphs(&fc, DEFAULT_DIGRAPH_BUDGET, Execution::Parallel).unwrap();
        assert_eq!((s1, s2), (p1, p2));
    }

    #[test]
    fn budget_is_enforced() {
        let fc = fc_of(&builtins::wnaf(6).unwrap());
        let err = digraph_totals(&fc, 100, Execution::Sequential).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { ref required, cap: 100 } if required == "128"));
    }

    #[test]
    fn corrupted_jet_is_detected() {
        // A wrong characteristic jet must break at least one relation: compare
        // against a transducer whose outputs differ.
        let fc = fc_of(&builtins::naf());
        let other = fc_of(&builtins::naf().map_outputs(|o| o + int(1)));
        let good = derivative_identities(&fc, DEFAULT_DIGRAPH_BUDGET, Execution::Sequential).unwrap();
        let shifted = derivative_identities(&other, DEFAULT_DIGRAPH_BUDGET, Execution::Sequential).unwrap();
        assert!(good.iter().all(|c| c.holds));
        assert!(shifted.iter().all(|c| c.holds));
        let mixed: Vec<bool> = good.iter().zip(&shifted).map(|(a, b)| a.lhs == b.rhs).collect();
        assert!(mixed.contains(&false));
    }
}
