//! The analysis pipeline and its JSON and text renderings.
//!
//! JSON output is deterministic: object keys are sorted and rationals are
//! written as `p/q` strings (or `p` for integers).

use std::fmt::Write;

use serde_json::{json, Value};

use crate::combinatorics::{
    bounded_variance_certificate, choice_count, digraph_totals, identity_checks, moments_from_totals,
    quasi_deterministic_certificate, rank1_certificate, require_identities, Certificate, Cycle, FunctionalDigraph,
    IdentityCheck, Selector, Witness, DEFAULT_CYCLE_BUDGET, DEFAULT_DIGRAPH_BUDGET,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{final_component, period, StateId, Transducer};
use crate::moments::{asymptotic_moments, characteristic_jet, classify, Classification, Moments};
use crate::oracle::{slope_report, SlopeRow};
use crate::rational::{self, Rational};

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    pub digraph_budget: u64,
    pub cycle_budget: usize,
    /// Require the combinatorial route and the derivative identities even
    /// when that means exceeding nothing but failing on the budget.
    pub check_all: bool,
    /// Append the oracle slope table for `n = 1..=n_max`.
    pub oracle_n_max: Option<usize>,
    pub exec: Execution,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            digraph_budget: DEFAULT_DIGRAPH_BUDGET,
            cycle_budget: DEFAULT_CYCLE_BUDGET,
            check_all: false,
            oracle_n_max: None,
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentSummary {
    pub states: Vec<StateId>,
    pub n: usize,
    pub k: usize,
    pub period: u64,
}

/// The combinatorial route either ran or was skipped for budget reasons.
#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum CombinatorialOutcome {
    Computed {
        moments: Moments,
        identities: Vec<IdentityCheck>,
        d1: u64,
        d2: u64,
    },
    Skipped {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum QuasiDeterminism {
    Checked(Certificate),
    NotWeaklyConnected,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisReport {
    pub state_count: usize,
    pub alphabet: Vec<Rational>,
    pub transition_count: usize,
    pub final_component: ComponentSummary,
    pub moments: Moments,
    pub combinatorial: CombinatorialOutcome,
    pub classification: Classification,
    pub bounded_variance: Certificate,
    pub quasi_deterministic: QuasiDeterminism,
    pub rank1: Option<Certificate>,
    pub oracle: Option<Vec<SlopeRow>>,
}

/// Final component, period, characteristic jet, moments, classification,
/// certificates, then the combinatorial route with the derivative
/// identities and optionally the oracle slopes.
pub fn analyze(t: &Transducer, options: &AnalysisOptions) -> Result<AnalysisReport> {
    t.require_moment_alphabet()?;
    let fc = final_component(t)?;
    let p = period(&fc);
    if p != 1 {
        return Err(Error::Periodic { period: p });
    }
    let jet = characteristic_jet(&fc)?;
    let moments = asymptotic_moments(&jet, fc.alphabet())?;
    let classification = classify(&moments);

    let bounded_variance = bounded_variance_certificate(&fc, options.cycle_budget)?;
    let quasi_deterministic = match quasi_deterministic_certificate(t, options.cycle_budget) {
        Ok(cert) => QuasiDeterminism::Checked(cert),
        Err(Error::NotWeaklyConnected) => QuasiDeterminism::NotWeaklyConnected,
        Err(e) => return Err(e),
    };
    let rank1 = if moments.v1 == Rational::from_integer(0.into()) {
        None
    } else {
        Some(rank1_certificate(&fc, &moments, options.cycle_budget)?)
    };

    let combinatorial = match digraph_totals(&fc, options.digraph_budget, options.exec) {
        Ok(totals) => {
            let identities = identity_checks(&fc, &jet, &totals);
            require_identities(&identities)?;
            let combinatorial = moments_from_totals(&totals)?;
            if combinatorial != moments {
                return Err(Error::InternalMismatch(format!(
                    "algebraic moments {moments:?} differ from combinatorial moments {combinatorial:?}"
                )));
            }
            CombinatorialOutcome::Computed {
                moments: combinatorial,
                identities,
                d1: totals.d1_count,
                d2: totals.d2_count,
            }
        }
        Err(e @ Error::BudgetExceeded { .. }) if !options.check_all => {
            CombinatorialOutcome::Skipped { reason: e.to_string() }
        }
        Err(e) => return Err(e),
    };

    // Certificates must agree with the constants they certify.
    let consistent = bounded_variance.verdict == classification.bounded_variance
        && rank1
            .as_ref()
            .is_none_or(|r| r.verdict == (classification.sigma_rank < 2));
    if !consistent {
        return Err(Error::InternalMismatch(
            "cycle certificates disagree with the asymptotic constants".into(),
        ));
    }

    let oracle = match options.oracle_n_max {
        Some(n_max) => Some(slope_report(t, 1, n_max.max(1), options.exec)?.rows),
        None => None,
    };

    Ok(AnalysisReport {
        state_count: t.state_count(),
        alphabet: t.input_alphabet().to_vec(),
        transition_count: t.transitions().len(),
        final_component: ComponentSummary {
            states: fc.states().to_vec(),
            n: fc.n(),
            k: fc.k(),
            period: p,
        },
        moments,
        combinatorial,
        classification,
        bounded_variance,
        quasi_deterministic,
        rank1,
        oracle,
    })
}

fn r(value: &Rational) -> Value {
    Value::String(rational::to_string(value))
}

fn rs(values: &[Rational]) -> Value {
    Value::Array(values.iter().map(r).collect())
}

pub fn moments_json(m: &Moments) -> Value {
    json!({ "e1": r(&m.e1), "e2": r(&m.e2), "v1": r(&m.v1), "v2": r(&m.v2), "c": r(&m.c) })
}

pub fn classification_json(c: &Classification) -> Value {
    json!({
        "independent": c.independent,
        "bounded_variance": c.bounded_variance,
        "sigma_rank": c.sigma_rank,
        "squared_correlation": c.squared_correlation.as_ref().map(r),
        "correlation_sign": c.correlation_sign,
        "perfectly_correlated": c.perfectly_correlated,
        "limit_law": c.limit_law.as_str(),
    })
}

pub fn cycle_json(c: &Cycle) -> Value {
    json!({
        "states": c.states(),
        "length": c.length,
        "input_sum": r(&c.input_sum),
        "output_sum": r(&c.output_sum),
    })
}

fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::Slope(k) => json!({ "k": r(k) }),
        Witness::Affine { a, b } => json!({ "a": r(a), "b": r(b) }),
    }
}

pub fn certificate_json(c: &Certificate) -> Value {
    json!({
        "verdict": c.verdict,
        "witness": c.witness.as_ref().map(witness_json),
        "reference": c.reference.as_ref().map(cycle_json),
        "counterexample": c.counterexample.as_ref().map(cycle_json),
        "cycles_checked": c.cycles_checked,
    })
}

fn identity_json(i: &IdentityCheck) -> Value {
    json!({ "name": i.name, "lhs": r(&i.lhs), "rhs": r(&i.rhs), "holds": i.holds })
}

pub fn slope_rows_json(rows: &[SlopeRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|row| {
                json!({
                    "n": row.n,
                    "e_out": r(&row.e_out),
                    "v_out": r(&row.v_out),
                    "cov": r(&row.cov),
                    "delta_e_out": r(&row.delta_e_out),
                    "delta_v_out": r(&row.delta_v_out),
                    "delta_cov": r(&row.delta_cov),
                })
            })
            .collect(),
    )
}

pub fn report_json(report: &AnalysisReport) -> Value {
    let fc = &report.final_component;
    let combinatorial = match &report.combinatorial {
        CombinatorialOutcome::Computed {
            moments,
            identities,
            d1,
            d2,
        } => json!({
            "status": "computed",
            "moments": moments_json(moments),
            "d1": d1,
            "d2": d2,
            "identities": identities.iter().map(identity_json).collect::<Vec<_>>(),
        }),
        CombinatorialOutcome::Skipped { reason } => json!({ "status": "skipped", "reason": reason }),
    };
    let quasi = match &report.quasi_deterministic {
        QuasiDeterminism::Checked(c) => certificate_json(c),
        QuasiDeterminism::NotWeaklyConnected => json!({ "verdict": null, "reason": "not weakly connected" }),
    };
    json!({
        "transducer": {
            "states": report.state_count,
            "alphabet": rs(&report.alphabet),
            "transitions": report.transition_count,
        },
        "final_component": { "states": fc.states, "n": fc.n, "k": fc.k, "period": fc.period },
        "moments": {
            "algebraic": moments_json(&report.moments),
            "combinatorial": combinatorial,
        },
        "classification": classification_json(&report.classification),
        "certificates": {
            "bounded_variance": certificate_json(&report.bounded_variance),
            "quasi_deterministic": quasi,
            "rank1": report.rank1.as_ref().map(certificate_json),
        },
        "oracle": report.oracle.as_deref().map(slope_rows_json),
    })
}

pub fn to_json_string(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

fn states_text(states: &[StateId]) -> String {
    let list: Vec<String> = states.iter().map(|s| s.to_string()).collect();
    format!("{{{}}}", list.join(", "))
}

pub fn cycle_text(c: &Cycle) -> String {
    let mut path: Vec<String> = c.states().iter().map(|s| s.to_string()).collect();
    path.push(c.states()[0].to_string());
    format!(
        "{}  (length {}, input {}, output {})",
        path.join(" -> "),
        c.length,
        c.input_sum,
        c.output_sum
    )
}

fn certificate_text(out: &mut String, name: &str, c: &Certificate) {
    let _ = writeln!(out, "  {name}: {}", c.verdict);
    match &c.witness {
        Some(Witness::Slope(k)) => {
            let _ = writeln!(out, "    witness k = {}", rational::to_display(k));
        }
        Some(Witness::Affine { a, b }) => {
            let _ = writeln!(
                out,
                "    witness a = {}, b = {}",
                rational::to_display(a),
                rational::to_display(b)
            );
        }
        None => {}
    }
    if let Some(reference) = &c.reference {
        let _ = writeln!(out, "    reference cycle {}", cycle_text(reference));
    }
    if let Some(bad) = &c.counterexample {
        let _ = writeln!(out, "    counterexample {}", cycle_text(bad));
    }
    let _ = writeln!(out, "    cycles checked: {}", c.cycles_checked);
}

fn moments_text(out: &mut String, m: &Moments) {
    for (name, value) in [("e1", &m.e1), ("e2", &m.e2), ("v1", &m.v1), ("v2", &m.v2), ("c", &m.c)] {
        let _ = writeln!(out, "  {name} = {}", rational::to_display(value));
    }
}

pub fn slope_rows_text(rows: &[SlopeRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>4}  {:>14}  {:>14}  {:>14}", "n", "dE_out", "dV_out", "dCov");
    let approx = |v: &Rational| format!("{:.10}", num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::NAN));
    for row in rows {
        let _ = writeln!(
            out,
            "{:>4}  {:>14}  {:>14}  {:>14}",
            row.n,
            approx(&row.delta_e_out),
            approx(&row.delta_v_out),
            approx(&row.delta_cov)
        );
    }
    out
}

pub fn report_text(report: &AnalysisReport) -> String {
    let mut out = String::new();
    let alphabet: Vec<String> = report.alphabet.iter().map(rational::to_string).collect();
    let fc = &report.final_component;
    let _ = writeln!(
        out,
        "transducer: {} states, alphabet {{{}}}, {} transitions",
        report.state_count,
        alphabet.join(", "),
        report.transition_count
    );
    let _ = writeln!(
        out,
        "final component: states {}, N = {}, K = {}, period {}",
        states_text(&fc.states),
        fc.n,
        fc.k,
        fc.period
    );
    let _ = writeln!(out, "moments (determinant):");
    moments_text(&mut out, &report.moments);
    match &report.combinatorial {
        CombinatorialOutcome::Computed { identities, d1, d2, .. } => {
            let held = identities.iter().filter(|i| i.holds).count();
            let _ = writeln!(
                out,
                "moments (functional digraphs): identical; |D1| = {d1}, |D2| = {d2}; {held}/{} derivative identities hold",
                identities.len()
            );
        }
        CombinatorialOutcome::Skipped { reason } => {
            let _ = writeln!(out, "moments (functional digraphs): skipped, {reason}");
        }
    }
    let c = &report.classification;
    let _ = writeln!(out, "classification:");
    let _ = writeln!(out, "  independent: {}", c.independent);
    let _ = writeln!(out, "  bounded variance: {}", c.bounded_variance);
    let _ = writeln!(out, "  sigma rank: {}", c.sigma_rank);
    match &c.squared_correlation {
        Some(rho2) => {
            let _ = writeln!(
                out,
                "  squared correlation: {} (sign {})",
                rational::to_display(rho2),
                c.correlation_sign
            );
        }
        None => {
            let _ = writeln!(out, "  squared correlation: undefined");
        }
    }
    let _ = writeln!(out, "  perfectly correlated: {}", c.perfectly_correlated);
    let _ = writeln!(out, "  limit law: {}", c.limit_law.as_str());
    let _ = writeln!(out, "certificates:");
    certificate_text(&mut out, "bounded variance", &report.bounded_variance);
    match &report.quasi_deterministic {
        QuasiDeterminism::Checked(cert) => certificate_text(&mut out, "quasi-deterministic", cert),
        QuasiDeterminism::NotWeaklyConnected => {
            let _ = writeln!(
                out,
                "  quasi-deterministic: not checked, transducer is not weakly connected"
            );
        }
    }
    if let Some(rank1) = &report.rank1 {
        certificate_text(&mut out, "rank one", rank1);
    }
    if let Some(rows) = &report.oracle {
        let _ = writeln!(out, "oracle slopes:");
        out.push_str(&slope_rows_text(rows));
    }
    out
}

/// Digraph counts and the aggregate sums over the basis selectors.
pub fn digraphs_json(d1: &[FunctionalDigraph], d2: &[FunctionalDigraph], total: u64) -> Value {
    let sels = [
        ("length", Selector::length()),
        ("input", Selector::input()),
        ("output", Selector::output()),
    ];
    let mut sums = serde_json::Map::new();
    for (gn, g) in &sels {
        for (hn, h) in &sels {
            let s = crate::combinatorics::digraph_sums(d1, d2, g, h);
            if hn == &"length" {
                sums.insert(format!("{gn}(D1)"), r(&s.g_d1));
            }
            sums.insert(format!("{gn}*{hn}(D1)"), r(&s.gh_d1));
            sums.insert(format!("{gn}*{hn}(D2)"), r(&s.gh_d2));
        }
    }
    let digraph = |d: &FunctionalDigraph| json!({ "choice": d.choice, "cycles": d.cycles.iter().map(cycle_json).collect::<Vec<_>>() });
    json!({
        "total": total,
        "d1_count": d1.len(),
        "d2_count": d2.len(),
        "sums": sums,
        "d1": d1.iter().map(digraph).collect::<Vec<_>>(),
        "d2": d2.iter().map(digraph).collect::<Vec<_>>(),
    })
}

pub fn digraphs_text(d1: &[FunctionalDigraph], d2: &[FunctionalDigraph], total: u64) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "functional digraphs: {total}, |D1| = {}, |D2| = {}",
        d1.len(),
        d2.len()
    );
    let sels = [
        ("length", Selector::length()),
        ("input", Selector::input()),
        ("output", Selector::output()),
    ];
    for (gn, g) in &sels {
        let s = crate::combinatorics::digraph_sums(d1, d2, g, g);
        let _ = writeln!(
            out,
            "  {gn}(D1) = {}, {gn}^2(D1) = {}, {gn}^2(D2) = {}",
            s.g_d1, s.gh_d1, s.gh_d2
        );
    }
    out
}

/// Total number of functional digraphs of the final component of `t`, as
/// a decimal string.
pub fn digraph_space(t: &Transducer) -> Result<String> {
    Ok(choice_count(&final_component(t)?).to_string())
}
