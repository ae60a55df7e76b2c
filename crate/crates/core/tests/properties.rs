use num_traits::{Signed, Zero};
use proptest::prelude::*;

use tmoments::combinatorics::{
    bounded_variance_certificate, choice_count, closed_walk_spot_check, cycles_of_component, digraph_totals, Witness,
    DEFAULT_CYCLE_BUDGET, DEFAULT_DIGRAPH_BUDGET,
};
use tmoments::corpus::{random_transducer, CorpusConfig, OutputShape};
use tmoments::model::{final_component, period};
use tmoments::moments::{classify, moments_algebraic};
use tmoments::oracle::{exact_moments_enumeration, exact_moments_series, quasi_det_bound_series};
use tmoments::rational::int;
use tmoments::report::{analyze, report_json, AnalysisOptions};
use tmoments::Execution;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn covariance_matrix_is_positive_semidefinite(seed in any::<u64>()) {
        let t = random_transducer(seed, &CorpusConfig::default());
        let m = moments_algebraic(&final_component(&t).unwrap()).unwrap();
        prop_assert!(!m.v1.is_negative() && !m.v2.is_negative());
        prop_assert!(!m.sigma_det().is_negative());
        prop_assert!(classify(&m).is_consistent());
    }

    #[test]
    fn digraph_counts_bounded_by_choices(seed in any::<u64>()) {
        let t = random_transducer(seed, &CorpusConfig::default());
        let fc = final_component(&t).unwrap();
        let totals = digraph_totals(&fc, DEFAULT_DIGRAPH_BUDGET, Execution::Parallel).unwrap();
        prop_assert_eq!(num_bigint::BigInt::from(totals.total_count()), choice_count(&fc));
        prop_assert!(totals.d1_count >= 1);
        let p = period(&fc) as usize;
        for c in cycles_of_component(&fc, DEFAULT_CYCLE_BUDGET).unwrap() {
            prop_assert_eq!(c.length % p, 0);
        }
    }

    #[test]
    fn oracle_invariants(seed in any::<u64>()) {
        let t = random_transducer(seed, &CorpusConfig { max_states: 3, ..Default::default() });
        let m = moments_algebraic(&final_component(&t).unwrap()).unwrap();
        let series = exact_moments_series(&t, 6, Execution::Sequential);
        for x in &series {
            let n = int(x.n as i64);
            prop_assert_eq!(&x.e_in, &(&m.e1 * &n));
            prop_assert_eq!(&x.v_in, &(&m.v1 * &n));
            prop_assert!(!x.v_out.is_negative());
            prop_assert!(&x.cov * &x.cov <= &x.v_in * &x.v_out);
        }
        let brute = exact_moments_enumeration(&t, 5, 1_000, Execution::Parallel).unwrap();
        prop_assert_eq!(&brute, &series[5]);
    }

    #[test]
    fn swapping_labels_swaps_moments(seed in any::<u64>()) {
        let config = CorpusConfig { outputs: OutputShape::Permutation, final_outputs: false, ..Default::default() };
        let t = random_transducer(seed, &config);
        let m = moments_algebraic(&final_component(&t).unwrap()).unwrap();
        let s = moments_algebraic(&final_component(&t.swap_labels().unwrap()).unwrap()).unwrap();
        prop_assert_eq!((s.e1, s.e2, s.v1, s.v2, s.c), (m.e2, m.e1, m.v2, m.v1, m.c));
    }

    #[test]
    fn bounded_certificate_implies_walks_and_band(seed in any::<u64>()) {
        let config = CorpusConfig { outputs: OutputShape::Coboundary, ..Default::default() };
        let t = random_transducer(seed, &config);
        let fc = final_component(&t).unwrap();
        let cert = bounded_variance_certificate(&fc, DEFAULT_CYCLE_BUDGET).unwrap();
        prop_assert!(cert.verdict);
        let Some(Witness::Slope(k)) = cert.witness else { panic!("slope witness") };
        for &s in fc.states() {
            prop_assert!(closed_walk_spot_check(&fc, s, 6, &k).unwrap());
        }
        let bands = quasi_det_bound_series(&fc.to_transducer(), &k, 40);
        let widest = |b: &[tmoments::oracle::OutputBand]| b.iter().map(|x| &x.max - &x.min).max().unwrap();
        prop_assert_eq!(widest(&bands[..20]), widest(&bands));
    }

    #[test]
    fn reports_are_deterministic(seed in any::<u64>()) {
        let t = random_transducer(seed, &CorpusConfig::default());
        let seq = AnalysisOptions { exec: Execution::Sequential, ..Default::default() };
        let a = report_json(&analyze(&t, &seq).unwrap()).to_string();
        let b = report_json(&analyze(&t, &AnalysisOptions::default()).unwrap()).to_string();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn bounded_variance_band_on_zero_output_machine() {
    let t = tmoments::builtins::simple(Default::default());
    let bands = quasi_det_bound_series(&t, &int(0), 30);
    assert!(bands.iter().all(|b| b.min.is_zero() && b.max.is_zero()));
}
