//! Cycle and functional-digraph combinatorics of the final component: the
//! combinatorial route to the asymptotic constants, the derivative
//! identities linking it to the determinant, and cycle certificates for
//! bounded variance, quasi-determinism and rank-one covariance.

mod certificates;
mod cycles;
mod digraphs;

pub use certificates::{
    bounded_variance_certificate, closed_walk_spot_check, quasi_deterministic_certificate, rank1_certificate,
    zero_one_output_check, Certificate, Witness,
};
pub use cycles::{cycles_of_component, cycles_of_transducer, simple_cycles, Cycle, DEFAULT_CYCLE_BUDGET};
pub use digraphs::{
    choice_count, derivative_identities, digraph_sums, digraph_totals, identity_checks, moments_combinatorial,
    moments_from_totals, require_identities, spanning_functional_digraphs, verify_derivative_identities, DigraphSums,
    DigraphTotals, FunctionalDigraph, IdentityCheck, Selector, DEFAULT_DIGRAPH_BUDGET,
};
