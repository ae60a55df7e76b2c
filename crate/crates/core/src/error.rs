use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("transitions[{index}]: duplicate transition for state {state} and input {input}")]
    DuplicateTransition {
        index: usize,
        state: usize,
        input: Rational,
    },

    #[error("state {state} has no transition for input {input}")]
    Incomplete { state: usize, input: Rational },

    #[error("{location}: unknown state {state}")]
    UnknownState { location: String, state: usize },

    #[error("input alphabet has {size} symbol(s); moment analysis needs at least 2")]
    AlphabetTooSmall { size: usize },

    #[error("{location}: symbol {symbol} is not in the input alphabet")]
    SymbolNotInAlphabet { location: String, symbol: Rational },

    #[error("transducer is not finally connected: {sinks} sink components")]
    NotFinallyConnected { sinks: usize },

    #[error("final component has period {period}; it must be aperiodic")]
    Periodic { period: u64 },

    #[error("underlying graph is not weakly connected")]
    NotWeaklyConnected,

    #[error("characteristic determinant has vanishing z-derivative at (1,1,1)")]
    DegenerateCharacteristic,

    #[error("internal mismatch: {0}")]
    InternalMismatch(String),

    #[error("derivative identity {name} violated: {lhs} != {rhs}")]
    IdentityViolated {
        name: &'static str,
        lhs: String,
        rhs: String,
    },

    #[error("enumeration needs {required} items, budget is {cap}; raise the budget to proceed")]
    BudgetExceeded { required: String, cap: u64 },

    #[error("more than {cap} simple cycles; raise the cycle budget to proceed")]
    CycleBudgetExceeded { cap: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("unknown builtin transducer `{0}`")]
    UnknownBuiltin(String),

    #[error("bad parameter: {0}")]
    BadParam(String),
}
