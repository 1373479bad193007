use crate::seq::Seq;
use core::fmt;

/// Failures shared by every module in this crate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// A precondition on the input itself is violated.
    InvalidInput(&'static str),
    /// The operation is well posed but needs more depth, arity, or integer
    /// range than the configured budget provides. `at` names the round,
    /// exponent, or node count that overflowed.
    BudgetExceeded { context: &'static str, at: usize },
    /// A grouped-family hypothesis does not hold; carries the least witness.
    HypothesisFailed(HypothesisViolation),
    /// The tree has no branch/skeleton bijection of the requested arity.
    NotSkeletal(&'static str),
    /// A name does not decide a value where one is required.
    Undecided(&'static str),
    /// No admissible successor selection exists in the given round.
    SelectionFailed { round: usize },
}

/// Least witness against the grouped extraction hypothesis, found by scanning
/// candidates in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HypothesisViolation {
    /// The restriction closure has a node with too many successors.
    TreeCondition { node: Seq, arity: usize },
    /// Two functions from distinct groups agree on the guard prefix but
    /// disagree later. Pairs are (common index, group).
    Rigidity { first: (usize, usize), second: (usize, usize) },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::BudgetExceeded { context, at } => {
                write!(f, "budget exceeded: {context} (at {at})")
            }
            Error::HypothesisFailed(HypothesisViolation::TreeCondition { node, arity }) => {
                write!(
                    f,
                    "hypothesis failed: restriction closure splits {arity} ways at {node:?}"
                )
            }
            Error::HypothesisFailed(HypothesisViolation::Rigidity { first, second }) => {
                write!(
                    f,
                    "hypothesis failed: rigidity violated by (i={}, j={}) and (s={}, t={})",
                    first.0, first.1, second.0, second.1
                )
            }
            Error::NotSkeletal(msg) => write!(f, "not skeletal: {msg}"),
            Error::Undecided(msg) => write!(f, "undecided: {msg}"),
            Error::SelectionFailed { round } => {
                write!(f, "no admissible successor selection in round {round}")
            }
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
