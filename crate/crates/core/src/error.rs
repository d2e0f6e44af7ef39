use thiserror::Error;

/// Failures surfaced by the library.
///
/// Values that the model treats as legitimate outcomes (an infinite moment,
/// a timed-out hitting time) are not errors; they are carried in the return
/// types instead.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent environment/run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// The requested operation is undefined for this law (e.g. dual sampling
    /// with an infinite-mean gap law).
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// The operation requires a different recurrence/transience regime.
    #[error("wrong regime: {0}")]
    WrongRegime(String),

    /// `E xi^kappa = 1` has no positive root because `xi <= 1` almost surely.
    #[error("no finite kappa: xi <= 1 almost surely")]
    NoFiniteKappa,

    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A moment the operation needs is infinite.
    #[error("infinite moment: {0}")]
    InfiniteMoment(String),

    /// A random series does not converge.
    #[error("series not summable: {0}")]
    NotSummable(String),

    /// Numerical procedure failed to reach its target accuracy.
    #[error("numerical failure in {routine}: {detail}")]
    Numeric { routine: &'static str, detail: String },

    /// A search widened to its limit without success.
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),

    /// Bad data passed to a statistical routine.
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
