use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live in different generator contexts")]
    ContextMismatch,
    #[error("invalid generator context: {0}")]
    InvalidContext(String),
    #[error("division by zero")]
    ZeroDivision,
    #[error("the zero series has no leading term")]
    ZeroSeries,
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("argument is not infinitesimal")]
    NotInfinitesimal,
    #[error("infinitesimal argument has non-positive minimal weight {0}")]
    ZeroWeightStep(String),
    #[error("power of a series without positive sign")]
    NonPositive,
    #[error("scalar power {base}^{exponent} is not in the coefficient field")]
    IrrationalScalarPower { base: String, exponent: String },
    #[error("coefficient {0} of power series is not bounded")]
    UnboundedCoefficient(usize),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("c = -1 is excluded")]
    CMinusOne,
    #[error("c must be a positive rational")]
    NonPositiveC,
    #[error("root {base}^(1/{index}) is irrational")]
    IrrationalRoot { base: String, index: String },
    #[error("no logarithmic derivative declared for generator {0}")]
    MissingSpec(String),
    #[error("context has no exponential generator to express e^(x*{0})")]
    MissingExpGenerator(String),
    #[error("y must be nonzero with y + 1 nonzero")]
    DegenerateY,
    #[error("no germ rule for generator {0}")]
    MissingRule(String),
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("postcondition violated: {0}")]
    Postcondition(String),
}

impl Error {
    /// Process exit status used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. } | Error::UnknownSymbol(_) => 2,
            Error::ZeroDivision
            | Error::ZeroSeries
            | Error::NotInfinitesimal
            | Error::ZeroWeightStep(_)
            | Error::NonPositive
            | Error::IrrationalScalarPower { .. }
            | Error::UnboundedCoefficient(_)
            | Error::PreconditionFailed(_)
            | Error::CMinusOne
            | Error::NonPositiveC
            | Error::IrrationalRoot { .. }
            | Error::DegenerateY
            | Error::MissingExpGenerator(_) => 3,
            Error::NoConvergence { .. } | Error::Postcondition(_) => 4,
            Error::Inconclusive(_) => 5,
            Error::ContextMismatch
            | Error::InvalidContext(_)
            | Error::MissingSpec(_)
            | Error::MissingRule(_)
            | Error::Config(_) => 1,
        }
    }

    /// Short machine-readable class name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ContextMismatch => "ContextMismatch",
            Error::InvalidContext(_) => "InvalidContext",
            Error::ZeroDivision => "ZeroDivision",
            Error::ZeroSeries => "ZeroSeries",
            Error::Inconclusive(_) => "Inconclusive",
            Error::NotInfinitesimal => "NotInfinitesimal",
            Error::ZeroWeightStep(_) => "ZeroWeightStep",
            Error::NonPositive => "NonPositive",
            Error::IrrationalScalarPower { .. } => "IrrationalScalarPower",
            Error::UnboundedCoefficient(_) => "UnboundedCoefficient",
            Error::PreconditionFailed(_) => "PreconditionFailed",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::CMinusOne => "CMinusOne",
            Error::NonPositiveC => "NonPositiveC",
            Error::IrrationalRoot { .. } => "IrrationalRoot",
            Error::MissingSpec(_) => "MissingSpec",
            Error::MissingExpGenerator(_) => "MissingExpGenerator",
            Error::DegenerateY => "DegenerateY",
            Error::MissingRule(_) => "MissingRule",
            Error::Syntax { .. } => "SyntaxError",
            Error::UnknownSymbol(_) => "UnknownSymbol",
            Error::Config(_) => "Config",
            Error::Postcondition(_) => "Postcondition",
        }
    }
}
