use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every domain error the library can report.
///
/// Each variant maps to a stable, module-qualified code via [`Error::code`],
/// which the CLI and the C ABI surface verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // distributions
    #[error("negative probability {p} for tuple {tuple:?}")]
    NegativeProbability { tuple: Vec<String>, p: f64 },
    #[error("total probability mass {total} is not within {tolerance} of 1")]
    MassOutOfTolerance { total: f64, tolerance: f64 },
    #[error("tuple {tuple:?} has arity {got}, expected {expected}")]
    ArityMismatch { tuple: Vec<String>, expected: usize, got: usize },
    #[error("transition row for state {state:?} sums to {total}, expected 1")]
    NonStochasticRow { state: String, total: f64 },
    #[error("unknown role {0:?}")]
    UnknownRole(String),
    #[error("unknown symbol {symbol:?} for role {role:?}")]
    UnknownSymbol { role: String, symbol: String },
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("invalid source: {0}")]
    InvalidSource(String),

    // infotheory
    #[error("role sets overlap on {0:?}")]
    RoleOverlap(String),
    #[error("context order is not a permutation of the non-target roles: {0}")]
    NotAPermutation(String),
    #[error("transducer is not strictly monotone in the required direction: {0}")]
    NonMonotoneTransducer(String),

    // deplen
    #[error("head position {pos} out of range 1..={m}")]
    PositionOutOfRange { m: usize, pos: usize },
    #[error("sequence length {0} is below the minimum of 2")]
    SequenceTooShort(usize),

    // conflict
    #[error("lambda {0} is outside [0, 1]")]
    InvalidWeight(f64),

    // ring
    #[error("unknown word order {0:?}")]
    UnknownOrder(String),
    #[error("transition predictions are only documented for SOV and SVO, got {0}")]
    UnsupportedSource(String),
    #[error("invalid ring kernel: {0}")]
    InvalidKernel(String),
    #[error("transition row from {0} has zero total weight")]
    DegenerateRow(String),

    // rate
    #[error("empty token sequence")]
    EmptySequence,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("model support exceeds the enumeration cap ({size} > {cap})")]
    UnsupportedModelSize { size: usize, cap: usize },
    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),
    #[error("sequence {0:?} has zero probability under the reference model")]
    ZeroProbabilitySequence(Vec<String>),

    // coding
    #[error("zero probability at index {0}")]
    ZeroProbability(usize),
    #[error("unknown target type {0:?}")]
    UnknownTarget(String),
    #[error("target {0:?} has zero total mass")]
    ZeroTargetMass(String),
    #[error("correlation undefined: all pairs tied")]
    AllTied,
    #[error("invalid code length table: {0}")]
    InvalidLengths(String),
    #[error("need at least {needed} pairs, got {got}")]
    TooFewPairs { needed: usize, got: usize },

    // cli / io
    #[error("input parse error: {0}")]
    InputParse(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code, prefixed with the owning module.
    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            NegativeProbability { .. } => "distributions.negative_probability",
            MassOutOfTolerance { .. } => "distributions.mass_out_of_tolerance",
            ArityMismatch { .. } => "distributions.arity_mismatch",
            NonStochasticRow { .. } => "distributions.non_stochastic_row",
            UnknownRole(_) => "distributions.unknown_role",
            UnknownSymbol { .. } => "distributions.unknown_symbol",
            InvalidAlphabet(_) => "distributions.invalid_alphabet",
            InvalidSource(_) => "distributions.invalid_source",
            RoleOverlap(_) => "infotheory.role_overlap",
            NotAPermutation(_) => "infotheory.not_a_permutation",
            NonMonotoneTransducer(_) => "infotheory.non_monotone_transducer",
            PositionOutOfRange { .. } => "deplen.position_out_of_range",
            SequenceTooShort(_) => "deplen.sequence_too_short",
            InvalidWeight(_) => "conflict.invalid_weight",
            UnknownOrder(_) => "ring.unknown_order",
            UnsupportedSource(_) => "ring.unsupported_source",
            InvalidKernel(_) => "ring.invalid_kernel",
            DegenerateRow(_) => "ring.degenerate_row",
            EmptySequence => "rate.empty_sequence",
            InsufficientData(_) => "rate.insufficient_data",
            UnsupportedModelSize { .. } => "rate.unsupported_model_size",
            DegenerateProfile(_) => "rate.degenerate_profile",
            ZeroProbabilitySequence(_) => "rate.zero_probability_sequence",
            ZeroProbability(_) => "coding.zero_probability",
            UnknownTarget(_) => "coding.unknown_target",
            ZeroTargetMass(_) => "coding.zero_target_mass",
            AllTied => "coding.all_tied",
            InvalidLengths(_) => "coding.invalid_lengths",
            TooFewPairs { .. } => "coding.too_few_pairs",
            InputParse(_) => "cli.input_parse",
            Usage(_) => "cli.usage",
            Io(_) => "cli.io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InputParse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::InputParse(e.to_string())
    }
}
