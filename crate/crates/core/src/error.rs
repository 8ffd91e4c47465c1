use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(&'static str),
    #[error("zero input")]
    ZeroInput,
    #[error("residue is zero mod p")]
    ZeroResidue,
    #[error("argument outside the convergence domain")]
    DomainViolation,
    #[error("element is not invertible")]
    NonInvertible,
    #[error("operation undefined on a split algebra")]
    SplitKindUnsupported,
    #[error("depth {depth} exceeds working precision {precision}")]
    DepthExceedsPrecision { depth: u32, precision: u32 },
    #[error("central character mismatch")]
    CentralMismatch,
    #[error("conductor too small (depth-zero data are unsupported)")]
    ConductorTooSmall,
    #[error("degenerate Gram matrix")]
    DegenerateGram,
    #[error("the matrix model exists only on the matrix side")]
    DivisionSideUnsupported,
    #[error("no embedding of the torus exists in this algebra")]
    NoEmbedding,
    #[error("character is not minimal")]
    NotMinimal,
    #[error("working precision {have} too low, need {need}")]
    PrecisionTooLow { have: u32, need: u32 },
    #[error("element outside the domain of the simple character")]
    OutsideDomain,
    #[error("coset depth insufficient: cells are not constant")]
    DepthInsufficient,
    #[error("(*) violated: c(theta chi^-1) or c(theta chibar^-1) <= 1")]
    StarViolated,
    #[error("parameters outside the range of the epsilon table")]
    OutOfTableRange,
    #[error("no solution")]
    NoSolution,
    #[error("no test vector exists on this side")]
    ExistenceFails,
    #[error("brute-force value changed between depths")]
    DepthUnstable,
    #[error("weight condition k > |m| >= 1 violated")]
    WeightViolation,
    #[error("not applicable: {0}")]
    NotApplicable(&'static str),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
