use std::path::PathBuf;

/// Crate-wide error type. Variants map onto the process exit codes used by
/// the command-line front end: configuration and input rejection -> 2,
/// numerical-contract violations -> 3, incomplete runs -> 4, I/O -> 5.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("rejected input: {0}")]
    RejectedInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Field evaluation requested at a point where the gauge is singular
    /// (solenoid center, or exactly on a string ray).
    #[error("singular point: {0}")]
    SingularPoint(String),

    /// A state with no usable dynamics, e.g. zero mechanical momentum.
    #[error("degenerate state: {0}")]
    DegenerateState(String),

    /// Carrier amplitude too small for a meaningful fringe-shift estimate.
    #[error("low contrast: {0}")]
    LowContrast(String),

    #[error("config error: {0}")]
    Config(String),

    /// A stated numerical contract does not hold (stability bound,
    /// resolution bound, tolerance not reached).
    #[error("numerical contract violated: {0}")]
    NumericalContract(String),

    /// The wavepacket never produced a usable screen record.
    #[error("incomplete run: {0}")]
    IncompleteRun(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the CLI front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::RejectedInput(_) | Error::Precondition(_) | Error::Config(_) => 2,
            Error::SingularPoint(_)
            | Error::DegenerateState(_)
            | Error::LowContrast(_)
            | Error::NumericalContract(_) => 3,
            Error::IncompleteRun(_) => 4,
            Error::Io { .. } => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
