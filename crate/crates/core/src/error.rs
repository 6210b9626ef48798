use alloc::string::String;
use core::fmt;

/// Everything that can go wrong inside the simulation core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A gate or Pauli operator addressed a subsystem whose dimension is not 2.
    QutritTarget { subsystem: usize },
    /// Subsystem index outside the register.
    TargetOutOfRange { index: usize, len: usize },
    /// Repeated or otherwise malformed target list.
    InvalidTargets,
    /// Two objects that must share a register layout do not.
    DimensionMismatch { expected: usize, found: usize },
    /// Only dimensions 2 and 3 are supported.
    UnsupportedDimension(usize),
    /// Register exceeds the dense representation cap.
    RegisterTooLarge { dim: usize },
    /// Amplitudes do not have unit norm.
    NotNormalized { norm_sq: f64 },
    /// A basis or code is not orthonormal.
    NonOrthonormal { i: usize, j: usize, overlap: f64 },
    /// The measurement basis does not cover the measured state.
    IncompleteBasis { captured: f64 },
    /// A forced outcome has (numerically) zero probability.
    ImpossibleOutcome { index: usize, probability: f64 },
    /// A non-Clifford operation was handed to a Clifford-only routine.
    NonClifford(&'static str),
    /// Pauli measurement requires a Hermitian (real-phase) operator.
    NonHermitian,
    /// Text could not be parsed as a Pauli string.
    PauliParse(String),
    /// Stabilizer generators violate commutation or independence.
    InvalidTableau(&'static str),
    /// Geometry violates its invariants.
    InvalidGeometry(String),
    /// A cheater sits inside the restricted ball around the receiver.
    CheaterInsideRestrictedArea { cheater: usize, distance: f64, radius: f64 },
    /// The receiver is not inside the verifiers' hull.
    InfeasibleGeometry,
    /// Number of stations not supported by the routine.
    UnsupportedStations { n: usize },
    /// Protocol instance violates its invariants.
    InvalidInstance(String),
    /// Encoding is not a Pauli eigenbasis.
    NonPauliEncoding,
    /// Generic argument error.
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::QutritTarget { subsystem } => {
                write!(f, "subsystem {subsystem} is not a qubit")
            }
            Error::TargetOutOfRange { index, len } => {
                write!(f, "target {index} out of range for {len} subsystems")
            }
            Error::InvalidTargets => f.write_str("repeated or malformed targets"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::UnsupportedDimension(d) => write!(f, "unsupported subsystem dimension {d}"),
            Error::RegisterTooLarge { dim } => {
                write!(f, "register dimension {dim} exceeds the dense cap")
            }
            Error::NotNormalized { norm_sq } => write!(f, "state not normalized (|psi|^2 = {norm_sq})"),
            Error::NonOrthonormal { i, j, overlap } => {
                write!(f, "basis not orthonormal: <{i}|{j}> has magnitude {overlap}")
            }
            Error::IncompleteBasis { captured } => {
                write!(f, "basis captures only {captured} of the state's weight")
            }
            Error::ImpossibleOutcome { index, probability } => {
                write!(f, "forced outcome {index} has probability {probability}")
            }
            Error::NonClifford(what) => write!(f, "{what} is not a Clifford operation"),
            Error::NonHermitian => f.write_str("Pauli operator with imaginary phase is not Hermitian"),
            Error::PauliParse(s) => write!(f, "cannot parse Pauli string {s:?}"),
            Error::InvalidTableau(why) => write!(f, "invalid stabilizer tableau: {why}"),
            Error::InvalidGeometry(why) => write!(f, "invalid geometry: {why}"),
            Error::CheaterInsideRestrictedArea { cheater, distance, radius } => write!(
                f,
                "cheater {cheater} at distance {distance} is inside the restricted radius {radius}"
            ),
            Error::InfeasibleGeometry => f.write_str("receiver is not inside the verifiers' hull"),
            Error::UnsupportedStations { n } => write!(f, "unsupported number of stations: {n}"),
            Error::InvalidInstance(why) => write!(f, "invalid protocol instance: {why}"),
            Error::NonPauliEncoding => f.write_str("encoding is not a Pauli eigenbasis"),
            Error::InvalidArgument(why) => write!(f, "invalid argument: {why}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
