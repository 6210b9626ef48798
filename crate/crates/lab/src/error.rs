use std::fmt;

/// Failure classes, each with its own exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabError {
    /// The configuration could not be read or parsed.
    Parse(String),
    /// The configuration parsed but does not describe a runnable scenario.
    Validation(String),
    /// Something went wrong while running.
    Runtime(String),
}

impl LabError {
    pub(crate) fn parse(line: usize, msg: impl fmt::Display) -> Self {
        LabError::Parse(format!("line {line}: {msg}"))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Parse(_) => 2,
            LabError::Validation(_) => 3,
            LabError::Runtime(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LabError::Parse(_) => "parse",
            LabError::Validation(_) => "validation",
            LabError::Runtime(_) => "runtime",
        }
    }
}

impl fmt::Display for LabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            LabError::Parse(m) | LabError::Validation(m) | LabError::Runtime(m) => m,
        };
        // one line, whatever the message contained
        write!(f, "{} error: {}", self.kind(), msg.replace('\n', " "))
    }
}

impl std::error::Error for LabError {}

pub(crate) fn validation(e: impl fmt::Display) -> LabError {
    LabError::Validation(e.to_string())
}

pub(crate) fn runtime(e: impl fmt::Display) -> LabError {
    LabError::Runtime(e.to_string())
}
