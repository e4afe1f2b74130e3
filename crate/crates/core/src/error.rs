use alloc::string::String;
use core::fmt;

/// Error type shared by the whole numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// Bad construction input (non-positive length, too few points, ...).
    Config(String),
    /// Operation asked of a solver that does not support the grid/boundary.
    UnsupportedScheme(&'static str),
    /// A precondition on an operation's input was violated.
    Precondition(String),
    /// NaN/overflow encountered; carries the first offending node index.
    BlowUp { step: usize, node: usize },
    /// Too many low-density nodes for the hydrodynamic form to be trusted.
    Degenerate { flagged: usize, total: usize },
    /// A linear solve could not be completed.
    Numerical(String),
    /// A circulation loop touched a flagged (sub-floor) node.
    PathThroughFlagged { node: usize },
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::Config(msg) => write!(f, "configuration error: {msg}"),
            CoreError::UnsupportedScheme(msg) => write!(f, "unsupported scheme: {msg}"),
            CoreError::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            CoreError::BlowUp { step, node } => {
                write!(f, "numerical blow-up at step {step}, first offending node {node}")
            }
            CoreError::Degenerate { flagged, total } => write!(
                f,
                "solver degeneracy: {flagged} of {total} nodes below the density floor"
            ),
            CoreError::Numerical(msg) => write!(f, "numerical error: {msg}"),
            CoreError::PathThroughFlagged { node } => {
                write!(f, "loop crosses flagged node {node}")
            }
        }
    }
}

impl core::error::Error for CoreError {}
