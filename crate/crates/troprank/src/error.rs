//! Error type shared by all modules.

use std::fmt;

/// Errors produced by the toolkit. Every failure mode is explicit; no
/// operation ever reports a wrong verdict instead of an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A matrix operation was given operands of incompatible shapes.
    DimensionMismatch {
        context: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    /// A matrix constructor was given an entry grid of the wrong length,
    /// or a zero dimension.
    BadShape { rows: usize, cols: usize, len: usize },
    /// An operation that requires a square matrix was given a rectangular one.
    NotSquare { rows: usize, cols: usize },
    /// Permutation enumeration refused to run above the configured cap.
    EnumerationCapExceeded { size: usize, cap: usize },
    /// The exhaustive factor-rank search would need more winner patterns
    /// than the configured budget allows.
    BudgetExceeded { patterns: String, budget: u64 },
    /// Normalization requires every row and column to hold a finite entry.
    ImproperMatrix { all_infinite_row: Option<usize>, all_infinite_col: Option<usize> },
    /// The operation requires finite entries; infinite ones must first be
    /// removed via `scale_normalize` + `eliminate_infinity`.
    InfiniteEntry { row: usize, col: usize, context: &'static str },
    /// Infinity elimination requires zero to be the minimum of every row
    /// and column; run `scale_normalize` first.
    NotNormalized { context: &'static str },
    /// A constraint referenced a variable id outside the system.
    BadVariable { var: usize, num_vars: usize },
    /// An index argument was outside its documented range.
    IndexOutOfRange { what: &'static str, value: i64, min: i64, max: i64 },
    /// A supplied factorization does not multiply to the stated target.
    NotAFactorization { context: &'static str },
    /// The instance violates the gap condition required by the gadget
    /// construction (distinct breakpoints must differ by at least 2).
    NotGapAdmissible { detail: String },
    /// The supplied splitting witness is not valid for the instance.
    InvalidWitness { detail: String },
    /// An instance or argument failed validation.
    BadInstance { detail: String },
    /// Brute-force enumeration refused to run on an instance this large.
    InstanceTooLarge { what: &'static str, size: usize, max: usize },
    /// The rank-3 decider met a normalized full-rank corner whose zero
    /// pattern is outside the two handled forms at every placement, or a
    /// degenerate branch structure that the published case split does not
    /// cover. Never a silent wrong answer.
    UnhandledPattern { detail: String },
    /// Text-format parsing failed; positions are 1-based.
    Parse { line: usize, column: usize, detail: String },
    /// Internal invariant violation; indicates a bug, never a wrong verdict.
    Internal { detail: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { context, left, right } => write!(
                f,
                "{context}: dimension mismatch between {}x{} and {}x{}",
                left.0, left.1, right.0, right.1
            ),
            Error::BadShape { rows, cols, len } => write!(
                f,
                "matrix shape {rows}x{cols} does not match {len} entries (dimensions must be positive)"
            ),
            Error::NotSquare { rows, cols } => {
                write!(f, "operation requires a square matrix, got {rows}x{cols}")
            }
            Error::EnumerationCapExceeded { size, cap } => {
                write!(f, "enumeration cap exceeded: size {size} > cap {cap}")
            }
            Error::BudgetExceeded { patterns, budget } => {
                write!(f, "pattern budget exceeded: {patterns} winner patterns > budget {budget}")
            }
            Error::ImproperMatrix { all_infinite_row, all_infinite_col } => match (all_infinite_row, all_infinite_col) {
                (Some(i), _) => write!(f, "improper matrix: row {i} is entirely infinite"),
                (_, Some(j)) => write!(f, "improper matrix: column {j} is entirely infinite"),
                _ => write!(f, "improper matrix"),
            },
            Error::InfiniteEntry { row, col, context } => write!(
                f,
                "{context}: infinite entry at ({row},{col}); normalize and eliminate infinities first"
            ),
            Error::NotNormalized { context } => write!(
                f,
                "{context}: zero must be the minimum of every row and column; apply scale_normalize first"
            ),
            Error::BadVariable { var, num_vars } => {
                write!(f, "constraint references variable {var}, but the system has {num_vars} variables")
            }
            Error::IndexOutOfRange { what, value, min, max } => {
                write!(f, "{what} = {value} is outside [{min}, {max}]")
            }
            Error::NotAFactorization { context } => {
                write!(f, "{context}: supplied factors do not multiply to the target")
            }
            Error::NotGapAdmissible { detail } => {
                write!(f, "instance breakpoints violate the gap condition: {detail}")
            }
            Error::InvalidWitness { detail } => write!(f, "invalid splitting witness: {detail}"),
            Error::BadInstance { detail } => write!(f, "bad instance: {detail}"),
            Error::InstanceTooLarge { what, size, max } => {
                write!(f, "{what} too large for brute force: {size} > {max}")
            }
            Error::UnhandledPattern { detail } => write!(f, "unhandled-pattern: {detail}"),
            Error::Parse { line, column, detail } => {
                write!(f, "parse error at line {line}, column {column}: {detail}")
            }
            Error::Internal { detail } => write!(f, "internal error: {detail}"),
        }
    }
}

impl std::error::Error for Error {}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
