use thiserror::Error;

/// Syntax-level failure while reading a scalar expression.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("column {column}: {kind}")]
pub struct ParseError {
    /// 1-based character column in the expression text.
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("unexpected character '{0}'")]
    UnexpectedChar(char),
    #[error("unexpected {0}")]
    UnexpectedToken(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown identifier {0}")]
    UnknownIdentifier(String),
    #[error("function {name} expects 1 argument, got {got}")]
    Arity { name: String, got: usize },
    #[error("invalid number literal '{0}'")]
    BadNumber(String),
}

/// Failure while reading a manifold definition document.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ManifoldError {
    #[error("line {line}: {source}")]
    Expr { line: usize, source: ParseError },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("missing section: {0}")]
    Missing(&'static str),
    #[error("diagonal metric entry required: g[{0}][{0}]")]
    MissingDiagonal(usize),
    #[error("line {line}: duplicate key {key}")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: index {index} out of range for dimension {dim}")]
    IndexRange { line: usize, index: usize, dim: usize },
    #[error("invalid chart: {0}")]
    Chart(String),
}

/// Pointwise evaluation failure of an expression.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero in {0}")]
    DivisionByZero(String),
    #[error("{func} outside its domain at argument {arg} in {expr}")]
    Domain { func: &'static str, arg: f64, expr: String },
    #[error("non-positive base {base} for a non-integer power in {expr}")]
    PowerBase { base: f64, expr: String },
    #[error("point has {got} coordinates, chart dimension is {expected}")]
    PointDimension { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("point {point:?} violates domain constraint {constraint} > 0")]
    OutsideDomain { point: Vec<f64>, constraint: String },
    #[error("metric is not positive definite at {0:?}")]
    NotPositiveDefinite(Vec<f64>),
    #[error("metric is singular at {point:?} (det = {det:e})")]
    SingularMetric { point: Vec<f64>, det: f64 },
    #[error("{what} requires jet order {needed}, have {have}")]
    InsufficientOrder { what: &'static str, needed: u8, have: u8 },
    #[error("{op} requires dimension n >= 3 (chart has n = {n})")]
    Dimension { op: &'static str, n: usize },
    #[error("potential vector field vanishes at {0:?}")]
    VanishingField(Vec<f64>),
    #[error("precondition not met: {0}")]
    Precondition(String),
    #[error("rank-deficient linear system in {0}")]
    RankDeficient(&'static str),
    #[error("unknown catalogue manifold '{0}'")]
    UnknownManifold(String),
    #[error("invalid sampling request: {0}")]
    Sampling(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
