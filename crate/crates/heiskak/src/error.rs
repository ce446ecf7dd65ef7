use crate::hgroup::HPoint;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("balls {i} and {j} overlap: centers {a:?} and {b:?} at Euclidean distance {dist:.6e} < {min:.6e}")]
    BallOverlap {
        i: usize,
        j: usize,
        a: HPoint,
        b: HPoint,
        dist: f64,
        min: f64,
    },
    #[error("weight at index {index} is {value}, must be positive and finite")]
    BadWeight { index: usize, value: f64 },
    #[error("{0}")]
    BadParameter(String),
    #[error("centers/weights length mismatch: {centers} centers, {weights} weights")]
    LengthMismatch { centers: usize, weights: usize },
    #[error("point {0:?} is not on the vertical plane: horizontal component {1:.3e} exceeds tolerance")]
    NotOnPlane(HPoint, f64),
    #[error("IFS translates {i} and {j} violate separation: Koranyi distance {dist:.6e} < {min:.6e}")]
    IfsSeparation {
        i: usize,
        j: usize,
        dist: f64,
        min: f64,
    },
    #[error("operation requires a {expected} incidence point, got {got}")]
    WrongClass {
        expected: &'static str,
        got: &'static str,
    },
    #[error("measure file parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
