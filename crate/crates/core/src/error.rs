use alloc::string::String;

use crate::expr::ParseError;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error in {op} at argument {arg}")]
    Domain { op: &'static str, arg: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("singular leading coefficient at x = {x}")]
    SingularCoefficient { x: f64 },

    #[error("step size underflow at x = {x} (h = {h:e})")]
    StepUnderflow { x: f64, h: f64 },

    #[error("integration exceeded {steps} steps at x = {x}")]
    TooManySteps { x: f64, steps: usize },

    #[error("evaluation domain is empty: {0}")]
    EmptyDomain(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}
