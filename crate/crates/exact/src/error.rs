use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("variable {0:?} is not in the target ring")]
    IncompatibleVariables(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("the zero operator has no order")]
    ZeroOperator,
    #[error("irregular singular point at {point}")]
    IrregularSingular { point: String },
    #[error("indicial polynomial has the irreducible non-linear factor {factor}")]
    NonRationalRoot { factor: String },
}
