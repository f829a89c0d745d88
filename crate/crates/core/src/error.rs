use hilbk3_exact::ExactError;
use hilbk3_numkernel::NumError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point is outside the upper half plane: {0}")]
    InvalidPoint(String),
    #[error("affine chart degenerates: |A(zeta)| = {0:e}")]
    DegenerateChart(f64),
    #[error("denominator {what} is numerically zero ({value:e})")]
    NearZeroDenominator { what: &'static str, value: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("Jacobian is singular and the residual is outside its range")]
    JacobianSingular,
    #[error("constraint system has nullity {nullity}, expected 1")]
    RankDeficient { nullity: usize },
    #[error("valuations ({0}, {1}, {2}) are not minimal")]
    NonMinimal(u32, u32, u32),
    #[error("no Kodaira type for valuations ({0}, {1}, {2})")]
    NoKodairaType(u32, u32, u32),
    #[error("parameters outside the admissible set: {0}")]
    OutsideDomain(String),
    #[error("sample hits a denominator of the substitution")]
    DegenerateSample,
    #[error("two reduction paths disagree for the jet u_{{{0},{1}}}")]
    InconsistentReduction(usize, usize),
    #[error("elimination failed: {0}")]
    EliminationFailed(String),
    #[error("no action convention explains generator {0}")]
    NoConventionMatches(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Num(#[from] NumError),
}

pub type Result<T> = std::result::Result<T, Error>;
