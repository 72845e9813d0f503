use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not symplectic: defect {defect:e}")]
    NotSymplectic { defect: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("crossing resolution failed: {0}")]
    Resolution(String),
    #[error("index unstable under perturbation halving: {first} vs {second} ({what})")]
    Stability { what: String, first: i64, second: i64 },
    #[error("mean index sources disagree: {a} vs {b}")]
    Consistency { a: f64, b: f64 },
    #[error("unsupported normal form: {0}")]
    UnsupportedNormalForm(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("hessian requested at the origin")]
    SingularPoint,
    #[error("point outside the dual domain: {0}")]
    DualDomain(String),
    #[error("integrator failure: {0}")]
    Integrator(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("dual action converged to the trivial loop")]
    TrivialSolution,
    #[error("rational semi-axis ratio r{j}^2/r{k}^2 = {p}/{q}: orbits come in families")]
    FamilyDegeneracy { j: usize, k: usize, p: i64, q: i64 },
    #[error("period ratio {0} is ambiguous")]
    Ambiguity(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("iteration table too shallow: need m_max >= {required}")]
    Depth { required: usize },
    #[error("ill-conditioned basis: condition number {0:e}")]
    Basis(f64),
    #[error("invalid critical type numbers: {0}")]
    CriticalType(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
