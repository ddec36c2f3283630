use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SftError {
    #[error("invalid presentation: {0}")]
    Presentation(String),
    #[error("a monomial may carry at most one excited letter")]
    DoubleExcitation,
    #[error("letter {0} cannot be excited")]
    NotExcitable(String),
    #[error("word is not cyclically composable")]
    NotCyclic,
    #[error("element is not in the expected space: {0}")]
    WrongSpace(String),
    #[error("wrong tensor type: {0}")]
    TensorType(String),
    #[error("index {index} out of range 1..={max}")]
    IndexRange { index: usize, max: usize },
    #[error("master equation fails: {0}")]
    MasterEquation(String),
    #[error("degree {0} is truncation-dirty at the requested cutoff")]
    DirtyDegree(i64),
    #[error("element is not a cycle")]
    NotACycle,
    #[error("basis too large ({size} > {cap}) in degree {degree}")]
    BasisTooLarge { degree: i64, size: usize, cap: usize },
    #[error("degree {0} lies outside the degree window of the complex")]
    OutsideWindow(i64),
    #[error("missing Hamiltonian component H {0} {1}")]
    MissingHamiltonian(usize, usize),
}
