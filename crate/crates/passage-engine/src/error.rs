use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PassageError {
    #[error("endpoint {0} lies outside the environment")]
    Outside(String),
    #[error("no directed path from {from} to {to}")]
    NotConnectable { from: String, to: String },
    #[error("pair endpoints must share a time and be ordered left to right: {0}")]
    BadPair(String),
    #[error("chains end at different points")]
    DifferentTerminals,
    #[error("uncrossing did not settle after {0} swaps")]
    Uncross(usize),
}
