use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter {name}: {detail}")]
    Parameter { name: &'static str, detail: String },
    #[error("explicit matrix has ragged rows")]
    Ragged,
    #[error("ordered quad needs start.t < end.t, got {start} and {end}")]
    Unordered { start: f64, end: f64 },
    #[error("non-finite coordinate")]
    NonFinite,
}
