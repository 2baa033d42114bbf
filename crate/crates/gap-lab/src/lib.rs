//! The discrete gap sheet `G(x, y) = 2 L - L_2` and its analysis.

pub mod brownian;
pub mod dimension;
pub mod export;
pub mod minformula;
pub mod sheet;
pub mod slices;
pub mod zeros;

pub use brownian::{brownianity, BrownianityReport};
pub use dimension::{box_dimension, dyadic_scales, linear_fit, DimensionEstimate};
pub use minformula::{min_formula_residual, residual_row, ResidualRow};
pub use sheet::{gap_sheet_lattice, gap_sheet_poisson, gap_value_lattice, gap_value_poisson, GapSheet, LatticeGrid};
pub use slices::{slice_minima, MinimumKind, PlateauMinimum};
pub use zeros::{bow_tie_frequency, quadrant_isolated, zero_set, IsolationReport, Quadrant, ZeroSet};

#[derive(Debug, thiserror::Error)]
pub enum GapError {
    #[error(transparent)]
    Passage(#[from] passage_engine::PassageError),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("{0} is not a zero of the sheet")]
    NotAZero(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
