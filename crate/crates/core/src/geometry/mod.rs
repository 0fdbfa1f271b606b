//! Finite-field geometry for the doubling integral: classical groups, the doubled space,
//! `P \ H / (G x G)` double cosets and the characters `psi` on `N_bullet`.

pub mod matrix;
pub mod groups;
pub mod doubling;
pub mod orbits;
pub mod whittaker;

pub use doubling::{DoubledSpace, DoublingContext, IsotropicFlag, NBullet, OmegaClass, OmegaClassification};
pub use groups::{build_group, FormedSpace, GroupSummary, MatrixGroup};
pub use matrix::FqMatrix;
pub use orbits::{enumerate_double_cosets, DoubleCosetReport, EnumerationOptions, OrbitClass, OrbitRecord};
pub use whittaker::{whittaker_pair_classify, WhittakerClass, WhittakerPair};

use crate::field::FieldError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("matrix is not in the group")]
    NotInGroup,
    #[error("element does not lie in the unipotent radical of the flag")]
    NotUnipotentInFlag,
    #[error("state space has {states} elements, limit is {limit}")]
    TooLarge { states: u128, limit: u128 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}
