//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("matrix is singular")]
    Singular,

    #[error("cannot parse rational from {0:?}")]
    RationalParse(String),

    #[error("matrix has non-integer entries")]
    NonIntegral,

    #[error("invalid complex structure: {0}")]
    ComplexStructure(String),

    #[error("matrix does not intertwine the complex structures: {0}")]
    NotHolomorphic(String),

    #[error("not an isogeny: {0}")]
    NotIsogeny(String),

    #[error("sublattice is not contained in the ambient lattice")]
    NotSublattice,

    #[error("lattice basis is rank-deficient")]
    RankDeficient,

    #[error("map is not symplectic")]
    NotSymplectic,

    #[error("map is not an isometry")]
    NotIsometry,

    #[error("map does not preserve the Hodge structure")]
    NotHodge,

    #[error("map is not a member of the equivariant isometry group")]
    NotMember,

    #[error("incompatible spaces: {0}")]
    SpaceMismatch(String),

    #[error("unsupported dimension: {0}")]
    Dimension(String),

    #[error("torsion point lives on the wrong torus")]
    WrongTorus,

    #[error("unresolved label {0:?}")]
    Label(String),

    #[error("document error: {0}")]
    Document(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
