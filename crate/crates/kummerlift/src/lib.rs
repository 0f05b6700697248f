//! Exact-arithmetic lattice criteria for lifting derived equivalences of
//! abelian surfaces to generalized Kummer varieties.
//!
//! Everything here is integral or rational and every verdict is exact: the
//! crate decides divisibility and lattice-membership questions about the
//! hyperbolic lattice `H^1(A,Z) (+) H^1(A^,Z)` of an abelian surface, the
//! equivariant isometry groups attached to an isogeny, and the transport of
//! isometries along the kernel-of-summation construction. Failed checks come
//! with rational witnesses that can be re-verified independently.
//!
//! The runnable examples are the best entry points:
//!
//! - `snf_basics` — Smith normal form, lattice membership, finite quotients
//! - `torus_isogenies` — tori, duals, isogenies, kernels, torsion
//! - `mukai_isometries` — the hyperbolic lattice, isometry/Hodge/hat checks
//! - `lifting_criterion` — equivariant membership and the lifting criterion
//! - `kummer_pipeline` — diagonal embedding, transport, splitting
//! - `pd_square` — graded duality maps and the commuting square
//!
//! Each runs with `cargo run --example <name>`. The `kummerlift` binary is a
//! batch front end over JSON problem documents; see the repository README.

pub mod cli;
pub mod cohomology;
pub mod error;
pub mod kummer;
pub mod lift;
pub mod matrix;
pub mod mukai;
pub mod sampling;
pub mod snf;
pub mod torus;

pub use error::{Error, Result};
pub use matrix::RatMatrix;
pub use mukai::{BlockIso, MukaiSpace, SymplecticMap, EPSILON_DOUBLE_DUAL};
pub use snf::{FiniteAbelianGroup, SnfDecomposition};
pub use torus::{ComplexTorus, TorsionPoint, TorusHom};
