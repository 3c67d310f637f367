//! Center of twisted group algebras of finite abelian groups.
//!
//! A 2-cocycle on `G ≅ ⊕_p G_p` is summarized by its commutator pairing on
//! generators, one [`PairingMatrix`] per prime. The center of the twisted
//! group algebra is trivial exactly when no non-identity element commutes
//! with every generator; [`center::analyze`] decides this by a block
//! criterion, by solving a linear system over `Z/p^{n_1}`, and (for small
//! groups) by enumeration, and insists that the answers agree.

pub mod center;
pub mod cli;
pub mod cocycle;
pub mod error;
pub mod matrix;
pub mod pairing;
pub mod ring;
pub mod shape;
pub mod solver;

pub use center::{analyze, tensor_combine, AnalyzeOptions, CenterReport, Method, OracleMode};
pub use cocycle::CocycleTable;
pub use error::{Error, Result};
pub use matrix::ModMatrix;
pub use pairing::{NormalizedMatrix, PairingMatrix};
pub use ring::{Modulus, Residue};
pub use shape::{GroupElement, LiftedElement, PGroupShape};
