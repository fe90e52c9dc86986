//! Combinatorics of extended affine Weyl groups behind basic loci of
//! Rapoport-Zink spaces: admissible sets, sigma-supports, critical indices,
//! partial conjugation and fiber degrees, plus verdict engines that check the
//! classification of dimension-zero, discrete-fiber and maximal-dimension cases.

pub mod admissible;
pub mod alcove;
pub mod classification;
pub mod error;
pub mod fibers;
pub mod fm;
pub mod frobenius;
pub mod hermitian;
pub mod par;
pub mod poly;
pub mod weyl;

pub use admissible::{AdmissibleSet, Budget, Ctx};
pub use error::{Error, Result};
pub use frobenius::{Datum, DiagramMap};
pub use par::Exec;
pub use weyl::{AffineWeyl, Component, Elem, Family, NodeSet};
