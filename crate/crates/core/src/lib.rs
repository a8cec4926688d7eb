//! Exact computations on Hochschild cochains of Poly(V) x G: the twisted
//! cocycles, the quasi-isomorphisms to multivector sections, brackets,
//! noncommutative Poisson structures and symplectic reflection algebras.

pub mod cochain;
pub mod crossed;
pub mod error;
pub mod group;
pub mod linear;
pub mod multivector;
pub mod poly;
pub mod poisson;
pub mod quasi_iso;
pub mod scalar;
pub mod section;
pub mod sra;

pub use cochain::{Cochain, Domain, PolyDiffTerm, TwistedCocycle};
pub use crossed::CrossedElement;
pub use error::{Error, Result};
pub use group::{FixedPointData, GroupActionContext};
pub use linear::Mat;
pub use multivector::Multivector;
pub use poly::Poly;
pub use scalar::Cyc;
pub use section::MultivectorSection;
