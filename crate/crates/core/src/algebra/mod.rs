pub mod dgca;
pub mod dgla;
pub mod poly;

pub use dgca::{ArtinAlgebra, Dgca, PolyForms};
pub use dgla::{Axiom, Dgla, DglaMorphism, TensorDgla, Violation};
pub use poly::PolyElement;
