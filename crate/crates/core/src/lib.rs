//! Exact computations in the algebraic models of rational cofree and free
//! equivariant spectra.
//!
//! Objects are graded modules and bounded complexes of graded free modules
//! over `A = Q[y_1, ..., y_r]` (generators in positive even degrees), and
//! every infinite object is handled one internal degree at a time, inside an
//! explicit window, with a certificate saying which degrees are exact.
//!
//! The main entry points:
//!
//! * [`complex::FreeComplex`] with tensor, Hom, cone and windowed homology;
//! * [`koszul`] for the unstable Koszul complexes and their towers;
//! * [`duality`] for local cohomology `Γ_I`, localization `−[I⁻¹]` and
//!   derived completion `Λ^I`;
//! * [`resolution`] for minimal free resolutions, Ext and the Adams E₂ page;
//! * [`catalog`] for connected compact Lie groups and finite loop spaces.

pub mod catalog;
pub mod complex;
pub mod duality;
pub mod format;
pub mod koszul;
pub mod linalg;
pub mod module;
pub mod resolution;
pub mod ring;
pub mod tower;
pub mod verify;

mod error;

pub use error::Error;

pub use complex::{ChainMap, DegreeWindow, FreeComplex, WindowedHomology};
pub use linalg::{Rational, SparseMatrix};
pub use module::GradedModulePresentation;
pub use ring::{GradedPolynomialRing, Monomial, Polynomial};

#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $file:literal) => {
            #[doc = include_str!(concat!("../../../book/src/", $file))]
            mod $name {}
        };
    }
    chapter!(intro, "introduction.md");
    chapter!(grading, "grading.md");
    chapter!(complexes, "complexes.md");
    chapter!(local_duality, "local_duality.md");
    chapter!(adams, "adams.md");
    chapter!(catalog, "catalog.md");
    chapter!(file_format, "file_format.md");
}
