//! Finite algebras for uniform theories: satisfaction, abstraction and the
//! HSP constructions.

pub mod abstraction;
pub mod algebra;
pub mod file;
pub mod hsp;
pub mod sweep;

pub use abstraction::{
    abstract_algebra, abstract_algebra_with, abstraction_name, check_abstraction_equivalence,
    check_abstraction_equivalence_with, AbstractionCheck,
};
pub use algebra::{
    satisfies, satisfies_equation, satisfies_implication, EopFailure, FiniteAlgebra, Interp, ModelError, Verdict,
    Witness,
};
pub use file::{InterpEntry, ModelFile};
pub use hsp::{
    generated_set, hom_image, identity_map, product_algebra, quotient, subalgebra_generated, SortedMap, SortedSet,
};
pub use sweep::{enumerate_algebras, enumerate_presheaves};
