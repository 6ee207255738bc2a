//! Nominal algebra through presheaves on finite name sets: names and
//! injections, nominal values, truncated presheaves, uniform theories and
//! their finite models.

pub mod lambda;
pub mod model;
pub mod names;
pub mod nominal;
pub mod presheaf;
pub mod theory;

pub use names::{injection_factor, GeneratorStep, Injection, Name, NameError, NameSet, Permutation};
pub use nominal::NominalValue;
pub use presheaf::{
    apply_injection, delta, delta_with, nominal_to_presheaf, representable, validate_presheaf, Elem, FreshChoice,
    PresheafError, SetIScheme, TruncatedPresheaf, ValidationReport, Violation,
};
