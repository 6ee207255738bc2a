//! Uniform signatures and equations, their translation into ordinary
//! many-sorted equations, and a text format for theories.

pub mod dsl;
pub mod eop;
pub mod frontend;
pub mod signature;
pub mod term;
pub mod translate;

pub use dsl::{parse_theory, render_equation, render_theory, ParseError, Theory};
pub use eop::{gen_equivariance_equations, EopInstance};
pub use frontend::{frontend_nominal_judgment, FrontendConfig, FrontendError, Judgment, NominalTerm};
pub use signature::{
    check_uniform_signature, Family, OpSymbol, SignatureError, SignatureIssue, SignatureReport, SortAtom, SortExpr,
    SymbolId, UniformSignature,
};
pub use term::{
    canonical_equation, canonically_equal, freshness_set, typecheck_term, Equation, Implication, Term, TermError,
    UaEquation, VarName,
};
pub use translate::{
    translate_by_name, translate_by_set, translate_implication, translate_in_order, translation_family, TranslateError,
};
