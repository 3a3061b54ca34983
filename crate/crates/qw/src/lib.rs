//! Free algebras on a polynomial signature subject to image-preserving
//! equations, computed at finite scale.
//!
//! A signature ([`Polynomial`]) lists constructors with finite arities; an
//! image-preserving [`Equation`] relates two constructor applications whose
//! variable maps have equal image. The quotient of the free term algebra by
//! such equations is computed stage by stage ([`StageFamily`]): stage k+1
//! quotients the applications over stage k, every class carries a
//! well-defined child image set, a rank, and a stable id, and equality of
//! terms is decided by canonicalizing into the stages.
//!
//! Two rule families have fast canonical forms: sorted child multisets for
//! unordered trees ([`canon_multiset`]) and hereditarily finite sets for
//! the family of all image-preserving equations ([`canon_extensional`],
//! [`HfStore`]). Finite algebras ([`FiniteAlgebra`]) support satisfaction
//! checks and the fold (the unique homomorphism out of the quotient), and
//! the ordinal toolbox provides order types, the Cantor pairing, and the
//! canonical rank surjections.
//!
//! Runnable walkthroughs live in `examples/`; the `qw` binary exposes the
//! same operations as subcommands.

pub mod algebra;
pub mod canonical;
pub mod cli;
mod error;
pub mod hered;
pub mod ordinal;
pub mod signature;
pub mod stages;
pub mod term;

pub use algebra::{
    check_satisfies, check_satisfies_rules, count_homomorphisms, fold, is_homomorphism,
    ordered_to_unordered, random_satisfying_algebras, stage_respects_equations, FiniteAlgebra,
    SatCheck, SatViolation, UnorderedReport,
};
pub use canonical::{
    canon_extensional, canon_multiset, crosscheck, CanonicalTree, CrosscheckReport,
};
pub use error::{Error, Result};
pub use hered::{approx_fold, check_ip_algebra, hf_fold, ApproxValue, HfId, HfStore};
pub use ordinal::{
    aleph, cantor_pair, cantor_unpair, f_surjection, omega_tuple_code, omega_tuple_decode, FTable,
    FiniteOrdinalSet,
};
pub use signature::{
    expand_family, load_signature, parse_signature, CtorId, Equation, Family, Polynomial, RuleKind,
    RuleSet,
};
pub use stages::{Caps, ClassId, Node, StageFamily};
pub use term::{TermId, TermStore};
