//! Exact computation of minimal generating sets for algebras of joint
//! SL2-invariants and semi-invariants of binary forms, equivalently for
//! kernels of Weitzenböck derivations.
//!
//! All arithmetic is exact. Polynomials and elimination are generic over
//! [`Field`]; the rationals give results, a 61-bit prime field gives fast
//! rank certificates.

pub mod derivation;
pub mod error;
pub mod form;
pub mod genset;
pub mod linalg;
pub mod monomial;
pub mod polynomial;
pub mod repdim;
pub mod scalar;

pub use derivation::{Cell, CellBasis, DerivationSpec, InvarianceReport};
pub use error::{Error, Result};
pub use form::{ComponentKey, FormSpec, Multidegree, Variable};
pub use genset::{
    minimal_generating_set, verify_generating_set, GenOptions, GeneratingSet, GeneratorRecord,
    RunMode, RunStrategy,
};
pub use monomial::Monomial;
pub use polynomial::Polynomial;
pub use repdim::{Mode, RationalForm, UnivariateSeries};
pub use scalar::{Field, ModP};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
/// Polynomials with exact rational coefficients.
pub type QPolynomial = Polynomial<Rational>;
/// Polynomials over the 61-bit prime field.
pub type FpPolynomial = Polynomial<ModP>;
