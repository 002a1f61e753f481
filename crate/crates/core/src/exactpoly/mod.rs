//! Exact polynomial arithmetic and the identity registry.

mod coef;
pub mod mpoly;
pub mod ratfn;
pub mod registry;
pub mod symbolic;

pub use mpoly::{MPoly, Var};
pub use ratfn::RationalFn;
pub use registry::{check_identity, identity_cases, identity_forms, verify_identity, Bounds, IdentityId, IdentityRecord, Status};
pub use symbolic::{poch_sym, qbinom_poly, qbinom_rf, qbracket_sym, sym_family, SymFamily};
