//! Exact arithmetic for mutation-periodic quivers and the discrete
//! dynamical systems they generate: cluster exchange recurrences, Laurent
//! verification, tropical entropy classification, presymplectic and Poisson
//! structures, monodromy first integrals, and Lax pair checks.

pub mod algebra;
pub mod dynamics;
pub mod fixtures;
pub mod integrals;
pub mod linalg;
pub mod poisson;
pub mod quiver;
pub mod sample;
pub mod tropical;

pub use algebra::{AlgebraError, LaurentPoly, Monomial, Rational};
pub use dynamics::{
    exchange_step, iterate, iterate_period2, iterate_symbolic, recurrence_from_quiver,
    verify_laurent, DynamicsError, LaurentReport, Orbit, PairOrbit, Period2Spec, RecurrenceSpec,
    ResourceCaps, SymbolicOrbit,
};
pub use quiver::{
    build_period1, build_period2, decompose_period1, detect_period, exceptional_period2, mutate,
    primitive, rotate, PalindromicTuple, PrimitiveDecomposition, QuiverError, QuiverMatrix,
};
pub use tropical::{classify_entropy, growth_fit, tropical_degrees, EntropyClass, GrowthFit};
