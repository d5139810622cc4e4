//! Z₂ topological invariants of time-reversal-invariant band insulators:
//! Pfaffian signs at fixed momenta, Stiefel–Whitney classes of the Pfaffian
//! line bundle, unoriented cobordism of its restrictions, the extended-TQFT
//! partition function, and lattice Berry-phase numerics.

pub mod linalg;
pub mod model;
pub mod momentum;
pub mod pfaffian;
pub mod cobordism;
pub mod invariants;
pub mod tqft;
