//! Exact-arithmetic invariants of cyclic and abelian covers of the
//! projective line: signatures, Frobenius orbits, mu-ordinary Newton
//! polygons, Ekedahl-Oort words, Hasse-Witt matrices and ordinariness
//! certification.

pub mod arith;
pub mod curve;
pub mod eo;
pub mod field;
pub mod hw;
pub mod linalg;
pub mod monodromy;
pub mod newton;
pub mod poly;
