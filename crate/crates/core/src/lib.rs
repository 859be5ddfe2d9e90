//! Truncated Witt vectors, de Rham complexes of presented `F_p`-algebras,
//! finite Dieudonné-complex models, and certificates that the top
//! differential form of a proper quotient ring dies in the first saturated
//! de Rham–Witt quotient.

pub mod modarith;
pub mod polyring;
pub mod wittvec;
pub mod derham;
pub mod dieudonne;
pub mod vanish;
