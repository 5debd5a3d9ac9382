//! Virtual-endomorphism data for free abelian groups and the self-similar
//! representations they induce.

pub mod data;
pub mod family;
pub mod lattice;

pub use data::{CoreVerdict, GDataSpec, OrbitData, Tri};
pub use family::{
    delta_invariance_check, independence_check, theorem_c_family, IndexMapFamily, Variant,
};
pub use lattice::Lattice;
