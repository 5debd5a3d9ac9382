pub mod cyclic;
pub mod solver;
pub mod truncated;
pub mod verify;

pub use solver::{Mode, Outcome, Problem};
pub use truncated::{centralizer_brute, TruncatedGroup};
pub use verify::{
    exponent_check, verify_prop_4_2, verify_theorem_a, verify_theorem_b, Setup, VerifyOptions,
};
