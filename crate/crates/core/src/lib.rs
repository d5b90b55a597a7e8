//! Subtractive bases with small sumsets.
//!
//! For a finite abelian group `W` and any map `f: W → W`, the set
//! `A(W, f) = {w + f(w)} ∪ {f(w)}` always satisfies `A − A = W`. This crate
//! builds groups and maps for which the `h`-fold sumset `hA` is nevertheless a
//! small fraction of `W`, and checks every step with exact arithmetic.
//!
//! - [`modarith`]: direct sums of `Z/mZ` and `F_p^d`, mixed-radix indexing, CRT.
//! - [`setops`]: bitset sumsets, difference sets, linear-form images, integer MSTD sets.
//! - [`construction`]: ε schedules, the initial group `W_1`, admissible pairs,
//!   level sets and the (restricted) inductive step.
//! - [`verify`]: certificates for each identity and inequality of the construction.
//! - [`search`]: exhaustive and hill-climbing search over subsets of `Z/pZ`.

pub mod construction;
pub mod error;
pub mod limits;
pub mod modarith;
pub mod rational;
pub mod search;
pub mod setops;
pub mod verify;

pub use error::{Error, Result};
pub use limits::{Limits, DEFAULT_PAIR_BUDGET, MAX_GROUP_CAP};
pub use modarith::{crt_isomorphism, CrtIsomorphism, Element, GroupSpec, ModuleSpec};
pub use rational::Rational;
pub use setops::{
    density, difference_set, h_fold_sumset, is_subtractive_basis, linear_form_image, sumset,
    GroupSet, IntSet, LinearForm,
};
