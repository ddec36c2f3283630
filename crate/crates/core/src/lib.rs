//! Exact computations with cyclic tensors over a Legendrian DGA: the rational
//! Hamiltonian, master equations, the homology of M^cyc and of the balanced
//! space, and the products and BV operator on them.

pub mod algebra_core;
pub mod cyclic_spaces;
pub mod differentials;
pub mod error;
pub mod homology_engine;
pub mod invariant_ops;
pub mod sft_operations;

pub use algebra_core::{pretty, q, q_frac, sign_q, Chord, Element, Letter, MonoKey, Monomial, Presentation, RawLetter, Space, Variant, Q};
pub use error::SftError;
