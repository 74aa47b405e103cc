//! Hit-and-run random walks on finite groups.
//!
//! A hit-and-run walk picks one generator `s_i` of a tuple `(s_1..s_k)`
//! uniformly and then moves by a uniform power of it. This crate builds
//! those measures exactly, evolves their distributions, computes spectra,
//! and checks the closed forms for the card-shuffling examples, chiefly
//! hit-and-run top-to-random.
//!
//! Permutations are position maps (`images[p]` is where position `p` goes)
//! and products read left to right: `a.compose(b)` applies `a` first. The
//! walk steps by right multiplication, so `M(x,y) = μ(x⁻¹y)`.

pub mod error;
pub mod group;
pub mod lumping;
pub mod markov;
pub mod measure;
pub mod numeric;
pub mod single_card;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use group::{
    CyclicPower, CyclicVector, FiniteGroup, GeneratingTuple, GroupDescriptor, Permutation,
    SymmetricGroup,
};
pub use markov::{DistanceCurve, Distances, Kernel};
pub use measure::GroupMeasure;
pub use spectral::SpectralReport;
