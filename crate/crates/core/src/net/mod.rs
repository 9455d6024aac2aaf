//! RePU networks, their evaluation, and the exact gadgets used by the builders.

pub mod circuit;
pub mod gadgets;
pub mod network;
mod poly;

pub use circuit::{Affine, Circuit, Signal};
pub use gadgets::{
    identity_carry, identity_net, product_net, square_net, squaring_chain, t1_net, t2_net, ChainKind, Lemma2Constants,
};
pub use network::{repu, repu_derivative, ComplexityReport, Gradients, Layer, RepuNetwork};
