//! Alphabets, distributions, channels and the information measures used by
//! every other module.

mod channels;
mod measures;
mod types;

pub use channels::{
    bec, bsc, output_marginal, posterior, product_channel, product_channel_capped, tuple_digits,
    tuple_index, ChannelModel, DEFAULT_PRODUCT_CAP, ERASURE,
};
pub use measures::{
    binary_divergence, binary_entropy, binary_renyi, conditional_entropy, entropy, kl_divergence,
    renyi_entropy, weighted_kl, RENYI_SHANNON_BAND,
};
pub(crate) use measures::{entropy_bits, renyi_bits};
pub use types::{Alphabet, Channel, JointDistribution, LogBase, Pmf, PROB_TOL};
