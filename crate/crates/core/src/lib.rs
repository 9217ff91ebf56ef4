//! Guesswork moments and exponents for brute-force attacks with side
//! information.
//!
//! The crate computes exact finite-length moments `E[G(X|Y)^ρ]` by enumeration
//! or by type counting, asymptotic exponents in closed form or by numerical
//! optimization, seeded Monte Carlo estimates for larger lengths, and a toy
//! password-reuse experiment. Everything is in bits unless a [`LogBase`] says
//! otherwise.

// Parameter guards are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod error;
pub mod exponents;
pub mod info;
pub mod numeric;
pub mod optimize;
pub mod oracle;
pub mod order;
pub mod rank;
pub mod sim;
pub mod toy;

pub use error::{Error, Result};
pub use exponents::{ExponentMethod, ExponentQuery, ExponentResult, Maximizer, Model, TiltedSolution};
pub use info::{bec, bsc, product_channel, Alphabet, Channel, ChannelModel, JointDistribution, LogBase, Pmf};
pub use oracle::{GuessOrder, MomentReport, OracleConfig};
pub use rank::{ConditionalType, ExactRank, RankEngine};
pub use sim::{SimulationSummary, TrialRecord};
pub use toy::{PasswordCorpus, PooledPattern, SuccessCurve};
